//! Odd moments and value-distribution diagnostics.

pub mod distribution;
pub mod moments;

pub use distribution::{distribution, signed_even_moment, DistributionEstimate, Histogram, LpRatio};
pub use moments::{
    odd_moment_exact, odd_moment_exact_with, odd_moment_quadrature, Combination, MomentMethod, MomentReport,
    MomentValue,
};
