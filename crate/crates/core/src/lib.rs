//! Rigorous numerics for real trigonometric polynomials on flat tori.
//!
//! * [`trigpoly`]: representation, error-tracked evaluation, classification.
//! * [`symmetry`]: exact certificates for translations with `f(x+u) = -f(x)`.
//! * [`certify`]: grid sweeps that certify lower bounds on sign volumes.
//! * [`analysis`]: exact odd moments and distribution diagnostics.

pub mod analysis;
pub mod certify;
pub mod error;
pub mod exact;
pub mod grid;
pub mod manifest;
pub mod symmetry;
pub mod trigpoly;

pub use error::{Error, Result};
pub use trigpoly::TrigPolynomial;
