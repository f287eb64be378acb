//! Empirical value distribution of a polynomial over a uniform grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, GridEvaluator, GridOffset, GridSpec};
use crate::trigpoly::TrigPolynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges, symmetric about zero.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpRatio {
    pub p: f64,
    /// `(int_{f>0} |f|^p / int_{f<0} |f|^p)^(1/p)`.
    pub ratio: f64,
    pub positive_integral: f64,
    pub negative_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub grid_log2: u32,
    pub samples: u64,
    pub histogram: Histogram,
    /// `sup_{s>0} |F(s) + F(-s) - 1|` over positive bin edges, `F(s) = #{f < s}/samples`.
    pub edf_symmetry: f64,
    pub positive_count: u64,
    pub negative_count: u64,
    pub zero_count: u64,
    /// `vol{f>0} / vol{f<0}`; `None` when no negative sample was seen.
    pub sign_ratio: Option<f64>,
    pub lp_ratios: Vec<LpRatio>,
    /// `(max, min)` over the samples.
    pub extrema: (f64, f64),
}

impl DistributionEstimate {
    /// `vol{f<0} / vol{f>0}`.
    pub fn inverse_sign_ratio(&self) -> Option<f64> {
        (self.positive_count > 0).then(|| self.negative_count as f64 / self.positive_count as f64)
    }
}

#[derive(Debug, Clone)]
struct Partial {
    counts: Vec<u64>,
    pos: u64,
    neg: u64,
    zero: u64,
    pos_int: Vec<f64>,
    neg_int: Vec<f64>,
    max: f64,
    min: f64,
}

/// Histogram, EDF symmetry, sign ratio, `L^p` ratios and extrema from one sweep
/// over the cell centers of the `2^grid_log2` grid.
pub fn distribution(
    f: &TrigPolynomial,
    grid_log2: u32,
    bins: usize,
    p_list: &[f64],
    threads: Option<usize>,
) -> Result<DistributionEstimate> {
    if bins == 0 || !bins.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("bin count {bins} must be positive and even")));
    }
    if p_list.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidConfig("exponents p must be positive".into()));
    }
    let spec = GridSpec::new(f.dim(), grid_log2, GridOffset::Half)?;
    let eval = GridEvaluator::new(f, spec)?;
    let upper = f.sup_bound();
    let width = 2.0 * upper / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| -upper + i as f64 * width).collect();

    let partials = grid::sweep_chunks(&eval, threads, |ev, start, end| {
        let mut part = Partial {
            counts: vec![0; bins],
            pos: 0,
            neg: 0,
            zero: 0,
            pos_int: vec![0.0; p_list.len()],
            neg_int: vec![0.0; p_list.len()],
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
        };
        ev.for_each_in_range(start, end, |_, enc| {
            let v = enc.value;
            let bin = (((v + upper) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
            part.counts[bin] += 1;
            let a = v.abs();
            if v > 0.0 {
                part.pos += 1;
                for (acc, p) in part.pos_int.iter_mut().zip(p_list) {
                    *acc += a.powf(*p);
                }
            } else if v < 0.0 {
                part.neg += 1;
                for (acc, p) in part.neg_int.iter_mut().zip(p_list) {
                    *acc += a.powf(*p);
                }
            } else {
                part.zero += 1;
            }
            finish_extrema(&mut part.max, &mut part.min, v);
        });
        part
    })?;

    let mut counts = vec![0u64; bins];
    let (mut pos, mut neg, mut zero) = (0u64, 0u64, 0u64);
    let mut pos_int = vec![0.0; p_list.len()];
    let mut neg_int = vec![0.0; p_list.len()];
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for part in partials {
        for (c, pc) in counts.iter_mut().zip(&part.counts) {
            *c += pc;
        }
        pos += part.pos;
        neg += part.neg;
        zero += part.zero;
        for (a, b) in pos_int.iter_mut().zip(&part.pos_int) {
            *a += b;
        }
        for (a, b) in neg_int.iter_mut().zip(&part.neg_int) {
            *a += b;
        }
        max = max.max(part.max);
        min = min.min(part.min);
    }

    let samples = spec.total_points();
    let n = samples as f64;
    let mut cumulative = vec![0u64; bins + 1];
    for i in 0..bins {
        cumulative[i + 1] = cumulative[i] + counts[i];
    }
    let half = bins / 2;
    let edf_symmetry = (half + 1..=bins)
        .map(|i| {
            let f_pos = cumulative[i] as f64 / n;
            let f_neg = cumulative[bins - i] as f64 / n;
            (f_pos + f_neg - 1.0).abs()
        })
        .fold(0.0, f64::max);

    let lp_ratios = p_list
        .iter()
        .zip(pos_int.iter().zip(&neg_int))
        .map(|(&p, (&pi, &ni))| {
            let positive_integral = pi / n;
            let negative_integral = ni / n;
            LpRatio { p, ratio: (positive_integral / negative_integral).powf(1.0 / p), positive_integral, negative_integral }
        })
        .collect();

    Ok(DistributionEstimate {
        grid_log2,
        samples,
        histogram: Histogram { edges, counts },
        edf_symmetry,
        positive_count: pos,
        negative_count: neg,
        zero_count: zero,
        sign_ratio: (neg > 0).then(|| pos as f64 / neg as f64),
        lp_ratios,
        extrema: (max, min),
    })
}

#[inline(always)]
fn finish_extrema(max: &mut f64, min: &mut f64, v: f64) {
    if v > *max {
        *max = v;
    }
    if v < *min {
        *min = v;
    }
}

/// Grid estimate of `int |f|^(2k) sign(f)` over the cell centers (not certified).
pub fn signed_even_moment(f: &TrigPolynomial, k: u32, grid_log2: u32, threads: Option<usize>) -> Result<f64> {
    let spec = GridSpec::new(f.dim(), grid_log2, GridOffset::Half)?;
    let eval = GridEvaluator::new(f, spec)?;
    let power = 2 * k as i32;
    let partial = grid::sweep_chunks(&eval, threads, |ev, start, end| {
        let mut s = 0.0;
        ev.for_each_in_range(start, end, |_, enc| {
            let v = enc.value;
            if v != 0.0 {
                s += v.abs().powi(power) * v.signum();
            }
        });
        s
    })?;
    Ok(partial.iter().sum::<f64>() / spec.total_points() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_cosine_is_exactly_symmetric() {
        let f = TrigPolynomial::from_f64_terms(2, &[(vec![1, 1], 0.0, 1.0)]).unwrap();
        let d = distribution(&f, 8, 40, &[1.0, 2.0, 4.0], None).unwrap();
        assert_eq!(d.sign_ratio, Some(1.0));
        assert_eq!(d.extrema, (1.0, -1.0));
        assert_eq!(d.histogram.counts.iter().sum::<u64>(), d.samples);
        for r in &d.lp_ratios {
            assert!((r.ratio - 1.0).abs() < 1e-12, "{r:?}");
        }
        assert!(d.edf_symmetry < 1e-12);
    }

    #[test]
    fn rejects_odd_bins() {
        let f = TrigPolynomial::from_f64_terms(1, &[(vec![1], 1.0, 0.0)]).unwrap();
        assert!(distribution(&f, 4, 3, &[1.0], None).is_err());
        assert!(distribution(&f, 4, 4, &[-1.0], None).is_err());
    }

    #[test]
    fn sine_signed_moments_vanish() {
        let f = TrigPolynomial::from_f64_terms(1, &[(vec![1], 1.0, 0.0)]).unwrap();
        for k in 0..4 {
            assert!(signed_even_moment(&f, k, 10, None).unwrap().abs() < 1e-14);
        }
    }
}
