//! Error-tracked double-precision evaluation.
//!
//! Every quantity carries an absolute error bound derived from the standard
//! model `fl(a op b) = (a op b)(1 + d)`, `|d| <= u`, for round-to-nearest
//! binary64, plus a stated accuracy assumption on the sine and cosine kernels.

use serde::{Deserialize, Serialize};

/// Unit roundoff for binary64, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Bound on `|TAU_f64 - 2*pi|`; the true gap is about `2.449e-16`.
pub const TAU_ABS_ERR: f64 = 2.5e-16;

/// Upper bound for `2*pi` used when scaling phase errors.
const TWO_PI_UP: f64 = std::f64::consts::TAU + 4.0 * TAU_ABS_ERR;

/// Assumed accuracy of `f64::sin`/`f64::cos` on reduced arguments `|x| <= pi`,
/// in units in the last place of the result.
pub const TRIG_KERNEL_ULPS: f64 = 2.0;

/// Absolute slack covering underflow in products and the kernel.
const TINY: f64 = 1e-300;

/// A double together with a rigorous bound on its distance to the exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub value: f64,
    pub err: f64,
}

impl Enclosure {
    pub fn contains(&self, exact: f64) -> bool {
        (exact - self.value).abs() <= self.err
    }

    pub fn lower(&self) -> f64 {
        self.value - self.err
    }

    pub fn upper(&self) -> f64 {
        self.value + self.err
    }
}

/// Error-free transformation: `s + e == a + b` exactly.
#[inline(always)]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    let ap = s - bp;
    (s, (a - ap) + (b - bp))
}

/// Bound on the rounding error of the kernel output `y`.
#[inline(always)]
pub fn kernel_err(y: f64) -> f64 {
    TRIG_KERNEL_ULPS * f64::EPSILON * y.abs() + TINY
}

/// Sine and cosine of `2*pi*t` for an exactly given double `t`, with the
/// error in `t` itself bounded by `t_err`.
#[inline]
pub fn sin_cos_turns(t: f64, t_err: f64) -> (Enclosure, Enclosure) {
    // Subtracting the nearest integer is exact for |t| < 2^52.
    let r = t - t.round();
    let theta = std::f64::consts::TAU * r;
    let theta_err = r.abs() * TAU_ABS_ERR + UNIT_ROUNDOFF * theta.abs() + TWO_PI_UP * t_err;
    let (s, c) = theta.sin_cos();
    (
        Enclosure { value: s, err: theta_err + kernel_err(s) },
        Enclosure { value: c, err: theta_err + kernel_err(c) },
    )
}

/// Streaming accumulator for `sum_i (a_i * s_i + b_i * c_i)` with tracked error.
///
/// Summation is compensated (Neumaier style via `two_sum`): every partial sum
/// error is captured exactly and only the compensation term is rounded.
#[derive(Debug, Clone, Copy)]
pub struct TermAccumulator {
    sum: f64,
    comp: f64,
    err: f64,
    ops: u32,
}

impl Default for TermAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl TermAccumulator {
    pub fn new() -> Self {
        Self { sum: 0.0, comp: 0.0, err: 0.0, ops: 0 }
    }

    /// Adds `a*s + b*c`. `a_rep`/`b_rep` bound the distance between the
    /// stored doubles and the exact coefficients.
    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    pub fn add_term(&mut self, a: f64, a_rep: f64, s: f64, s_err: f64, b: f64, b_rep: f64, c: f64, c_err: f64) {
        let p = a * s;
        let q = b * c;
        let t = p + q;
        let input = a.abs() * s_err + b.abs() * c_err + a_rep * (s.abs() + s_err) + b_rep * (c.abs() + c_err);
        let rounding = UNIT_ROUNDOFF * (p.abs() + q.abs() + t.abs()) + TINY;
        let (sum, e) = two_sum(self.sum, t);
        self.sum = sum;
        self.comp += e;
        self.err += input + rounding + UNIT_ROUNDOFF * self.comp.abs();
        self.ops += 1;
    }

    #[inline(always)]
    pub fn add_enclosures(&mut self, a: f64, a_rep: f64, s: Enclosure, b: f64, b_rep: f64, c: Enclosure) {
        self.add_term(a, a_rep, s.value, s.err, b, b_rep, c.value, c.err);
    }

    #[inline(always)]
    pub fn finish(self) -> Enclosure {
        let value = self.sum + self.comp;
        let err = self.err + UNIT_ROUNDOFF * value.abs();
        // The bound itself was accumulated in floating point: inflate by the
        // relative error of roughly a dozen roundings per term.
        let inflate = 1.0 + (12.0 * self.ops as f64 + 8.0) * f64::EPSILON;
        Enclosure { value, err: (err * inflate).next_up() }
    }
}

/// Sine table on the dyadic circle: entry `k` approximates `sin(2*pi*k/D)`.
///
/// Built from a computed quarter wave and exact reflections, so
/// `table[k + D/2] == -table[k]` and `table[D/2 - k] == table[k]` bitwise.
#[derive(Debug, Clone)]
pub struct DyadicSineTable {
    values: Vec<f64>,
    errs: Vec<f64>,
    mask: i64,
    quarter: i64,
}

impl DyadicSineTable {
    /// `denominator` must be a power of two and at least 4.
    pub fn new(denominator: usize) -> Self {
        assert!(denominator.is_power_of_two() && denominator >= 4);
        let d = denominator;
        let q = d / 4;
        let mut values = vec![0.0; d];
        let mut errs = vec![0.0; d];
        for k in 0..=q {
            let r = k as f64 / d as f64;
            let theta = std::f64::consts::TAU * r;
            let theta_err = r * TAU_ABS_ERR + UNIT_ROUNDOFF * theta;
            let s = if k == 0 { 0.0 } else { theta.sin() };
            values[k] = s;
            errs[k] = if k == 0 { 0.0 } else { theta_err + kernel_err(s) };
        }
        for k in q + 1..=2 * q {
            values[k] = values[2 * q - k];
            errs[k] = errs[2 * q - k];
        }
        for k in 2 * q + 1..d {
            values[k] = -values[k - 2 * q];
            errs[k] = errs[k - 2 * q];
        }
        Self { values, errs, mask: d as i64 - 1, quarter: q as i64 }
    }

    pub fn denominator(&self) -> usize {
        self.values.len()
    }

    /// `sin(2*pi*m/D)` for any integer `m`.
    #[inline(always)]
    pub fn sin(&self, m: i64) -> (f64, f64) {
        let k = (m & self.mask) as usize;
        (self.values[k], self.errs[k])
    }

    /// `cos(2*pi*m/D) = sin(2*pi*(m + D/4)/D)`.
    #[inline(always)]
    pub fn cos(&self, m: i64) -> (f64, f64) {
        self.sin(m + self.quarter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_error_free() {
        let (s, e) = two_sum(1.0, 1e-17);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-17);
    }

    #[test]
    fn table_reflections_are_exact() {
        let t = DyadicSineTable::new(256);
        for k in 0..128i64 {
            assert_eq!(t.sin(k + 128).0, -t.sin(k).0);
            assert_eq!(t.cos(k + 128).0, -t.cos(k).0);
        }
        assert_eq!(t.sin(0).0, 0.0);
        assert_eq!(t.sin(64).0, 1.0);
        assert_eq!(t.cos(0).0, 1.0);
        assert_eq!(t.sin(-64).0, -1.0);
    }

    #[test]
    fn table_entries_within_bound() {
        let t = DyadicSineTable::new(1024);
        for k in 0..1024i64 {
            // Reduce to [-1/2, 1/2) turns first so the reference itself stays accurate.
            let r = if k < 512 { k as f64 / 1024.0 } else { (k - 1024) as f64 / 1024.0 };
            let exact = (std::f64::consts::TAU * r).sin();
            let (v, e) = t.sin(k);
            assert!((v - exact).abs() <= e + 4e-16, "k={k}");
        }
    }

    #[test]
    fn sin_cos_turns_small_error() {
        let (s, c) = sin_cos_turns(0.125, 0.0);
        assert!(s.contains(std::f64::consts::FRAC_1_SQRT_2));
        assert!(c.contains(std::f64::consts::FRAC_1_SQRT_2));
        assert!(s.err < 1e-15);
    }
}
