//! Real trigonometric polynomials on the unit torus `[0,1)^n`.
//!
//! A polynomial is stored as a sum of terms
//! `a sin(2 pi nu.x) + b cos(2 pi nu.x)` with integer frequencies `nu`.
//! Coefficients are exact rationals; a double approximation is cached for
//! evaluation together with its representation error.

mod json;
pub mod kernel;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
pub use json::{PolynomialDocument, TermDocument};
pub use kernel::Enclosure;
use kernel::TermAccumulator;

/// Integer frequency vector `nu` in `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(pub Vec<i64>);

impl FrequencyVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_sq(&self) -> u64 {
        self.0.iter().map(|&c| (c as i128 * c as i128) as u64).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn dot_f64(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&n, &v)| n as f64 * v).sum()
    }

    pub fn dot_rational(&self, u: &[BigRational]) -> BigRational {
        self.0
            .iter()
            .zip(u)
            .fold(BigRational::zero(), |acc, (&n, v)| acc + v * BigRational::from_integer(n.into()))
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// True when the first nonzero component is positive.
    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }
}

impl From<Vec<i64>> for FrequencyVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Exact rational coefficient with its nearest double.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    exact: BigRational,
    approx: f64,
    rep_err: f64,
}

impl Coefficient {
    pub fn new(exact: BigRational) -> Self {
        let (approx, rep_err) = exact::to_f64_with_error(&exact);
        Self { exact, approx, rep_err }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero())
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Ok(Self::new(exact::rational_from_f64(x)?))
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    /// Bound on `|exact - value|`.
    pub fn representation_error(&self) -> f64 {
        self.rep_err
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }
}

/// One term `sin_coeff * sin(2 pi nu.x) + cos_coeff * cos(2 pi nu.x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub nu: FrequencyVector,
    pub sin_coeff: Coefficient,
    pub cos_coeff: Coefficient,
}

impl Term {
    /// `sqrt(a^2 + b^2)`, the amplitude of the term.
    pub fn amplitude(&self) -> f64 {
        self.sin_coeff.value().hypot(self.cos_coeff.value())
    }
}

/// A canonical, nonconstant real trigonometric polynomial on `T^dim`.
///
/// Canonical form: no zero frequency, every stored frequency has a positive
/// leading nonzero component, frequencies are pairwise distinct and sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

impl TrigPolynomial {
    /// Canonicalizes `(nu, sin, cos)` triples: flips `nu -> -nu` (negating the
    /// sine coefficient) to the canonical sign, merges equal frequencies by
    /// exact addition, and drops vanishing terms.
    pub fn new(
        dim: usize,
        raw: impl IntoIterator<Item = (Vec<i64>, BigRational, BigRational)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let mut merged: BTreeMap<FrequencyVector, (BigRational, BigRational)> = BTreeMap::new();
        for (nu, a, b) in raw {
            if nu.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: nu.len() });
            }
            let nu = FrequencyVector(nu);
            if nu.is_zero() {
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                return Err(Error::Malformed("constant (zero-frequency) terms are not supported".into()));
            }
            let (nu, a) = if nu.is_canonical() { (nu, a) } else { (nu.negated(), -a) };
            let entry = merged.entry(nu).or_insert_with(|| (BigRational::zero(), BigRational::zero()));
            entry.0 += a;
            entry.1 += b;
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, (a, b))| !(a.is_zero() && b.is_zero()))
            .map(|(nu, (a, b))| Term { nu, sin_coeff: Coefficient::new(a), cos_coeff: Coefficient::new(b) })
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        Ok(Self { dim, terms })
    }

    /// Convenience constructor from double coefficients (taken at their exact binary value).
    pub fn from_f64_terms(dim: usize, raw: &[(Vec<i64>, f64, f64)]) -> Result<Self> {
        let converted = raw
            .iter()
            .map(|(nu, a, b)| Ok((nu.clone(), exact::rational_from_f64(*a)?, exact::rational_from_f64(*b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, converted)
    }

    /// `sin(2 pi (x+y)) - cos(2 pi (y-z)) - sin(2 pi (x+z))` on `T^3`.
    pub fn counterexample_g() -> Self {
        Self::from_f64_terms(
            3,
            &[(vec![1, 1, 0], 1.0, 0.0), (vec![0, 1, -1], 0.0, -1.0), (vec![1, 0, 1], -1.0, 0.0)],
        )
        .expect("static polynomial is valid")
    }

    /// Parses the JSON polynomial schema.
    pub fn parse(document: &str) -> Result<Self> {
        json::parse(document)
    }

    pub fn to_document(&self) -> PolynomialDocument {
        json::to_document(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &FrequencyVector> {
        self.terms.iter().map(|t| &t.nu)
    }

    /// Multiplies every coefficient by the exact rational `c`.
    pub fn scaled(&self, c: &BigRational) -> Result<Self> {
        Self::new(
            self.dim,
            self.terms
                .iter()
                .map(|t| (t.nu.0.clone(), t.sin_coeff.exact() * c, t.cos_coeff.exact() * c)),
        )
    }

    /// Same function with a term stored under `-nu` instead of `nu`. Used to
    /// check that canonicalization does not change the represented function.
    pub fn raw_terms_negated(&self, index: usize) -> Vec<(Vec<i64>, BigRational, BigRational)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if i == index {
                    (t.nu.negated().0, -t.sin_coeff.exact().clone(), t.cos_coeff.exact().clone())
                } else {
                    (t.nu.0.clone(), t.sin_coeff.exact().clone(), t.cos_coeff.exact().clone())
                }
            })
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    /// Plain double evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    #[inline]
    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let phase = t.nu.dot_f64(x);
                let r = phase - phase.round();
                let (s, c) = (std::f64::consts::TAU * r).sin_cos();
                t.sin_coeff.value() * s + t.cos_coeff.value() * c
            })
            .sum()
    }

    /// Evaluation with a rigorous bound `|value - f(x)| <= err`, where `f`
    /// uses the exact rational coefficients and `x` is taken as given.
    pub fn evaluate_with_error(&self, x: &[f64]) -> Result<Enclosure> {
        self.check_dim(x)?;
        let mut acc = TermAccumulator::new();
        for t in &self.terms {
            let (phase, phase_err) = dot_with_error(&t.nu.0, x);
            let (s, c) = kernel::sin_cos_turns(phase, phase_err);
            acc.add_enclosures(
                t.sin_coeff.value(),
                t.sin_coeff.representation_error(),
                s,
                t.cos_coeff.value(),
                t.cos_coeff.representation_error(),
                c,
            );
        }
        Ok(acc.finish())
    }

    /// Analytic gradient at `x` (double precision, not error-tracked).
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            let phase = t.nu.dot_f64(x);
            let r = phase - phase.round();
            let (s, c) = (std::f64::consts::TAU * r).sin_cos();
            let d = std::f64::consts::TAU * (t.sin_coeff.value() * c - t.cos_coeff.value() * s);
            for (gi, &n) in g.iter_mut().zip(&t.nu.0) {
                *gi += d * n as f64;
            }
        }
        Ok(g)
    }

    /// Eigenfunction and class-S classification.
    pub fn classify(&self) -> SpectralClass {
        let first = self.terms[0].nu.norm_sq();
        let is_eigenfunction = self.terms.iter().all(|t| t.nu.norm_sq() == first);
        let eigenvalue = is_eigenfunction.then_some(first);
        let rows: Vec<Vec<i64>> = self.frequencies().map(|nu| nu.0.clone()).collect();
        let rank = exact::rank(&rows, self.dim);
        SpectralClass {
            is_eigenfunction,
            eigenvalue,
            lambda_mod_4: eigenvalue.map(|l| (l % 4) as u8),
            in_class_s: rank == self.terms.len(),
            rank,
            n_terms: self.terms.len(),
        }
    }

    /// Sup bound on `|grad f|_2`: `2 pi sum_i sqrt(a_i^2 + b_i^2) |nu_i|_2`, rounded up.
    pub fn gradient_bound(&self) -> f64 {
        let mut sum = 0.0;
        for t in &self.terms {
            let amp = (t.sin_coeff.value().abs() + t.sin_coeff.representation_error())
                .hypot(t.cos_coeff.value().abs() + t.cos_coeff.representation_error());
            sum += amp.next_up() * t.nu.norm().next_up();
        }
        let ops = 4.0 * self.terms.len() as f64 + 4.0;
        (std::f64::consts::TAU.next_up() * sum * (1.0 + ops * f64::EPSILON)).next_up()
    }

    /// `sum_i sqrt(a_i^2 + b_i^2)`, an upper bound on `max |f|`, rounded up.
    pub fn sup_bound(&self) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| {
                (t.sin_coeff.value().abs() + t.sin_coeff.representation_error())
                    .hypot(t.cos_coeff.value().abs() + t.cos_coeff.representation_error())
                    .next_up()
            })
            .sum();
        (sum * (1.0 + 2.0 * self.terms.len() as f64 * f64::EPSILON)).next_up()
    }
}

/// `nu . x` in doubles with a bound on its rounding error.
#[inline]
fn dot_with_error(nu: &[i64], x: &[f64]) -> (f64, f64) {
    let mut s = 0.0f64;
    let mut err = 0.0f64;
    for (&n, &v) in nu.iter().zip(x) {
        let p = n as f64 * v;
        err += kernel::UNIT_ROUNDOFF * p.abs();
        s += p;
        err += kernel::UNIT_ROUNDOFF * s.abs();
    }
    (s, err * (1.0 + 4.0 * nu.len() as f64 * f64::EPSILON))
}

impl fmt::Display for TrigPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = ["x", "y", "z", "w"];
        let mut first = true;
        for t in &self.terms {
            let arg: String = if self.dim <= vars.len() {
                let mut s = String::new();
                for (i, &c) in t.nu.0.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let sign = if c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
                    let mag = c.unsigned_abs();
                    let coef = if mag == 1 { String::new() } else { mag.to_string() };
                    s.push_str(&format!("{sign}{coef}{}", vars[i]));
                }
                s
            } else {
                format!("{:?}.x", t.nu.0)
            };
            for (coeff, name) in [(&t.sin_coeff, "sin"), (&t.cos_coeff, "cos")] {
                if coeff.is_zero() {
                    continue;
                }
                let r = coeff.exact();
                let neg = r.is_negative();
                let mag = exact::format_rational(&r.abs());
                let sign = match (first, neg) {
                    (true, true) => "-",
                    (true, false) => "",
                    (false, true) => " - ",
                    (false, false) => " + ",
                };
                let mag = if mag == "1" { String::new() } else { format!("{mag}*") };
                write!(f, "{sign}{mag}{name}(2pi({arg}))")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Spectral classification of a polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralClass {
    pub is_eigenfunction: bool,
    /// `|nu|^2` shared by all frequencies (the `2 pi`-periodic convention).
    pub eigenvalue: Option<u64>,
    pub lambda_mod_4: Option<u8>,
    pub in_class_s: bool,
    pub rank: usize,
    pub n_terms: usize,
}

/// How the gradient sup bound entering the cell error is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientBoundMode {
    Computed,
    Override(f64),
}

impl GradientBoundMode {
    pub fn resolve(&self, f: &TrigPolynomial) -> f64 {
        match *self {
            GradientBoundMode::Computed => f.gradient_bound(),
            GradientBoundMode::Override(g) => g,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn evaluates_counterexample_at_origin() {
        let g = TrigPolynomial::counterexample_g();
        assert_eq!(g.evaluate(&[0.0, 0.0, 0.0]).unwrap(), -1.0);
        let v = g.evaluate(&[0.125, 0.125, 0.125]).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluates_cos_at_quarter() {
        let f = TrigPolynomial::from_f64_terms(2, &[(vec![1, 1], 0.0, 1.0)]).unwrap();
        assert!((f.evaluate(&[0.25, 0.25]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = TrigPolynomial::counterexample_g();
        assert!(matches!(g.evaluate(&[0.0, 0.0]), Err(Error::DimensionMismatch { expected: 3, found: 2 })));
        assert!(g.evaluate_with_error(&[0.0; 4]).is_err());
    }

    #[test]
    fn canonical_sign_flip_negates_sine() {
        let f = TrigPolynomial::new(2, vec![(vec![-1, 2], q(1, 1), q(3, 1))]).unwrap();
        assert_eq!(f.terms()[0].nu.0, vec![1, -2]);
        assert_eq!(f.terms()[0].sin_coeff.exact(), &q(-1, 1));
        assert_eq!(f.terms()[0].cos_coeff.exact(), &q(3, 1));
    }

    #[test]
    fn zero_frequency_rejected() {
        assert!(TrigPolynomial::new(1, vec![(vec![0], q(0, 1), q(1, 1))]).is_err());
    }

    #[test]
    fn classify_counterexample() {
        let c = TrigPolynomial::counterexample_g().classify();
        assert!(c.is_eigenfunction);
        assert_eq!(c.eigenvalue, Some(2));
        assert_eq!(c.lambda_mod_4, Some(2));
        // (1,1,0) = (0,1,-1) + (1,0,1): the three frequencies are dependent.
        assert_eq!(c.rank, 2);
        assert!(!c.in_class_s);
    }

    #[test]
    fn classify_dependent_one_dimensional() {
        let f = TrigPolynomial::from_f64_terms(1, &[(vec![1], 1.0, 0.0), (vec![2], 0.0, 1.0)]).unwrap();
        let c = f.classify();
        assert!(!c.is_eigenfunction);
        assert_eq!(c.eigenvalue, None);
        assert_eq!(c.rank, 1);
        assert!(!c.in_class_s);
    }

    #[test]
    fn classify_lambda_five() {
        let f = TrigPolynomial::from_f64_terms(2, &[(vec![2, 1], 0.0, 1.0), (vec![1, -2], 1.0, 0.0)]).unwrap();
        let c = f.classify();
        assert_eq!(c.eigenvalue, Some(5));
        assert_eq!(c.lambda_mod_4, Some(1));
        assert!(c.in_class_s);
    }

    #[test]
    fn gradient_bound_formula() {
        let g = TrigPolynomial::counterexample_g();
        let expected = 6.0 * 2f64.sqrt() * std::f64::consts::PI;
        let b = g.gradient_bound();
        assert!(b >= expected && b < expected * (1.0 + 1e-12));

        let s = TrigPolynomial::from_f64_terms(1, &[(vec![1], 1.0, 0.0)]).unwrap();
        let b = s.gradient_bound();
        assert!(b >= std::f64::consts::TAU && b < std::f64::consts::TAU * (1.0 + 1e-12));
        // Attained at x = 0.
        assert!((s.gradient(&[0.0]).unwrap()[0] - std::f64::consts::TAU).abs() < 1e-12);

        let fixed = GradientBoundMode::Override(6.0 * std::f64::consts::PI);
        assert_eq!(fixed.resolve(&g), 6.0 * std::f64::consts::PI);
    }

    #[test]
    fn enclosure_err_is_small_for_g() {
        let g = TrigPolynomial::counterexample_g();
        let e = g.evaluate_with_error(&[0.3, 0.7, 0.1]).unwrap();
        assert!(e.err > 0.0 && e.err <= 1.5e-13);
    }

    #[test]
    fn display_is_readable() {
        let g = TrigPolynomial::counterexample_g();
        assert_eq!(g.to_string(), "-cos(2pi(y-z)) - sin(2pi(x+z)) + sin(2pi(x+y))");
    }
}
