//! Odd moments `int_T f^(2k+1) dx` from frequency combinatorics.
//!
//! Writing `f = sum_nu c_nu e(nu.x)` with `c_nu = (b - i a)/2` and
//! `c_-nu = conj(c_nu)`, the integral of `f^m` is the coefficient of the zero
//! frequency in the `m`-fold convolution power of `c`. Only products whose
//! frequencies sum to zero survive integration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::grid::{self, GridEvaluator, GridOffset, GridSpec};
use crate::trigpoly::TrigPolynomial;

type CRational = Complex<BigRational>;

/// Default bound on the number of reachable partial frequency sums.
pub const DEFAULT_MAP_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    SparseConvolution,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentValue {
    Exact(#[serde(with = "rational_string")] BigRational),
    Approx(f64),
}

impl MomentValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => exact::to_f64_with_error(r).0,
            MomentValue::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(r) => Some(r),
            MomentValue::Approx(_) => None,
        }
    }
}

/// A zero-sum selection of signed frequencies, merged with its conjugate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    /// `(term index, copies of +nu, copies of -nu)` for every term used.
    pub multiplicities: Vec<(usize, u32, u32)>,
    /// Net multiplicities `A_i = plus - minus`; `sum_i A_i nu_i = 0`.
    pub net: Vec<i64>,
    /// Exact contribution to the moment of this selection and its conjugate.
    #[serde(with = "rational_string")]
    pub contribution: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// The moment order is `2k + 1`.
    pub k: u32,
    pub value: MomentValue,
    pub surviving_combinations: Vec<Combination>,
    pub method: MomentMethod,
}

fn complex_coefficients(f: &TrigPolynomial) -> Vec<(Vec<i64>, CRational)> {
    let half = BigRational::new(BigInt::one(), 2.into());
    let mut out = Vec::with_capacity(2 * f.terms().len());
    for t in f.terms() {
        let re = t.cos_coeff.exact() * &half;
        let im = t.sin_coeff.exact() * &half;
        out.push((t.nu.0.clone(), Complex::new(re.clone(), -im.clone())));
        out.push((t.nu.negated().0, Complex::new(re, im)));
    }
    out
}

/// Exact `int f^(2k+1)` by sparse convolution over reachable frequency sums.
pub fn odd_moment_exact(f: &TrigPolynomial, k: u32) -> Result<MomentReport> {
    odd_moment_exact_with(f, k, false, DEFAULT_MAP_LIMIT)
}

/// As [`odd_moment_exact`], optionally listing the surviving combinations.
pub fn odd_moment_exact_with(
    f: &TrigPolynomial,
    k: u32,
    with_combinations: bool,
    map_limit: usize,
) -> Result<MomentReport> {
    let order = 2 * k as usize + 1;
    let dict = complex_coefficients(f);
    let reach: Vec<i64> = (0..f.dim())
        .map(|c| f.frequencies().map(|nu| nu.0[c].abs()).max().unwrap_or(0))
        .collect();

    let mut current: BTreeMap<Vec<i64>, CRational> = BTreeMap::new();
    current.insert(vec![0; f.dim()], Complex::new(BigRational::one(), BigRational::zero()));
    for step in 1..=order {
        let remaining = (order - step) as i64;
        let mut next: BTreeMap<Vec<i64>, CRational> = BTreeMap::new();
        for (sum, coeff) in &current {
            for (nu, c) in &dict {
                let s: Vec<i64> = sum.iter().zip(nu).map(|(a, b)| a + b).collect();
                // Drop partial sums that cannot return to zero in the remaining steps.
                if s.iter().zip(&reach).any(|(v, r)| v.abs() > remaining * r) {
                    continue;
                }
                let product = coeff * c;
                let entry = next.entry(s).or_insert_with(|| Complex::new(BigRational::zero(), BigRational::zero()));
                *entry = &*entry + product;
            }
        }
        next.retain(|_, v| !v.is_zero());
        if next.len() > map_limit {
            return Err(Error::OrderTooLarge { limit: map_limit });
        }
        current = next;
    }
    let value = current
        .remove(&vec![0; f.dim()])
        .unwrap_or_else(|| Complex::new(BigRational::zero(), BigRational::zero()));
    debug_assert!(value.im.is_zero(), "moment of a real function is real");

    let surviving_combinations = if with_combinations {
        zero_sum_combinations(f, order, map_limit)?
    } else {
        Vec::new()
    };
    Ok(MomentReport { k, value: MomentValue::Exact(value.re), surviving_combinations, method: MomentMethod::SparseConvolution })
}

/// Enumerates multisets of `order` signed frequencies summing to zero and
/// returns those whose exact contribution (merged with the conjugate
/// selection) is nonzero.
pub fn zero_sum_combinations(f: &TrigPolynomial, order: usize, limit: usize) -> Result<Vec<Combination>> {
    let dict = complex_coefficients(f);
    let n_terms = f.terms().len();
    let dim = f.dim();
    let mut counts = vec![0u32; dict.len()];
    let mut found: BTreeMap<Vec<u32>, CRational> = BTreeMap::new();
    let mut visited = 0usize;
    let factorials: Vec<BigInt> = (0..=order).scan(BigInt::one(), |acc, i| {
        if i > 0 {
            *acc *= BigInt::from(i);
        }
        Some(acc.clone())
    }).collect();

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        idx: usize,
        left: usize,
        sum: &mut Vec<i64>,
        counts: &mut Vec<u32>,
        dict: &[(Vec<i64>, CRational)],
        factorials: &[BigInt],
        order: usize,
        found: &mut BTreeMap<Vec<u32>, CRational>,
        visited: &mut usize,
        limit: usize,
    ) -> Result<()> {
        *visited += 1;
        if *visited > limit {
            return Err(Error::OrderTooLarge { limit });
        }
        if idx == dict.len() {
            if left == 0 && sum.iter().all(|&v| v == 0) {
                let mut coeff = Complex::new(BigRational::from_integer(factorials[order].clone()), BigRational::zero());
                for (c, (_, value)) in counts.iter().zip(dict) {
                    for _ in 0..*c {
                        coeff *= value;
                    }
                    coeff = Complex::new(
                        &coeff.re / BigRational::from_integer(factorials[*c as usize].clone()),
                        &coeff.im / BigRational::from_integer(factorials[*c as usize].clone()),
                    );
                }
                found.insert(counts.clone(), coeff);
            }
            return Ok(());
        }
        for c in 0..=left {
            counts[idx] = c as u32;
            for (s, v) in sum.iter_mut().zip(&dict[idx].0) {
                *s += c as i64 * v;
            }
            recurse(idx + 1, left - c, sum, counts, dict, factorials, order, found, visited, limit)?;
            for (s, v) in sum.iter_mut().zip(&dict[idx].0) {
                *s -= c as i64 * v;
            }
        }
        counts[idx] = 0;
        Ok(())
    }

    let mut sum = vec![0i64; dim];
    recurse(0, order, &mut sum, &mut counts, &dict, &factorials, order, &mut found, &mut visited, limit)?;

    let mut out = Vec::new();
    for (key, coeff) in &found {
        // Conjugate selection swaps the +nu and -nu counts of every term.
        let conj: Vec<u32> = key.chunks(2).flat_map(|p| [p[1], p[0]]).collect();
        if &conj < key {
            continue;
        }
        let contribution = if &conj == key { coeff.re.clone() } else { &coeff.re + &coeff.re };
        if contribution.is_zero() {
            continue;
        }
        let multiplicities: Vec<(usize, u32, u32)> = (0..n_terms)
            .filter(|&i| key[2 * i] + key[2 * i + 1] > 0)
            .map(|i| (i, key[2 * i], key[2 * i + 1]))
            .collect();
        let net = (0..n_terms).map(|i| key[2 * i] as i64 - key[2 * i + 1] as i64).collect();
        out.push(Combination { multiplicities, net, contribution });
    }
    Ok(out)
}

/// Grid quadrature of `int f^(2k+1)` at the corner grid `j / N`.
///
/// For frequencies with components below `N / (2k+1)` the rule is exact up to rounding.
pub fn odd_moment_quadrature(f: &TrigPolynomial, k: u32, grid_log2: u32, threads: Option<usize>) -> Result<MomentReport> {
    let spec = GridSpec::new(f.dim(), grid_log2, GridOffset::Zero)?;
    let eval = GridEvaluator::new(f, spec)?;
    let order = 2 * k as i32 + 1;
    let partial = grid::sweep_chunks(&eval, threads, |ev, start, end| {
        let mut s = 0.0;
        ev.for_each_in_range(start, end, |_, enc| s += enc.value.powi(order));
        s
    })?;
    let total: f64 = partial.iter().sum();
    Ok(MomentReport {
        k,
        value: MomentValue::Approx(total / spec.total_points() as f64),
        surviving_combinations: Vec::new(),
        method: MomentMethod::Quadrature,
    })
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::exact::format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        crate::exact::parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}
