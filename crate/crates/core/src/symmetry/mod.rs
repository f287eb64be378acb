//! Translation antisymmetries `f(x + u) = -f(x)`.
//!
//! A translation `u` flips the sign of every term exactly when
//! `nu . u - 1/2` is an integer for every frequency `nu` in the support.
//! Two finders produce such `u`:
//!
//! * [`find_semi_integral`] searches `u = w/2` with `w` in `{0,1}^n` by solving
//!   the parity system `(nu mod 2) . w = 1` over GF(2). When no solution
//!   exists it returns an odd set of frequencies whose parities sum to zero.
//! * [`find_class_s_translation`] solves `nu_i . u = 1/2` exactly over Q for
//!   linearly independent frequencies.
//!
//! All certificate data is exact; no floating point enters a certificate.

pub mod gf2;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::trigpoly::{FrequencyVector, TrigPolynomial};
use gf2::{BitRow, Gf2Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    SemiIntegral,
    ClassSRational,
    /// A semi-integral certificate of a dyadically reduced polynomial,
    /// pulled back to the original: `u = w / 2^(steps+1)`.
    DyadicLift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    SemiIntegral {
        w: Vec<i64>,
    },
    ClassSRational {
        /// Solution of `nu_i . u = 1/2` before reduction mod 1.
        #[serde(with = "rational_strings")]
        solution: Vec<BigRational>,
        pivot_columns: Vec<usize>,
        rank: usize,
    },
    DyadicLift {
        steps: u32,
        w: Vec<i64>,
    },
}

/// A translation `u` (entries in `[0,1)`) with `f(x + u) = -f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationCertificate {
    pub u: Vec<BigRational>,
    pub kind: CertificateKind,
    pub witness: Witness,
}

impl TranslationCertificate {
    fn from_w(w: Vec<i64>) -> Self {
        let half = BigRational::new(BigInt::one(), 2.into());
        let u = w.iter().map(|&wi| exact::frac(&(&half * BigInt::from(wi)))).collect();
        Self { u, kind: CertificateKind::SemiIntegral, witness: Witness::SemiIntegral { w } }
    }

    /// Exact check that `nu . u - 1/2` is an integer for every frequency of `f`.
    pub fn check_exact(&self, f: &TrigPolynomial) -> Result<()> {
        if self.u.len() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: self.u.len() });
        }
        let half = BigRational::new(BigInt::one(), 2.into());
        for nu in f.frequencies() {
            let dot = nu.dot_rational(&self.u);
            if !(&dot - &half).is_integer() {
                return Err(Error::ExactCheckFailed { nu: nu.0.clone(), dot: exact::format_rational(&dot) });
            }
        }
        Ok(())
    }

    pub fn u_f64(&self) -> Vec<f64> {
        self.u.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_document(&self, f: &TrigPolynomial) -> CertificateDocument {
        CertificateDocument {
            kind: self.kind,
            u: self.u.iter().map(exact::format_rational).collect(),
            witness: self.witness.clone(),
            verified_exact: self.check_exact(f).is_ok(),
        }
    }
}

/// JSON form: `{ "kind", "u": ["p/q",...], "witness", "verified_exact" }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub kind: CertificateKind,
    pub u: Vec<String>,
    pub witness: Witness,
    pub verified_exact: bool,
}

impl CertificateDocument {
    pub fn into_certificate(self) -> Result<TranslationCertificate> {
        let u = self.u.iter().map(|s| exact::parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(TranslationCertificate { u, kind: self.kind, witness: self.witness })
    }
}

/// An odd number of frequencies whose parity vectors sum to zero mod 2.
///
/// Summing the corresponding equations `(nu mod 2) . w = 1` yields `0 = 1`,
/// so no semi-integral antisymmetry exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityObstruction {
    /// Indices into the searched frequency list.
    pub equations: Vec<usize>,
    pub frequencies: Vec<FrequencyVector>,
}

impl ParityObstruction {
    /// Independent check of the obstruction.
    pub fn is_valid(&self) -> bool {
        if self.frequencies.is_empty() || self.frequencies.len().is_multiple_of(2) {
            return false;
        }
        let dim = self.frequencies[0].dim();
        (0..dim).all(|k| self.frequencies.iter().map(|nu| nu.0[k].rem_euclid(2)).sum::<i64>() % 2 == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemiIntegralSearch {
    Found(TranslationCertificate),
    Infeasible(ParityObstruction),
}

impl SemiIntegralSearch {
    pub fn certificate(&self) -> Option<&TranslationCertificate> {
        match self {
            SemiIntegralSearch::Found(c) => Some(c),
            SemiIntegralSearch::Infeasible(_) => None,
        }
    }
}

/// GF(2) search for `w` in `{0,1}^dim` with `nu . w` odd for every `nu`.
pub fn semi_integral_search(dim: usize, freqs: &[FrequencyVector]) -> SemiIntegralSearch {
    let rows: Vec<BitRow> = freqs
        .iter()
        .map(|nu| BitRow::from_bools(nu.0.iter().map(|c| c.rem_euclid(2) == 1)))
        .collect();
    match gf2::solve(&rows, &vec![true; rows.len()], dim) {
        Gf2Solution::Solvable(w) => {
            let w = (0..dim).map(|i| w.get(i) as i64).collect();
            SemiIntegralSearch::Found(TranslationCertificate::from_w(w))
        }
        Gf2Solution::Inconsistent(origin) => {
            let equations: Vec<usize> = origin.ones().collect();
            let frequencies = equations.iter().map(|&i| freqs[i].clone()).collect();
            SemiIntegralSearch::Infeasible(ParityObstruction { equations, frequencies })
        }
    }
}

pub fn find_semi_integral(f: &TrigPolynomial) -> SemiIntegralSearch {
    let freqs: Vec<FrequencyVector> = f.frequencies().cloned().collect();
    semi_integral_search(f.dim(), &freqs)
}

/// Result of repeatedly halving all frequencies while they are all even.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrace {
    pub steps: u32,
    pub reduced: TrigPolynomial,
}

/// Halves every frequency while all components are even. The reduced
/// polynomial `h` satisfies `f(x) = h(2^steps x)`, so both share the same
/// distribution function.
pub fn dyadic_reduce(f: &TrigPolynomial) -> ReductionTrace {
    let mut freqs: Vec<Vec<i64>> = f.frequencies().map(|nu| nu.0.clone()).collect();
    let mut steps = 0;
    while freqs.iter().all(|nu| nu.iter().all(|c| c % 2 == 0)) {
        for nu in &mut freqs {
            for c in nu.iter_mut() {
                *c /= 2;
            }
        }
        steps += 1;
    }
    let reduced = TrigPolynomial::new(
        f.dim(),
        freqs
            .into_iter()
            .zip(f.terms())
            .map(|(nu, t)| (nu, t.sin_coeff.exact().clone(), t.cos_coeff.exact().clone())),
    )
    .expect("halving preserves distinct nonzero frequencies");
    ReductionTrace { steps, reduced }
}

/// Exact rational `u` with `nu_i . u = 1/2` for linearly independent frequencies.
pub fn find_class_s_translation(f: &TrigPolynomial) -> Result<TranslationCertificate> {
    let freqs: Vec<Vec<i64>> = f.frequencies().map(|nu| nu.0.clone()).collect();
    let rank = exact::rank(&freqs, f.dim());
    if rank < freqs.len() {
        return Err(Error::NotInClassS { rank, terms: freqs.len() });
    }
    let half = BigRational::new(BigInt::one(), 2.into());
    let rows = exact::integer_rows(&freqs);
    let (solution, pivot_columns) = exact::solve_particular(&rows, &vec![half; freqs.len()], f.dim())
        .expect("independent rows always admit a solution");
    let u = solution.iter().map(exact::frac).collect();
    Ok(TranslationCertificate {
        u,
        kind: CertificateKind::ClassSRational,
        witness: Witness::ClassSRational { solution, pivot_columns, rank },
    })
}

/// Integer matrix `B = N (A^-1)^t` where `A` has the frequencies as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringMatrix {
    pub b: Vec<Vec<i64>>,
    pub scale: i64,
    pub degree: i64,
    /// `f(Bx)`: every frequency becomes `N e_i`.
    #[serde(skip)]
    pub pulled_back: Option<TrigPolynomial>,
}

impl CoveringMatrix {
    /// `B^t nu`.
    pub fn pull_back_frequency(&self, nu: &[i64]) -> Vec<i64> {
        let n = self.b.len();
        (0..n).map(|j| (0..n).map(|i| self.b[i][j] * nu[i]).sum()).collect()
    }
}

pub fn covering_matrix(f: &TrigPolynomial) -> Result<CoveringMatrix> {
    let n = f.dim();
    let freqs: Vec<Vec<i64>> = f.frequencies().map(|nu| nu.0.clone()).collect();
    let rank = exact::rank(&freqs, n);
    if freqs.len() != n || rank != n {
        return Err(Error::NotABasis { dim: n, rank, terms: freqs.len() });
    }
    // A[j][i] = (nu_i)_j, so A^t has the frequencies as rows.
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|j| (0..n).map(|i| BigRational::from_integer(freqs[i][j].into())).collect())
        .collect();
    let a_inv = exact::inverse(&a).expect("rank checked");
    let scale = exact::lcm_of_denominators(a_inv.iter().flatten());
    let overflow = || Error::InvalidConfig("covering matrix entries exceed 64-bit range".into());
    let scale_q = BigRational::from_integer(scale.clone());
    let b: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = &a_inv[j][i] * &scale_q;
                    debug_assert!(v.is_integer());
                    v.to_integer().to_i64().ok_or_else(overflow)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let big_b: Vec<Vec<BigInt>> = b.iter().map(|r| r.iter().map(|&v| v.into()).collect()).collect();
    let degree = exact::det_integer(&big_b).abs().to_i64().ok_or_else(overflow)?;
    let scale = scale.to_i64().ok_or_else(overflow)?;
    let mut cover = CoveringMatrix { b, scale, degree, pulled_back: None };
    let pulled = TrigPolynomial::new(
        n,
        f.terms().iter().map(|t| {
            (cover.pull_back_frequency(&t.nu.0), t.sin_coeff.exact().clone(), t.cos_coeff.exact().clone())
        }),
    )?;
    cover.pulled_back = Some(pulled);
    Ok(cover)
}

/// Outcome of [`verify_antisymmetry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetryReport {
    pub exact_pass: bool,
    pub samples: usize,
    /// `max |f(x+u) + f(x)|` over the samples.
    pub numerical_max: f64,
    /// Largest rigorous bound on `|f(x+u) + f(x)|` implied by the tracked
    /// evaluation errors and the rounding of `x + u`.
    pub numerical_bound: f64,
    pub numerical_pass: bool,
}

/// Two-tier check: exact rational identity, then seeded random sampling.
pub fn verify_antisymmetry(
    f: &TrigPolynomial,
    cert: &TranslationCertificate,
    samples: usize,
    seed: u64,
) -> Result<AntisymmetryReport> {
    cert.check_exact(f)?;
    let u = cert.u_f64();
    let u_err: Vec<f64> = cert
        .u
        .iter()
        .map(|r| exact::to_f64_with_error(r).1)
        .collect();
    let grad = f.gradient_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut numerical_max: f64 = 0.0;
    let mut numerical_bound: f64 = 0.0;
    let mut numerical_pass = true;
    let mut x = vec![0.0; f.dim()];
    let mut y = vec![0.0; f.dim()];
    for _ in 0..samples {
        let mut shift_err_sq = 0.0;
        for k in 0..f.dim() {
            x[k] = rng.gen::<f64>();
            y[k] = x[k] + u[k];
            let e = u_err[k] + crate::trigpoly::kernel::UNIT_ROUNDOFF * y[k].abs();
            shift_err_sq += e * e;
        }
        let fx = f.evaluate_with_error(&x)?;
        let fy = f.evaluate_with_error(&y)?;
        let sum = fx.value + fy.value;
        let bound = (fx.err + fy.err + grad * shift_err_sq.sqrt().next_up()) * (1.0 + 4.0 * f64::EPSILON)
            + crate::trigpoly::kernel::UNIT_ROUNDOFF * sum.abs();
        numerical_max = numerical_max.max(sum.abs());
        numerical_bound = numerical_bound.max(bound);
        if sum.abs() > bound {
            numerical_pass = false;
        }
    }
    Ok(AntisymmetryReport { exact_pass: true, samples, numerical_max, numerical_bound, numerical_pass })
}

/// Certificate chain for a nonconstant eigenfunction on `T^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Certificate {
    pub trace: ReductionTrace,
    /// Semi-integral antisymmetry of `trace.reduced`.
    pub reduced_certificate: TranslationCertificate,
    /// The same antisymmetry expressed for the original polynomial.
    pub lifted_certificate: TranslationCertificate,
}

/// Dyadic reduction followed by the GF(2) search. After reduction the
/// eigenvalue is 1 or 2 mod 4, so `w = (1,1)` or `w = (1,0)` always works.
pub fn t2_symmetry_theorem(f: &TrigPolynomial) -> Result<T2Certificate> {
    if f.dim() != 2 {
        return Err(Error::NotT2Eigenfunction(format!("dimension is {}", f.dim())));
    }
    let class = f.classify();
    if !class.is_eigenfunction {
        return Err(Error::NotT2Eigenfunction("frequencies have different norms".into()));
    }
    let trace = dyadic_reduce(f);
    let reduced_certificate = match find_semi_integral(&trace.reduced) {
        SemiIntegralSearch::Found(c) => c,
        SemiIntegralSearch::Infeasible(obstruction) => {
            return Err(Error::NotT2Eigenfunction(format!(
                "parity obstruction {:?} after reduction",
                obstruction.frequencies
            )))
        }
    };
    let Witness::SemiIntegral { w } = &reduced_certificate.witness else {
        unreachable!("semi-integral finder returns semi-integral witnesses")
    };
    let denom = BigRational::from_integer(BigInt::from(2u8).pow(trace.steps + 1));
    let lifted_u = w
        .iter()
        .map(|&wi| exact::frac(&(BigRational::from_integer(wi.into()) / &denom)))
        .collect();
    let lifted_certificate = TranslationCertificate {
        u: lifted_u,
        kind: CertificateKind::DyadicLift,
        witness: Witness::DyadicLift { steps: trace.steps, w: w.clone() },
    };
    Ok(T2Certificate { trace, reduced_certificate, lifted_certificate })
}

mod rational_strings {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(crate::exact::format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| crate::exact::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(dim: usize, freqs: &[&[i64]]) -> TrigPolynomial {
        let raw: Vec<(Vec<i64>, f64, f64)> =
            freqs.iter().enumerate().map(|(i, nu)| (nu.to_vec(), 1.0 + i as f64, 0.5)).collect();
        TrigPolynomial::from_f64_terms(dim, &raw).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn dyadic_reduction_examples() {
        let t = dyadic_reduce(&poly(2, &[&[2, 2], &[2, -2]]));
        assert_eq!(t.steps, 1);
        assert_eq!(t.reduced.frequencies().map(|n| n.0.clone()).collect::<Vec<_>>(), vec![vec![1, -1], vec![1, 1]]);
        assert_eq!(dyadic_reduce(&TrigPolynomial::counterexample_g()).steps, 0);
        let t = dyadic_reduce(&poly(2, &[&[4, 0], &[0, 4]]));
        assert_eq!(t.steps, 2);
        assert_eq!(t.reduced.frequencies().map(|n| n.0.clone()).collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn lambda_five_has_diagonal_half_shift() {
        let f = poly(2, &[&[2, 1], &[1, -2]]);
        let cert = find_semi_integral(&f).certificate().cloned().unwrap();
        assert_eq!(cert.u, vec![q(1, 2), q(1, 2)]);
        assert_eq!(cert.witness, Witness::SemiIntegral { w: vec![1, 1] });
    }

    #[test]
    fn odd_frequencies_shift_one_axis() {
        let f = poly(2, &[&[1, 1], &[1, -1]]);
        let cert = find_semi_integral(&f).certificate().cloned().unwrap();
        assert_eq!(cert.u, vec![q(1, 2), q(0, 1)]);
    }

    #[test]
    fn counterexample_has_parity_obstruction() {
        match find_semi_integral(&TrigPolynomial::counterexample_g()) {
            SemiIntegralSearch::Infeasible(obs) => {
                assert_eq!(obs.equations.len(), 3);
                assert!(obs.is_valid());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn class_s_translations() {
        let c = find_class_s_translation(&poly(2, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(c.u, vec![q(1, 2), q(1, 2)]);
        let f = poly(2, &[&[1, 1], &[1, -1]]);
        let c = find_class_s_translation(&f).unwrap();
        assert_eq!(c.u, vec![q(1, 2), q(0, 1)]);
        c.check_exact(&f).unwrap();
        assert!(matches!(
            find_class_s_translation(&TrigPolynomial::counterexample_g()),
            Err(Error::NotInClassS { rank: 2, terms: 3 })
        ));
    }

    #[test]
    fn class_s_underdetermined() {
        let f = poly(3, &[&[1, 2, 3], &[0, 1, 5]]);
        let c = find_class_s_translation(&f).unwrap();
        c.check_exact(&f).unwrap();
        assert!(c.u.iter().all(|v| !v.is_negative() && v < &BigRational::one()));
    }

    #[test]
    fn covering_examples() {
        // Terms are kept in sorted order, so column i of B belongs to the i-th frequency.
        let f = poly(2, &[&[1, 0], &[0, 1]]);
        let c = covering_matrix(&f).unwrap();
        assert_eq!((c.b.clone(), c.scale, c.degree), (vec![vec![0, 1], vec![1, 0]], 1, 1));
        let f = poly(2, &[&[1, 1], &[1, -1]]);
        let c = covering_matrix(&f).unwrap();
        assert_eq!(c.scale, 2);
        assert_eq!(c.degree, 2);
        for (i, nu) in f.frequencies().enumerate() {
            let mut expected = vec![0; 2];
            expected[i] = 2;
            assert_eq!(c.pull_back_frequency(&nu.0), expected);
        }
        assert!(matches!(
            covering_matrix(&TrigPolynomial::counterexample_g()),
            Err(Error::NotABasis { .. })
        ));
    }

    #[test]
    fn verify_rejects_wrong_translation() {
        let g = TrigPolynomial::counterexample_g();
        let cert = TranslationCertificate::from_w(vec![1, 1, 1]);
        match verify_antisymmetry(&g, &cert, 10, 1) {
            Err(Error::ExactCheckFailed { nu, .. }) => assert_eq!(nu, vec![0, 1, -1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verify_accepts_found_certificate() {
        let f = poly(2, &[&[2, 1], &[1, -2]]);
        let cert = find_semi_integral(&f).certificate().cloned().unwrap();
        let rep = verify_antisymmetry(&f, &cert, 200, 7).unwrap();
        assert!(rep.exact_pass && rep.numerical_pass);
        assert!(rep.numerical_max < 1e-13);
    }

    #[test]
    fn t2_pipeline() {
        let f = poly(2, &[&[4, 2], &[2, -4]]);
        let c = t2_symmetry_theorem(&f).unwrap();
        assert_eq!(c.trace.steps, 1);
        assert_eq!(c.reduced_certificate.witness, Witness::SemiIntegral { w: vec![1, 1] });
        c.lifted_certificate.check_exact(&f).unwrap();
        assert_eq!(c.lifted_certificate.u, vec![q(1, 4), q(1, 4)]);

        let c = t2_symmetry_theorem(&poly(2, &[&[1, 1], &[1, -1]])).unwrap();
        assert_eq!(c.reduced_certificate.witness, Witness::SemiIntegral { w: vec![1, 0] });
        let c = t2_symmetry_theorem(&poly(2, &[&[1, 0]])).unwrap();
        assert_eq!(c.reduced_certificate.witness, Witness::SemiIntegral { w: vec![1, 0] });

        assert!(t2_symmetry_theorem(&TrigPolynomial::counterexample_g()).is_err());
        assert!(t2_symmetry_theorem(&poly(2, &[&[1, 0], &[1, 1]])).is_err());
    }

    #[test]
    fn certificate_document_round_trip() {
        let f = poly(2, &[&[1, 1], &[1, -1]]);
        let c = find_class_s_translation(&f).unwrap();
        let doc = c.to_document(&f);
        assert!(doc.verified_exact);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains(r#""u":["1/2","0"]"#), "{text}");
        let back: CertificateDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_certificate().unwrap(), c);
    }
}
