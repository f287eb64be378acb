use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use torsym::analysis;
use torsym::certify::{self, CertificationConfig, SweepPlan};
use torsym::grid::GridEvaluator;
use torsym::symmetry::{self, SemiIntegralSearch};
use torsym::trigpoly::FrequencyVector;
use torsym::TrigPolynomial;

fn rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn frequency(dim: usize, max: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-max..=max, dim).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn raw_terms(dim: usize, n: usize, max: i64) -> impl Strategy<Value = Vec<(Vec<i64>, BigRational, BigRational)>> {
    prop::collection::vec((frequency(dim, max), rational(), rational()), 1..=n)
}

fn polynomial(dim: usize, n: usize, max: i64) -> impl Strategy<Value = TrigPolynomial> {
    raw_terms(dim, n, max).prop_filter_map("vanishing", move |raw| TrigPolynomial::new(dim, raw).ok())
}

fn any_polynomial() -> impl Strategy<Value = TrigPolynomial> {
    (1usize..=3).prop_flat_map(|d| polynomial(d, 4, 3))
}

fn parity_exhaustive(dim: usize, freqs: &[FrequencyVector]) -> bool {
    (0u32..1 << dim).any(|mask| {
        freqs.iter().all(|nu| {
            nu.components().iter().enumerate().map(|(i, &v)| v * ((mask >> i) & 1) as i64).sum::<i64>().rem_euclid(2) == 1
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gf2_search_matches_exhaustive(freqs in prop::collection::vec(frequency(3, 3), 1..=6)) {
        let freqs: Vec<FrequencyVector> = freqs.into_iter().map(FrequencyVector).collect();
        let expected = parity_exhaustive(3, &freqs);
        match symmetry::semi_integral_search(3, &freqs) {
            SemiIntegralSearch::Found(cert) => {
                prop_assert!(expected);
                for nu in &freqs {
                    let dot = nu.dot_rational(&cert.u) - BigRational::new(1.into(), 2.into());
                    prop_assert!(dot.is_integer());
                }
            }
            SemiIntegralSearch::Infeasible(w) => {
                prop_assert!(!expected);
                prop_assert!(w.is_valid());
                prop_assert!(w.equations.len() % 2 == 1);
            }
        }
    }

    #[test]
    fn evaluation_is_periodic(f in any_polynomial(), shift in prop::collection::vec(-20i64..=20, 3), seed in 0.0f64..1.0) {
        let x: Vec<f64> = (0..f.dim()).map(|i| (seed + 0.37 * i as f64).fract()).collect();
        let y: Vec<f64> = x.iter().zip(&shift).map(|(a, &m)| a + m as f64).collect();
        let a = f.evaluate_with_error(&x).unwrap();
        let b = f.evaluate_with_error(&y).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.err + b.err, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn classify_ignores_order_and_sign(raw in raw_terms(3, 5, 3), flip in any::<prop::sample::Index>()) {
        let Ok(f) = TrigPolynomial::new(3, raw.clone()) else { return Ok(()) };
        let mut reversed = raw;
        reversed.reverse();
        let g = TrigPolynomial::new(3, reversed).unwrap();
        prop_assert_eq!(&f, &g);
        let h = TrigPolynomial::new(3, f.raw_terms_negated(flip.index(f.terms().len()))).unwrap();
        prop_assert_eq!(f.classify(), h.classify());
        prop_assert_eq!(&f, &h);
    }

    #[test]
    fn negating_a_frequency_keeps_the_function(f in any_polynomial(), flip in any::<prop::sample::Index>(), t in 0.0f64..1.0) {
        let i = flip.index(f.terms().len());
        let raw = f.raw_terms_negated(i);
        // Evaluate the raw (uncanonicalized) sum directly.
        let x: Vec<f64> = (0..f.dim()).map(|k| (t + 0.29 * k as f64).fract()).collect();
        let direct: f64 = raw
            .iter()
            .map(|(nu, a, b)| {
                let phase = std::f64::consts::TAU * nu.iter().zip(&x).map(|(&n, &xi)| n as f64 * xi).sum::<f64>();
                num_traits::ToPrimitive::to_f64(a).unwrap() * phase.sin() + num_traits::ToPrimitive::to_f64(b).unwrap() * phase.cos()
            })
            .sum();
        prop_assert!((direct - f.evaluate(&x).unwrap()).abs() < 1e-9);
        for k in 0..=2 {
            prop_assert_eq!(
                analysis::odd_moment_exact(&f, k).unwrap().value,
                analysis::odd_moment_exact(&TrigPolynomial::new(f.dim(), raw.clone()).unwrap(), k).unwrap().value
            );
        }
    }

    #[test]
    fn moments_scale_covariantly(f in (1usize..=2).prop_flat_map(|d| polynomial(d, 3, 2)), c in rational(), k in 0u32..=2) {
        prop_assume!(!c.is_zero());
        let base = analysis::odd_moment_exact(&f, k).unwrap().value.exact().unwrap().clone();
        let scaled = analysis::odd_moment_exact(&f.scaled(&c).unwrap(), k).unwrap().value.exact().unwrap().clone();
        let mut power = BigRational::one();
        for _ in 0..2 * k + 1 {
            power *= &c;
        }
        prop_assert_eq!(scaled, base * power);
    }

    #[test]
    fn empty_combinations_mean_zero_moment(f in (1usize..=2).prop_flat_map(|d| polynomial(d, 3, 2)), k in 0u32..=2) {
        let r = analysis::odd_moment_exact_with(&f, k, true, analysis::moments::DEFAULT_MAP_LIMIT).unwrap();
        if r.surviving_combinations.is_empty() {
            prop_assert!(r.value.exact().unwrap().is_zero());
        }
        let total: BigRational = r.surviving_combinations.iter().map(|c| c.contribution.clone()).sum();
        prop_assert_eq!(&total, r.value.exact().unwrap());
    }

    #[test]
    fn finders_return_only_exact_certificates(f in any_polynomial()) {
        if let SemiIntegralSearch::Found(cert) = symmetry::find_semi_integral(&f) {
            prop_assert!(cert.check_exact(&f).is_ok());
            let report = symmetry::verify_antisymmetry(&f, &cert, 50, 7).unwrap();
            prop_assert!(report.numerical_pass);
        }
        if let Ok(cert) = symmetry::find_class_s_translation(&f) {
            prop_assert!(cert.check_exact(&f).is_ok());
            let report = symmetry::verify_antisymmetry(&f, &cert, 50, 7).unwrap();
            prop_assert!(report.numerical_pass);
        }
    }

    #[test]
    fn odd_parity_frequencies_always_admit_a_translation(
        dim in 1usize..=4,
        w in prop::collection::vec(0i64..=1, 4),
        raw in prop::collection::vec((prop::collection::vec(-3i64..=3, 4), rational()), 1..=5),
    ) {
        let w = &w[..dim];
        prop_assume!(w.contains(&1));
        let terms: Vec<_> = raw
            .into_iter()
            .filter_map(|(nu, a)| {
                let nu = nu[..dim].to_vec();
                let odd = nu.iter().zip(w).map(|(a, b)| a * b).sum::<i64>().rem_euclid(2) == 1;
                (odd && !a.is_zero()).then(|| (nu, a.clone(), a))
            })
            .collect();
        // Equal frequencies may cancel exactly.
        let Ok(f) = TrigPolynomial::new(dim, terms) else { return Ok(()) };
        let cert = symmetry::find_semi_integral(&f).certificate().cloned();
        prop_assert!(cert.is_some());
        prop_assert!(cert.unwrap().check_exact(&f).is_ok());
    }

    #[test]
    fn class_s_odd_moments_vanish(raw in (1usize..=3).prop_flat_map(|d| raw_terms(d, 3, 3).prop_map(move |r| (d, r)))) {
        let (dim, raw) = raw;
        let Ok(f) = TrigPolynomial::new(dim, raw) else { return Ok(()) };
        prop_assume!(f.classify().in_class_s);
        for k in 0..=2 {
            prop_assert!(analysis::odd_moment_exact(&f, k).unwrap().value.exact().unwrap().is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every flagged cell is checked on a 20^n sub-grid including its boundary.
    #[test]
    fn flagged_cells_have_a_constant_sign(f in (1usize..=2).prop_flat_map(|d| polynomial(d, 3, 2)), log2 in 4u32..=6) {
        let config = CertificationConfig::new(log2);
        let plan = SweepPlan::new(&f, &config).unwrap();
        let cert = certify::certify_signs(&f, &config).unwrap();
        prop_assert!(cert.sound);
        let eval = GridEvaluator::new(&f, plan.spec).unwrap();
        let mesh = plan.spec.mesh();
        let steps = 20usize;
        let mut flagged = 0;
        for flat in 0..plan.spec.total_points() {
            let index = plan.spec.unflatten(flat);
            let Some(negative) = plan.classify(eval.eval_index(&index).value) else { continue };
            flagged += 1;
            if flagged % 7 != 0 {
                continue;
            }
            let (corner, _) = certify::cell_geometry(&plan.spec, &index);
            let total = steps.pow(f.dim() as u32);
            for sub in 0..total {
                let mut rem = sub;
                let y: Vec<f64> = corner
                    .iter()
                    .map(|c| {
                        let i = rem % steps;
                        rem /= steps;
                        c + mesh * i as f64 / (steps - 1) as f64
                    })
                    .collect();
                let v = f.evaluate_with_error(&y).unwrap();
                let certain = if negative { v.value + v.err < 0.0 } else { v.value - v.err > 0.0 };
                prop_assert!(certain, "sign change at {:?}", y);
            }
        }
        prop_assert_eq!(flagged as u64, cert.m_negative + cert.m_positive);
    }

    /// A semi-integral antisymmetry maps cell centers to cell centers, so the counts balance.
    #[test]
    fn antisymmetric_inputs_balance_counts(f in (1usize..=3).prop_flat_map(|d| polynomial(d, 3, 3)), log2 in 2u32..=5) {
        prop_assume!(symmetry::find_semi_integral(&f).certificate().is_some());
        let c = certify::certify_signs(&f, &CertificationConfig::new(log2)).unwrap();
        prop_assert_eq!(c.m_negative, c.m_positive);
        let d = analysis::distribution(&f, log2, 8, &[1.0, 3.0], None).unwrap();
        prop_assert_eq!(d.positive_count, d.negative_count);
        prop_assert_eq!(d.extrema.0, -d.extrema.1);
        let mirrored: Vec<u64> = d.histogram.counts.iter().rev().copied().collect();
        // Values exactly on a bin edge may land on either side of the mirror.
        for (a, b) in d.histogram.counts.iter().zip(&mirrored) {
            prop_assert!(a.abs_diff(*b) <= d.zero_count + d.samples / 1000 + 2);
        }
    }
}

#[test]
fn polynomial_documents_round_trip() {
    let f = TrigPolynomial::parse(r#"{"dim":2,"terms":[{"nu":[-3,1],"sin":"2/7","cos":0.25},{"nu":[1,1],"sin":-1}]}"#).unwrap();
    let text = serde_json::to_string(&f.to_document()).unwrap();
    assert_eq!(TrigPolynomial::parse(&text).unwrap(), f);
}
