//! Certified lower bounds on `vol{f < 0}` and `vol{f > 0}` from a uniform grid.
//!
//! A cell of side `L` around a grid point `x` is certified negative when the
//! computed value satisfies `v(x) < -t e`, where `e` bounds the variation of
//! `f` over the cell and `t` is the threshold factor. With tracked evaluation
//! error `err(x) < b e` and `b < t - 1`, every `y` in the cell obeys
//! `f(y) <= f(x) + e <= v(x) + err(x) + e < (1 + b - t) e < 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::grid::{self, GridEvaluator, GridOffset, GridSpec};
use crate::trigpoly::{GradientBoundMode, TrigPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellErrorFormula {
    /// `e = G sqrt(n) L`, the full cell diagonal.
    #[default]
    FullDiagonal,
    /// `e = G sqrt(n) L / 2`, center to corner.
    HalfDiagonal,
}

/// Upper bound on `|f(x) - f(y)|` for `y` in the cube of side `mesh` centered at `x`.
pub fn cell_error(gradient_bound: f64, mesh: f64, dim: usize, formula: CellErrorFormula) -> f64 {
    let diag = (dim as f64).sqrt().next_up();
    let e = (gradient_bound * diag).next_up() * mesh;
    let e = e.next_up();
    match formula {
        CellErrorFormula::FullDiagonal => e,
        CellErrorFormula::HalfDiagonal => (e / 2.0).next_up(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificationConfig {
    pub grid_log2: u32,
    pub gradient_bound_mode: GradientBoundMode,
    pub cell_error_formula: CellErrorFormula,
    pub threshold_factor: f64,
    pub accuracy_budget_factor: f64,
    pub offset: GridOffset,
}

impl CertificationConfig {
    pub fn new(grid_log2: u32) -> Self {
        Self {
            grid_log2,
            gradient_bound_mode: GradientBoundMode::Computed,
            cell_error_formula: CellErrorFormula::FullDiagonal,
            threshold_factor: 1.1,
            accuracy_budget_factor: 0.05,
            offset: GridOffset::Half,
        }
    }

    /// Gradient bound `6 pi` for the `T^3` counterexample together with the
    /// full-diagonal cell error and the 1.1 / 0.05 factors.
    pub fn reference_constants(grid_log2: u32) -> Self {
        Self { gradient_bound_mode: GradientBoundMode::Override(6.0 * std::f64::consts::PI), ..Self::new(grid_log2) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_log2 < 1 {
            return Err(Error::InvalidConfig("grid_log2 must be at least 1".into()));
        }
        if self.threshold_factor.is_nan() || self.threshold_factor <= 1.0 {
            return Err(Error::InvalidConfig(format!("threshold factor {} must exceed 1", self.threshold_factor)));
        }
        if !(self.accuracy_budget_factor > 0.0 && self.accuracy_budget_factor < self.threshold_factor - 1.0) {
            return Err(Error::InvalidConfig(format!(
                "accuracy budget {} must lie in (0, threshold - 1)",
                self.accuracy_budget_factor
            )));
        }
        if let GradientBoundMode::Override(g) = self.gradient_bound_mode {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidConfig(format!("gradient override {g} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub config: CertificationConfig,
    pub dim: usize,
    pub n_cells: u64,
    pub m_negative: u64,
    pub m_positive: u64,
    pub gradient_bound: f64,
    /// Cell error bound `e`.
    pub e: f64,
    pub max_eval_error: f64,
    pub sound: bool,
}

impl GridCertificate {
    fn fraction(m: u64, n: u64) -> BigRational {
        BigRational::new(BigInt::from(m), BigInt::from(n))
    }

    pub fn neg_fraction(&self) -> BigRational {
        Self::fraction(self.m_negative, self.n_cells)
    }

    pub fn pos_fraction(&self) -> BigRational {
        Self::fraction(self.m_positive, self.n_cells)
    }

    pub fn neg_fraction_f64(&self) -> f64 {
        self.m_negative as f64 / self.n_cells as f64
    }

    pub fn pos_fraction_f64(&self) -> f64 {
        self.m_positive as f64 / self.n_cells as f64
    }

    /// Fraction of cells whose sign is not certified.
    pub fn uncertain_fraction_f64(&self) -> f64 {
        (self.n_cells - self.m_negative - self.m_positive) as f64 / self.n_cells as f64
    }

    pub fn to_document(&self) -> GridCertificateDocument {
        GridCertificateDocument {
            certificate: self.clone(),
            neg_fraction: exact::format_rational(&self.neg_fraction()),
            pos_fraction: exact::format_rational(&self.pos_fraction()),
            neg_fraction_f64: self.neg_fraction_f64(),
            pos_fraction_f64: self.pos_fraction_f64(),
            uncertain_fraction_f64: self.uncertain_fraction_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCertificateDocument {
    #[serde(flatten)]
    pub certificate: GridCertificate,
    pub neg_fraction: String,
    pub pos_fraction: String,
    pub neg_fraction_f64: f64,
    pub pos_fraction_f64: f64,
    pub uncertain_fraction_f64: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    negative: u64,
    positive: u64,
    max_err: f64,
}

/// Thresholds and grid derived from a config.
#[derive(Debug, Clone, Copy)]
pub struct SweepPlan {
    pub spec: GridSpec,
    pub gradient_bound: f64,
    pub e: f64,
    pub threshold: f64,
    pub budget: f64,
}

impl SweepPlan {
    pub fn new(f: &TrigPolynomial, config: &CertificationConfig) -> Result<Self> {
        config.validate()?;
        let spec = GridSpec::new(f.dim(), config.grid_log2, config.offset)?;
        let gradient_bound = config.gradient_bound_mode.resolve(f);
        let e = cell_error(gradient_bound, spec.mesh(), f.dim(), config.cell_error_formula);
        // threshold - e is computed exactly (Sterbenz), so the check below
        // gives threshold > e + budget in real arithmetic.
        let threshold = config.threshold_factor * e;
        let budget = (config.accuracy_budget_factor * e).next_down();
        if threshold - e <= budget || budget.is_nan() {
            return Err(Error::InvalidConfig("threshold - 1 must exceed the accuracy budget".into()));
        }
        Ok(Self { spec, gradient_bound, e, threshold, budget })
    }

    /// Classification of one computed value: `Some(true)` certified negative,
    /// `Some(false)` certified positive, `None` undecided.
    #[inline(always)]
    pub fn classify(&self, value: f64) -> Option<bool> {
        if value < -self.threshold {
            Some(true)
        } else if value > self.threshold {
            Some(false)
        } else {
            None
        }
    }
}

/// Counts cell centers below `-t e` and above `t e`; deterministic for every thread count.
pub fn certify_signs(f: &TrigPolynomial, config: &CertificationConfig) -> Result<GridCertificate> {
    certify_signs_with_threads(f, config, None)
}

pub fn certify_signs_with_threads(
    f: &TrigPolynomial,
    config: &CertificationConfig,
    threads: Option<usize>,
) -> Result<GridCertificate> {
    let plan = SweepPlan::new(f, config)?;
    let evaluator = GridEvaluator::new(f, plan.spec)?;
    let tallies = grid::sweep_chunks(&evaluator, threads, |ev, start, end| {
        let mut t = Tally::default();
        ev.for_each_in_range(start, end, |_, enc| {
            match plan.classify(enc.value) {
                Some(true) => t.negative += 1,
                Some(false) => t.positive += 1,
                None => {}
            }
            if enc.err > t.max_err {
                t.max_err = enc.err;
            }
        });
        t
    })?;
    let total = tallies.into_iter().fold(Tally::default(), |acc, t| Tally {
        negative: acc.negative + t.negative,
        positive: acc.positive + t.positive,
        max_err: acc.max_err.max(t.max_err),
    });
    Ok(GridCertificate {
        config: *config,
        dim: f.dim(),
        n_cells: plan.spec.total_points(),
        m_negative: total.negative,
        m_positive: total.positive,
        gradient_bound: plan.gradient_bound,
        e: plan.e,
        max_eval_error: total.max_err,
        sound: total.max_err < plan.budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub sign: Sign,
    pub fraction: f64,
}

impl std::str::FromStr for Claim {
    type Err = Error;

    /// `neg:0.52` or `pos:0.34`.
    fn from_str(s: &str) -> Result<Self> {
        let (sign, frac) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("claim {s:?} is not of the form neg:F or pos:F")))?;
        let sign = match sign {
            "neg" | "negative" => Sign::Negative,
            "pos" | "positive" => Sign::Positive,
            other => return Err(Error::InvalidConfig(format!("unknown claim sign {other:?}"))),
        };
        let fraction: f64 = frac.parse().map_err(|_| Error::InvalidConfig(format!("bad claim fraction {frac:?}")))?;
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidConfig(format!("claim fraction {fraction} must lie in (0,1)")));
        }
        Ok(Claim { sign, fraction })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub claim: Claim,
    pub holds: bool,
    pub certificate: GridCertificate,
}

/// True iff the certificate is sound and the certified fraction of `claim.sign`
/// is at least `claim.fraction` (compared exactly).
pub fn certify_claim(f: &TrigPolynomial, config: &CertificationConfig, claim: Claim) -> Result<ClaimOutcome> {
    certify_claim_with_threads(f, config, claim, None)
}

pub fn certify_claim_with_threads(
    f: &TrigPolynomial,
    config: &CertificationConfig,
    claim: Claim,
    threads: Option<usize>,
) -> Result<ClaimOutcome> {
    if !(claim.fraction > 0.0 && claim.fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("claim fraction {} must lie in (0,1)", claim.fraction)));
    }
    let certificate = certify_signs_with_threads(f, config, threads)?;
    Ok(judge_claim(claim, certificate))
}

pub fn judge_claim(claim: Claim, certificate: GridCertificate) -> ClaimOutcome {
    let achieved = match claim.sign {
        Sign::Negative => certificate.neg_fraction(),
        Sign::Positive => certificate.pos_fraction(),
    };
    let target = BigRational::from_float(claim.fraction).expect("finite claim");
    let holds = certificate.sound && achieved >= target;
    ClaimOutcome { claim, holds, certificate }
}

/// Lower corner and center of the cube of side `L` around a grid point.
pub fn cell_geometry(spec: &GridSpec, index: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let center = spec.point(index);
    let half = spec.mesh() / 2.0;
    (center.iter().map(|c| c - half).collect(), center)
}
