use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use torsym::analysis::{self, MomentValue};
use torsym::certify::{self, CellErrorFormula, CertificationConfig, Claim, GridCertificate, Sign};
use torsym::grid::GridOffset;
use torsym::manifest::RunManifest;
use torsym::symmetry::{self, SemiIntegralSearch};
use torsym::trigpoly::GradientBoundMode;
use torsym::{Error, TrigPolynomial};

const EXIT_OK: u8 = 0;
const EXIT_CLAIM_FAILED: u8 = 1;
const EXIT_UNSOUND: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// Count from the 2^7 reproduction of the T^3 counterexample.
const REFERENCE_COUNT_LOG2_7: u64 = 1_123_200;

#[derive(Debug, Parser)]
#[command(name = "torsym", version, about = "Symmetry certificates, exact moments and certified sign volumes on flat tori")]
struct Cli {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 20240601)]
    seed: u64,
    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report (with manifest) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a polynomial and search for translation antisymmetries.
    Analyze(AnalyzeArgs),
    /// Certify lower bounds on the volumes where f < 0 and f > 0.
    Certify(CertifyArgs),
    /// Odd moment int f^(2k+1).
    Moments(MomentsArgs),
    /// Value distribution, sign ratio and L^p ratios on a grid.
    Dist(DistArgs),
    /// Certify that sin(x+y) - cos(y-z) - sin(x+z) on T^3 is negative on at least 52% of the volume.
    ReproduceCx(ReproduceArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    poly: PathBuf,
    /// Random points for the numerical antisymmetry check.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulaArg {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OffsetArg {
    Half,
    Zero,
}

impl From<OffsetArg> for GridOffset {
    fn from(o: OffsetArg) -> Self {
        match o {
            OffsetArg::Half => GridOffset::Half,
            OffsetArg::Zero => GridOffset::Zero,
        }
    }
}

#[derive(Debug, Args)]
struct CertifyArgs {
    poly: PathBuf,
    #[arg(long)]
    grid_log2: u32,
    /// Gradient bound 6*pi, full-diagonal cell error, factors 1.1 / 0.05.
    #[arg(long)]
    reference_constants: bool,
    #[arg(long)]
    grad_override: Option<f64>,
    #[arg(long, value_enum)]
    formula: Option<FormulaArg>,
    #[arg(long, value_enum, default_value = "half")]
    offset: OffsetArg,
    #[arg(long, default_value_t = 1.1)]
    threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    budget: f64,
    /// Claim to check, e.g. `neg:0.52`.
    #[arg(long)]
    claim: Option<String>,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    poly: PathBuf,
    #[arg(long)]
    k: u32,
    /// Exact rational value by sparse convolution (default).
    #[arg(long, conflicts_with = "quad")]
    exact: bool,
    /// Grid quadrature instead of the exact computation.
    #[arg(long, requires = "grid_log2")]
    quad: bool,
    #[arg(long)]
    grid_log2: Option<u32>,
    /// List the zero-sum frequency combinations.
    #[arg(long)]
    combinations: bool,
}

#[derive(Debug, Args)]
struct DistArgs {
    poly: PathBuf,
    #[arg(long)]
    grid_log2: u32,
    #[arg(long, default_value_t = 200)]
    bins: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    p: Vec<f64>,
    /// Also estimate int |f|^(2k) sign(f) for this k.
    #[arg(long)]
    signed_k: Option<u32>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(5..=12))]
    grid_log2: u32,
    #[arg(long, default_value_t = 0.52)]
    claim: f64,
}

struct Outcome {
    report: Value,
    text: String,
    exit: u8,
    config: Value,
    input: Option<Vec<u8>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; keep 2 reserved for unsound runs.
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a, &cli),
        Command::Certify(a) => run_certify(a, &cli),
        Command::Moments(a) => run_moments(a, &cli),
        Command::Dist(a) => run_dist(a, &cli),
        Command::ReproduceCx(a) => run_reproduce(a, &cli),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };

    let mut manifest = RunManifest::new(
        std::env::args().collect(),
        &outcome.config,
        outcome.input.as_deref(),
        cli.seed,
        cli.threads,
    );
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    if let Some(path) = &cli.out {
        manifest.outputs.push(path.display().to_string());
    }
    let mut report = outcome.report;
    report["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");

    if let Some(path) = &cli.out {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", outcome.text);
        println!("wall time: {:.3} s", manifest.wall_time_seconds);
    }
    ExitCode::from(outcome.exit)
}

fn load(path: &Path) -> Result<(TrigPolynomial, Vec<u8>), Error> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let f = TrigPolynomial::parse(&text).map_err(|e| match e {
        Error::Malformed(m) => Error::Malformed(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((f, bytes))
}

fn run_analyze(a: &AnalyzeArgs, cli: &Cli) -> Result<Outcome, Error> {
    let (f, bytes) = load(&a.poly)?;
    let class = f.classify();
    let trace = symmetry::dyadic_reduce(&f);
    let mut text = format!("polynomial: {f}\n");
    text += &format!(
        "eigenfunction: {}{}\nrank: {} of {} terms, class S: {}\n",
        class.is_eigenfunction,
        class
            .eigenvalue
            .map(|l| format!(" (lambda = {l}, lambda mod 4 = {})", l % 4))
            .unwrap_or_default(),
        class.rank,
        class.n_terms,
        class.in_class_s
    );
    text += &format!("dyadic reduction: {} step(s){}\n", trace.steps, if trace.steps > 0 { format!(" -> {}", trace.reduced) } else { String::new() });

    let mut report = json!({
        "polynomial": f.to_document(),
        "spectral_class": class,
        "dyadic_reduction": { "steps": trace.steps, "reduced": trace.reduced.to_document() },
    });

    match symmetry::find_semi_integral(&trace.reduced) {
        SemiIntegralSearch::Found(cert) => {
            let check = symmetry::verify_antisymmetry(&trace.reduced, &cert, a.samples, cli.seed)?;
            text += &format!(
                "semi-integral translation: u = {:?} (numerical max |f(x+u)+f(x)| = {:.2e})\n",
                cert.to_document(&trace.reduced).u,
                check.numerical_max
            );
            report["semi_integral"] = json!({
                "certificate": cert.to_document(&trace.reduced),
                "verification": check,
            });
            if trace.steps > 0 {
                let lifted = lift(&cert, trace.steps);
                lifted.check_exact(&f)?;
                text += &format!("lifted to original: u = {:?}\n", lifted.to_document(&f).u);
                report["lifted_certificate"] = serde_json::to_value(lifted.to_document(&f))?;
            }
        }
        SemiIntegralSearch::Infeasible(obstruction) => {
            text += &format!(
                "no semi-integral translation: the parities of {:?} sum to zero over an odd number of equations\n",
                obstruction.frequencies.iter().map(|n| n.0.clone()).collect::<Vec<_>>()
            );
            report["semi_integral"] = json!({ "obstruction": obstruction, "valid": obstruction.is_valid() });
        }
    }

    match symmetry::find_class_s_translation(&f) {
        Ok(cert) => {
            text += &format!("class S translation: u = {:?}\n", cert.to_document(&f).u);
            report["class_s_translation"] = serde_json::to_value(cert.to_document(&f))?;
        }
        Err(e) => {
            text += &format!("class S translation: none ({e})\n");
            report["class_s_translation"] = Value::Null;
        }
    }
    match symmetry::covering_matrix(&f) {
        Ok(cover) => {
            text += &format!("covering matrix: B = {:?}, N = {}, degree = {}\n", cover.b, cover.scale, cover.degree);
            let mut doc = serde_json::to_value(&cover)?;
            if let Some(p) = &cover.pulled_back {
                doc["pulled_back"] = serde_json::to_value(p.to_document())?;
            }
            report["covering_matrix"] = doc;
        }
        Err(_) => report["covering_matrix"] = Value::Null,
    }
    Ok(Outcome {
        report,
        text,
        exit: EXIT_OK,
        config: json!({ "command": "analyze", "samples": a.samples, "seed": cli.seed }),
        input: Some(bytes),
    })
}

/// If `h(y + u) = -h(y)` and `f(x) = h(2^steps x)`, then `f(x + u / 2^steps) = -f(x)`.
fn lift(cert: &symmetry::TranslationCertificate, steps: u32) -> symmetry::TranslationCertificate {
    use num_rational::BigRational;
    let scale = BigRational::from_integer(num_bigint::BigInt::from(2u8).pow(steps));
    let u = cert.u.iter().map(|v| torsym::exact::frac(&(v / &scale))).collect();
    symmetry::TranslationCertificate {
        u,
        kind: symmetry::CertificateKind::DyadicLift,
        witness: symmetry::Witness::DyadicLift {
            steps,
            w: cert.u.iter().map(|v| if v.numer() == &0.into() { 0 } else { 1 }).collect(),
        },
    }
}

fn certificate_text(c: &GridCertificate) -> String {
    format!(
        "grid 2^{} per axis ({} cells), gradient bound {:.6}, e = {:.6}\n\
         negative: {} / {} = {:.4}\npositive: {} / {} = {:.4}\nuncertain: {:.4}\n\
         max tracked evaluation error: {:.3e} (budget {:.3e}), sound: {}\n",
        c.config.grid_log2,
        c.n_cells,
        c.gradient_bound,
        c.e,
        c.m_negative,
        c.n_cells,
        c.neg_fraction_f64(),
        c.m_positive,
        c.n_cells,
        c.pos_fraction_f64(),
        c.uncertain_fraction_f64(),
        c.max_eval_error,
        c.config.accuracy_budget_factor * c.e,
        c.sound
    )
}

fn run_certify(a: &CertifyArgs, cli: &Cli) -> Result<Outcome, Error> {
    let (f, bytes) = load(&a.poly)?;
    let mut config =
        if a.reference_constants { CertificationConfig::reference_constants(a.grid_log2) } else { CertificationConfig::new(a.grid_log2) };
    if let Some(g) = a.grad_override {
        config.gradient_bound_mode = GradientBoundMode::Override(g);
    }
    if let Some(formula) = a.formula {
        config.cell_error_formula = match formula {
            FormulaArg::Full => CellErrorFormula::FullDiagonal,
            FormulaArg::Half => CellErrorFormula::HalfDiagonal,
        };
    }
    config.offset = a.offset.into();
    if !a.reference_constants {
        config.threshold_factor = a.threshold;
        config.accuracy_budget_factor = a.budget;
    }
    let claim: Option<Claim> = a.claim.as_deref().map(str::parse).transpose()?;
    let cert = certify::certify_signs_with_threads(&f, &config, cli.threads)?;
    let mut text = certificate_text(&cert);
    let mut report = json!({ "certificate": cert.to_document() });
    let mut exit = if cert.sound { EXIT_OK } else { EXIT_UNSOUND };
    if let Some(claim) = claim {
        let outcome = certify::judge_claim(claim, cert.clone());
        text += &format!("claim {:?} >= {}: {}\n", claim.sign, claim.fraction, if outcome.holds { "verified" } else { "NOT verified" });
        report["claim"] = json!({ "claim": claim, "holds": outcome.holds });
        if cert.sound && !outcome.holds {
            exit = EXIT_CLAIM_FAILED;
        }
    }
    Ok(Outcome {
        report,
        text,
        exit,
        config: json!({ "command": "certify", "config": config, "claim": claim }),
        input: Some(bytes),
    })
}

fn run_moments(a: &MomentsArgs, cli: &Cli) -> Result<Outcome, Error> {
    let (f, bytes) = load(&a.poly)?;
    let rep = if a.quad {
        analysis::odd_moment_quadrature(&f, a.k, a.grid_log2.expect("clap enforces grid_log2"), cli.threads)?
    } else {
        analysis::odd_moment_exact_with(&f, a.k, a.combinations, analysis::moments::DEFAULT_MAP_LIMIT)?
    };
    let mut text = match &rep.value {
        MomentValue::Exact(r) => format!("int f^{} = {} (exact)\n", 2 * a.k + 1, torsym::exact::format_rational(r)),
        MomentValue::Approx(v) => format!("int f^{} ~ {v:.15e} (quadrature)\n", 2 * a.k + 1),
    };
    for c in &rep.surviving_combinations {
        text += &format!(
            "  net multiplicities {:?}: contribution {}\n",
            c.net,
            torsym::exact::format_rational(&c.contribution)
        );
    }
    Ok(Outcome {
        report: json!({ "moment": rep }),
        text,
        exit: EXIT_OK,
        config: json!({ "command": "moments", "k": a.k, "quad": a.quad, "grid_log2": a.grid_log2, "combinations": a.combinations }),
        input: Some(bytes),
    })
}

fn run_dist(a: &DistArgs, cli: &Cli) -> Result<Outcome, Error> {
    let (f, bytes) = load(&a.poly)?;
    let d = analysis::distribution(&f, a.grid_log2, a.bins, &a.p, cli.threads)?;
    let mut text = format!(
        "samples: {}\npositive: {}  negative: {}  zero: {}\nsign ratio vol+/vol-: {}\nEDF symmetry: {:.3e}\nextrema: max {:.12} min {:.12}\n",
        d.samples,
        d.positive_count,
        d.negative_count,
        d.zero_count,
        d.sign_ratio.map_or("undefined".to_string(), |r| format!("{r:.6}")),
        d.edf_symmetry,
        d.extrema.0,
        d.extrema.1
    );
    for r in &d.lp_ratios {
        text += &format!("L^{} ratio: {:.6}\n", r.p, r.ratio);
    }
    let mut report = json!({ "distribution": d });
    if let Some(k) = a.signed_k {
        let s = analysis::signed_even_moment(&f, k, a.grid_log2, cli.threads)?;
        text += &format!("int |f|^{} sign(f) ~ {s:.6e}\n", 2 * k);
        report["signed_even_moment"] = json!({ "k": k, "estimate": s });
    }
    Ok(Outcome {
        report,
        text,
        exit: EXIT_OK,
        config: json!({ "command": "dist", "grid_log2": a.grid_log2, "bins": a.bins, "p": a.p, "signed_k": a.signed_k }),
        input: Some(bytes),
    })
}

fn run_reproduce(a: &ReproduceArgs, cli: &Cli) -> Result<Outcome, Error> {
    let g = TrigPolynomial::counterexample_g();
    let claim = Claim { sign: Sign::Negative, fraction: a.claim };
    let mut text = format!("g = {g}\n");
    let mut runs = Vec::new();
    for offset in [GridOffset::Half, GridOffset::Zero] {
        let config = CertificationConfig { offset, ..CertificationConfig::reference_constants(a.grid_log2) };
        let cert = certify::certify_signs_with_threads(&g, &config, cli.threads)?;
        text += &format!("-- grid offset {offset:?}\n{}", certificate_text(&cert));
        runs.push(cert);
    }
    let mut report = json!({
        "polynomial": g.to_document(),
        "certificates": runs.iter().map(|c| c.to_document()).collect::<Vec<_>>(),
    });
    if a.grid_log2 == 7 {
        let matching: Vec<GridOffset> =
            runs.iter().filter(|c| c.m_negative == REFERENCE_COUNT_LOG2_7).map(|c| c.config.offset).collect();
        text += &format!("offsets reproducing {REFERENCE_COUNT_LOG2_7}/2097152: {matching:?}\n");
        report["reference_count"] = json!({ "expected": REFERENCE_COUNT_LOG2_7, "matching_offsets": matching });
    }
    let primary = runs.swap_remove(0);
    let outcome = certify::judge_claim(claim, primary);
    text += &format!(
        "claim: negative on at least {:.1}% of T^3: {}\n",
        100.0 * a.claim,
        if outcome.holds { "verified" } else { "NOT verified" }
    );
    report["claim"] = json!({ "claim": claim, "holds": outcome.holds });
    let exit = if !outcome.certificate.sound {
        EXIT_UNSOUND
    } else if outcome.holds {
        EXIT_OK
    } else {
        EXIT_CLAIM_FAILED
    };
    Ok(Outcome {
        report,
        text,
        exit,
        config: json!({ "command": "reproduce-cx", "grid_log2": a.grid_log2, "claim": a.claim }),
        input: None,
    })
}
