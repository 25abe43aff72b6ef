//! Command-line front end: threshold tables, criterion grids, continuation
//! runs, branch verification, singular-profile quadrature checks, the
//! boundedness bootstrap, and the randomized inequality sampler.
//!
//! Exit codes: 0 success, 1 verification failure (including a continuation
//! that exhausted its record budget), 2 configuration or schema error.

use clap::{Args, Parser, Subcommand};
use nlsys::config::{
    load_file, parse_sweep, thread_count_from_env, CheckKind, ContinueConfig, FileConfig,
    PartialContinue, PartialVerify, VerifyConfig,
};
use nlsys::discretize::{pv_apply, Profile};
use nlsys::error::Error;
use nlsys::kernel::SpectralKernel;
use nlsys::report::{
    branch_from_json, branch_to_csv, branch_to_json, sampling_to_json, verify_to_json,
    BranchArtifact, CheckArtifact, SamplingArtifact, VerifyArtifact, SCHEMA_VERSION,
};
use nlsys::solve::{continue_branch, BranchStatus, SolveContext};
use nlsys::systems::RayParams;
use nlsys::verify::{
    check_corollary_inequality, check_integral_estimates, corollary_bank,
    elementary_inequalities, EstimateReport, StabilityForm,
};
use nlsys::{special, Result};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nlsys",
    version,
    about = "Coupled nonlocal elliptic systems: branches, stability, and estimate verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form dimension thresholds and related constants
    /// over a parameter grid.
    Thresholds(ThresholdsArgs),
    /// Evaluate the Gamma-function stability criteria over a parameter grid.
    Criterion(CriterionArgs),
    /// Walk a minimal solution branch to its endpoint and write the records.
    Continue(ContinueArgs),
    /// Re-check a stored branch file: residuals, stability, and the
    /// inequality banks.
    Verify(VerifyArgs),
    /// Compare the principal-value quadrature on explicit singular profiles
    /// against their closed-form right-hand sides.
    SingularCheck(SingularCheckArgs),
    /// Run the integrability-exponent bootstrap and report its verdict.
    Bootstrap(BootstrapArgs),
    /// Sample the five pointwise inequalities at random and count violations.
    Inequalities(InequalitiesArgs),
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Dimension sweep: comma list or start:end:count.
    #[arg(long = "n-range", default_value = "1:10:10")]
    n_range: String,
    /// Kernel order sweep (values in (0, 1]).
    #[arg(long = "s-range", default_value = "0.5")]
    s_range: String,
    /// Power exponent sweep.
    #[arg(long = "p-range", default_value = "2")]
    p_range: String,
    /// Gradient partner exponent (defaults to each row's p).
    #[arg(long)]
    q: Option<f64>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriterionArgs {
    /// Criterion family: gelfand or lane_emden.
    #[arg(long, default_value = "gelfand")]
    family: String,
    /// Dimension sweep.
    #[arg(long = "n-range", default_value = "7")]
    n_range: String,
    /// Kernel order sweep.
    #[arg(long = "s-range", default_value = "0.05:0.95:19")]
    s_range: String,
    /// Power exponent (lane_emden only).
    #[arg(long)]
    p: Option<f64>,
    /// Also bisect the dimension crossover at each s and report it.
    #[arg(long)]
    crossover: bool,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ContinueArgs {
    /// System family: gelfand, lane_emden, mems, or gradient.
    #[arg(long)]
    family: Option<String>,
    /// Power exponent (lane_emden, mems, gradient).
    #[arg(long)]
    p: Option<f64>,
    /// Gradient partner exponent.
    #[arg(long)]
    q: Option<f64>,
    /// Kernel order in (0, 1).
    #[arg(long)]
    s: Option<f64>,
    /// Ray slope gamma = sigma * lambda.
    #[arg(long)]
    sigma: Option<f64>,
    /// Interior node count.
    #[arg(long)]
    n: Option<usize>,
    /// Domain half-width.
    #[arg(long)]
    r: Option<f64>,
    /// Singular cell rule: cell_exact or taylor2.
    #[arg(long = "rule")]
    singular_rule: Option<String>,
    /// Recorded seed (continuation itself is deterministic).
    #[arg(long)]
    seed: Option<u64>,
    /// Starting parameter; defaults to 1e-3 times the principal eigenvalue.
    #[arg(long = "lambda-init")]
    lambda_init: Option<f64>,
    /// Initial relative parameter step.
    #[arg(long = "initial-step")]
    initial_step: Option<f64>,
    /// Relative bracket width declaring the endpoint located.
    #[arg(long = "min-step")]
    min_step: Option<f64>,
    /// Record budget.
    #[arg(long = "max-records")]
    max_records: Option<usize>,
    /// Optional TOML configuration file (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Branch JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV plot table path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Branch JSON file to verify.
    #[arg(long)]
    branch: PathBuf,
    /// Comma-separated selection: stability, residual, corollary,
    /// estimates, or all.
    #[arg(long)]
    checks: Option<String>,
    /// Moment exponent for the integral estimates (family default when
    /// absent).
    #[arg(long)]
    t: Option<f64>,
    /// Verify every k-th record.
    #[arg(long)]
    stride: Option<usize>,
    /// Recorded seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Optional TOML configuration file (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SingularCheckArgs {
    /// Dimension of the singular-profile identity; the quadrature oracle is
    /// one-dimensional.
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    /// Kernel order in (0, 1).
    #[arg(long)]
    s: f64,
    /// Power exponent; absent selects the exponential profile.
    #[arg(long)]
    p: Option<f64>,
    /// Evaluation points in (0, 1).
    #[arg(long, default_value = "0.25,0.5,0.75")]
    points: String,
    /// Acceptance threshold on the relative error.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Quadrature tolerance.
    #[arg(long = "quad-tol", default_value_t = 1e-10)]
    quad_tol: f64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BootstrapArgs {
    /// Dimension parameter (real-valued).
    #[arg(long)]
    n: f64,
    /// Kernel order in (0, 1).
    #[arg(long)]
    s: f64,
    /// Starting exponent; defaults to the embedding limit n/(n-2s).
    #[arg(long)]
    p0: Option<f64>,
    /// Step budget.
    #[arg(long = "max-steps", default_value_t = 10_000)]
    max_steps: usize,
    /// Replay the hand-tuned opening stages instead of the plain recursion.
    #[arg(long)]
    staged: bool,
}

#[derive(Args)]
struct InequalitiesArgs {
    /// Random samples per inequality.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Schema(_) => 2,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    // The only environment variable read; validated up front so a bad value
    // is a configuration error, not a silent fallback.
    let _threads = thread_count_from_env()?;
    match cli.command {
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Criterion(args) => cmd_criterion(args),
        Command::Continue(args) => cmd_continue(args),
        Command::Verify(args) => cmd_verify(args),
        Command::SingularCheck(args) => cmd_singular_check(args),
        Command::Bootstrap(args) => cmd_bootstrap(args),
        Command::Inequalities(args) => cmd_inequalities(args),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

// ---- thresholds ----------------------------------------------------------

struct ThresholdRow {
    gelfand: f64,
    lane_emden: f64,
    mems: f64,
    gradient: Option<f64>,
    gelfand_classical: f64,
    lane_emden_classical: f64,
    mems_classical: f64,
    gelfand_criterion: Option<special::Verdict>,
    lane_emden_criterion: Option<special::Verdict>,
    singular_lambda: Option<f64>,
    singular_amplitude: Option<f64>,
}

/// One table cell. Orders strictly inside (0, 1) carry the full report;
/// `s = 1` evaluates the same closed-form bounds at the classical limit,
/// where the Gamma criteria and singular constants are not defined.
fn threshold_row(n: f64, s: f64, p: f64, q: Option<f64>) -> Result<ThresholdRow> {
    let gelfand_classical = special::threshold_gelfand(1.0)?;
    let lane_emden_classical = special::threshold_lane_emden(1.0, p)?;
    let mems_classical = special::threshold_mems(1.0, p)?;
    let row = if s < 1.0 {
        let report = special::ThresholdReport::evaluate(n, s, p, q)?;
        ThresholdRow {
            gelfand: report.gelfand_bound,
            lane_emden: report.lane_emden_bound,
            mems: report.mems_bound,
            gradient: report.gradient_bound,
            gelfand_classical,
            lane_emden_classical,
            mems_classical,
            gelfand_criterion: report.gelfand_gamma_ok,
            lane_emden_criterion: report.lane_emden_gamma_ok,
            singular_lambda: report.singular_lambda,
            singular_amplitude: report.singular_amplitude,
        }
    } else {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!(
                "dimension n must be positive, got {n}"
            )));
        }
        ThresholdRow {
            gelfand: special::threshold_gelfand(s)?,
            lane_emden: special::threshold_lane_emden(s, p)?,
            mems: special::threshold_mems(s, p)?,
            gradient: special::threshold_gradient(s, p, q.unwrap_or(p)).ok(),
            gelfand_classical,
            lane_emden_classical,
            mems_classical,
            gelfand_criterion: None,
            lane_emden_criterion: None,
            singular_lambda: None,
            singular_amplitude: None,
        }
    };
    Ok(row)
}

fn cmd_thresholds(args: ThresholdsArgs) -> Result<i32> {
    let ns = parse_sweep(&args.n_range)?;
    let ss = parse_sweep(&args.s_range)?;
    let ps = parse_sweep(&args.p_range)?;
    let json = match args.format.as_str() {
        "csv" => false,
        "json" => true,
        other => {
            return Err(Error::Config(format!(
                "unknown format {other:?} (expected csv or json)"
            )))
        }
    };

    let verdict_name = |v: Option<special::Verdict>| match v {
        Some(special::Verdict::True) => "true",
        Some(special::Verdict::False) => "false",
        Some(special::Verdict::Marginal) => "marginal",
        None => "",
    };
    let opt17 = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    let opt_json = |x: Option<f64>| x.map(fmt17).unwrap_or_else(|| "null".into());

    let mut rows = Vec::new();
    for &n in &ns {
        for &s in &ss {
            for &p in &ps {
                // Pole inputs (p at or below 1, s outside (0, 1], bad n)
                // keep their row with an annotation instead of erroring
                // the whole table.
                match threshold_row(n, s, p, args.q) {
                    Ok(row) => rows.push((n, s, p, Some(row), String::new())),
                    Err(e) => rows.push((n, s, p, None, e.to_string())),
                }
            }
        }
    }

    let mut text = String::new();
    if json {
        text.push_str("{\n  \"schema_version\": 1,\n  \"rows\": [");
        for (i, (n, s, p, row, note)) in rows.iter().enumerate() {
            text.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = write!(
                text,
                "    {{\"n\": {}, \"s\": {}, \"p\": {}",
                fmt17(*n),
                fmt17(*s),
                fmt17(*p)
            );
            match row {
                Some(row) => {
                    let _ = write!(
                        text,
                        ", \"gelfand\": {}, \"lane_emden\": {}, \"mems\": {}, \
                         \"gradient\": {}, \"gelfand_classical\": {}, \
                         \"lane_emden_classical\": {}, \"mems_classical\": {}, \
                         \"gelfand_criterion\": \"{}\", \"lane_emden_criterion\": \"{}\", \
                         \"singular_lambda\": {}, \"singular_amplitude\": {}}}",
                        fmt17(row.gelfand),
                        fmt17(row.lane_emden),
                        fmt17(row.mems),
                        opt_json(row.gradient),
                        fmt17(row.gelfand_classical),
                        fmt17(row.lane_emden_classical),
                        fmt17(row.mems_classical),
                        verdict_name(row.gelfand_criterion),
                        verdict_name(row.lane_emden_criterion),
                        opt_json(row.singular_lambda),
                        opt_json(row.singular_amplitude),
                    );
                }
                None => {
                    let _ = write!(text, ", \"note\": \"skipped: {}\"}}", note.replace('"', "'"));
                }
            }
        }
        text.push_str(if rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    } else {
        text.push_str(
            "n,s,p,gelfand,lane_emden,mems,gradient,gelfand_classical,lane_emden_classical,\
             mems_classical,gelfand_criterion,lane_emden_criterion,singular_lambda,\
             singular_amplitude,note\n",
        );
        for (n, s, p, row, note) in &rows {
            match row {
                Some(row) => {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                        fmt17(*n),
                        fmt17(*s),
                        fmt17(*p),
                        fmt17(row.gelfand),
                        fmt17(row.lane_emden),
                        fmt17(row.mems),
                        opt17(row.gradient),
                        fmt17(row.gelfand_classical),
                        fmt17(row.lane_emden_classical),
                        fmt17(row.mems_classical),
                        verdict_name(row.gelfand_criterion),
                        verdict_name(row.lane_emden_criterion),
                        opt17(row.singular_lambda),
                        opt17(row.singular_amplitude),
                    );
                }
                None => {
                    let _ = writeln!(
                        text,
                        "{},{},{},,,,,,,,,,,,skipped: {}",
                        fmt17(*n),
                        fmt17(*s),
                        fmt17(*p),
                        note.replace(',', ";")
                    );
                }
            }
        }
    }
    emit(args.out.as_ref(), &text)?;
    Ok(0)
}

// ---- criterion -----------------------------------------------------------

/// Locate the dimension at which the criterion flips from holding to
/// failing for good. The verdict may also fail in a thin band just above
/// the domain floor (where the singular profile degenerates), so the scan
/// brackets the last hold-to-fail transition below `hi` and bisects it.
fn crossover_dimension(
    criterion: &dyn Fn(f64) -> Result<special::Verdict>,
    floor: f64,
    hi: f64,
) -> Result<f64> {
    const SCAN: usize = 256;
    let step = (hi - floor) / SCAN as f64;
    let holds_at = |n: f64| -> Result<bool> {
        Ok(match criterion(n) {
            Ok(v) => v.holds(),
            // Below the effective domain of the Gamma arguments counts as
            // not holding; a genuine scan over [floor, hi] touches it only
            // at the first grid points.
            Err(Error::Domain(_)) => false,
            Err(e) => return Err(e),
        })
    };
    let mut bracket = None;
    for i in 0..SCAN {
        let a = floor + step * i as f64;
        let b = floor + step * (i + 1) as f64;
        if holds_at(a)? && !holds_at(b)? {
            bracket = Some((a, b));
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Domain(format!(
            "criterion never flips from holding to failing in [{floor}, {hi}]"
        ))
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn cmd_criterion(args: CriterionArgs) -> Result<i32> {
    let ns = parse_sweep(&args.n_range)?;
    let ss = parse_sweep(&args.s_range)?;
    let lane_emden = match args.family.as_str() {
        "gelfand" => false,
        "lane_emden" => true,
        other => {
            return Err(Error::Config(format!(
                "unknown criterion family {other:?} (expected gelfand or lane_emden)"
            )))
        }
    };
    if lane_emden && args.p.is_none() {
        return Err(Error::Config("the lane_emden criterion needs --p".into()));
    }

    let mut text = String::from("family,n,s,p,verdict,crossover_n\n");
    for &s in &ss {
        let criterion = |n: f64| -> Result<special::Verdict> {
            if lane_emden {
                special::lane_emden_gamma_criterion(n, s, args.p.unwrap())
            } else {
                special::gelfand_gamma_criterion(n, s)
            }
        };
        let crossover = if args.crossover {
            fmt17(crossover_dimension(&criterion, 2.0 * s, 64.0)?)
        } else {
            String::new()
        };
        for &n in &ns {
            let verdict = match criterion(n)? {
                special::Verdict::True => "true",
                special::Verdict::False => "false",
                special::Verdict::Marginal => "marginal",
            };
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                args.family,
                fmt17(n),
                fmt17(s),
                args.p.map(fmt17).unwrap_or_default(),
                verdict,
                crossover
            );
        }
    }
    emit(args.out.as_ref(), &text)?;
    Ok(0)
}

// ---- continue ------------------------------------------------------------

fn cmd_continue(args: ContinueArgs) -> Result<i32> {
    let file = match &args.config {
        Some(path) => load_file(&std::fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };
    let flags = PartialContinue {
        family: args.family,
        p: args.p,
        q: args.q,
        s: args.s,
        sigma: args.sigma,
        n: args.n,
        r: args.r,
        singular_rule: args.singular_rule,
        seed: args.seed,
        lambda_init: args.lambda_init,
        initial_step: args.initial_step,
        min_step: args.min_step,
        max_records: args.max_records,
    };
    let config = ContinueConfig::resolve(flags.or(file.continue_run.unwrap_or_default()))?;

    let system = config.system()?;
    let op = config.operator()?;
    let settings = nlsys::solve::SolverSettings::for_system(&system);
    let branch = continue_branch(&op, &system, config.sigma, &config.policy(), &settings)?;
    let artifact = BranchArtifact::from_branch(&branch, &config.meta());

    emit(args.out.as_ref(), &branch_to_json(&artifact)?)?;
    if let Some(csv_path) = &args.csv {
        std::fs::write(csv_path, branch_to_csv(&artifact)?)?;
    }
    let (lo, hi) = branch.bracket;
    eprintln!(
        "status {} with {} records; endpoint bracket [{:.6e}, {}]",
        artifact.status,
        branch.records.len(),
        lo,
        hi.map(|h| format!("{h:.6e}")).unwrap_or_else(|| "open".into()),
    );
    // A branch that ran out of budget before locating its endpoint is a
    // failed run; both fold and constraint endings are complete answers.
    Ok(match branch.status {
        BranchStatus::FoldFound | BranchStatus::ConstraintHit => 0,
        BranchStatus::StepLimit => 1,
    })
}

// ---- verify --------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let file = match &args.config {
        Some(path) => load_file(&std::fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };
    let flags = PartialVerify {
        checks: args.checks,
        t: args.t,
        stride: args.stride,
        seed: args.seed,
    };
    let config = VerifyConfig::resolve(flags.or(file.verify.unwrap_or_default()))?;

    let text = std::fs::read_to_string(&args.branch)?;
    let artifact = branch_from_json(&text)?;
    let system = artifact.to_system()?;
    let op = artifact.to_operator()?;
    let ctx = SolveContext::new(&op, &system)?;
    let exponent = config.exponent_for(&system);

    let mut reports: Vec<EstimateReport> = Vec::new();
    for i in (0..artifact.records.len()).step_by(config.stride) {
        let rec = &artifact.records[i];
        let (u, v) = artifact.record_functions(i);
        let params = RayParams::new(rec.gamma / rec.lambda, rec.lambda)?;
        for check in &config.checks {
            match check {
                CheckKind::Residual => {
                    let recomputed = ctx.residual_sup(&params, &u, &v)?;
                    let bound = 100.0 * rec.residual + 1e-8;
                    reports.push(EstimateReport::new(
                        format!("record-residual:{i}"),
                        recomputed,
                        bound,
                        0.0,
                    ));
                }
                CheckKind::Stability => {
                    let form =
                        StabilityForm::new(&op, &system, rec.lambda, rec.gamma, &u, &v)?;
                    let smallest = form.smallest(None)?.value;
                    reports.push(EstimateReport::new(
                        format!("record-stability:{i}"),
                        0.0,
                        smallest,
                        1e-12,
                    ));
                    reports.push(EstimateReport::new(
                        format!("record-stability-recorded:{i}"),
                        (smallest - rec.stability).abs(),
                        1e-6 * smallest.abs().max(1.0),
                        0.0,
                    ));
                }
                CheckKind::Corollary => {
                    let bank = corollary_bank(&op, &system, &u, &v)?;
                    let mut batch = check_corollary_inequality(
                        &op, &system, rec.lambda, rec.gamma, &u, &v, &bank,
                    )?;
                    for r in &mut batch {
                        r.name = format!("{}:{i}", r.name);
                    }
                    reports.extend(batch);
                }
                CheckKind::Estimates => {
                    let mut batch = check_integral_estimates(
                        &op, &system, rec.lambda, rec.gamma, &u, &v, exponent,
                    )?;
                    for r in &mut batch {
                        r.name = format!("{}:{i}", r.name);
                    }
                    reports.extend(batch);
                }
            }
        }
    }

    let all_pass = reports.iter().all(|r| r.pass);
    let verify = VerifyArtifact {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        source: args.branch.display().to_string(),
        checks: config.checks.iter().map(|c| c.name().to_string()).collect(),
        all_pass,
        reports: reports.iter().map(CheckArtifact::from).collect(),
    };
    emit(args.out.as_ref(), &verify_to_json(&verify)?)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!(
        "{} checks on {} records: {} failed",
        reports.len(),
        artifact.records.len().div_ceil(config.stride),
        failed
    );
    Ok(if all_pass { 0 } else { 1 })
}

// ---- singular-check ------------------------------------------------------

fn cmd_singular_check(args: SingularCheckArgs) -> Result<i32> {
    if args.n != 1.0 {
        return Err(Error::Config(format!(
            "the quadrature oracle is one-dimensional; n must be 1, got {}",
            args.n
        )));
    }
    if !(args.tol > 0.0) || !(args.quad_tol > 0.0) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    let points = parse_sweep(&args.points)?;
    for &x in &points {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Config(format!(
                "evaluation points must lie in (0, 1), got {x}"
            )));
        }
    }
    let kernel = SpectralKernel::fractional_laplacian(args.s)?;
    let s = args.s;

    // Exponential profile: L log(1/|y|^{2s}) = lambda |x|^{-2s}; power
    // profile: L (A |y|^{-2s/(p-1)}) = 2^{2s} A^p |x|^{-2sp/(p-1)}.
    let (profile, want): (Profile, Box<dyn Fn(f64) -> Result<f64>>) = match args.p {
        None => {
            let lambda = special::singular_lambda_gelfand(args.n, s)?;
            (
                Profile::LogSingular { scale: 2.0 * s },
                Box::new(move |x: f64| Ok(lambda * x.powf(-2.0 * s))),
            )
        }
        Some(p) => {
            let amp = special::singular_amplitude_lane_emden(args.n, s, p)?;
            let beta = 2.0 * s / (p - 1.0);
            let factor = (2.0 * s * std::f64::consts::LN_2).exp() * amp.powf(p);
            (
                Profile::PowerSingular { amp, beta },
                Box::new(move |x: f64| Ok(factor * x.powf(-beta - 2.0 * s))),
            )
        }
    };

    let mut text = String::from("x,got,want,rel_error,note\n");
    let mut worst = 0.0f64;
    let mut failed = 0usize;
    for &x in &points {
        match pv_apply(&kernel, profile, x, None, args.quad_tol) {
            Ok(got) => {
                let want = want(x)?;
                let rel = (got - want).abs() / want.abs().max(1e-300);
                worst = worst.max(rel);
                if rel > args.tol {
                    failed += 1;
                }
                let _ = writeln!(
                    text,
                    "{},{},{},{},{}",
                    fmt17(x),
                    fmt17(got),
                    fmt17(want),
                    fmt17(rel),
                    if rel > args.tol { "exceeds tolerance" } else { "" }
                );
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(text, "{},,,,error: {}", fmt17(x), e.to_string().replace(',', ";"));
            }
        }
    }
    emit(args.out.as_ref(), &text)?;
    eprintln!(
        "{} points, worst relative error {:.3e}, {} failed",
        points.len(),
        worst,
        failed
    );
    Ok(if failed == 0 { 0 } else { 1 })
}

// ---- bootstrap -----------------------------------------------------------

fn cmd_bootstrap(args: BootstrapArgs) -> Result<i32> {
    if args.max_steps == 0 {
        return Err(Error::Config("step budget must be positive".into()));
    }
    let trace = match (args.staged, args.p0) {
        (true, Some(_)) => {
            return Err(Error::Config(
                "--staged replays the fixed opening stages and excludes --p0".into(),
            ))
        }
        (true, None) => special::nedev_bootstrap_staged(args.n, args.s, args.max_steps)?,
        (false, Some(p0)) => special::nedev_bootstrap(args.n, args.s, p0, args.max_steps)?,
        (false, None) => special::nedev_bootstrap_from_embedding(args.n, args.s, args.max_steps)?,
    };
    let verdict = match trace.verdict {
        special::BootstrapVerdict::Bounded => "bounded",
        special::BootstrapVerdict::Inconclusive => "inconclusive",
    };
    println!(
        "verdict {verdict} after {} steps; exponents {} -> {}",
        trace.steps,
        fmt17(trace.exponents[0]),
        fmt17(*trace.exponents.last().unwrap()),
    );
    Ok(0)
}

// ---- inequalities --------------------------------------------------------

fn cmd_inequalities(args: InequalitiesArgs) -> Result<i32> {
    if args.samples == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let reports = elementary_inequalities(args.samples, args.seed);
    let artifact = SamplingArtifact::from_reports(args.seed, args.samples, &reports);
    emit(args.out.as_ref(), &sampling_to_json(&artifact)?)?;
    let violations: u64 = artifact.reports.iter().map(|r| r.violations).sum();
    eprintln!(
        "{} inequalities x {} samples: {} violations",
        reports.len(),
        args.samples,
        violations
    );
    Ok(if violations == 0 { 0 } else { 1 })
}
