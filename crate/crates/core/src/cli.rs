//! Command-line surface: state analysis reports (JSON) and figure-ready
//! sweeps/grids (CSV).
//!
//! Exit codes: 0 success, 2 input error, 3 unphysical state, 4 precondition
//! violation, 5 oracle failure. Floating-point output is rendered at 12
//! significant digits.

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::bell::{self, RegionVerdict};
use crate::channel;
use crate::criteria::{self, CriterionReport};
use crate::error::Error;
use crate::gaussian::{self, CovarianceMatrix, PhysicalityReport, StandardForm, SymplecticInvariants};
use crate::homodyne;
use crate::numeric::{fmt_sig, round_sig};
use crate::wigner;

const SIG_DIGITS: usize = 12;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNPHYSICAL: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;

#[derive(Parser)]
#[command(
    name = "cvbell",
    version,
    about = "Two-mode Gaussian state analysis: entanglement criteria, phase-space CHSH, \
             lossy-channel sweeps, homodyne reconstruction"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full state report: invariants, physicality, purity, standard form,
    /// criteria, region verdict (JSON).
    Analyze(StateArgs),
    /// Bell function maximization for a symmetric state (JSON).
    Bell(StateArgs),
    /// Region classification grid over the purity-correlation plane (CSV).
    Region(RegionArgs),
    /// Criteria and Bell sweep of a pure ancestor under loss (CSV).
    Evolve(EvolveArgs),
    /// Closed-form vs Wigner-combination equivalence suite.
    OracleCheck(OracleArgs),
    /// Homodyne sampling, covariance re-estimation and re-analysis (JSON).
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// JSON file with {"matrix": [[...]]} or {"standard_form": {...}}
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline symmetric state: mode variance n (requires --c)
    #[arg(long)]
    n: Option<f64>,
    /// Inline symmetric state: correlation amplitude c
    #[arg(long)]
    c: Option<f64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numeric tolerance for saturated comparisons
    /// (default: CVE_TOLERANCE env var, else 1e-9)
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Grid resolution per axis
    #[arg(long, default_value_t = 200)]
    resolution: usize,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Lowest transmittivity of the sweep
    #[arg(long, default_value_t = 0.5)]
    t_min: f64,
    /// Highest transmittivity of the sweep
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 51)]
    steps: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of random states to test
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Samples per homodyne setting
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap replicates for the Bell error bar
    #[arg(long, default_value_t = 20)]
    bootstrap: usize,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CliResult = Result<(), CliError>;

fn input_error(e: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_INPUT, e.to_string())
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { EXIT_INPUT };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Bell(a) => bell_report(a),
        Command::Region(a) => region(a),
        Command::Evolve(a) => evolve(a),
        Command::OracleCheck(a) => oracle_check(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn resolve_tolerance(args: &InputArgs) -> Result<f64, CliError> {
    if let Some(t) = args.tolerance {
        return Ok(t);
    }
    match std::env::var("CVE_TOLERANCE") {
        Ok(s) => s
            .parse()
            .map_err(|_| input_error(format!("CVE_TOLERANCE is not a number: {s}"))),
        Err(_) => Ok(gaussian::DEFAULT_TOLERANCE),
    }
}

fn load_cm(args: &InputArgs) -> Result<CovarianceMatrix, CliError> {
    match (&args.input, args.n, args.c) {
        (Some(path), None, None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            gaussian::parse_cm_json(&text).map_err(input_error)
        }
        (None, Some(n), Some(c)) => Ok(StandardForm::new(n, n, c, -c).to_covariance_matrix()),
        (None, Some(_), None) | (None, None, Some(_)) => Err(input_error(
            "inline input requires both --n and --c",
        )),
        (None, None, None) => Err(input_error("one input source required: --input or --n/--c")),
        _ => Err(input_error("exactly one input source: --input or --n/--c")),
    }
}

fn write_output(args: &InputArgs, content: &str) -> CliResult {
    match &args.out {
        Some(path) => fs::write(path, content)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| input_error(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Rounds every number in a JSON tree to 12 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if let Some(rounded) = serde_json::Number::from_f64(round_sig(x, SIG_DIGITS)) {
                    *v = Value::Number(rounded);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json_string(value: &impl Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("report serialization");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("report rendering");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AnalyzeReport {
    invariants: SymplecticInvariants,
    physicality: PhysicalityReport,
    purity: Option<f64>,
    standard_form: Option<StandardForm>,
    criteria: Option<Vec<CriterionReport>>,
    hierarchy_consistent: Option<bool>,
    single_mode_purity: Option<f64>,
    correlation_coefficient: Option<f64>,
    region: Option<RegionVerdict>,
}

fn analyze(args: StateArgs) -> CliResult {
    let tol = resolve_tolerance(&args.input)?;
    let cm = load_cm(&args.input)?;
    let invariants = cm.symplectic_invariants();
    let physicality = cm.physicality(tol);

    let mut report = AnalyzeReport {
        invariants,
        physicality,
        purity: None,
        standard_form: None,
        criteria: None,
        hierarchy_consistent: None,
        single_mode_purity: None,
        correlation_coefficient: None,
        region: None,
    };

    if physicality.physical {
        report.purity = cm.purity(tol).ok();
        let sf = cm.standard_form(tol).map_err(input_error)?;
        report.standard_form = Some(sf);
        let classification = criteria::classify(&sf);
        report.criteria = Some(classification.reports);
        report.hierarchy_consistent = Some(classification.hierarchy_consistent);
        if sf.is_symmetric(tol.max(1e-12)) {
            let mu_s = sf.single_mode_purity(tol).map_err(input_error)?;
            let c_ab = sf.correlation_coefficient(tol).map_err(input_error)?;
            report.single_mode_purity = Some(mu_s);
            report.correlation_coefficient = Some(c_ab);
            if (0.0..1.0).contains(&c_ab) {
                report.region = bell::classify_region(mu_s.min(1.0), c_ab).ok();
            }
        }
    }

    write_output(&args.input, &to_json_string(&report))?;
    if !physicality.physical {
        return Err(CliError::new(
            EXIT_UNPHYSICAL,
            format!(
                "state is unphysical (d_minus = {}); report printed",
                physicality.d_minus
            ),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct BellReport {
    n: f64,
    c: f64,
    optimal_displacement: f64,
    bell_max: f64,
    violates: bool,
    numeric_argmax: f64,
    numeric_max: f64,
}

fn bell_report(args: StateArgs) -> CliResult {
    let tol = resolve_tolerance(&args.input)?;
    let cm = load_cm(&args.input)?;
    if !cm.is_physical(tol) {
        return Err(CliError::new(EXIT_UNPHYSICAL, "state is unphysical"));
    }
    let sf = cm.standard_form(tol).map_err(input_error)?;
    if !sf.is_symmetric(tol.max(1e-12)) {
        return Err(CliError::new(
            EXIT_PRECONDITION,
            "bell requires a symmetric-family state (n = m, c1 = -c2)",
        ));
    }
    let eval = bell::evaluate_max(sf.n, sf.c1)
        .map_err(|e| CliError::new(EXIT_PRECONDITION, e.to_string()))?;
    let (ni, nv) = wigner::bell_max_numeric(&sf.to_covariance_matrix())
        .map_err(|e| CliError::new(EXIT_PRECONDITION, e.to_string()))?;
    let report = BellReport {
        n: sf.n,
        c: sf.c1,
        optimal_displacement: eval.displacement_intensity,
        bell_max: eval.value,
        violates: eval.violates,
        numeric_argmax: ni,
        numeric_max: nv,
    };
    write_output(&args.input, &to_json_string(&report))
}

fn region(args: RegionArgs) -> CliResult {
    let grid = bell::region_grid(args.resolution).map_err(input_error)?;
    let mut csv = String::from("mu_s,C_ab,B_max,region\n");
    for v in grid {
        let b_max = bell::bell_max_from_purity(v.mu_s, v.c_ab).unwrap_or(f64::NAN);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(v.mu_s, SIG_DIGITS),
            fmt_sig(v.c_ab, SIG_DIGITS),
            fmt_sig(b_max, SIG_DIGITS),
            v.region
        ));
    }
    write_output(&args.input, &csv)
}

fn evolve(args: EvolveArgs) -> CliResult {
    let tol = resolve_tolerance(&args.input)?;
    if args.t_min > args.t_max || args.steps == 0 {
        return Err(input_error(format!(
            "invalid sweep range: t_min = {}, t_max = {}, steps = {}",
            args.t_min, args.t_max, args.steps
        )));
    }
    let cm = load_cm(&args.input)?;
    if !cm.is_physical(tol) {
        return Err(CliError::new(EXIT_UNPHYSICAL, "ancestor state is unphysical"));
    }
    let sf = cm.standard_form(tol).map_err(input_error)?;
    let grid: Vec<f64> = if args.steps == 1 {
        vec![args.t_min]
    } else {
        (0..args.steps)
            .map(|k| {
                args.t_min + (args.t_max - args.t_min) * k as f64 / (args.steps - 1) as f64
            })
            .collect()
    };
    let rows = channel::sweep(&sf, &grid, tol).map_err(|e| match e {
        Error::Domain(_) | Error::UnsupportedShape(_) => CliError::new(EXIT_PRECONDITION, e.to_string()),
        other => input_error(other),
    })?;

    let mut csv = String::from("T,n_T,c_T,mu_s,C_ab,phs,duan,reid,bell_max,region,crossing\n");
    for (k, row) in rows.iter().enumerate() {
        let crossed = k > 0 && (rows[k - 1].bell_max - 2.0) * (row.bell_max - 2.0) < 0.0;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_sig(row.t, SIG_DIGITS),
            fmt_sig(row.n_t, SIG_DIGITS),
            fmt_sig(row.c_t, SIG_DIGITS),
            fmt_sig(row.mu_s, SIG_DIGITS),
            fmt_sig(row.c_ab, SIG_DIGITS),
            fmt_sig(row.phs_witness, SIG_DIGITS),
            fmt_sig(row.duan_witness, SIG_DIGITS),
            fmt_sig(row.reid_witness, SIG_DIGITS),
            fmt_sig(row.bell_max, SIG_DIGITS),
            row.region,
            if crossed { "*" } else { "" }
        ));
    }
    write_output(&args.input, &csv)
}

fn oracle_check(args: OracleArgs) -> CliResult {
    let tol = resolve_tolerance(&args.input)?;
    if args.trials == 0 {
        let msg = format!(
            "oracle-check: trials=0 max_relative_deviation=0 tolerance={} PASS (vacuous)\n",
            fmt_sig(tol, SIG_DIGITS)
        );
        eprintln!("warning: 0 trials requested; result is vacuous");
        return write_output(&args.input, &msg);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..args.trials {
        let n: f64 = rng.gen_range(0.5..5.0);
        let c = rng.gen_range(0.0..0.999) * (n * n - 0.25).sqrt();
        let cm = StandardForm::new(n, n, c, -c).to_covariance_matrix();
        for _ in 0..10 {
            let i: f64 = rng.gen_range(0.0..2.0);
            let closed = bell::bell_function(i, n, c)
                .map_err(|e| CliError::new(EXIT_ORACLE, e.to_string()))?;
            let oracle = wigner::bell_combination(&cm, i)
                .map_err(|e| CliError::new(EXIT_ORACLE, e.to_string()))?;
            let dev = (closed - oracle).abs() / closed.abs().max(1.0);
            max_dev = max_dev.max(dev);
        }
    }
    let pass = max_dev <= tol;
    let summary = format!(
        "oracle-check: trials={} max_relative_deviation={} tolerance={} {}\n",
        args.trials,
        fmt_sig(max_dev, SIG_DIGITS),
        fmt_sig(tol, SIG_DIGITS),
        if pass { "PASS" } else { "FAIL" }
    );
    write_output(&args.input, &summary)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_ORACLE,
            format!("max deviation {max_dev} exceeds tolerance {tol}"),
        ))
    }
}

fn simulate(args: SimulateArgs) -> CliResult {
    let tol = resolve_tolerance(&args.input)?;
    let cm = load_cm(&args.input)?;
    if !cm.is_physical(tol) {
        return Err(CliError::new(EXIT_UNPHYSICAL, "state is unphysical"));
    }
    let sf = cm.standard_form(tol).map_err(input_error)?;
    let report = homodyne::end_to_end(&sf, args.samples, args.seed, args.bootstrap)
        .map_err(|e| match e {
            Error::Unphysical(_) => CliError::new(EXIT_UNPHYSICAL, e.to_string()),
            other => CliError::new(EXIT_PRECONDITION, other.to_string()),
        })?;
    write_output(&args.input, &to_json_string(&report))
}
