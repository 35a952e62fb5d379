//! Command-line driver.
//!
//! Every subcommand accepts `--config FILE`, a JSON object whose keys mirror
//! the long flags (`"lambdas": [0, 1, 3]`, `"dump_reps": "reps.csv"`, ...).
//! Flags given on the command line override the file.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 usage or validation error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::covmodel::{build_spiked, coordinate_frame, CovarianceJson, CovarianceSpec, SpikedParams};
use crate::error::{Error, Result};
use crate::estar::{estimate_estar, kl_lower_floor, kl_upper_bound, relative_error_budget};
use crate::mcsim::{run_replications, write_replicates_csv, SignFlag};
use crate::slicewidth::{phi_sup_grouped, reduce_to_groups, slice_width, AlphaSupOptions, GroupedWidthProblem};
use crate::spiked::{bbp_argmax, bbp_max, eta_clamped, psi_clamped, TheoryCurves};
use crate::stats::MonteCarloEstimate;
use crate::verify::{Verifier, VerifyOptions, CRITERIA};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ACCEPTANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Comma-separated list of reals, e.g. `0,0.5,1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

/// `p=400,n=400,r=1,lambda=3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedArg(pub SpikedParams);

impl FromStr for SpikedArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (mut p, mut n, mut r, mut lambda) = (None, None, None, None);
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let int = || value.trim().parse::<usize>().map_err(|e| format!("{key}: {e}"));
            match key.trim() {
                "p" => p = Some(int()?),
                "n" => n = Some(int()?),
                "r" => r = Some(int()?),
                "lambda" => lambda = Some(value.trim().parse::<f64>().map_err(|e| format!("lambda: {e}"))?),
                other => return Err(format!("unknown spiked parameter {other:?}")),
            }
        }
        let missing = |k: &str| format!("spiked parameters need {k}=");
        let params = SpikedParams::new(
            p.ok_or_else(|| missing("p"))?,
            n.ok_or_else(|| missing("n"))?,
            r.ok_or_else(|| missing("r"))?,
            lambda.ok_or_else(|| missing("lambda"))?,
        )
        .map_err(|e| e.to_string())?;
        Ok(SpikedArg(params))
    }
}

#[derive(Debug, Parser)]
#[command(name = "covnorm", version, about = "Sample covariance operator norm experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate of E_* with the closed-form envelope.
    Estar(EstarArgs),
    /// One slice-width query.
    Width(WidthArgs),
    /// Spiked-model theory curves as CSV.
    SpikedTheory(SpikedTheoryArgs),
    /// Replicated sample covariance simulation.
    Simulate(SimulateArgs),
    /// λ sweep at fixed (p, n, r): theory next to simulation.
    PhaseDiagram(PhaseDiagramArgs),
    /// Runs the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone)]
#[group(required = false, multiple = false)]
pub struct SourceArgs {
    /// Σ = I_p.
    #[arg(long, value_name = "P")]
    pub identity: Option<usize>,
    /// Spiked model, `p=..,n=..,r=..,lambda=..`.
    #[arg(long, value_name = "PARAMS")]
    pub spiked: Option<SpikedArg>,
    /// Covariance JSON (`eigenvalues`/`multiplicities`/`p`) or spiked JSON (`p`/`n`/`r`/`lambda`).
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstarArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Sample size (taken from the spiked parameters when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Deviation level for the relative error budget.
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// `json` or `csv`.
    #[arg(long, default_value = "json")]
    pub format: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WidthArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Vector h (comma-separated, length p) when a covariance is given.
    #[arg(long)]
    pub h: Option<FloatList>,
    /// Standardized group eigenvalues, γ₁ = 1 first.
    #[arg(long)]
    pub gammas: Option<FloatList>,
    /// Group norms of h, one per γ.
    #[arg(long)]
    pub weights: Option<FloatList>,
    #[arg(long)]
    pub alpha: f64,
    /// Also report the supremum over α at this sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dump the dual certificate.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpikedTheoryArgs {
    /// δ grid.
    #[arg(long)]
    pub delta: FloatList,
    /// λ grid.
    #[arg(long)]
    pub lambdas: FloatList,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Per-replicate CSV.
    #[arg(long, value_name = "FILE")]
    pub dump_reps: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseDiagramArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long)]
    pub lambdas: FloatList,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced replicate counts with doubled fixed tolerances.
    #[arg(long)]
    pub quick: bool,
    /// Subset of criteria, e.g. `T1,T10`.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub psi_scale: f64,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

/// Parameters of a `phase-diagram` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagramConfig {
    pub p: usize,
    pub n: usize,
    pub r: usize,
    pub lambdas: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

pub const PHASE_DIAGRAM_HEADER: &str = "lambda,delta,psi_theory,eta_theory,bbp_max,bbp_argmax,op_norm_mean,op_norm_se,proj_mean,proj_se,top_eig_mean,reps,n,p,r,seed";

fn metadata_line(seed: u64) -> String {
    format!("# seed={seed} version={VERSION}\n")
}

/// Seed of the k-th λ in a sweep.
fn sweep_seed(seed: u64, k: usize) -> u64 {
    seed ^ ((k as u64 + 1) << 48)
}

/// The `phase-diagram` CSV, metadata line included.
pub fn phase_diagram_csv(config: &PhaseDiagramConfig) -> Result<String> {
    if config.lambdas.is_empty() {
        return Err(Error::InvalidArgument("λ grid is empty".into()));
    }
    let frame = coordinate_frame(config.p, config.r);
    let mut out = String::new();
    writeln!(out, "{PHASE_DIAGRAM_HEADER}").unwrap();
    for (k, &lambda) in config.lambdas.iter().enumerate() {
        let params = SpikedParams::new(config.p, config.n, config.r, lambda)?;
        let delta = params.delta();
        let spec = build_spiked(&params, None)?;
        let sim = run_replications(&spec, config.n, config.reps, sweep_seed(config.seed, k), Some(&frame))?;
        let proj = sim.proj_sq.expect("frame supplied");
        writeln!(
            out,
            "{lambda},{delta},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            psi_clamped(delta, lambda),
            eta_clamped(delta, lambda),
            bbp_max(delta, lambda),
            bbp_argmax(delta, lambda),
            sim.op_norm.mean,
            sim.op_norm.std_error,
            proj.mean,
            proj.std_error,
            sim.top_eigval_sigma_hat.mean,
            config.reps,
            config.n,
            config.p,
            config.r,
            config.seed
        )
        .unwrap();
    }
    out.push_str(&metadata_line(config.seed));
    Ok(out)
}

#[derive(Debug, Serialize)]
struct EstarOutput {
    estimate: MonteCarloEstimate,
    p: usize,
    n: usize,
    op_norm: f64,
    effective_rank: f64,
    kl_upper_bound: f64,
    kl_lower_floor: f64,
    x: f64,
    relative_error_budget: f64,
    version: &'static str,
}

#[derive(Debug, Serialize)]
struct SimulateOutput {
    p: usize,
    n: usize,
    reps: usize,
    seed: u64,
    op_norm: MonteCarloEstimate,
    lambda_plus: MonteCarloEstimate,
    lambda_minus: MonteCarloEstimate,
    proj_sq: Option<MonteCarloEstimate>,
    top_eigval_sigma_hat: MonteCarloEstimate,
    plus_fraction: f64,
    ties: usize,
    version: &'static str,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Source {
    spec: CovarianceSpec,
    spiked: Option<SpikedParams>,
}

fn load_source(args: &SourceArgs) -> std::result::Result<Source, Failure> {
    if let Some(p) = args.identity {
        return Ok(Source {
            spec: CovarianceSpec::identity(p)?,
            spiked: None,
        });
    }
    if let Some(SpikedArg(params)) = args.spiked {
        return Ok(Source {
            spec: build_spiked(&params, None)?,
            spiked: Some(params),
        });
    }
    let Some(path) = &args.spec else {
        return Err(usage("one of --identity, --spiked or --spec is required"));
    };
    load_spec_file(path)
}

fn load_spec_file(path: &Path) -> std::result::Result<Source, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let bad = |e: String| usage(format!("{}: {e}", path.display()));
    if value.get("eigenvalues").is_some() {
        let json: CovarianceJson = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        let spec = CovarianceSpec::try_from(json).map_err(|e| bad(e.to_string()))?;
        Ok(Source { spec, spiked: None })
    } else if value.get("lambda").is_some() {
        let params: SpikedParams = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        params.validate().map_err(|e| bad(e.to_string()))?;
        let spec = build_spiked(&params, None).map_err(|e| bad(e.to_string()))?;
        Ok(Source {
            spec,
            spiked: Some(params),
        })
    } else {
        Err(bad("expected a covariance (eigenvalues, multiplicities, p) or spiked (p, n, r, lambda) object".into()))
    }
}

fn resolve_n(flag: Option<usize>, source: &Source) -> std::result::Result<usize, Failure> {
    match (flag, source.spiked.map(|s| s.n)) {
        (Some(a), Some(b)) if a != b => Err(usage(format!(
            "--n {a} conflicts with the spiked parameters' n = {b}"
        ))),
        (Some(n), _) | (None, Some(n)) => {
            if n == 0 {
                Err(usage("n must be at least 1"))
            } else {
                Ok(n)
            }
        }
        (None, None) => Err(usage("--n is required")),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> std::result::Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_estar(args: &EstarArgs) -> CmdResult {
    let source = load_source(&args.source)?;
    let n = resolve_n(args.n, &source)?;
    let spec = &source.spec;
    let estimate = estimate_estar(spec, n, args.reps, args.seed)?;
    let out = EstarOutput {
        estimate,
        p: spec.p(),
        n,
        op_norm: spec.op_norm(),
        effective_rank: spec.effective_rank(),
        kl_upper_bound: kl_upper_bound(spec, n),
        kl_lower_floor: kl_lower_floor(n),
        x: args.x,
        relative_error_budget: relative_error_budget(spec, n, args.x)?,
        version: VERSION,
    };
    let text = match args.format.as_str() {
        "json" => to_json(&out),
        "csv" => {
            let e = &out.estimate;
            format!(
                "mean,std_error,std_dev,reps,seed,p,n,effective_rank,kl_upper_bound,kl_lower_floor,relative_error_budget\n\
                 {},{},{},{},{},{},{},{},{},{},{}\n{}",
                e.mean,
                e.std_error,
                e.std_dev,
                e.reps,
                e.seed,
                out.p,
                out.n,
                out.effective_rank,
                out.kl_upper_bound,
                out.kl_lower_floor,
                out.relative_error_budget,
                metadata_line(args.seed)
            )
        }
        other => return Err(usage(format!("unknown format {other:?} (json or csv)"))),
    };
    emit(&args.output, &text)?;
    Ok(EXIT_OK)
}

fn cmd_width(args: &WidthArgs) -> CmdResult {
    let has_source = args.source.identity.is_some() || args.source.spiked.is_some() || args.source.spec.is_some();
    let problem = match (&args.gammas, &args.weights, has_source) {
        (Some(g), Some(w), false) => GroupedWidthProblem::new(g.0.clone(), w.0.clone(), args.alpha)?,
        (None, None, true) => {
            let source = load_source(&args.source)?;
            let h = args.h.as_ref().ok_or_else(|| usage("--h is required with a covariance"))?;
            reduce_to_groups(&source.spec.standardize(), &h.0, args.alpha)?
        }
        _ => return Err(usage("give either --gammas and --weights, or a covariance and --h")),
    };
    let solution = slice_width(&problem)?;
    let mut out = serde_json::json!({
        "alpha": args.alpha,
        "value": solution.value,
    });
    if let Some(n) = args.n {
        if n == 0 {
            return Err(usage("n must be at least 1"));
        }
        let sup = phi_sup_grouped(&problem, n, AlphaSupOptions::default())?;
        out["phi_sup"] = serde_json::to_value(sup).expect("serializable");
    }
    if args.trace {
        out["problem"] = serde_json::to_value(&problem).expect("serializable");
        out["certificate"] = serde_json::to_value(&solution).expect("serializable");
    }
    emit(&args.output, &to_json(&out))?;
    Ok(EXIT_OK)
}

fn cmd_spiked_theory(args: &SpikedTheoryArgs) -> CmdResult {
    if args.delta.0.is_empty() || args.lambdas.0.is_empty() {
        return Err(usage("δ and λ grids must be non-empty"));
    }
    let mut text = String::new();
    writeln!(text, "{}", TheoryCurves::CSV_HEADER).unwrap();
    for &delta in &args.delta.0 {
        for &lambda in &args.lambdas.0 {
            if !(delta >= 0.0 && delta.is_finite() && lambda >= 0.0 && lambda.is_finite()) {
                return Err(usage(format!("need δ ≥ 0 and λ ≥ 0, got δ={delta}, λ={lambda}")));
            }
            writeln!(text, "{}", TheoryCurves::new(delta, lambda).csv_row()).unwrap();
        }
    }
    text.push_str(&metadata_line(args.seed));
    emit(&args.output, &text)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let source = load_source(&args.source)?;
    let n = resolve_n(args.n, &source)?;
    let frame = source.spiked.map(|s| coordinate_frame(s.p, s.r));
    let summary = run_replications(&source.spec, n, args.reps, args.seed, frame.as_ref())?;
    if let Some(path) = &args.dump_reps {
        let mut buf = Vec::new();
        write_replicates_csv(&summary.results, &mut buf).expect("in-memory write");
        buf.extend_from_slice(metadata_line(args.seed).as_bytes());
        std::fs::write(path, buf).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let out = SimulateOutput {
        p: source.spec.p(),
        n,
        reps: args.reps,
        seed: args.seed,
        op_norm: summary.op_norm,
        lambda_plus: summary.lambda_plus,
        lambda_minus: summary.lambda_minus,
        proj_sq: summary.proj_sq,
        top_eigval_sigma_hat: summary.top_eigval_sigma_hat,
        plus_fraction: summary.plus_fraction(),
        ties: summary.results.iter().filter(|r| r.sign_flag == SignFlag::Tie).count(),
        version: VERSION,
    };
    emit(&args.output, &to_json(&out))?;
    Ok(EXIT_OK)
}

fn cmd_phase_diagram(args: &PhaseDiagramArgs) -> CmdResult {
    let config = PhaseDiagramConfig {
        p: args.p,
        n: args.n,
        r: args.r,
        lambdas: args.lambdas.0.clone(),
        reps: args.reps,
        seed: args.seed,
    };
    let text = phase_diagram_csv(&config)?;
    emit(&args.output, &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let ids: Vec<String> = match &args.only {
        Some(list) => {
            for id in list {
                if !CRITERIA.contains(&id.as_str()) {
                    return Err(usage(format!("unknown criterion {id:?}")));
                }
            }
            list.clone()
        }
        None => CRITERIA.iter().map(|s| s.to_string()).collect(),
    };
    let verifier = Verifier::new(VerifyOptions {
        quick: args.quick,
        seed: args.seed,
        psi_scale: args.psi_scale,
    });
    let mut criteria = Vec::with_capacity(ids.len());
    for id in &ids {
        let report = verifier.run(id);
        println!("{}", report.line());
        criteria.push(report);
    }
    let passed = criteria.iter().all(|c| c.passed);
    let report = crate::verify::VerifyReport {
        passed,
        options: verifier.options(),
        version: VERSION.to_string(),
        criteria,
    };
    if let Some(path) = &args.report {
        std::fs::write(path, to_json(&report))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_ACCEPTANCE })
}

/// Replaces `--config FILE` with the flags it encodes, placed before the
/// remaining command-line flags so those win.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, Failure> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| usage("--config needs a file"))?
        .clone();
    let text = std::fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.to_string_lossy())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: invalid JSON: {e}", path.to_string_lossy())))?;
    let Value::Object(map) = value else {
        return Err(usage("config file must hold a JSON object"));
    };
    let mut flags: Vec<OsString> = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let rendered = match value {
            Value::Bool(true) => {
                flags.push(flag.into());
                continue;
            }
            Value::Bool(false) | Value::Null => continue,
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            Value::Object(fields) => fields
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(","),
        };
        flags.push(flag.into());
        flags.push(rendered.into());
    }
    // Program name and subcommand stay in front.
    let split = 2.min(pos);
    let mut out: Vec<OsString> = args[..split].to_vec();
    out.extend(flags);
    out.extend(args[split..pos].iter().cloned());
    out.extend(args[pos + 2..].iter().cloned());
    Ok(out)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Estar(a) => cmd_estar(a),
        Command::Width(a) => cmd_width(a),
        Command::SpikedTheory(a) => cmd_spiked_theory(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::PhaseDiagram(a) => cmd_phase_diagram(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
