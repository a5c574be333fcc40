//! Command-line front end: parameter sweeps, figure data, comparison of
//! analytic and simulated results, config validation and a self-test.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! configuration or I/O errors.

pub mod compare;
pub mod dataset;
pub mod figures;
pub mod grid;
pub mod selftest;
pub mod sweep;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analysis::{AnalysisSettings, ClusterForm};
use crate::params::{default_params, load_params, NetworkParams, ParamError};
use crate::simulator::McSettings;

use compare::{compare_rows, prefer_method, split_methods};
use dataset::Dataset;
use figures::{reproduce_figure, FigureId, FigureOptions};
use sweep::{run_sweep, Method, Output, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(#[from] ParamError),
    #[error("{0}")]
    Mismatch(String),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Outcome of one named pass/fail check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            format!("{status} {}", self.name)
        } else {
            format!("{status} {}: {}", self.name, self.detail)
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mmwave-d2d", version, about = "Uplink mmWave cellular network with clustered D2D users: analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one parameter and write a CSV of the requested outputs.
    Sweep(SweepArgs),
    /// Regenerate the data behind a results figure and check its trends.
    Figure(FigureArgs),
    /// Compare analytic rows against simulated rows.
    Compare(CompareArgs),
    /// Check a configuration file and print the resolved parameters.
    ValidateConfig(ConfigArgs),
    /// Run the trivial-limit suite.
    Selftest,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML parameter file; defaults apply to missing keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a parameter (repeatable), e.g. `--set gamma_db=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// analytic, mc or both.
    #[arg(long, default_value = "analytic")]
    method: Method,
    /// Monte Carlo trials per point.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Cluster interference form: exact or approx.
    #[arg(long, default_value = "exact", value_parser = parse_cluster_form)]
    cluster_form: ClusterForm,
    /// Fill the wall_ms column (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output CSV path; standard output if absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Parameter to sweep (any config key, or sigma_d).
    #[arg(long, value_name = "KEY")]
    key: String,
    /// Values: `a,b,c`, `lin:a:b:n` or `log:a:b:n`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Comma-separated outputs: p_d2d, outage_c, outage_d, ase,
    /// pf_objective, laplace, laplace_<cc|dc|cd|dd_intra|dd_inter>.
    #[arg(long, default_value = "p_d2d,outage_c,outage_d")]
    outputs: String,
    /// Thresholds in dB (grid syntax); defaults to the configured threshold.
    #[arg(long = "gamma-db", allow_hyphen_values = true)]
    gamma_db: Option<String>,
    /// Label for the curve column; defaults to the `--set` overrides.
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// fig2 ... fig9.
    id: FigureId,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Reference CSV. With a single file its analytic rows are compared
    /// with its mc rows.
    reference: PathBuf,
    /// CSV under test.
    test: Option<PathBuf>,
    /// Number of worst rows to list.
    #[arg(long, default_value_t = 10)]
    worst: usize,
}

fn parse_cluster_form(s: &str) -> Result<ClusterForm, String> {
    match s {
        "exact" => Ok(ClusterForm::Exact),
        "approx" => Ok(ClusterForm::Approx),
        other => Err(format!("unknown cluster form `{other}` (expected exact|approx)")),
    }
}

/// Parse `key=value` overrides.
pub fn parse_overrides(items: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("override `{item}` should look like key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("override `{item}`: `{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn resolve_params(args: &ConfigArgs) -> Result<NetworkParams, CliError> {
    let base = match &args.config {
        Some(path) => load_params(&std::fs::read_to_string(path)?)?,
        None => default_params(),
    };
    let overrides = parse_overrides(&args.overrides)?;
    Ok(base.with_overrides(&overrides)?)
}

fn mc_settings(run: &RunArgs) -> McSettings {
    McSettings {
        trials: run.trials,
        seed: run.seed,
        ..McSettings::default()
    }
}

fn analysis_settings(run: &RunArgs) -> AnalysisSettings {
    AnalysisSettings {
        cluster_form: run.cluster_form,
        ..AnalysisSettings::default()
    }
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build a pool of {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

fn write_dataset(ds: &Dataset, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => ds.write_csv(io::BufWriter::new(File::create(path)?)),
        None => ds.write_csv(io::stdout().lock()),
    }
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    Dataset::read_csv(BufReader::new(File::open(path)?))
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let base = resolve_params(&args.config)?;
    let spec = SweepSpec {
        curve: args.curve.clone().unwrap_or_else(|| args.config.overrides.join(";")),
        base,
        swept_key: args.key.clone(),
        grid: grid::parse_grid(&args.grid).map_err(CliError::Usage)?,
        outputs: Output::parse_list(&args.outputs, args.run.cluster_form).map_err(CliError::Usage)?,
        method: args.run.method,
        gammas_db: args
            .gamma_db
            .as_deref()
            .map(grid::parse_grid)
            .transpose()
            .map_err(CliError::Usage)?,
        mc: mc_settings(&args.run),
        analysis: analysis_settings(&args.run),
        timing: args.run.timing,
    };
    spec.validate()?;
    log::info!("sweeping {} over {} points", spec.swept_key, spec.grid.len());
    let ds = with_workers(args.run.workers, || run_sweep(&spec))??;
    write_dataset(&ds, args.run.out.as_deref())?;

    let mut code = EXIT_OK;
    let errors = ds.rows.iter().filter(|r| r.error.is_some()).count();
    if errors > 0 {
        eprintln!("{errors} of {} rows failed", ds.rows.len());
        code = EXIT_CHECK_FAILED;
    }
    if spec.method == Method::Both {
        let (analytic, mc) = split_methods(&ds.rows);
        let rep = compare_rows(&analytic, &mc)?;
        eprint!("{}", rep.render(5));
        if !rep.passed {
            code = EXIT_CHECK_FAILED;
        }
    }
    Ok(code)
}

fn cmd_figure(args: &FigureArgs) -> Result<i32, CliError> {
    let opts = FigureOptions {
        method: args.run.method,
        mc: mc_settings(&args.run),
        analysis: analysis_settings(&args.run),
        timing: args.run.timing,
    };
    log::info!("regenerating {}", args.id);
    let rep = with_workers(args.run.workers, || reproduce_figure(args.id, &opts))??;
    write_dataset(&rep.dataset, args.run.out.as_deref())?;
    for c in &rep.checks {
        eprintln!("{}", c.line());
    }
    Ok(if rep.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_compare(args: &CompareArgs) -> Result<i32, CliError> {
    let a = read_dataset(&args.reference)?;
    let (reference, test) = match &args.test {
        Some(path) => {
            let b = read_dataset(path)?;
            (prefer_method(&a.rows, "analytic"), prefer_method(&b.rows, "mc"))
        }
        None => split_methods(&a.rows),
    };
    let rep = compare_rows(&reference, &test)?;
    print!("{}", rep.render(args.worst));
    Ok(if rep.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_validate(args: &ConfigArgs) -> Result<i32, CliError> {
    let p = resolve_params(args)?;
    let warnings = p.validate()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", p.render());
    Ok(EXIT_OK)
}

fn cmd_selftest() -> i32 {
    let checks = selftest::run_selftest();
    for c in &checks {
        println!("{}", c.line());
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Compare(a) => cmd_compare(a),
        Command::ValidateConfig(a) => cmd_validate(a),
        Command::Selftest => Ok(cmd_selftest()),
    };
    match result {
        Ok(code) => {
            let _ = io::stdout().flush();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
