//! Batch front-end.
//!
//! Exit codes: 0 success (all checks pass), 1 check failure, 2 configuration
//! error, 3 numeric failure.

pub mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use crate::expr;
use crate::radial::{radial_frame, radial_section_grid, radial_transport};
use crate::verify::{matrix_rows, run_suite};
use config::{Loaded, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "radial-gauge",
    version,
    about = "Radially parallel sections from connection coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid and suite evaluation.
    #[arg(long, env = "RADIAL_GAUGE_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Endpoint, comma separated: "v1,v2,...".
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transport the initial vector to z along the ray; prints JSON.
    Transport(PointArgs),
    /// Radially parallel frame at z; prints JSON.
    Frame(PointArgs),
    /// Radial section over the configured grid; prints CSV.
    Grid(Common),
    /// Run the verification suite; prints the JSON report.
    Check(CheckArgs),
    /// Parse an expression and dump its tree.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expression: String,
        /// Base dimension.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_config_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

/// Output of a successful command and its exit code (0, or 1 for a failed suite).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    Ok(RunConfig::from_path(&common.config)?.load()?)
}

fn parse_point(text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let z: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::config(format!("--z: {e}")))?;
    if z.len() != n {
        return Err(CliError::config(format!(
            "--z has {} components, n = {n}",
            z.len()
        )));
    }
    Ok(z)
}

/// 17 significant digits.
fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn grid_csv(loaded: &Loaded, grid: &[Vec<f64>]) -> Result<String, CliError> {
    let samples = radial_section_grid(&loaded.field, &loaded.initial, grid, &loaded.integrator)?;
    let (n, k) = (loaded.field.n(), loaded.field.k());
    let mut out = String::new();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=k).map(|j| format!("y{j}")))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for s in samples {
        let row: Vec<String> =
            s.z.iter()
                .chain(s.xi.iter())
                .map(|&v| fmt_value(v))
                .collect();
        writeln!(out, "{}", row.join(",")).expect("string write");
    }
    Ok(out)
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::config("--workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Runs one command, returning its output and exit code.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Transport(args) => {
            let loaded = load(&args.common)?;
            let z = parse_point(&args.z, loaded.field.n())?;
            loaded.field.domain().check(&z)?;
            let r = radial_transport(&loaded.field, &z, &loaded.initial, &loaded.integrator)?;
            let value = json!({
                "z": r.z,
                "y": r.y_final.as_slice(),
                "error_estimate": r.error_estimate,
                "steps": r.steps,
            });
            Ok(Outcome {
                code: 0,
                text: json_text(&value),
            })
        }
        Command::Frame(args) => {
            let loaded = load(&args.common)?;
            let z = parse_point(&args.z, loaded.field.n())?;
            loaded.field.domain().check(&z)?;
            let frame = radial_frame(&loaded.field, &z, &loaded.integrator)?;
            let value = json!({ "z": z, "frame": matrix_rows(&frame) });
            Ok(Outcome {
                code: 0,
                text: json_text(&value),
            })
        }
        Command::Grid(common) => {
            let loaded = load(common)?;
            let grid = loaded
                .grid
                .clone()
                .ok_or_else(|| CliError::config("configuration has no `grid` block"))?;
            let text = with_workers(common.workers, || grid_csv(&loaded, &grid))??;
            Ok(Outcome { code: 0, text })
        }
        Command::Check(args) => {
            let mut loaded = load(&args.common)?;
            if let Some(seed) = args.seed {
                loaded.checks.seed = seed;
            }
            let report = with_workers(args.common.workers, || {
                run_suite(
                    &loaded.field,
                    &loaded.initial,
                    &loaded.checks,
                    &loaded.integrator,
                )
            })?;
            let mut text = report.to_json();
            text.push('\n');
            Ok(Outcome {
                code: if report.passed() { 0 } else { 1 },
                text,
            })
        }
        Command::Parse { expression, n } => {
            let ast = expr::parse(expression, *n).map_err(|e| CliError::config(e.to_string()))?;
            Ok(Outcome {
                code: 0,
                text: ast.tree(),
            })
        }
    }
}

fn destination(cli: &Cli) -> Option<PathBuf> {
    match &cli.command {
        Command::Transport(a) | Command::Frame(a) => a.common.out.clone(),
        Command::Grid(c) => c.out.clone(),
        Command::Check(a) => a.common.out.clone(),
        Command::Parse { .. } => None,
    }
}

fn configured_destination(cli: &Cli) -> Option<PathBuf> {
    let (common, pick): (&Common, fn(&config::OutputBlock) -> Option<PathBuf>) = match &cli.command
    {
        Command::Grid(c) => (c, |o| o.grid_csv.clone()),
        Command::Check(a) => (&a.common, |o| o.check_json.clone()),
        _ => return None,
    };
    let cfg = RunConfig::from_path(&common.config).ok()?;
    pick(&cfg.output)
}

/// Entry point used by the binary: runs the command, writes its output, and
/// returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(outcome) => {
            let target = destination(&cli).or_else(|| configured_destination(&cli));
            let written = match target {
                Some(path) => std::fs::write(&path, &outcome.text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(outcome.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
