//! Command-line front end.
//!
//! Results go to stdout (or `--out`), diagnostics to stderr. Exit status is 0
//! on success, 2 for invalid arguments or data, 1 for I/O failures.

pub mod ingest;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{critical_statistic, tail_bound, tail_bound_uncapped, BoundParams, TailSide};
use crate::hypothesis::{
    lipschitz_two_sample, one_sample_clustered, two_sample_clustered, CriticalValue, TimeMode,
    DEFAULT_ALPHAS,
};
use crate::montecarlo::{conjecture_refutation_experiment, iid_coverage, sharpness_experiment};
use crate::numeric::normal_cdf;

pub use ingest::{ingest_clustered_csv, ingest_trajectory_csv};
pub use output::{BoundRow, BoundTable, CriticalTable, Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bvks",
    version,
    about = "Non-asymptotic sup-deviation bounds and tests"
)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Significance levels, comma separated [default: 0.01,0.05,0.1].
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Vec<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tail bounds and critical values.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Hypothesis tests on CSV data.
    #[command(subcommand)]
    Kstest(KsCommand),
    /// Simulation checks of the bounds.
    #[command(subcommand)]
    Simulate(SimCommand),
}

#[derive(Debug, Clone, Args)]
pub struct Coefficients {
    /// McDiarmid coefficient.
    #[arg(long)]
    pub c: f64,
    /// Downward-variation coefficient.
    #[arg(long)]
    pub d: f64,
    #[arg(long, default_value = "two", value_parser = parse_side)]
    pub side: TailSide,
}

#[derive(Debug, Clone, Subcommand)]
pub enum BoundCommand {
    /// Tail bound at points of the normalized scale.
    Eval {
        #[command(flatten)]
        coefficients: Coefficients,
        /// Normalized deviations, comma separated [default: 0, 0.05, ..., 3].
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Critical sup-deviation at each --alpha.
    Critical {
        #[command(flatten)]
        coefficients: Coefficients,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum KsCommand {
    /// Clustered sample against a reference CDF.
    OneSample {
        /// CSV with header `value,cluster` or `value`.
        #[arg(long)]
        f: PathBuf,
        /// uniform:a,b | normal:mu,sigma | exponential:rate
        #[arg(long = "ref", value_parser = parse_reference)]
        reference: Reference,
        #[arg(long, default_value = "two", value_parser = parse_side)]
        side: TailSide,
    },
    /// Two independent clustered samples.
    TwoSample {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value = "two", value_parser = parse_side)]
        side: TailSide,
    },
    /// Averaged Lipschitz trajectories sharing one randomization.
    Lipschitz {
        /// CSV with header `time,unit_1,...,unit_n`.
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        k_lip: f64,
        /// Take the supremum over the observed grid only.
        #[arg(long)]
        grid: bool,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum SimCommand {
    /// Binomial-grid construction against the grid-naive bound.
    Grid {
        #[arg(long, default_value_t = 16)]
        n: u64,
        /// Grid sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        m: Vec<u64>,
        /// Threshold on `|U_j/n − 1/2|`, in (0, 1/2).
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coverage of the deflated statistic on iid uniform data.
    Coverage {
        #[arg(long, default_value_t = 100)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,1.5,2")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "two", value_parser = parse_side)]
        side: TailSide,
    },
    /// Fixed-n slice of the sharpness construction.
    Sharpness {
        #[arg(long, default_value_t = 16)]
        n: u64,
        /// Target level in (0, 1/2).
        #[arg(long, default_value_t = 0.25)]
        l_target: f64,
        #[arg(long, default_value_t = 5000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_side(s: &str) -> Result<TailSide, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Continuous reference distribution for one-sample tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

impl Reference {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Reference::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Reference::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Reference::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
        }
    }
}

fn parse_reference(s: &str) -> Result<Reference, String> {
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = args
        .split(',')
        .filter(|a| !a.is_empty())
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{a}' as a number"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if nums.iter().any(|v| !v.is_finite()) {
        return Err("reference parameters must be finite".into());
    }
    match (name, nums.as_slice()) {
        ("uniform", &[lo, hi]) if lo < hi => Ok(Reference::Uniform { lo, hi }),
        ("normal", &[mean, sd]) if sd > 0.0 => Ok(Reference::Normal { mean, sd }),
        ("exponential", &[rate]) if rate > 0.0 => Ok(Reference::Exponential { rate }),
        _ => Err(format!(
            "bad reference '{s}': expected uniform:a,b (a < b), normal:mu,sigma (sigma > 0) \
             or exponential:rate (rate > 0)"
        )),
    }
}

fn default_eps_grid() -> Vec<f64> {
    (0..=60).map(|i| i as f64 / 20.0).collect()
}

/// Alpha levels sorted ascending without duplicates.
fn alpha_levels(requested: &[f64]) -> Result<Vec<f64>, CliError> {
    if let Some(a) = requested.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(CliError::Input(format!(
            "alpha must lie in (0, 1), got {a}"
        )));
    }
    let mut alphas = if requested.is_empty() {
        DEFAULT_ALPHAS.to_vec()
    } else {
        requested.to_vec()
    };
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    Ok(alphas)
}

/// Runs the command and returns its report without writing anything.
pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let alphas = alpha_levels(&config.alpha)?;
    Ok(match &config.command {
        Command::Bound(BoundCommand::Eval { coefficients, eps }) => {
            let params = BoundParams::new(coefficients.c, coefficients.d)?;
            let side = coefficients.side;
            let eps = if eps.is_empty() {
                default_eps_grid()
            } else {
                eps.clone()
            };
            let rows = eps
                .iter()
                .map(|&e| {
                    Ok(BoundRow {
                        eps: e,
                        statistic: params.sup_at(side, e),
                        p_upper: tail_bound(side, e)?,
                        p_raw: tail_bound_uncapped(side, e)?,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Report::Bound(BoundTable {
                c: params.c(),
                d: params.d(),
                side,
                rows,
            })
        }
        Command::Bound(BoundCommand::Critical { coefficients }) => {
            let params = BoundParams::new(coefficients.c, coefficients.d)?;
            let critical = alphas
                .iter()
                .map(|&alpha| {
                    Ok(CriticalValue {
                        alpha,
                        value: critical_statistic(&params, coefficients.side, alpha)?,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Report::Critical(CriticalTable {
                c: params.c(),
                d: params.d(),
                side: coefficients.side,
                critical,
            })
        }
        Command::Kstest(KsCommand::OneSample { f, reference, side }) => {
            let sample = ingest_clustered_csv(f)?;
            let reference = *reference;
            Report::Test(one_sample_clustered(
                &sample,
                |x| reference.cdf(x),
                *side,
                &alphas,
            )?)
        }
        Command::Kstest(KsCommand::TwoSample { f, g, side }) => {
            let sample_f = ingest_clustered_csv(f)?;
            let sample_g = ingest_clustered_csv(g)?;
            Report::Test(two_sample_clustered(&sample_f, &sample_g, *side, &alphas)?)
        }
        Command::Kstest(KsCommand::Lipschitz { f, g, k_lip, grid }) => {
            let panel_f = ingest_trajectory_csv(f, *k_lip)?;
            let panel_g = ingest_trajectory_csv(g, *k_lip)?;
            let mode = if *grid {
                TimeMode::Grid
            } else {
                TimeMode::Continuous
            };
            Report::Test(lipschitz_two_sample(&panel_f, &panel_g, mode, &alphas)?)
        }
        Command::Simulate(SimCommand::Grid {
            n,
            m,
            eps,
            trials,
            seed,
        }) => Report::Sim(conjecture_refutation_experiment(
            *n, m, *eps, *trials, *seed,
        )?),
        Command::Simulate(SimCommand::Coverage {
            n,
            eps,
            trials,
            seed,
            side,
        }) => Report::Sim(iid_coverage(*n, *trials, *seed, eps, *side)?),
        Command::Simulate(SimCommand::Sharpness {
            n,
            l_target,
            trials,
            seed,
        }) => Report::Sim(sharpness_experiment(*n, *l_target, *trials, *seed)?),
    })
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Executes `config`, writes its output and returns the process exit code.
pub fn run(config: RunConfig) -> i32 {
    let result = execute(&config).and_then(|report| {
        for notice in report.notices() {
            eprintln!("notice: {notice}");
        }
        emit(&config, &report.render(config.format)?)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
