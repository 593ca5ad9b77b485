//! Experiment driver: evaluates, sweeps, compares and self-checks the
//! decoy-state key-rate model from one JSON config.
//!
//! Exit codes: 0 success, 1 failed verify check, 2 config or domain
//! error, 3 output I/O error.

mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use decoy_pdc::forecast::forecast_observables;
use decoy_pdc::optimize::sweep_distance;
use decoy_pdc::rate::evaluate_scheme;
use decoy_pdc::verify::{any_failed, run_checks};
use decoy_pdc::{APolicy, SchemeKind};

use config::{ConfigError, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "decoy-pdc",
    version,
    about = "Key rates for decoy-state QKD with a triggered down-conversion source"
)]
struct Cli {
    /// JSON config file; built-in benchmark defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the config's intensity-coupling policy.
    #[arg(long, global = true, value_enum)]
    policy: Option<PolicyArg>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump the full pipeline at one operating point.
    Point {
        /// Fibre length in km.
        #[arg(long)]
        distance: f64,
        /// Signal intensity mu'.
        #[arg(long)]
        mu_prime: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::NewBoth)]
        scheme: SchemeArg,
    },
    /// Optimized key rate over the distance grid for every configured scheme.
    Sweep {
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Elementwise rate ratio of two schemes over the distance grid.
    Compare {
        #[arg(value_enum)]
        scheme_a: SchemeArg,
        #[arg(value_enum)]
        scheme_b: SchemeArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the internal consistency checks and print one line per check.
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SchemeArg {
    Ideal,
    NewTriggered,
    NewBoth,
    PreviousFixedMu,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ideal => SchemeKind::Ideal,
            SchemeArg::NewTriggered => SchemeKind::NewTriggered,
            SchemeArg::NewBoth => SchemeKind::NewBoth,
            SchemeArg::PreviousFixedMu => SchemeKind::PreviousFixedMu,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "lowercase")]
enum PolicyArg {
    Strict,
    Limit,
}

impl From<PolicyArg> for APolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => APolicy::Strict,
            PolicyArg::Limit => APolicy::Limit,
        }
    }
}

enum AppError {
    Config(ConfigError),
    Domain(decoy_pdc::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    ChecksFailed(usize),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::ChecksFailed(_) => 1,
            AppError::Config(_) | AppError::Domain(_) => 2,
            AppError::Io { .. } => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(e) => e.fmt(f),
            AppError::Domain(e) => e.fmt(f),
            AppError::Io { path, source } => {
                write!(f, "cannot write {}: {source}", path.display())
            }
            AppError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let mut cfg = match &cli.config {
        Some(path) => config::load(path).map_err(AppError::Config)?,
        None => RunConfig::default(),
    };
    if let Some(policy) = cli.policy {
        cfg.a_policy = policy.into();
    }
    let convention = cfg.nontriggered_yield_convention;

    match cli.cmd {
        Cmd::Point {
            distance,
            mu_prime,
            scheme,
        } => {
            let spec = cfg.spec_for(scheme.into());
            let result = evaluate_scheme(&spec, &cfg.params, distance, mu_prime, convention)
                .map_err(AppError::Domain)?;
            let obs = forecast_observables(&cfg.params, distance, result.intensities, convention);
            print!("{}", output::point_report(distance, &obs, &result));
            Ok(())
        }
        Cmd::Sweep { out } => {
            let specs = cfg.resolved_schemes();
            let grid = cfg.distance_grid.expand();
            let rows = sweep_distance(&specs, &cfg.params, &grid, &cfg.search, convention)
                .map_err(AppError::Domain)?;
            let text = match cfg.output.format {
                OutputFormat::Csv => output::sweep_csv(&rows),
                OutputFormat::Json => output::to_json(&rows),
            };
            write_result(out.or_else(|| cfg.output.path.clone()), &text)
        }
        Cmd::Compare {
            scheme_a,
            scheme_b,
            out,
        } => {
            let grid = cfg.distance_grid.expand();
            let sweep_one = |kind: SchemeKind| {
                sweep_distance(&[cfg.spec_for(kind)], &cfg.params, &grid, &cfg.search, convention)
                    .map_err(AppError::Domain)
            };
            let rows_a = sweep_one(scheme_a.into())?;
            let rows_b = sweep_one(scheme_b.into())?;
            let rows = output::compare_rows(&rows_a, &rows_b);
            let text = match cfg.output.format {
                OutputFormat::Csv => output::compare_csv(scheme_a.into(), scheme_b.into(), &rows),
                OutputFormat::Json => output::to_json(&rows),
            };
            write_result(out.or_else(|| cfg.output.path.clone()), &text)
        }
        Cmd::Verify => {
            let specs = cfg.resolved_schemes();
            let results = run_checks(&cfg.params, &specs, cfg.a_policy, convention);
            print!("{}", output::verify_table(&results));
            if any_failed(&results) {
                let n = results
                    .iter()
                    .filter(|r| r.status == decoy_pdc::CheckStatus::Fail)
                    .count();
                Err(AppError::ChecksFailed(n))
            } else {
                Ok(())
            }
        }
    }
}

fn write_result(path: Option<PathBuf>, text: &str) -> Result<(), AppError> {
    match path {
        Some(path) => {
            std::fs::write(&path, text).map_err(|source| AppError::Io { path, source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
