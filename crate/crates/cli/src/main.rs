use std::path::PathBuf;
use std::process::ExitCode;

use chmsav_cli::{drivers, ConfigError, DriverError, Mode, RawConfig, RunConfig};
use clap::Parser;

/// Linearly implicit energy-preserving solver for the Camassa-Holm equation.
///
/// Any configuration key can be overridden with `--key value`, e.g.
/// `chmsav converge --config wave.toml --tau-list L/200,L/400 --N 64`.
#[derive(Debug, Parser)]
#[command(name = "chmsav", version)]
struct Cli {
    mode: Mode,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `--key value` overrides.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

/// Pulls a `--config` that clap left among the trailing overrides.
fn split_config(config: Option<PathBuf>, overrides: Vec<String>) -> Result<(Option<PathBuf>, Vec<String>), ConfigError> {
    let mut config = config;
    let mut rest = Vec::with_capacity(overrides.len());
    let mut it = overrides.into_iter();
    while let Some(arg) = it.next() {
        let path = if arg == "--config" {
            Some(it.next().ok_or_else(|| ConfigError::MissingValue("config".into()))?)
        } else {
            arg.strip_prefix("--config=").map(str::to_string)
        };
        match path {
            Some(p) if config.is_some() => {
                return Err(ConfigError::DuplicateKey(format!("config ({p})")));
            }
            Some(p) => config = Some(PathBuf::from(p)),
            None => rest.push(arg),
        }
    }
    Ok((config, rest))
}

fn load(cli: Cli) -> Result<RunConfig, ConfigError> {
    let (config, overrides) = split_config(cli.config, cli.overrides)?;
    let mut raw = match config {
        Some(path) => RawConfig::from_file(&path)?,
        None => RawConfig::default(),
    };
    raw.apply_overrides(&overrides)?;
    RunConfig::resolve(cli.mode, &raw)
}

fn execute(cfg: &RunConfig) -> Result<(), DriverError> {
    match cfg.mode {
        Mode::Simulate | Mode::Invariants => {
            let summary = if cfg.mode == Mode::Simulate {
                drivers::run_simulate(cfg)?
            } else {
                drivers::run_invariants(cfg)?
            };
            println!(
                "{} steps, {} samples; max drift: modified energy {:.3e}, mass {:.3e}, momentum {:.3e}, hamiltonian {:.3e}",
                summary.steps,
                summary.samples.len(),
                summary.max_drift(|d| d.modified_energy),
                summary.max_drift(|d| d.mass),
                summary.max_drift(|d| d.momentum),
                summary.max_drift(|d| d.hamiltonian),
            );
        }
        Mode::Converge => {
            let rows = drivers::run_converge(cfg)?;
            let fmt = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
            println!("{:>12} {:>12} {:>7} {:>12} {:>7}", "tau", "e2", "order", "einf", "order");
            for r in rows {
                println!(
                    "{:>12.5e} {:>12.4e} {:>7} {:>12.4e} {:>7}",
                    r.tau,
                    r.e2,
                    fmt(r.order2),
                    r.einf,
                    fmt(r.orderinf)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
