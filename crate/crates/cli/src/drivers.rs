//! Experiment drivers behind the three CLI modes.

use std::path::{Path, PathBuf};

use chmsav_core::initial::{self, TravelingWave, TravelingWaveParams};
use chmsav_core::invariants::{drift_series, DriftSample, InvariantSample};
use chmsav_core::msav::{default_stride, MsavState, Scheme, SchemeParams};
use chmsav_core::{PeriodicGrid, RealField};
use thiserror::Error;

use crate::config::{ConfigError, InitialCondition, RunConfig};
use crate::norms::error_norms;
use crate::output::{self, ConvergenceRow, SolutionWriter};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(#[from] chmsav_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Config(_) => 2,
            DriverError::Solver(_) => 3,
            DriverError::Io { .. } => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DriverError + '_ {
    move |source| DriverError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Grid, initial data and (for the traveling wave) the exact solution.
pub struct Setup {
    pub grid: PeriodicGrid,
    pub u0: RealField,
    pub wave: Option<TravelingWave>,
}

impl Setup {
    pub fn build(cfg: &RunConfig) -> Result<Self, DriverError> {
        let domain = |length: f64| PeriodicGrid::new(cfg.a, cfg.a + length, cfg.n);
        let b = |cfg: &RunConfig| cfg.b.expect("non-wave configs carry b");
        match &cfg.ic {
            InitialCondition::TravelingWave { m, max, c, table_size } => {
                let wave = TravelingWave::build(TravelingWaveParams::new(*m, *max, *c).with_table_size(*table_size))?;
                let grid = domain(wave.period())?;
                let u0 = wave.sample(&grid, 0.0);
                Ok(Self { grid, u0, wave: Some(wave) })
            }
            InitialCondition::TwoPeakon { peaks } | InitialCondition::ThreePeakon { peaks } => {
                let grid = PeriodicGrid::new(cfg.a, b(cfg), cfg.n)?;
                let u0 = initial::peakon_superposition(&grid, peaks, cfg.peakon_branch)?;
                Ok(Self { grid, u0, wave: None })
            }
            InitialCondition::Discontinuous => {
                let grid = PeriodicGrid::new(cfg.a, b(cfg), cfg.n)?;
                let u0 = initial::discontinuous_profile(&grid);
                Ok(Self { grid, u0, wave: None })
            }
        }
    }

    /// The length `L` that relative times refer to.
    pub fn length(&self) -> f64 {
        self.grid.length()
    }
}

fn scheme_params(cfg: &RunConfig, tau: f64, final_time: f64) -> Result<SchemeParams, DriverError> {
    let params = SchemeParams::new(tau, final_time)?
        .with_shifts(cfg.c1, cfg.c2)
        .with_eps_radicand(cfg.eps_radicand)?;
    if !params.is_commensurate() {
        eprintln!(
            "warning: T = {final_time} is not a multiple of tau = {tau}; integrating {} steps to t = {}",
            params.steps,
            params.end_time()
        );
    }
    Ok(params)
}

/// Invariant history of one run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub samples: Vec<InvariantSample>,
    pub drifts: Vec<DriftSample>,
    pub final_state: MsavState,
}

impl RunSummary {
    pub fn max_drift(&self, f: impl Fn(&DriftSample) -> f64) -> f64 {
        self.drifts.iter().map(f).fold(0.0, f64::max)
    }
}

/// Integrates the configured problem, sampling invariants every
/// `sample_stride` steps and, when `solution` is given, writing snapshots
/// every `solution_stride` steps.
fn integrate(
    cfg: &RunConfig,
    setup: &Setup,
    mut solution: Option<(&Path, SolutionWriter)>,
) -> Result<RunSummary, DriverError> {
    let length = setup.length();
    let params = scheme_params(cfg, cfg.tau.resolve(length), cfg.final_time.resolve(length))?;
    let scheme = Scheme::new(&setup.grid, params)?;
    let sample_stride = cfg.sample_stride.unwrap_or_else(|| default_stride(cfg.n));
    let solution_stride = cfg.solution_stride.unwrap_or(sample_stride);
    let last = params.steps;

    let mut samples = Vec::new();
    let mut io_error = None;
    let observer = |state: &MsavState| {
        if state.n % sample_stride == 0 || state.n == last {
            samples.push(InvariantSample::measure(&scheme, state));
        }
        if let Some((_, w)) = solution.as_mut() {
            if io_error.is_none() && (state.n % solution_stride == 0 || state.n == last) {
                if let Err(e) = w.snapshot(state.t, setup.grid.nodes(), &state.u) {
                    io_error = Some(e);
                }
            }
        }
    };
    let final_state = scheme.run(setup.u0.clone(), 1, observer)?;
    if let Some((path, w)) = solution {
        if let Some(e) = io_error {
            return Err(io_err(path)(e));
        }
        w.finish().map_err(io_err(path))?;
    }
    let drifts = drift_series(&samples)?;
    Ok(RunSummary {
        steps: last,
        samples,
        drifts,
        final_state,
    })
}

fn prepare_dir(dir: &Path) -> Result<(), DriverError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_invariants(dir: &Path, summary: &RunSummary) -> Result<(), DriverError> {
    let path = dir.join("invariants.csv");
    output::write_invariants(&path, &summary.samples, &summary.drifts).map_err(io_err(&path))
}

/// Writes `solution.csv` and `invariants.csv` into the output directory.
pub fn run_simulate(cfg: &RunConfig) -> Result<RunSummary, DriverError> {
    let setup = Setup::build(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("solution.csv");
    let writer = SolutionWriter::create(&path).map_err(io_err(&path))?;
    let summary = integrate(cfg, &setup, Some((&path, writer)))?;
    write_invariants(&cfg.output_dir, &summary)?;
    Ok(summary)
}

/// Long-run invariant tracking; writes `invariants.csv` only.
pub fn run_invariants(cfg: &RunConfig) -> Result<RunSummary, DriverError> {
    let setup = Setup::build(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let summary = integrate(cfg, &setup, None)?;
    write_invariants(&cfg.output_dir, &summary)?;
    Ok(summary)
}

/// `log(e_prev / e) / log(tau_prev / tau)`; `None` when undefined.
fn order(tau_prev: f64, e_prev: f64, tau: f64, e: f64) -> Option<f64> {
    let r = (tau_prev / tau).ln();
    if r == 0.0 || !(e_prev > 0.0 && e > 0.0) {
        return None;
    }
    let p = (e_prev / e).ln() / r;
    p.is_finite().then_some(p)
}

/// Fills the order columns of consecutive `(tau, e2, einf)` triples.
pub fn convergence_orders(errors: &[(f64, f64, f64)]) -> Vec<ConvergenceRow> {
    errors
        .iter()
        .enumerate()
        .map(|(i, &(tau, e2, einf))| {
            let prev = i.checked_sub(1).map(|j| errors[j]);
            ConvergenceRow {
                tau,
                e2,
                order2: prev.and_then(|(tp, ep, _)| order(tp, ep, tau, e2)),
                einf,
                orderinf: prev.and_then(|(tp, _, ep)| order(tp, ep, tau, einf)),
            }
        })
        .collect()
}

/// Error of one traveling-wave run against the exact solution at the time
/// actually reached.
fn wave_error(cfg: &RunConfig, setup: &Setup, wave: &TravelingWave, tau: f64) -> Result<(f64, f64), DriverError> {
    let params = scheme_params(cfg, tau, cfg.final_time.resolve(setup.length()))?;
    let scheme = Scheme::new(&setup.grid, params)?;
    let state = scheme.run(setup.u0.clone(), params.steps.max(1), |_| {})?;
    let exact = wave.sample(&setup.grid, state.t);
    Ok(error_norms(&state.u, &exact, &setup.grid)?)
}

/// Time-step sweep on the traveling wave, one thread per step size; writes
/// `convergence.csv`.
pub fn run_converge(cfg: &RunConfig) -> Result<Vec<ConvergenceRow>, DriverError> {
    let setup = Setup::build(cfg)?;
    let wave = setup.wave.as_ref().ok_or_else(|| {
        ConfigError::Inconsistent("converge mode needs the traveling_wave initial condition".into())
    })?;
    let taus: Vec<f64> = cfg.tau_list.iter().map(|t| t.resolve(setup.length())).collect();
    prepare_dir(&cfg.output_dir)?;

    let results: Vec<Result<(f64, f64), DriverError>> = std::thread::scope(|s| {
        let handles: Vec<_> = taus
            .iter()
            .map(|&tau| {
                let setup = &setup;
                s.spawn(move || wave_error(cfg, setup, wave, tau))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect()
    });
    let errors = taus
        .iter()
        .zip(results)
        .map(|(&tau, r)| r.map(|(e2, einf)| (tau, e2, einf)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = convergence_orders(&errors);
    let path = cfg.output_dir.join("convergence.csv");
    output::write_convergence(&path, &rows).map_err(io_err(&path))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_from_published_errors() {
        let e2 = [2.132e-3, 5.309e-4, 1.327e-4, 3.322e-5];
        let rows = convergence_orders(&e2.iter().enumerate().map(|(i, &e)| (0.1 / 2f64.powi(i as i32), e, e)).collect::<Vec<_>>());
        assert_eq!(rows[0].order2, None);
        let rounded: Vec<String> = rows[1..].iter().map(|r| format!("{:.2}", r.order2.unwrap())).collect();
        assert_eq!(rounded, ["2.01", "2.00", "2.00"]);
    }

    #[test]
    fn orders_for_unequal_ratios_and_repeats() {
        let rows = convergence_orders(&[(0.3, 9.0, 9.0), (0.1, 1.0, 1.0), (0.1, 0.5, 0.5), (0.05, 0.0, 0.1)]);
        assert!((rows[1].order2.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(rows[2].order2, None);
        assert_eq!(rows[3].order2, None);
        assert!((rows[3].orderinf.unwrap() - (5f64).log2()).abs() < 1e-14);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(DriverError::Config(ConfigError::UnknownKey("x".into())).exit_code(), 2);
        assert_eq!(DriverError::Solver(chmsav_core::Error::SingularMatrix).exit_code(), 3);
    }
}
