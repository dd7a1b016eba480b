//! Acceptance suite: one `[PASS]` / `[FAIL]` line per criterion.
//!
//! Run with `cargo test -p chmsav-cli --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use chmsav_cli::config::{Mode, RawConfig, RunConfig};
use chmsav_cli::drivers;
use chmsav_cli::peaks;
use chmsav_core::msav::{g_density, g_partials, h_density, h_partials};
use chmsav_core::oracle;
use chmsav_core::{
    MsavState, PeriodicGrid, RealField, Scheme, SchemeParams, SpectralOperators, TravelingWave, TravelingWaveParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn resolve(mode: Mode, pairs: &[(&str, &str)]) -> RunConfig {
    let mut raw = RawConfig::default();
    for (k, v) in pairs {
        raw.set(k, *v).unwrap();
    }
    RunConfig::resolve(mode, &raw).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_field(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> RealField {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn convergence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = resolve(Mode::Converge, &[("output_dir", dir.path().to_str().unwrap())]);
    let rows = drivers::run_converge(&cfg).map_err(|e| e.to_string())?;
    let published = [2.132e-3, 5.309e-4, 1.327e-4, 3.322e-5];
    let mut ok = rows.len() == published.len();
    let mut detail = Vec::new();
    for (r, p) in rows.iter().zip(published) {
        let ratio = r.e2 / p;
        ok &= (0.5..=2.0).contains(&ratio);
        if let Some(o) = r.order2 {
            ok &= (1.9..=2.1).contains(&o);
        }
        detail.push(match r.order2 {
            Some(o) => format!("e2={:.4e} (order {o:.3})", r.e2),
            None => format!("e2={:.4e}", r.e2),
        });
    }
    check(ok, detail.join(", "))
}

fn long_invariants_run() -> Result<drivers::RunSummary, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = resolve(Mode::Invariants, &[("output_dir", dir.path().to_str().unwrap())]);
    drivers::run_invariants(&cfg).map_err(|e| e.to_string())
}

fn modified_energy(summary: &drivers::RunSummary) -> Outcome {
    let drift = summary.max_drift(|d| d.modified_energy);
    check(
        summary.steps == 80_000 && drift <= 1e-10,
        format!("{} steps, {} samples, max relative drift {drift:.3e}", summary.steps, summary.samples.len()),
    )
}

fn mass(summary: &drivers::RunSummary) -> Outcome {
    let drift = summary.max_drift(|d| d.mass);
    check(drift <= 1e-12, format!("max relative drift {drift:.3e}"))
}

/// Largest entrywise gap (startup, generic) between the fast step and the
/// dense monolithic solve over 100 random states per grid size.
fn oracle_gaps(seed: u64, lengths: (f64, f64), taus: (f64, f64)) -> Result<(f64, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_start, mut worst_step) = (0.0f64, 0.0f64);
    for n in [4, 8, 16] {
        let grid = PeriodicGrid::new(0.0, rng.gen_range(lengths.0..lengths.1), n).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let tau = rng.gen_range(taus.0..taus.1);
            let params = SchemeParams::new(tau, 10.0 * tau)
                .unwrap()
                .with_shifts(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let scheme = Scheme::new(&grid, params).map_err(|e| e.to_string())?;

            // startup: gradients at U^0
            let u0 = random_field(&mut rng, n, 1.0);
            let state = scheme.initial_state(u0.clone()).map_err(|e| e.to_string())?;
            let fast = scheme.startup_step(&state).map_err(|e| e.to_string())?;
            let half = oracle::dense_half_step(&grid, &params, &u0, &u0, state.q1, state.q2).map_err(|e| e.to_string())?;
            let dense_u: Vec<f64> = half.u.iter().zip(u0.iter()).map(|(h, u)| 2.0 * h - u).collect();
            worst_start = worst_start
                .max(max_diff(&fast.u, &dense_u))
                .max((fast.q1 - (2.0 * half.q1 - state.q1)).abs())
                .max((fast.q2 - (2.0 * half.q2 - state.q2)).abs());

            // generic step from an arbitrary three-level state
            let u = random_field(&mut rng, n, 1.0);
            let u_prev = random_field(&mut rng, n, 1.0);
            let state = MsavState {
                u: u.clone(),
                u_prev: Some(u_prev.clone()),
                q1: rng.gen_range(0.5..3.0),
                q2: rng.gen_range(0.5..3.0),
                n: 5,
                t: 5.0 * tau,
            };
            let fast = scheme.step(&state).map_err(|e| e.to_string())?;
            let hat: Vec<f64> = u.iter().zip(u_prev.iter()).map(|(a, b)| 1.5 * a - 0.5 * b).collect();
            let half = oracle::dense_half_step(&grid, &params, &hat, &u, state.q1, state.q2).map_err(|e| e.to_string())?;
            let dense_u: Vec<f64> = half.u.iter().zip(u.iter()).map(|(h, u)| 2.0 * h - u).collect();
            worst_step = worst_step
                .max(max_diff(&fast.u, &dense_u))
                .max((fast.q1 - (2.0 * half.q1 - state.q1)).abs())
                .max((fast.q2 - (2.0 * half.q2 - state.q2)).abs());
        }
    }
    Ok((worst_start, worst_step))
}

fn oracle_equivalence() -> Outcome {
    // Domains and steps spanning the experiments (L from 2 pi to 60,
    // tau from 1e-4 to 0.05).
    let (start, step) = oracle_gaps(20240611, (2.0 * PI, 60.0), (1e-4, 0.05))?;
    // Short domains with large steps make the reduced 2x2 system nearly
    // singular; both solvers then amplify round-off alike. Reported only.
    let (s_start, s_step) = oracle_gaps(7, (1.0, 10.0), (1e-3, 0.5))?;
    check(
        start <= 1e-10 && step <= 1e-10,
        format!(
            "N in {{4,8,16}} x 100 states: startup max diff {start:.2e}, generic max diff {step:.2e} \
             (stress sample, tau up to 0.5 on L >= 1: {s_start:.1e} / {s_step:.1e})"
        ),
    )
}

fn spectral_operators() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_matrix = 0.0f64;
    for n in [4, 8, 16] {
        let grid = PeriodicGrid::new(-1.0, 2.5, n).map_err(|e| e.to_string())?;
        let tau = 0.3;
        let ops = SpectralOperators::new(&grid, tau).map_err(|e| e.to_string())?;
        let pairs: [(oracle::Matrix, &dyn Fn(&[f64]) -> RealField); 5] = [
            (oracle::dense_d1(&grid).unwrap(), &|v| ops.apply_d1(v)),
            (oracle::dense_d2(&grid).unwrap(), &|v| ops.apply_d2(v)),
            (oracle::dense_d(&grid).unwrap(), &|v| ops.apply_d(v)),
            (oracle::dense_helmholtz(&grid).unwrap(), &|v| ops.apply_helmholtz(v)),
            (oracle::dense_a_inv(&grid, tau).unwrap(), &|v| ops.apply_a_inv(v)),
        ];
        for (dense, apply) in &pairs {
            for col in 0..n {
                let mut e = vec![0.0; n];
                e[col] = 1.0;
                let image = apply(&e);
                for row in 0..n {
                    worst_matrix = worst_matrix.max((image[row] - dense[row][col]).abs());
                }
            }
        }
    }

    let (mut skew, mut nsd, mut mean) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for n in [16, 64, 256] {
        let grid = PeriodicGrid::new(0.0, 2.0 * PI * 1.7, n).map_err(|e| e.to_string())?;
        let ops = SpectralOperators::new(&grid, 0.01).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let u = random_field(&mut rng, n, 1.0);
            let v = random_field(&mut rng, n, 1.0);
            let scale = grid.inner(&u, &u).sqrt() * grid.inner(&v, &v).sqrt() * grid.mu() * n as f64;
            for apply in [SpectralOperators::apply_d1, SpectralOperators::apply_d] {
                let s = grid.inner(&apply(&ops, &u), &v) + grid.inner(&u, &apply(&ops, &v));
                skew = skew.max(s.abs() / scale);
            }
            let q = grid.inner(&ops.apply_d2(&u), &u) / (grid.inner(&u, &u) * (grid.mu() * n as f64).powi(2));
            nsd = nsd.max(q);
            mean = mean.max(grid.integral(&ops.apply_d(&u)).abs() / grid.inner(&u, &u).sqrt());
        }
    }
    check(
        worst_matrix <= 1e-11 && skew <= 1e-13 && nsd <= 1e-15 && mean <= 1e-13,
        format!(
            "dense max diff {worst_matrix:.2e}; skew residual {skew:.1e}, max <D2u,u> (scaled) {nsd:.1e}, mean of Du {mean:.1e}"
        ),
    )
}

fn splitting_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_id, mut worst_fd) = (0.0f64, 0.0f64);
    let step = 1e-5;
    for _ in 0..10_000 {
        let u = rng.gen_range(-2.0..2.0);
        let ux = rng.gen_range(-2.0..2.0);
        let lhs = -0.5 * g_density(u, ux) + 0.5 * h_density(u, ux) + 0.125 * (u * u + ux * ux);
        let rhs = -0.5 * (u * u * u + u * ux * ux);
        let size = 1f64.max(g_density(u, ux).abs()).max(h_density(u, ux).abs());
        worst_id = worst_id.max((lhs - rhs).abs() / size);

        let (g1, g2) = g_partials(u, ux);
        let (h1, h2) = h_partials(u, ux);
        let fd = |f: fn(f64, f64) -> f64, du: f64, dux: f64| (f(u + du, ux + dux) - f(u - du, ux - dux)) / (2.0 * step);
        for (exact, approx) in [
            (g1, fd(g_density, step, 0.0)),
            (g2, fd(g_density, 0.0, step)),
            (h1, fd(h_density, step, 0.0)),
            (h2, fd(h_density, 0.0, step)),
        ] {
            worst_fd = worst_fd.max((exact - approx).abs() / exact.abs().max(1.0));
        }
    }
    check(
        worst_id <= 1e-13 && worst_fd <= 1e-7,
        format!("10^4 samples: identity max rel. residual {worst_id:.2e}, partials vs central FD {worst_fd:.2e}"),
    )
}

fn traveling_wave() -> Outcome {
    let p = TravelingWaveParams::new(0.3, 0.7, 1.0);
    let coarse = TravelingWave::build(p).map_err(|e| e.to_string())?;
    let fine = TravelingWave::build(p.with_table_size(2 * p.table_size)).map_err(|e| e.to_string())?;
    let period_gap = (coarse.period() - fine.period()).abs();
    let profile_gap = (0..=1000)
        .map(|k| {
            let x = coarse.period() * k as f64 / 1000.0;
            (coarse.profile(x) - fine.profile(x)).abs()
        })
        .fold(0.0, f64::max);
    check(
        (coarse.period() - 6.56).abs() <= 1e-2 && period_gap < 1e-8 && profile_gap < 1e-8,
        format!(
            "L = {:.10}; table {}->{}: period change {period_gap:.1e}, profile change {profile_gap:.1e}",
            coarse.period(),
            p.table_size,
            2 * p.table_size
        ),
    )
}

fn peakon_run(ic: &str, nominal: Option<(f64, f64)>) -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = resolve(
        Mode::Simulate,
        &[("ic", ic), ("output_dir", dir.path().to_str().unwrap()), ("solution_stride", "1000")],
    );
    let length = cfg.b.unwrap() - cfg.a;
    let start = Instant::now();
    let summary = drivers::run_simulate(&cfg).map_err(|e| format!("{ic}: {e}"))?;
    let drift = summary.max_drift(|d| d.modified_energy);
    let snaps = peaks::read_solution(&dir.path().join("solution.csv")).map_err(|e| e.to_string())?;
    let o = peaks::overtaking(&snaps, length, 0.5).ok_or("no two peaks found")?;
    let heights_ok = nominal.map_or(true, |(a, b)| {
        (o.final_heights.0 - a).abs() < 0.1 && (o.final_heights.1 - b).abs() < 0.1
    });
    let detail = format!(
        "{ic} N={} {} steps ({:.1}s): E drift {drift:.2e}; tallest-minus-second separation {:.2} -> {:.2}, final heights {:.2}/{:.2}",
        cfg.n,
        summary.steps,
        start.elapsed().as_secs_f64(),
        o.initial_separation,
        o.final_separation,
        o.final_heights.0,
        o.final_heights.1
    );
    if drift <= 1e-10 && o.overtook() && heights_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn peakons() -> Outcome {
    let two = peakon_run("two_peakon", Some((3.0, 1.0)));
    let three = peakon_run("three_peakon", None);
    match (two, three) {
        (Ok(a), Ok(b)) => Ok(format!("{a}; {b}")),
        (a, b) => Err(format!("{}; {}", a.unwrap_or_else(|e| e), b.unwrap_or_else(|e| e))),
    }
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id}. {name}: {detail}");
    };

    report(1, "temporal convergence", convergence());
    match long_invariants_run() {
        Ok(summary) => {
            report(2, "modified energy conservation", modified_energy(&summary));
            report(3, "mass conservation", mass(&summary));
        }
        Err(e) => {
            report(2, "modified energy conservation", Err(e.clone()));
            report(3, "mass conservation", Err(e));
        }
    }
    report(4, "oracle equivalence", oracle_equivalence());
    report(5, "spectral operators", spectral_operators());
    report(6, "energy splitting", splitting_identity());
    report(7, "traveling wave construction", traveling_wave());
    report(8, "peakon experiments", peakons());

    if failures == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
