//! Dense reference implementations, compiled for tests and under the
//! `oracle` feature.
//!
//! Everything here is built from the explicit cotangent/cosecant
//! differentiation matrices and plain Gaussian elimination. No FFTs, no
//! Fourier symbols, and no use of the identity `D (I - D2) = D1`; the coupled
//! midpoint system is assembled and solved as one `(N+2)`-unknown system.

use crate::error::{Error, Result};
use crate::msav::{g_density, g_partials, h_density, h_partials, HalfStep, SchemeParams, SplitGradients};
use crate::spectral::{PeriodicGrid, RealField};

pub type Matrix = Vec<Vec<f64>>;

/// Largest grid the dense routines accept.
pub const ORACLE_CAP: usize = 64;

fn check_cap(grid: &PeriodicGrid) -> Result<()> {
    if grid.n() > ORACLE_CAP {
        return Err(Error::OracleCapExceeded {
            n: grid.n(),
            cap: ORACLE_CAP,
        });
    }
    Ok(())
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(D1)_{jl} = mu/2 (-1)^{j+l} cot(mu (x_j - x_l) / 2)`, zero diagonal.
pub fn dense_d1(grid: &PeriodicGrid) -> Result<Matrix> {
    check_cap(grid)?;
    let (n, mu, x) = (grid.n(), grid.mu(), grid.nodes());
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|l| {
                    if j == l {
                        0.0
                    } else {
                        let arg = 0.5 * mu * (x[j] - x[l]);
                        0.5 * mu * sign(j + l) / arg.tan()
                    }
                })
                .collect()
        })
        .collect())
}

/// `(D2)_{jl} = mu^2/2 (-1)^{j+l+1} csc^2(mu (x_j - x_l) / 2)`, diagonal
/// `-mu^2 (N^2 + 2) / 12`.
pub fn dense_d2(grid: &PeriodicGrid) -> Result<Matrix> {
    check_cap(grid)?;
    let (n, mu, x) = (grid.n(), grid.mu(), grid.nodes());
    let nn = n as f64;
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|l| {
                    if j == l {
                        -mu * mu * (nn * nn + 2.0) / 12.0
                    } else {
                        let s = (0.5 * mu * (x[j] - x[l])).sin();
                        0.5 * mu * mu * sign(j + l + 1) / (s * s)
                    }
                })
                .collect()
        })
        .collect())
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|j| (0..n).map(|l| if j == l { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|p| a[i][p] * b[p][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Solves `a x = b` for every column of `b` by Gaussian elimination with
/// partial pivoting.
pub fn solve(mut a: Matrix, mut b: Matrix) -> Result<Matrix> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            for k in 0..b[row].len() {
                b[row][k] -= f * b[col][k];
            }
        }
    }
    let m = b[0].len();
    let mut x = vec![vec![0.0; m]; n];
    for row in (0..n).rev() {
        for k in 0..m {
            let tail: f64 = (row + 1..n).map(|p| a[row][p] * x[p][k]).sum();
            x[row][k] = (b[row][k] - tail) / a[row][row];
        }
    }
    Ok(x)
}

fn solve_vec(a: Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let rhs = b.iter().map(|&v| vec![v]).collect();
    Ok(solve(a, rhs)?.into_iter().map(|r| r[0]).collect())
}

/// `I - D2` as a dense matrix.
pub fn dense_helmholtz(grid: &PeriodicGrid) -> Result<Matrix> {
    let d2 = dense_d2(grid)?;
    Ok(d2
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(l, v)| if j == l { 1.0 - v } else { -v })
                .collect()
        })
        .collect())
}

/// `D = (I - D2)^{-1} D1` by a dense solve.
pub fn dense_d(grid: &PeriodicGrid) -> Result<Matrix> {
    solve(dense_helmholtz(grid)?, dense_d1(grid)?)
}

/// `(I - tau/8 D1)^{-1}` by a dense solve.
pub fn dense_a_inv(grid: &PeriodicGrid, tau: f64) -> Result<Matrix> {
    let d1 = dense_d1(grid)?;
    let a = d1
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(l, v)| if j == l { 1.0 } else { 0.0 } - 0.125 * tau * v)
                .collect()
        })
        .collect();
    solve(a, identity(grid.n()))
}

/// Gradient assembly with the dense `D1`.
pub fn dense_gradients(grid: &PeriodicGrid, params: &SchemeParams, hat_u: &[f64]) -> Result<SplitGradients> {
    let d1 = dense_d1(grid)?;
    let ux = matvec(&d1, hat_u);
    let h = grid.h();
    let mut rg = params.c1;
    let mut rh = params.c2;
    for (&u, &v) in hat_u.iter().zip(&ux) {
        rg += h * g_density(u, v);
        rh += h * h_density(u, v);
    }
    for (which, value) in [(1u8, rg), (2, rh)] {
        if !(value >= params.eps_radicand) {
            return Err(Error::RadicandTooSmall {
                which,
                value,
                guard: params.eps_radicand,
            });
        }
    }
    let g2: Vec<f64> = hat_u.iter().zip(&ux).map(|(&u, &v)| g_partials(u, v).1).collect();
    let h2: Vec<f64> = hat_u.iter().zip(&ux).map(|(&u, &v)| h_partials(u, v).1).collect();
    let dg2 = matvec(&d1, &g2);
    let dh2 = matvec(&d1, &h2);
    let g1 = (0..hat_u.len())
        .map(|j| (g_partials(hat_u[j], ux[j]).0 - dg2[j]) / (2.0 * rg.sqrt()))
        .collect();
    let g2 = (0..hat_u.len())
        .map(|j| (h_partials(hat_u[j], ux[j]).0 - dh2[j]) / (2.0 * rh.sqrt()))
        .collect();
    Ok(SplitGradients { g1, g2 })
}

/// Midpoint solve from the pre-elimination system, given explicit gradients.
pub fn dense_half_step_with(
    grid: &PeriodicGrid,
    tau: f64,
    grads: &SplitGradients,
    u_n: &[f64],
    q1_n: f64,
    q2_n: f64,
) -> Result<HalfStep> {
    let n = grid.n();
    let h = grid.h();
    let d = dense_d(grid)?;
    let helm = dense_helmholtz(grid)?;
    let d_helm = matmul(&d, &helm);
    let dg1 = matvec(&d, &grads.g1);
    let dg2 = matvec(&d, &grads.g2);
    let half_tau = 0.5 * tau;

    let mut a = vec![vec![0.0; n + 2]; n + 2];
    let mut rhs = vec![0.0; n + 2];
    for j in 0..n {
        for m in 0..n {
            a[j][m] = if j == m { 1.0 } else { 0.0 } - 0.25 * half_tau * d_helm[j][m];
        }
        a[j][n] = half_tau * dg1[j];
        a[j][n + 1] = -half_tau * dg2[j];
        rhs[j] = u_n[j];
    }
    for (row, (g, q)) in [(n, (&grads.g1, q1_n)), (n + 1, (&grads.g2, q2_n))] {
        for m in 0..n {
            a[row][m] = -h * g[m];
        }
        a[row][row] = 1.0;
        rhs[row] = q - h * g.iter().zip(u_n).map(|(x, y)| x * y).sum::<f64>();
    }
    let z = solve_vec(a, &rhs)?;
    Ok(HalfStep {
        u: RealField::from(z[..n].to_vec()),
        q1: z[n],
        q2: z[n + 1],
    })
}

/// Dense counterpart of assembling gradients at `hat_u` and solving the
/// midpoint system.
pub fn dense_half_step(
    grid: &PeriodicGrid,
    params: &SchemeParams,
    hat_u: &[f64],
    u_n: &[f64],
    q1_n: f64,
    q2_n: f64,
) -> Result<HalfStep> {
    let grads = dense_gradients(grid, params, hat_u)?;
    dense_half_step_with(grid, params.tau, &grads, u_n, q1_n, q2_n)
}

/// `(mass, momentum, hamiltonian)` by direct summation with the dense `D1`.
pub fn dense_functionals(grid: &PeriodicGrid, u: &[f64]) -> Result<(f64, f64, f64)> {
    let ux = matvec(&dense_d1(grid)?, u);
    let h = grid.h();
    let mut mass = 0.0;
    let mut momentum = 0.0;
    let mut ham = 0.0;
    for (&v, &vx) in u.iter().zip(&ux) {
        mass += v;
        momentum += v * v + vx * vx;
        ham += v * v * v + v * vx * vx;
    }
    Ok((h * mass, h * momentum, -0.5 * h * ham))
}
