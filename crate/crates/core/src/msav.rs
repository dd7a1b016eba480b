//! Energy splitting, auxiliary variables and the linearized Crank–Nicolson
//! stepper.
//!
//! The Hamiltonian density `-(u^3 + u u_x^2)/2` is split as
//! `-g/2 + h/2 + (u^2 + u_x^2)/8` with
//!
//! ```text
//! g(u, u_x) = (u + 1/2)^2 (u^2 + u_x^2) >= 0
//! h(u, u_x) = u^2 (u^2 + u_x^2)         >= 0
//! ```
//!
//! and the two non-quadratic pieces are carried by scalars
//! `q1 = sqrt(<g, 1> + C1)`, `q2 = sqrt(<h, 1> + C2)`. The resulting energy
//! is quadratic in `(u, q1, q2)`, which is what lets a linear scheme conserve
//! it exactly.
//!
//! One step solves for the midpoint `U^{n+1/2}`:
//!
//! ```text
//! U^{n+1/2} = U^n + tau/2 D ( -G1 Q1^{n+1/2} + G2 Q2^{n+1/2} + (I - D2) U^{n+1/2} / 4 )
//! Qi^{n+1/2} = Qi^n + <Gi, U^{n+1/2} - U^n>
//! ```
//!
//! Eliminating `Qi^{n+1/2}` leaves `(I - tau/8 D1) U^{n+1/2}` equal to a
//! rank-two update of a known vector. Inverting the diagonal operator and
//! projecting onto `G1`, `G2` reduces the unknown to a 2×2 system.

use crate::error::{Error, Result};
use crate::spectral::{PeriodicGrid, RealField, SpectralOperators};

/// Guard below which a square-root argument is rejected.
pub const DEFAULT_EPS_RADICAND: f64 = 1e-12;

/// Relative determinant threshold of the reduced 2×2 system.
const SINGULAR_DET_RATIO: f64 = 1e-14;

/// `g = (u + 1/2)^2 (u^2 + u_x^2)`.
#[inline]
pub fn g_density(u: f64, ux: f64) -> f64 {
    let s = u + 0.5;
    s * s * (u * u + ux * ux)
}

/// `h = u^2 (u^2 + u_x^2)`.
#[inline]
pub fn h_density(u: f64, ux: f64) -> f64 {
    u * u * (u * u + ux * ux)
}

/// `(dg/du, dg/du_x)`.
#[inline]
pub fn g_partials(u: f64, ux: f64) -> (f64, f64) {
    let s = u + 0.5;
    (
        2.0 * s * (2.0 * u * u + ux * ux + 0.5 * u),
        2.0 * ux * s * s,
    )
}

/// `(dh/du, dh/du_x)`.
#[inline]
pub fn h_partials(u: f64, ux: f64) -> (f64, f64) {
    (4.0 * u * u * u + 2.0 * u * ux * ux, 2.0 * ux * u * u)
}

/// Observer stride used when none is configured.
pub fn default_stride(n: usize) -> usize {
    if n <= 64 {
        1
    } else {
        100
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub tau: f64,
    /// Shift under the square root of `q1`.
    pub c1: f64,
    /// Shift under the square root of `q2`.
    pub c2: f64,
    pub eps_radicand: f64,
    pub final_time: f64,
    /// `round(final_time / tau)`.
    pub steps: usize,
}

impl SchemeParams {
    pub fn new(tau: f64, final_time: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if !(final_time.is_finite() && final_time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "final time must be non-negative, got {final_time}"
            )));
        }
        Ok(Self {
            tau,
            c1: 0.0,
            c2: 0.0,
            eps_radicand: DEFAULT_EPS_RADICAND,
            final_time,
            steps: (final_time / tau).round() as usize,
        })
    }

    pub fn with_shifts(mut self, c1: f64, c2: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    pub fn with_eps_radicand(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radicand guard must be positive, got {eps}"
            )));
        }
        self.eps_radicand = eps;
        Ok(self)
    }

    /// Time actually reached after `steps` steps.
    pub fn end_time(&self) -> f64 {
        self.steps as f64 * self.tau
    }

    /// `|M tau - T| / T`, zero when `T = 0`.
    pub fn time_mismatch(&self) -> f64 {
        if self.final_time == 0.0 {
            0.0
        } else {
            (self.end_time() - self.final_time).abs() / self.final_time
        }
    }

    pub fn is_commensurate(&self) -> bool {
        self.time_mismatch() <= 1e-9
    }
}

/// Full state of the three-level recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct MsavState {
    pub u: RealField,
    /// `U^{n-1}`; present exactly when `n >= 1`.
    pub u_prev: Option<RealField>,
    pub q1: f64,
    pub q2: f64,
    pub n: usize,
    pub t: f64,
}

/// Normalized variational derivatives of the two split pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGradients {
    pub g1: RealField,
    pub g2: RealField,
}

/// Midpoint values `(U^{n+1/2}, Q1^{n+1/2}, Q2^{n+1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfStep {
    pub u: RealField,
    pub q1: f64,
    pub q2: f64,
}

/// The MSAV scheme bound to a grid and time step.
#[derive(Debug, Clone)]
pub struct Scheme {
    ops: SpectralOperators,
    params: SchemeParams,
}

impl Scheme {
    pub fn new(grid: &PeriodicGrid, params: SchemeParams) -> Result<Self> {
        Ok(Self {
            ops: SpectralOperators::new(grid, params.tau)?,
            params,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.ops.grid()
    }

    pub fn ops(&self) -> &SpectralOperators {
        &self.ops
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// `(<g(u, D1 u), 1> + C1, <h(u, D1 u), 1> + C2)`.
    pub fn radicands(&self, u: &[f64]) -> (f64, f64) {
        let ux = self.ops.apply_d1(u);
        self.radicands_with(u, &ux)
    }

    fn radicands_with(&self, u: &[f64], ux: &[f64]) -> (f64, f64) {
        let h = self.grid().h();
        let (mut sg, mut sh) = (0.0, 0.0);
        for (&v, &vx) in u.iter().zip(ux) {
            sg += g_density(v, vx);
            sh += h_density(v, vx);
        }
        (h * sg + self.params.c1, h * sh + self.params.c2)
    }

    fn check_radicands(&self, (rg, rh): (f64, f64)) -> Result<()> {
        let guard = self.params.eps_radicand;
        for (which, value) in [(1, rg), (2, rh)] {
            if !(value >= guard) {
                return Err(Error::RadicandTooSmall {
                    which,
                    value,
                    guard,
                });
            }
        }
        Ok(())
    }

    /// `G1 = (g1 - D1 g2) / (2 sqrt(<g,1> + C1))`, `G2` likewise with `h`,
    /// all evaluated at `(hat_u, D1 hat_u)`.
    pub fn assemble_gradients(&self, hat_u: &[f64]) -> Result<SplitGradients> {
        self.grid().check_len(hat_u)?;
        let ux = self.ops.apply_d1(hat_u);
        let radicands = self.radicands_with(hat_u, &ux);
        self.check_radicands(radicands)?;

        let n = hat_u.len();
        let (mut dg_du, mut dg_dux) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let (mut dh_du, mut dh_dux) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (&v, &vx) in hat_u.iter().zip(ux.iter()) {
            let (a, b) = g_partials(v, vx);
            dg_du.push(a);
            dg_dux.push(b);
            let (a, b) = h_partials(v, vx);
            dh_du.push(a);
            dh_dux.push(b);
        }
        let dx_g = self.ops.apply_d1(&dg_dux);
        let dx_h = self.ops.apply_d1(&dh_dux);
        let sg = 0.5 / radicands.0.sqrt();
        let sh = 0.5 / radicands.1.sqrt();
        let g1 = dg_du.iter().zip(dx_g.iter()).map(|(a, b)| sg * (a - b)).collect();
        let g2 = dh_du.iter().zip(dx_h.iter()).map(|(a, b)| sh * (a - b)).collect();
        Ok(SplitGradients { g1, g2 })
    }

    /// `Qi^0 = sqrt(<.,1> + Ci)`.
    pub fn init_aux(&self, u0: &[f64]) -> Result<(f64, f64)> {
        self.grid().check_len(u0)?;
        let radicands = self.radicands(u0);
        self.check_radicands(radicands)?;
        Ok((radicands.0.sqrt(), radicands.1.sqrt()))
    }

    pub fn initial_state(&self, u0: RealField) -> Result<MsavState> {
        self.grid().check_len(&u0)?;
        if let Some(i) = u0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let (q1, q2) = self.init_aux(&u0)?;
        Ok(MsavState {
            u: u0,
            u_prev: None,
            q1,
            q2,
            n: 0,
            t: 0.0,
        })
    }

    /// Solves the coupled midpoint system for frozen gradients.
    pub fn solve_half_step(
        &self,
        grads: &SplitGradients,
        u_n: &[f64],
        q1_n: f64,
        q2_n: f64,
    ) -> Result<HalfStep> {
        let grid = self.grid();
        grid.check_len(u_n)?;
        let half_tau = 0.5 * self.params.tau;
        let (g1, g2) = (&grads.g1, &grads.g2);

        // A^{-1} D Gi and A^{-1} U^n; b = A^{-1} r^n follows by linearity.
        let ad_g1 = self.ops.apply_a_inv_d(g1);
        let ad_g2 = self.ops.apply_a_inv_d(g2);
        let a_u = self.ops.apply_a_inv(u_n);

        let gamma1 = ad_g1.scaled(-half_tau);
        let gamma2 = ad_g2.scaled(half_tau);
        let coef1 = -half_tau * (q1_n - grid.inner(g1, u_n));
        let coef2 = half_tau * (q2_n - grid.inner(g2, u_n));
        let b = a_u.axpy(coef1, &ad_g1).axpy(coef2, &ad_g2);

        // (I - [<Gi, gamma_k>]) s = [<Gi, b>]
        let m11 = 1.0 - grid.inner(g1, &gamma1);
        let m12 = -grid.inner(g1, &gamma2);
        let m21 = -grid.inner(g2, &gamma1);
        let m22 = 1.0 - grid.inner(g2, &gamma2);
        let r1 = grid.inner(g1, &b);
        let r2 = grid.inner(g2, &b);
        let det = m11 * m22 - m12 * m21;
        let scale = (m11 * m22).abs().max((m12 * m21).abs());
        if !(det.abs() >= SINGULAR_DET_RATIO * scale) || !det.is_finite() {
            return Err(Error::SingularReducedSystem { det, scale });
        }
        let s1 = (r1 * m22 - m12 * r2) / det;
        let s2 = (m11 * r2 - m21 * r1) / det;

        let u_half = b.axpy(s1, &gamma1).axpy(s2, &gamma2);
        let delta = u_half.axpy(-1.0, u_n);
        let q1 = q1_n + grid.inner(g1, &delta);
        let q2 = q2_n + grid.inner(g2, &delta);
        Ok(HalfStep { u: u_half, q1, q2 })
    }

    /// Max-norm residual of the first midpoint equation at `half`.
    pub fn half_step_residual(&self, grads: &SplitGradients, u_n: &[f64], half: &HalfStep) -> f64 {
        let helm = self.ops.apply_helmholtz(&half.u);
        let w: Vec<f64> = (0..u_n.len())
            .map(|j| -grads.g1[j] * half.q1 + grads.g2[j] * half.q2 + 0.25 * helm[j])
            .collect();
        let dw = self.ops.apply_d(&w);
        let half_tau = 0.5 * self.params.tau;
        (0..u_n.len())
            .map(|j| (half.u[j] - u_n[j] - half_tau * dw[j]).abs())
            .fold(0.0, f64::max)
    }

    /// Midpoint solve for a given extrapolant, without advancing the state.
    pub fn half_step(&self, hat_u: &[f64], state: &MsavState) -> Result<HalfStep> {
        let grads = self.assemble_gradients(hat_u)?;
        self.solve_half_step(&grads, &state.u, state.q1, state.q2)
    }

    fn finish(&self, state: &MsavState, half: HalfStep) -> MsavState {
        let u_next = half.u.scaled(2.0).axpy(-1.0, &state.u);
        let n = state.n + 1;
        MsavState {
            u: u_next,
            u_prev: Some(state.u.clone()),
            q1: 2.0 * half.q1 - state.q1,
            q2: 2.0 * half.q2 - state.q2,
            n,
            t: n as f64 * self.params.tau,
        }
    }

    /// First step: gradients frozen at `U^0` instead of the extrapolant.
    pub fn startup_step(&self, state: &MsavState) -> Result<MsavState> {
        if state.n != 0 {
            return Err(Error::WrongStage(state.n));
        }
        let half = self.half_step(&state.u, state)?;
        Ok(self.finish(state, half))
    }

    /// Generic step with extrapolant `(3 U^n - U^{n-1}) / 2`.
    pub fn step(&self, state: &MsavState) -> Result<MsavState> {
        let prev = match (&state.u_prev, state.n) {
            (Some(prev), n) if n >= 1 => prev,
            _ => return Err(Error::WrongStage(state.n)),
        };
        let hat_u: RealField = state
            .u
            .iter()
            .zip(prev.iter())
            .map(|(c, p)| 0.5 * (3.0 * c - p))
            .collect();
        let half = self.half_step(&hat_u, state)?;
        Ok(self.finish(state, half))
    }

    /// Startup or generic step, whichever the state calls for.
    pub fn advance(&self, state: &MsavState) -> Result<MsavState> {
        if state.n == 0 {
            self.startup_step(state)
        } else {
            self.step(state)
        }
    }

    /// Integrates `params.steps` steps from `u0`.
    ///
    /// `observer` sees the initial state, every `stride`-th state and the
    /// final state. Failures are reported with the index of the step that
    /// was being computed; step 0 is the initialization of the auxiliary
    /// variables.
    pub fn run(
        &self,
        u0: RealField,
        stride: usize,
        mut observer: impl FnMut(&MsavState),
    ) -> Result<MsavState> {
        let stride = stride.max(1);
        let mut state = self.initial_state(u0).map_err(|e| Error::StepFailed {
            step: 0,
            source: Box::new(e),
        })?;
        observer(&state);
        for _ in 0..self.params.steps {
            let next = self.advance(&state).map_err(|e| Error::StepFailed {
                step: state.n + 1,
                source: Box::new(e),
            })?;
            if !next.u.is_finite() || !next.q1.is_finite() || !next.q2.is_finite() {
                return Err(Error::StepFailed {
                    step: next.n,
                    source: Box::new(Error::NonFinite(
                        next.u.iter().position(|v| !v.is_finite()).unwrap_or(0),
                    )),
                });
            }
            state = next;
            if state.n % stride == 0 || state.n == self.params.steps {
                observer(&state);
            }
        }
        Ok(state)
    }
}
