//! Initial data: the smooth periodic traveling wave, peakon trains and a
//! profile with a kink at the origin.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spectral::{PeriodicGrid, RealField};
use crate::spline::CubicSpline;

const QUADRATURE_ORDER: usize = 32;

/// Default number of table intervals over one period.
pub const DEFAULT_TABLE_SIZE: usize = 2048;

/// Parameters of the smooth traveling wave `u = phi(x - c t)` with
/// `min phi = m`, `max phi = max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveParams {
    pub m: f64,
    pub max: f64,
    pub c: f64,
    pub table_size: usize,
}

impl TravelingWaveParams {
    pub fn new(m: f64, max: f64, c: f64) -> Self {
        Self {
            m,
            max,
            c,
            table_size: DEFAULT_TABLE_SIZE,
        }
    }

    pub fn with_table_size(mut self, table_size: usize) -> Self {
        self.table_size = table_size;
        self
    }

    /// Third root `z = c - M - m` of the profile ODE.
    pub fn z(&self) -> f64 {
        self.c - self.max - self.m
    }

    /// `(c - m) / (M - m)`.
    pub fn a_coef(&self) -> f64 {
        (self.c - self.m) / (self.max - self.m)
    }

    /// `(m - z) / (M - m)`.
    pub fn b_coef(&self) -> f64 {
        (self.m - self.z()) / (self.max - self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let z = self.z();
        let ordered = z < self.m && self.m < self.max && self.max < self.c;
        if !ordered || ![self.m, self.max, self.c].iter().all(|v| v.is_finite()) {
            return Err(Error::AdmissibilityViolation {
                z,
                m: self.m,
                max: self.max,
                c: self.c,
            });
        }
        if self.table_size < 64 {
            return Err(Error::TableTooCoarse(self.table_size));
        }
        Ok(())
    }
}

/// Tabulated traveling-wave profile over one period.
///
/// With `phi = m + (M - m) sin^2(theta)` the implicit profile relation
/// becomes `x(theta) = 2 int_0^theta sqrt(A - sin^2 t) / sqrt(B + sin^2 t) dt`,
/// which has a smooth integrand. The table samples `theta` uniformly on
/// `[0, pi]`; `x(pi)` is the period.
#[derive(Debug, Clone)]
pub struct TravelingWave {
    params: TravelingWaveParams,
    xs: Vec<f64>,
    phis: Vec<f64>,
    period: f64,
    spline: CubicSpline,
}

impl TravelingWave {
    pub fn build(params: TravelingWaveParams) -> Result<Self> {
        params.validate()?;
        let (a, b) = (params.a_coef(), params.b_coef());
        if !(a >= 1.0) {
            return Err(Error::QuadratureFailure(a));
        }
        let integrand = |t: f64| {
            let s = t.sin();
            let s2 = s * s;
            2.0 * ((a - s2) / (b + s2)).sqrt()
        };

        let n = params.table_size;
        let gl = GaussLegendre::new(QUADRATURE_ORDER);
        let theta = |j: usize| PI * j as f64 / n as f64;
        // Panels coincide with table intervals, so x_j is a composite rule on
        // [0, theta_j] with panel width pi / n.
        let mut xs = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        xs.push(0.0);
        for j in 1..=n {
            acc += gl.integrate(theta(j - 1), theta(j), integrand);
            xs.push(acc);
        }
        if !xs.iter().all(|x| x.is_finite()) {
            return Err(Error::QuadratureFailure(a));
        }
        let phis: Vec<f64> = (0..=n)
            .map(|j| {
                let s = theta(j).sin();
                params.m + (params.max - params.m) * s * s
            })
            .collect();
        let period = xs[n];
        let spline = CubicSpline::not_a_knot(xs.clone(), phis.clone())?;
        Ok(Self {
            params,
            xs,
            phis,
            period,
            spline,
        })
    }

    pub fn params(&self) -> &TravelingWaveParams {
        &self.params
    }

    /// Table abscissae, `table_size + 1` values from 0 to the period.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn speed(&self) -> f64 {
        self.params.c
    }

    /// `phi(xi)` with `xi` reduced into `[0, period)`.
    pub fn profile(&self, xi: f64) -> f64 {
        let r = xi.rem_euclid(self.period);
        // rem_euclid can round up to exactly `period`
        let r = if r >= self.period { 0.0 } else { r };
        self.spline.eval(r)
    }

    /// Exact solution `u(x, t) = phi(x - c t)`.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.profile(x - self.params.c * t)
    }

    pub fn sample(&self, grid: &PeriodicGrid, t: f64) -> RealField {
        grid.sample(|x| self.eval(x, t))
    }
}

/// How a peakon is continued beyond half a period from its center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakonBranch {
    /// `cosh(L - (x - x_i))` for `|x - x_i| > L/2`, as usually printed.
    #[default]
    Verbatim,
    /// `cosh(L - |x - x_i|)`, continuous on both sides.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peakon {
    pub amplitude: f64,
    pub center: f64,
}

impl Peakon {
    pub fn new(amplitude: f64, center: f64) -> Self {
        Self { amplitude, center }
    }
}

/// Two peakons on `[0, 25]`: amplitudes 3 and 1, centers -8 and 0.
pub fn two_peakon_set() -> Vec<Peakon> {
    vec![Peakon::new(3.0, -8.0), Peakon::new(1.0, 0.0)]
}

/// Three peakons on `[0, 30]`.
pub fn three_peakon_set() -> Vec<Peakon> {
    vec![
        Peakon::new(2.0, -5.0),
        Peakon::new(1.0, -3.0),
        Peakon::new(0.8, -1.0),
    ]
}

/// `c_i cosh(x - x_i) / cosh(L/2)` inside half a period of `x_i`, with the
/// continuation chosen by `branch` outside. The crest sits at
/// `x_i + L/2` with height `c_i`.
pub fn peakon_profile(x: f64, peak: Peakon, length: f64, branch: PeakonBranch) -> f64 {
    let d = x - peak.center;
    let arg = if d.abs() <= 0.5 * length {
        d
    } else {
        match branch {
            PeakonBranch::Verbatim => length - d,
            PeakonBranch::Symmetric => length - d.abs(),
        }
    };
    peak.amplitude * arg.cosh() / (0.5 * length).cosh()
}

/// Sum of peakons on the grid; the period is the grid length.
pub fn peakon_superposition(grid: &PeriodicGrid, peaks: &[Peakon], branch: PeakonBranch) -> Result<RealField> {
    if peaks.is_empty() {
        return Err(Error::InvalidParameter("peakon list is empty".into()));
    }
    let length = grid.length();
    RealField::new(
        grid.nodes()
            .iter()
            .map(|&x| peaks.iter().map(|&p| peakon_profile(x, p, length, branch)).sum())
            .collect(),
    )
}

/// `10 / (3 + |x|)^2`, whose derivative jumps at the origin.
pub fn kinked_profile(x: f64) -> f64 {
    let d = 3.0 + x.abs();
    10.0 / (d * d)
}

pub fn discontinuous_profile(grid: &PeriodicGrid) -> RealField {
    grid.sample(kinked_profile)
}
