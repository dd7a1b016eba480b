//! Periodic collocation grid and Fourier-diagonal linear operators.
//!
//! Every operator used by the scheme is diagonal in the discrete Fourier
//! basis. With wavenumbers ordered `[0, 1, .., N/2-1, N/2, -N/2+1, .., -1]`
//! the symbols are
//!
//! ```text
//! D1    : i mu k            (Nyquist entry set to 0)
//! D2    : -mu^2 k^2         (Nyquist entry kept)
//! D     : D1 / (1 - D2)     = (I - D2)^{-1} D1
//! A^{-1}: 1 / (1 - tau/8 D1)
//! ```
//!
//! Operators are applied through a real-to-complex transform, so only the
//! non-negative half of the spectrum is touched and outputs are real by
//! construction.

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::sync::Arc;

use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Equispaced periodic grid on `[a, b)`; node `N` is the image of node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    mu: f64,
    nodes: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidModeCount(n));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidDomain { a, b });
        }
        let len = b - a;
        let h = len / n as f64;
        let nodes = (0..n).map(|j| a + j as f64 * h).collect();
        Ok(Self {
            a,
            b,
            n,
            h,
            mu: 2.0 * std::f64::consts::PI / len,
            nodes,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Period `L = b - a`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh size `L / N`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Base wavenumber `2 pi / L`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Samples `f` at the grid nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField(self.nodes.iter().map(|&x| f(x)).collect())
    }

    pub fn constant(&self, value: f64) -> RealField {
        RealField(vec![value; self.n])
    }

    /// Discrete inner product `h * sum_j u_j v_j`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        self.h * u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>()
    }

    /// `<u, 1>_h`.
    pub fn integral(&self, u: &[f64]) -> f64 {
        self.h * u.iter().sum::<f64>()
    }

    pub fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        Ok(())
    }
}

/// Real samples on the grid nodes.
#[derive(Clone, PartialEq, Default)]
pub struct RealField(Vec<f64>);

impl RealField {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `self + alpha * other`, elementwise.
    pub fn axpy(&self, alpha: f64, other: &[f64]) -> Self {
        Self(self.0.iter().zip(other).map(|(x, y)| x + alpha * y).collect())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self(self.0.iter().map(|x| alpha * x).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Euclidean norm of the raw sample vector.
    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for RealField {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl FromIterator<f64> for RealField {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Deref for RealField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for RealField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl fmt::Debug for RealField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RealField").field(&self.0).finish()
    }
}

/// Fourier symbols of the scheme's linear operators together with
/// precomputed FFT plans. Immutable after construction and `Sync`.
#[derive(Clone)]
pub struct SpectralOperators {
    grid: PeriodicGrid,
    tau: f64,
    lambda1: Vec<Complex64>,
    lambda2: Vec<f64>,
    symbol_d: Vec<Complex64>,
    symbol_a_inv: Vec<Complex64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl fmt::Debug for SpectralOperators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralOperators")
            .field("n", &self.grid.n)
            .field("mu", &self.grid.mu)
            .field("tau", &self.tau)
            .finish_non_exhaustive()
    }
}

/// Signed wavenumber of FFT bin `k` on an `n`-point grid.
fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

impl SpectralOperators {
    pub fn new(grid: &PeriodicGrid, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be finite and non-negative, got {tau}"
            )));
        }
        let n = grid.n;
        let mu = grid.mu;
        let lambda1: Vec<Complex64> = (0..n)
            .map(|k| {
                if k == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, mu * wavenumber(k, n))
                }
            })
            .collect();
        let lambda2: Vec<f64> = (0..n)
            .map(|k| {
                let kk = wavenumber(k, n);
                -mu * mu * kk * kk
            })
            .collect();
        let symbol_d = lambda1
            .iter()
            .zip(&lambda2)
            .map(|(l1, l2)| l1 / (1.0 - l2))
            .collect();
        let symbol_a_inv = lambda1
            .iter()
            .map(|l1| Complex64::new(1.0, 0.0) / (1.0 - 0.125 * tau * l1))
            .collect();

        let mut planner = RealFftPlanner::<f64>::new();
        Ok(Self {
            grid: grid.clone(),
            tau,
            lambda1,
            lambda2,
            symbol_d,
            symbol_a_inv,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Symbol of `D1`, full length `N` in FFT order.
    pub fn lambda1(&self) -> &[Complex64] {
        &self.lambda1
    }

    /// Symbol of `D2`, full length `N` in FFT order.
    pub fn lambda2(&self) -> &[f64] {
        &self.lambda2
    }

    pub fn symbol_d(&self) -> &[Complex64] {
        &self.symbol_d
    }

    pub fn symbol_a_inv(&self) -> &[Complex64] {
        &self.symbol_a_inv
    }

    /// First-derivative collocation operator.
    pub fn apply_d1(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| self.lambda1[k])
    }

    /// Second-derivative collocation operator.
    pub fn apply_d2(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| Complex64::new(self.lambda2[k], 0.0))
    }

    /// `D = (I - D2)^{-1} D1`, the discrete counterpart of `(1 - d_xx)^{-1} d_x`.
    pub fn apply_d(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| self.symbol_d[k])
    }

    /// `A^{-1} = (I - tau/8 D1)^{-1}`.
    pub fn apply_a_inv(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| self.symbol_a_inv[k])
    }

    /// `A^{-1} D` in a single transform pair.
    pub fn apply_a_inv_d(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| self.symbol_a_inv[k] * self.symbol_d[k])
    }

    /// `(I - D2) u`.
    pub fn apply_helmholtz(&self, u: &[f64]) -> RealField {
        self.apply_symbol(u, |k| Complex64::new(1.0 - self.lambda2[k], 0.0))
    }

    /// Multiplies the half spectrum of `u` by `symbol(k)`, `k = 0..=N/2`,
    /// and transforms back.
    fn apply_symbol(&self, u: &[f64], symbol: impl Fn(usize) -> Complex64) -> RealField {
        let n = self.grid.n;
        assert_eq!(u.len(), n, "field length does not match grid");
        let mut input = u.to_vec();
        let mut spectrum = self.forward.make_output_vec();
        self.forward
            .process(&mut input, &mut spectrum)
            .expect("forward FFT buffer sizes are fixed by the plan");
        for (k, c) in spectrum.iter_mut().enumerate() {
            *c *= symbol(k);
        }
        // Bins 0 and N/2 are their own conjugates; a real signal needs them real.
        debug_assert!(spectrum[0].im.abs() <= 1e-10 * (1.0 + spectrum[0].norm()));
        debug_assert!(spectrum[n / 2].im.abs() <= 1e-10 * (1.0 + spectrum[n / 2].norm()));
        spectrum[0].im = 0.0;
        spectrum[n / 2].im = 0.0;
        let mut out = self.inverse.make_output_vec();
        self.inverse
            .process(&mut spectrum, &mut out)
            .expect("inverse FFT buffer sizes are fixed by the plan");
        let scale = 1.0 / n as f64;
        out.iter_mut().for_each(|v| *v *= scale);
        RealField(out)
    }
}
