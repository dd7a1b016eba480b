//! Cubic interpolating spline with not-a-knot end conditions.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
}

/// Solves a tridiagonal system in place (Thomas algorithm).
fn solve_tridiagonal(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

impl CubicSpline {
    /// Fits through `(xs, ys)`; needs at least four strictly increasing knots.
    pub fn not_a_knot(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if xs.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "not-a-knot spline needs at least 4 knots, got {}",
                xs.len()
            )));
        }
        if !xs.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("spline knots must be strictly increasing".into()));
        }
        let n = xs.len() - 1;
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        // Unknowns M_1..M_{n-1}; M_0 and M_n are eliminated through the
        // not-a-knot conditions (third derivative continuous at x_1, x_{n-1}).
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            lower[k] = h[i - 1];
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            upper[k] = h[i];
            rhs[k] = 6.0 * (d[i] - d[i - 1]);
        }
        // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        upper[0] -= h0 * h0 / h1;
        // M_n = ((h_{n-2} + h_{n-1}) M_{n-1} - h_{n-1} M_{n-2}) / h_{n-2}
        let (ha, hb) = (h[n - 2], h[n - 1]);
        diag[m - 1] += hb * (ha + hb) / ha;
        lower[m - 1] -= hb * hb / ha;
        solve_tridiagonal(&lower, &mut diag, &upper, &mut rhs);

        let mut moments = Vec::with_capacity(n + 1);
        moments.push(((h0 + h1) * rhs[0] - h0 * rhs[1]) / h1);
        moments.extend_from_slice(&rhs);
        moments.push(((ha + hb) * rhs[m - 1] - hb * rhs[m - 2]) / ha);
        Ok(Self { xs, ys, moments })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    /// Evaluates the spline; outside the knot range the end cubics extend.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, n) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - x, x - x0);
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        (m0 * a * a * a + m1 * b * b * b) / (6.0 * h)
            + (self.ys[i] / h - m0 * h / 6.0) * a
            + (self.ys[i + 1] / h - m1 * h / 6.0) * b
    }
}
