//! Gauss–Legendre quadrature.

use std::f64::consts::PI;

/// Nodes and weights of the `order`-point rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2, "Gauss-Legendre order must be at least 2");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let half = order.div_ceil(2);
        for i in 0..half {
            // Newton from the Tricomi-type initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(order, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(order, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let rad = 0.5 * (b - a);
        rad * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + rad * x))
            .sum::<f64>()
    }

    /// Composite rule over `panels` equal panels.
    pub fn composite(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let w = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + p as f64 * w;
                self.integrate(lo, lo + w, &f)
            })
            .sum()
    }
}
