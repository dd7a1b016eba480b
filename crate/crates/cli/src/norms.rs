//! Discrete error norms against a reference solution.

use chmsav_core::{PeriodicGrid, Result};

/// `(sqrt(h sum |U_j - u_j|^2), max_j |U_j - u_j|)`.
pub fn error_norms(u: &[f64], exact: &[f64], grid: &PeriodicGrid) -> Result<(f64, f64)> {
    grid.check_len(u)?;
    grid.check_len(exact)?;
    let (mut sq, mut max) = (0.0f64, 0.0f64);
    for (a, b) in u.iter().zip(exact) {
        let d = (a - b).abs();
        sq += d * d;
        max = max.max(d);
    }
    Ok(((grid.h() * sq).sqrt(), max))
}
