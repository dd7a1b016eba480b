//! Peak tracking on `solution.csv`, used to check that a taller peakon
//! overtakes a shorter one.

use std::path::Path;

/// One `t` block of `solution.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn read_solution(path: &Path) -> std::io::Result<Vec<Snapshot>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |line: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad row `{line}`"));
    let mut snaps: Vec<Snapshot> = Vec::new();
    for line in text.lines().skip(1) {
        let mut cols = line.split(',').map(|c| c.parse::<f64>());
        let (Some(Ok(t)), Some(Ok(x)), Some(Ok(u)), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(bad(line));
        };
        match snaps.last_mut() {
            Some(s) if s.t == t => {
                s.x.push(x);
                s.u.push(u);
            }
            _ => snaps.push(Snapshot { t, x: vec![x], u: vec![u] }),
        }
    }
    Ok(snaps)
}

/// Periodic local maxima `(x, u)` with `u >= min_height`, tallest first.
pub fn local_maxima(x: &[f64], u: &[f64], min_height: f64) -> Vec<(f64, f64)> {
    let n = u.len();
    let mut peaks: Vec<(f64, f64)> = (0..n)
        .filter(|&j| {
            let (l, r) = (u[(j + n - 1) % n], u[(j + 1) % n]);
            u[j] >= min_height && u[j] > l && u[j] >= r
        })
        .map(|j| (x[j], u[j]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks
}

fn wrap(d: f64, length: f64) -> f64 {
    d - length * (d / length).round()
}

/// Signed separation `x_tallest - x_second` over time, unwrapped so that it
/// changes continuously. Snapshots with fewer than two peaks above
/// `min_height` (for instance while two crests merge) are skipped.
pub fn separation_history(snaps: &[Snapshot], length: f64, min_height: f64) -> Vec<(f64, f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64, f64)> = Vec::new();
    for s in snaps {
        let peaks = local_maxima(&s.x, &s.u, min_height);
        if peaks.len() < 2 {
            continue;
        }
        let raw = wrap(peaks[0].0 - peaks[1].0, length);
        let sep = match out.last() {
            Some(&(_, prev, _, _)) => prev + wrap(raw - prev, length),
            None => raw,
        };
        out.push((s.t, sep, peaks[0].1, peaks[1].1));
    }
    out
}

/// Result of the overtaking check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overtaking {
    pub initial_separation: f64,
    pub final_separation: f64,
    pub final_heights: (f64, f64),
}

impl Overtaking {
    /// The tallest crest starts behind the second and ends ahead of it.
    pub fn overtook(&self) -> bool {
        self.initial_separation < 0.0 && self.final_separation > 0.0
    }
}

pub fn overtaking(snaps: &[Snapshot], length: f64, min_height: f64) -> Option<Overtaking> {
    let hist = separation_history(snaps, length, min_height);
    let (first, last) = (hist.first()?, hist.last()?);
    Some(Overtaking {
        initial_separation: first.1,
        final_separation: last.1,
        final_heights: (last.2, last.3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64, c: f64) -> f64 {
        (-(x - c).powi(2)).exp()
    }

    #[test]
    fn maxima_are_periodic_and_sorted() {
        let x: Vec<f64> = (0..100).map(|j| j as f64 * 0.1).collect();
        let u: Vec<f64> = x.iter().map(|&x| 3.0 * bump(x, 0.0) + 3.0 * bump(x, 10.0) + bump(x, 5.0)).collect();
        let p = local_maxima(&x, &u, 0.5);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].0, 0.0);
        assert!((p[1].0 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_overtaking() {
        let length = 25.0;
        let x: Vec<f64> = (0..250).map(|j| j as f64 * 0.1).collect();
        let snaps: Vec<Snapshot> = (0..=100)
            .map(|k| {
                let t = k as f64 * 0.1;
                let (ca, cb) = ((4.5 + 3.0 * t) % length, (12.5 + t) % length);
                let u = x
                    .iter()
                    .map(|&x| {
                        let da = wrap(x - ca, length);
                        let db = wrap(x - cb, length);
                        3.0 * (-da.abs()).exp() + (-db.abs()).exp()
                    })
                    .collect();
                Snapshot { t, x: x.clone(), u }
            })
            .collect();
        let o = overtaking(&snaps, length, 0.5).unwrap();
        assert!((o.initial_separation + 8.0).abs() < 0.2);
        assert!((o.final_separation - 12.0).abs() < 0.2);
        assert!(o.overtook());
    }

    #[test]
    fn reads_back_written_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solution.csv");
        let mut w = crate::output::SolutionWriter::create(&path).unwrap();
        w.snapshot(0.0, &[0.0, 1.0], &[1.0, 2.0]).unwrap();
        w.snapshot(0.5, &[0.0, 1.0], &[3.0, 4.0]).unwrap();
        w.finish().unwrap();
        let snaps = read_solution(&path).unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[1].u, vec![3.0, 4.0]);
    }
}
