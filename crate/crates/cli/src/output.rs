//! CSV emission. Every float is written as `{:.16e}` (17 significant
//! digits, round-trip exact) and every line ends in `\n`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chmsav_core::{DriftSample, InvariantSample};

pub const SOLUTION_HEADER: &str = "t,x,U";
pub const INVARIANTS_HEADER: &str =
    "n,t,mass,momentum,hamiltonian,modified_energy,mass_drift,momentum_drift,hamiltonian_drift,modified_energy_drift";
pub const CONVERGENCE_HEADER: &str = "tau,e2,order2,einf,orderinf";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Streams `t,x,U` rows, one per node per snapshot.
pub struct SolutionWriter {
    out: BufWriter<File>,
}

impl SolutionWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{SOLUTION_HEADER}")?;
        Ok(Self { out })
    }

    pub fn snapshot(&mut self, t: f64, xs: &[f64], u: &[f64]) -> io::Result<()> {
        let t = fmt_f64(t);
        for (x, v) in xs.iter().zip(u) {
            writeln!(self.out, "{t},{},{}", fmt_f64(*x), fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

pub fn write_invariants(path: &Path, samples: &[InvariantSample], drifts: &[DriftSample]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{INVARIANTS_HEADER}")?;
    for (s, d) in samples.iter().zip(drifts) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.n,
            fmt_f64(s.t),
            fmt_f64(s.mass),
            fmt_f64(s.momentum),
            fmt_f64(s.hamiltonian),
            fmt_f64(s.modified_energy),
            fmt_f64(d.mass),
            fmt_f64(d.momentum),
            fmt_f64(d.hamiltonian),
            fmt_f64(d.modified_energy),
        )?;
    }
    out.flush()
}

/// One line of the temporal convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub e2: f64,
    pub order2: Option<f64>,
    pub einf: f64,
    pub orderinf: Option<f64>,
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.tau),
            fmt_f64(r.e2),
            fmt_opt(r.order2),
            fmt_f64(r.einf),
            fmt_opt(r.orderinf),
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, -2.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn convergence_blank_orders() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let rows = [
            ConvergenceRow { tau: 0.1, e2: 1.0, order2: None, einf: 2.0, orderinf: None },
            ConvergenceRow { tau: 0.05, e2: 0.25, order2: Some(2.0), einf: 0.5, orderinf: Some(2.0) },
        ];
        write_convergence(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_HEADER);
        assert!(lines[1].ends_with(",,2.0000000000000000e0,"));
        assert!(!text.contains('\r'));
    }
}
