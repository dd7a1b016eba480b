//! Run configuration: a sectioned key-value file (TOML) whose keys can each
//! be overridden on the command line with `--key value`.
//!
//! ```toml
//! [domain]
//! N = 32
//!
//! [time]
//! tau = "L/400"   # lengths may be written relative to the period L
//! T = "L"
//!
//! [initial]
//! ic = "traveling_wave"
//! m = 0.3
//! Mmax = 0.7
//! c = 1.0
//! ```
//!
//! Section names are free-form; keys must be unique across sections.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chmsav_core::initial::{self, Peakon, PeakonBranch};
use chmsav_core::msav::DEFAULT_EPS_RADICAND;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config file: {0}")]
    Parse(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("override `{0}` has no value")]
    MissingValue(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Inconsistent(String),
}

pub const KEYS: &[&str] = &[
    "a",
    "b",
    "N",
    "tau",
    "T",
    "C1",
    "C2",
    "eps_radicand",
    "ic",
    "m",
    "Mmax",
    "c",
    "Ntab",
    "peaks",
    "peakon_branch",
    "output_dir",
    "sample_stride",
    "solution_stride",
    "tau_list",
];

fn canonical_key(key: &str) -> Result<String, ConfigError> {
    let key = key.replace('-', "_");
    if KEYS.contains(&key.as_str()) {
        Ok(key)
    } else {
        Err(ConfigError::UnknownKey(key))
    }
}

/// Flat key → raw string value map, before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

fn scalar_to_string(key: &str, v: &toml::Value) -> Result<String, ConfigError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        toml::Value::Array(items) => {
            // [[3, -8], [1, 0]] -> "3:-8,1:0"
            let parts = items
                .iter()
                .map(|item| match item {
                    toml::Value::Array(inner) => inner
                        .iter()
                        .map(|x| scalar_to_string(key, x))
                        .collect::<Result<Vec<_>, _>>()
                        .map(|v| v.join(":")),
                    other => scalar_to_string(key, other),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(parts.join(","))
        }
        other => Err(ConfigError::InvalidValue {
            key: key.to_string(),
            value: other.to_string(),
            reason: "expected a scalar or an array".into(),
        }),
    }
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let mut raw = Self::default();
        for (key, value) in &table {
            match value {
                toml::Value::Table(section) => {
                    for (k, v) in section {
                        raw.insert_new(k, scalar_to_string(k, v)?)?;
                    }
                }
                v => raw.insert_new(key, scalar_to_string(key, v)?)?,
            }
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    fn insert_new(&mut self, key: &str, value: String) -> Result<(), ConfigError> {
        let key = canonical_key(key)?;
        if self.values.contains_key(&key) {
            return Err(ConfigError::DuplicateKey(key));
        }
        self.values.insert(key, value);
        Ok(())
    }

    /// Sets or replaces a value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        let key = canonical_key(key)?;
        self.values.insert(key, value.into());
        Ok(())
    }

    /// Applies `--key value` / `--key=value` pairs.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<(), ConfigError> {
        let mut it = args.iter().map(|s| s.as_ref());
        while let Some(arg) = it.next() {
            let flag = arg.strip_prefix("--").ok_or_else(|| ConfigError::InvalidValue {
                key: arg.to_string(),
                value: String::new(),
                reason: "overrides must look like --key value".into(),
            })?;
            let (key, value) = match flag.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| ConfigError::MissingValue(flag.to_string()))?;
                    (flag.to_string(), v.to_string())
                }
            };
            self.set(&key, value)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.trim().parse::<T>().map_err(|e| ConfigError::InvalidValue {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Simulate,
    Converge,
    Invariants,
}

/// A length or time that may be given relative to the period `L`:
/// `0.01`, `L`, `L/200`, `2*L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodExpr {
    Absolute(f64),
    /// `factor * L`.
    Relative(f64),
}

impl PeriodExpr {
    pub fn resolve(self, length: f64) -> f64 {
        match self {
            PeriodExpr::Absolute(v) => v,
            PeriodExpr::Relative(f) => f * length,
        }
    }
}

impl FromStr for PeriodExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        let expr = if s == "L" {
            PeriodExpr::Relative(1.0)
        } else if let Some(d) = s.strip_prefix("L/") {
            PeriodExpr::Relative(1.0 / num(d)?)
        } else if let Some(f) = s.strip_suffix("*L") {
            PeriodExpr::Relative(num(f)?)
        } else if let Some(f) = s.strip_suffix('L') {
            PeriodExpr::Relative(num(f)?)
        } else {
            PeriodExpr::Absolute(num(&s)?)
        };
        let v = match expr {
            PeriodExpr::Absolute(v) | PeriodExpr::Relative(v) => v,
        };
        if !v.is_finite() {
            return Err("value is not finite".into());
        }
        Ok(expr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    TravelingWave { m: f64, max: f64, c: f64, table_size: usize },
    TwoPeakon { peaks: Vec<Peakon> },
    ThreePeakon { peaks: Vec<Peakon> },
    Discontinuous,
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::TravelingWave { .. } => "traveling_wave",
            InitialCondition::TwoPeakon { .. } => "two_peakon",
            InitialCondition::ThreePeakon { .. } => "three_peakon",
            InitialCondition::Discontinuous => "discontinuous",
        }
    }
}

/// Fully typed run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Left end of the domain.
    pub a: f64,
    /// Right end; `None` for the traveling wave, whose period fixes it.
    pub b: Option<f64>,
    pub n: usize,
    pub tau: PeriodExpr,
    pub final_time: PeriodExpr,
    pub c1: f64,
    pub c2: f64,
    pub eps_radicand: f64,
    pub ic: InitialCondition,
    pub peakon_branch: PeakonBranch,
    pub output_dir: PathBuf,
    /// Invariant sampling stride; `None` picks the solver default for `N`.
    pub sample_stride: Option<usize>,
    /// Solution snapshot stride; defaults to the sample stride.
    pub solution_stride: Option<usize>,
    pub tau_list: Vec<PeriodExpr>,
}

fn parse_peaks(key: &str, s: &str) -> Result<Vec<Peakon>, ConfigError> {
    let bad = |reason: &str| ConfigError::InvalidValue {
        key: key.into(),
        value: s.into(),
        reason: reason.into(),
    };
    let peaks = s
        .split(',')
        .map(|pair| {
            let (amp, center) = pair.split_once(':').ok_or_else(|| bad("expected amplitude:center pairs"))?;
            let amp: f64 = amp.trim().parse().map_err(|_| bad("amplitude is not a number"))?;
            let center: f64 = center.trim().parse().map_err(|_| bad("center is not a number"))?;
            Ok(Peakon::new(amp, center))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    if peaks.is_empty() {
        return Err(bad("no peaks given"));
    }
    Ok(peaks)
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::InvalidValue {
            key: key.into(),
            value: v.to_string(),
            reason: "must be positive".into(),
        })
    }
}

impl RunConfig {
    /// Types and validates `raw`, filling per-experiment defaults.
    pub fn resolve(mode: Mode, raw: &RawConfig) -> Result<Self, ConfigError> {
        let ic_name = raw.get("ic").unwrap_or("traveling_wave");
        let ic = match ic_name {
            "traveling_wave" => InitialCondition::TravelingWave {
                m: raw.parse("m")?.unwrap_or(0.3),
                max: raw.parse("Mmax")?.unwrap_or(0.7),
                c: raw.parse("c")?.unwrap_or(1.0),
                table_size: raw.parse("Ntab")?.unwrap_or(initial::DEFAULT_TABLE_SIZE),
            },
            "two_peakon" => InitialCondition::TwoPeakon {
                peaks: match raw.get("peaks") {
                    Some(s) => parse_peaks("peaks", s)?,
                    None => initial::two_peakon_set(),
                },
            },
            "three_peakon" => InitialCondition::ThreePeakon {
                peaks: match raw.get("peaks") {
                    Some(s) => parse_peaks("peaks", s)?,
                    None => initial::three_peakon_set(),
                },
            },
            "discontinuous" => InitialCondition::Discontinuous,
            other => {
                return Err(ConfigError::InvalidValue {
                    key: "ic".into(),
                    value: other.into(),
                    reason: "expected traveling_wave, two_peakon, three_peakon or discontinuous".into(),
                })
            }
        };
        if let InitialCondition::TravelingWave { m, max, c, .. } = ic {
            if !(m < max && max < c) {
                return Err(ConfigError::Inconsistent(format!(
                    "traveling wave needs m < Mmax < c, got m={m}, Mmax={max}, c={c}"
                )));
            }
        }
        let traveling = matches!(ic, InitialCondition::TravelingWave { .. });
        if mode == Mode::Converge && !traveling {
            return Err(ConfigError::Inconsistent(
                "converge mode needs the traveling_wave initial condition (it has an exact solution)".into(),
            ));
        }

        // Per-experiment defaults: (a, b, N, tau, T).
        let (da, db, dn, dtau, dt) = match (&ic, mode) {
            (InitialCondition::TravelingWave { .. }, Mode::Invariants) => {
                (0.0, None, 32, PeriodExpr::Absolute(0.0082), PeriodExpr::Absolute(656.0))
            }
            (InitialCondition::TravelingWave { .. }, _) => {
                (0.0, None, 32, PeriodExpr::Relative(1.0 / 1600.0), PeriodExpr::Relative(1.0))
            }
            (InitialCondition::TwoPeakon { .. }, _) => {
                (0.0, Some(25.0), 1024, PeriodExpr::Absolute(1e-4), PeriodExpr::Absolute(10.0))
            }
            (InitialCondition::ThreePeakon { .. }, _) => {
                (0.0, Some(30.0), 2048, PeriodExpr::Absolute(1e-4), PeriodExpr::Absolute(10.0))
            }
            (InitialCondition::Discontinuous, _) => {
                (-30.0, Some(30.0), 1024, PeriodExpr::Absolute(1e-3), PeriodExpr::Absolute(20.0))
            }
        };

        let a = raw.parse("a")?.unwrap_or(da);
        let b = match (traveling, raw.parse::<f64>("b")?) {
            (true, Some(_)) => {
                return Err(ConfigError::Inconsistent(
                    "`b` cannot be set for the traveling wave; the domain is one period long".into(),
                ))
            }
            (true, None) => None,
            (false, given) => Some(given.unwrap_or(db.unwrap_or(a + 1.0))),
        };
        if let Some(b) = b {
            if !(b > a) {
                return Err(ConfigError::Inconsistent(format!("domain [{a}, {b}] is empty")));
            }
        }

        let n: usize = raw.parse("N")?.unwrap_or(dn);
        if n < 4 || n % 2 != 0 {
            return Err(ConfigError::InvalidValue {
                key: "N".into(),
                value: n.to_string(),
                reason: "must be even and at least 4".into(),
            });
        }

        let tau: PeriodExpr = raw.parse("tau")?.unwrap_or(dtau);
        let final_time: PeriodExpr = raw.parse("T")?.unwrap_or(dt);
        let value = |e: PeriodExpr| match e {
            PeriodExpr::Absolute(v) | PeriodExpr::Relative(v) => v,
        };
        if !(value(tau) > 0.0) {
            return Err(ConfigError::InvalidValue {
                key: "tau".into(),
                value: format!("{tau:?}"),
                reason: "must be positive".into(),
            });
        }
        if !(value(final_time) >= 0.0) {
            return Err(ConfigError::InvalidValue {
                key: "T".into(),
                value: format!("{final_time:?}"),
                reason: "must be non-negative".into(),
            });
        }

        let tau_list = match raw.get("tau_list") {
            Some(s) => s
                .split(',')
                .map(|t| {
                    let bad = |reason: String| ConfigError::InvalidValue {
                        key: "tau_list".into(),
                        value: t.into(),
                        reason,
                    };
                    let e = t.parse::<PeriodExpr>().map_err(bad)?;
                    if value(e) > 0.0 {
                        Ok(e)
                    } else {
                        Err(bad("must be positive".into()))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
            None if mode == Mode::Converge => [200.0, 400.0, 800.0, 1600.0]
                .iter()
                .map(|k| PeriodExpr::Relative(1.0 / k))
                .collect(),
            None => Vec::new(),
        };
        if mode == Mode::Converge && tau_list.len() < 2 {
            return Err(ConfigError::Inconsistent("converge mode needs at least two time steps".into()));
        }

        let peakon_branch = match raw.get("peakon_branch").unwrap_or("verbatim") {
            "verbatim" => PeakonBranch::Verbatim,
            "symmetric" => PeakonBranch::Symmetric,
            other => {
                return Err(ConfigError::InvalidValue {
                    key: "peakon_branch".into(),
                    value: other.into(),
                    reason: "expected verbatim or symmetric".into(),
                })
            }
        };

        let stride = |key: &str| -> Result<Option<usize>, ConfigError> {
            match raw.parse::<usize>(key)? {
                Some(0) => Err(ConfigError::InvalidValue {
                    key: key.into(),
                    value: "0".into(),
                    reason: "must be at least 1".into(),
                }),
                other => Ok(other),
            }
        };

        Ok(Self {
            mode,
            a,
            b,
            n,
            tau,
            final_time,
            c1: raw.parse("C1")?.unwrap_or(0.0),
            c2: raw.parse("C2")?.unwrap_or(0.0),
            eps_radicand: positive("eps_radicand", raw.parse("eps_radicand")?.unwrap_or(DEFAULT_EPS_RADICAND))?,
            ic,
            peakon_branch,
            output_dir: raw.get("output_dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            sample_stride: stride("sample_stride")?,
            solution_stride: stride("solution_stride")?,
            tau_list,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_expressions() {
        assert_eq!("L".parse(), Ok(PeriodExpr::Relative(1.0)));
        assert_eq!("L/200".parse(), Ok(PeriodExpr::Relative(1.0 / 200.0)));
        assert_eq!(" 2 * L".parse(), Ok(PeriodExpr::Relative(2.0)));
        assert_eq!("0.5L".parse(), Ok(PeriodExpr::Relative(0.5)));
        assert_eq!("1e-4".parse(), Ok(PeriodExpr::Absolute(1e-4)));
        assert!("L/x".parse::<PeriodExpr>().is_err());
        assert!("inf".parse::<PeriodExpr>().is_err());
        assert_eq!(PeriodExpr::Relative(0.25).resolve(8.0), 2.0);
    }

    #[test]
    fn toml_sections_flatten() {
        let raw = RawConfig::from_toml(
            r#"
            [domain]
            N = 64
            [time]
            tau = "L/400"
            T = 6.56
            [initial]
            ic = "two_peakon"
            peaks = [[3, -8], [1, 0]]
            [converge]
            tau_list = ["L/200", "L/400"]
            "#,
        )
        .unwrap();
        assert_eq!(raw.get("N"), Some("64"));
        assert_eq!(raw.get("T"), Some("6.56"));
        assert_eq!(raw.get("peaks"), Some("3:-8,1:0"));
        assert_eq!(raw.get("tau_list"), Some("L/200,L/400"));
    }

    #[test]
    fn duplicate_and_unknown_keys() {
        let dup = RawConfig::from_toml("[x]\nN = 4\n[y]\nN = 8\n");
        assert!(matches!(dup, Err(ConfigError::DuplicateKey(k)) if k == "N"));
        assert!(matches!(RawConfig::from_toml("bogus = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RawConfig::from_toml("N = "), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::from_toml("N = 64\ntau = 0.1").unwrap();
        raw.apply_overrides(&["--N", "128", "--tau-list=L/10,L/20", "--C1", "2"]).unwrap();
        assert_eq!(raw.get("N"), Some("128"));
        assert_eq!(raw.get("tau_list"), Some("L/10,L/20"));
        assert_eq!(raw.get("C1"), Some("2"));
        assert!(matches!(raw.apply_overrides(&["--N"]), Err(ConfigError::MissingValue(_))));
        assert!(matches!(raw.apply_overrides(&["N", "3"]), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(raw.apply_overrides(&["--zzz", "3"]), Err(ConfigError::UnknownKey(_))));
    }

    #[test]
    fn defaults_per_experiment() {
        let raw = RawConfig::default();
        let inv = RunConfig::resolve(Mode::Invariants, &raw).unwrap();
        assert_eq!(inv.n, 32);
        assert_eq!(inv.tau, PeriodExpr::Absolute(0.0082));
        assert_eq!(inv.final_time, PeriodExpr::Absolute(656.0));

        let conv = RunConfig::resolve(Mode::Converge, &raw).unwrap();
        assert_eq!(conv.tau_list.len(), 4);
        assert_eq!(conv.tau_list[0], PeriodExpr::Relative(1.0 / 200.0));
        assert_eq!(conv.final_time, PeriodExpr::Relative(1.0));

        let mut raw = RawConfig::default();
        raw.set("ic", "two_peakon").unwrap();
        let two = RunConfig::resolve(Mode::Simulate, &raw).unwrap();
        assert_eq!((two.a, two.b, two.n), (0.0, Some(25.0), 1024));
        assert_eq!(two.ic, InitialCondition::TwoPeakon { peaks: initial::two_peakon_set() });

        raw.set("ic", "discontinuous").unwrap();
        let disc = RunConfig::resolve(Mode::Simulate, &raw).unwrap();
        assert_eq!((disc.a, disc.b), (-30.0, Some(30.0)));
    }

    #[test]
    fn inconsistent_configs_are_rejected() {
        let mut raw = RawConfig::default();
        raw.set("m", "0.8").unwrap();
        assert!(matches!(
            RunConfig::resolve(Mode::Simulate, &raw),
            Err(ConfigError::Inconsistent(_))
        ));

        let mut raw = RawConfig::default();
        raw.set("ic", "two_peakon").unwrap();
        assert!(RunConfig::resolve(Mode::Converge, &raw).is_err());

        let mut raw = RawConfig::default();
        raw.set("N", "31").unwrap();
        assert!(RunConfig::resolve(Mode::Simulate, &raw).is_err());

        let mut raw = RawConfig::default();
        raw.set("tau_list", "L/200").unwrap();
        assert!(RunConfig::resolve(Mode::Converge, &raw).is_err());

        let mut raw = RawConfig::default();
        raw.set("b", "3").unwrap();
        assert!(RunConfig::resolve(Mode::Simulate, &raw).is_err());

        for (k, v) in [("tau", "-1"), ("tau", "0*L"), ("T", "-2"), ("tau_list", "L/10,0")] {
            let mut raw = RawConfig::default();
            raw.set(k, v).unwrap();
            assert!(RunConfig::resolve(Mode::Converge, &raw).is_err(), "{k}={v}");
        }

        let mut raw = RawConfig::default();
        raw.set("sample_stride", "0").unwrap();
        assert!(RunConfig::resolve(Mode::Simulate, &raw).is_err());
    }
}
