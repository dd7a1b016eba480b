use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be even and at least 4, got {0}")]
    InvalidModeCount(usize),

    #[error("domain [{a}, {b}] is empty or inverted")]
    InvalidDomain { a: f64, b: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid scheme parameter: {0}")]
    InvalidParameter(String),

    /// The square-root argument of an auxiliary variable fell below the
    /// guard. Raising the matching shift constant `C1`/`C2` fixes it.
    #[error("radicand of q{which} is {value:e}, below guard {guard:e}; raise C{which}")]
    RadicandTooSmall { which: u8, value: f64, guard: f64 },

    #[error("reduced 2x2 system is singular (det = {det:e}, scale = {scale:e})")]
    SingularReducedSystem { det: f64, scale: f64 },

    #[error("state at step {0} is not valid for this stepping stage")]
    WrongStage(usize),

    #[error("traveling wave parameters violate z < m < M < c (z={z}, m={m}, M={max}, c={c})")]
    AdmissibilityViolation { z: f64, m: f64, max: f64, c: f64 },

    #[error("quadrature integrand is not real (A = {0} < 1)")]
    QuadratureFailure(f64),

    #[error("table resolution {0} is below the minimum of 64")]
    TableTooCoarse(usize),

    #[error("N = {n} exceeds the dense oracle cap of {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("dense system is singular")]
    SingularMatrix,

    #[error("sample series is empty")]
    EmptySeries,

    #[error("step {step} failed: {source}")]
    StepFailed { step: usize, source: Box<Error> },
}
