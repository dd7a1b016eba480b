//! Camassa–Holm solver built on a multiple-scalar-auxiliary-variable (MSAV)
//! reformulation of the Hamiltonian.
//!
//! The equation `u_t - u_xxt + 3 u u_x - 2 u_x u_xx - u u_xxx = 0` is
//! integrated on a periodic interval with Fourier collocation in space and a
//! linearized Crank–Nicolson recurrence in time. Each step costs a handful of
//! FFTs plus a 2×2 solve, and preserves the discrete mass and a quadratic
//! modified energy to round-off.
//!
//! Module map:
//! - [`spectral`]: periodic grid, Fourier symbols, FFT operator application.
//! - [`msav`]: energy splitting, auxiliary variables and the stepper.
//! - [`invariants`]: mass, momentum, Hamiltonian, modified energy, drifts.
//! - [`initial`]: traveling wave, peakon trains, the kinked profile.
//! - `oracle` (feature `oracle`): dense reference implementations.

pub mod error;
pub mod initial;
pub mod invariants;
pub mod msav;
pub mod quadrature;
pub mod spectral;
pub mod spline;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
pub use initial::{PeakonBranch, TravelingWave, TravelingWaveParams};
pub use invariants::{DriftSample, InvariantSample};
pub use msav::{MsavState, Scheme, SchemeParams, SplitGradients};
pub use spectral::{PeriodicGrid, RealField, SpectralOperators};
