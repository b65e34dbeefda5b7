//! Numerics for the time-fractional diffusion-wave equation
//! `D_t^α u - Δu = f`, 1 < α < 2.
//!
//! * [`specfun`]: Mittag-Leffler, Wright and Macdonald functions.
//! * [`kernels`]: fundamental-solution kernels, their Laplace/Fourier
//!   identities and pointwise envelopes.
//! * [`fracode`]: the scalar Caputo-Dzhrbashyan layer (derivative, stepper,
//!   Duhamel and closed-form solutions).
//! * [`spectral`]: finite spectral decompositions and periodic-lattice solver.
//! * [`experiments`]: limiting-amplitude, stabilization and subordination runs.
//! * [`runner`]: JSON-configured experiment runner behind the `fracwave` CLI.

pub mod error;
pub mod experiments;
pub mod fit;
pub mod fracode;
pub mod kernels;
pub mod quad;
pub mod runner;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use specfun::{ComplexSample, FracParams, Regime};
