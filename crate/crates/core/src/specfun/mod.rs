//! Special functions: Mittag-Leffler, Wright, Macdonald and principal powers.

pub mod gamma;
mod bessel;
mod mittag_leffler;
mod wright;

pub use bessel::{macdonald_k, macdonald_k_with};
pub use mittag_leffler::{
    asymptotic_threshold, crossover_radius, mittag_leffler, mittag_leffler_on_ray,
    mittag_leffler_with,
};
pub use wright::{wright_density, wright_phi, wright_phi_with, wright_decay_rate};

use crate::error::{ensure_finite, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Default absolute tolerance (relative once |value| exceeds one).
pub const DEFAULT_TOL: f64 = 1e-12;

/// Which evaluation method produced a [`ComplexSample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    Asymptotic,
    Quadrature,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Series => "series",
            Regime::Asymptotic => "asymptotic",
            Regime::Quadrature => "quadrature",
        })
    }
}

/// A complex value with an error estimate for the regime that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSample {
    pub value: Complex64,
    pub abs_err: f64,
    pub regime: Regime,
}

impl ComplexSample {
    pub fn new(value: Complex64, abs_err: f64, regime: Regime) -> Self {
        ComplexSample {
            value,
            abs_err,
            regime,
        }
    }

    /// Error budget `tol` scaled by max(1, |value|).
    pub fn within(&self, tol: f64) -> bool {
        self.abs_err <= tol * self.value.norm().max(1.0)
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Tolerance and optional regime override for special-function evaluation.
#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub tol: f64,
    pub regime: Option<Regime>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: DEFAULT_TOL,
            regime: None,
        }
    }
}

impl EvalOptions {
    pub fn forced(regime: Regime) -> Self {
        EvalOptions {
            regime: Some(regime),
            ..Default::default()
        }
    }
}

/// Order α ∈ (1, 2) and frequency ω > 0 with the complex constants that
/// recur in every formula: i^α, i^α ω^α and (iω)^{α/2}, all principal branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FracParams {
    pub alpha: f64,
    pub omega: f64,
    pub i_pow_alpha: Complex64,
    pub forcing_eig: Complex64,
    pub helmholtz_root: Complex64,
}

impl FracParams {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        ensure_finite("FracParams", &[alpha, omega])?;
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
        }
        if omega <= 0.0 {
            return Err(Error::invalid("omega", format!("{omega} must be positive")));
        }
        let i_pow_alpha = Complex64::from_polar(1.0, FRAC_PI_2 * alpha);
        Ok(FracParams {
            alpha,
            omega,
            i_pow_alpha,
            forcing_eig: i_pow_alpha * omega.powf(alpha),
            helmholtz_root: Complex64::from_polar(omega.powf(alpha / 2.0), FRAC_PI_4 * alpha),
        })
    }
}

impl<'de> Deserialize<'de> for FracParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: f64,
            omega: f64,
        }
        let raw = Raw::deserialize(d)?;
        FracParams::new(raw.alpha, raw.omega).map_err(serde::de::Error::custom)
    }
}

/// Principal-branch power `base^exponent`, with arg(base) taken in (-π, π].
pub fn principal_power(base: Complex64, exponent: f64) -> Result<Complex64> {
    ensure_finite("principal_power", &[base.re, base.im, exponent])?;
    if base == Complex64::new(0.0, 0.0) {
        if exponent > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::invalid("base", "zero base with non-positive exponent"));
    }
    let mut arg = base.arg();
    if arg <= -PI {
        arg = PI;
    }
    Ok(Complex64::from_polar(base.norm().powf(exponent), exponent * arg))
}

/// Principal power for a point given in polar form (r, φ), φ ∈ (-π, π].
#[inline]
pub(crate) fn polar_pow(r: f64, phi: f64, exponent: f64) -> Complex64 {
    Complex64::from_polar(r.powf(exponent), phi * exponent)
}
