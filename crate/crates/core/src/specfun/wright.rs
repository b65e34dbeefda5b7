//! Wright function Φ(ρ, δ; z) = Σ z^m / (m! Γ(δ + ρm)) for -1 < ρ < 0.
//!
//! The series is used near the origin and for non-real arguments. On the
//! negative real axis the series cancels catastrophically, so there the
//! Hankel representation
//! `Φ(-ν, δ; -y) = (1/2πi) ∫_Ha exp(s - y s^ν) s^{-δ} ds`
//! is integrated along its steepest-descent path through the saddle
//! `s₀ = (yν)^{1/(1-ν)}`. On that path the exponent is real, so the
//! integrand is positive-definite up to the algebraic factor and the
//! stretched-exponential decay comes out without cancellation.

use super::gamma::{ln_factorial, ln_gamma, ln_rgamma, rgamma};
use super::{ComplexSample, EvalOptions, Regime};
use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate, QuadOptions};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Beyond this |z| on the negative axis the contour replaces the series.
const SERIES_LIMIT: f64 = 1.0;

pub fn wright_phi(rho: f64, delta: f64, z: Complex64) -> Result<ComplexSample> {
    wright_phi_with(rho, delta, z, &EvalOptions::default())
}

pub fn wright_phi_with(
    rho: f64,
    delta: f64,
    z: Complex64,
    opts: &EvalOptions,
) -> Result<ComplexSample> {
    ensure_finite("wright_phi", &[rho, delta, z.re, z.im])?;
    if !(rho > -1.0 && rho < 0.0) {
        return Err(Error::invalid("rho", format!("{rho} is outside (-1, 0)")));
    }
    if z.norm() == 0.0 {
        return Ok(ComplexSample::new(
            Complex64::new(rgamma(delta), 0.0),
            0.0,
            Regime::Series,
        ));
    }
    let on_negative_axis = z.im == 0.0 && z.re < 0.0;
    let use_contour = match opts.regime {
        Some(Regime::Series) => false,
        Some(_) => {
            if !on_negative_axis {
                return Err(Error::invalid(
                    "z",
                    "contour regime is only available on the negative real axis",
                ));
            }
            true
        }
        None => on_negative_axis && -z.re > SERIES_LIMIT,
    };
    if use_contour {
        let (value, err) = negative_axis(-rho, delta, -z.re, opts.tol)?;
        Ok(ComplexSample::new(Complex64::new(value, 0.0), err, Regime::Quadrature))
    } else {
        Ok(series(rho, delta, z))
    }
}

/// Φ_{1/α}(z) = Φ(-1/α, 1 - 1/α; -z), the subordination density on z ≥ 0.
pub fn wright_density(alpha: f64, z: f64) -> Result<ComplexSample> {
    ensure_finite("wright_density", &[alpha, z])?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    if z < 0.0 {
        return Err(Error::invalid("z", format!("{z} must be non-negative")));
    }
    let gamma = 1.0 / alpha;
    wright_phi(-gamma, 1.0 - gamma, Complex64::new(-z, 0.0))
}

/// σ in Φ(-ν, δ; -y) ≈ A y^p exp(-σ y^{1/(1-ν)}) as y → ∞.
pub fn wright_decay_rate(nu: f64) -> f64 {
    (1.0 - nu) * nu.powf(nu / (1.0 - nu))
}

fn series(rho: f64, delta: f64, z: Complex64) -> ComplexSample {
    let ln_abs_z = z.norm().ln();
    let arg_z = z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut tail = f64::INFINITY;
    let mut prev_env = f64::INFINITY;
    for m in 0..20_000usize {
        let mf = m as f64;
        let x = delta + rho * mf;
        let (ln_rg, sign) = ln_rgamma(x);
        let ln_common = mf * ln_abs_z - ln_factorial(m);
        if sign != 0.0 {
            let term = Complex64::from_polar(sign * (ln_common + ln_rg).exp(), mf * arg_z);
            sum += term;
            // exp of a log-space magnitude inherits the log's absolute rounding error
            abs_sum += term.norm() * (ln_common.abs() + ln_rg.abs() + mf * arg_z.abs() + 8.0);
        }
        // |1/Γ(x)| ≤ Γ(1-x)/π for x < 0 gives a monotone envelope.
        if x < 0.0 {
            let env = (ln_common + ln_gamma(1.0 - x) - PI.ln()).exp();
            if prev_env.is_finite() && env < prev_env {
                let ratio = env / prev_env;
                if ratio < 0.5 {
                    let next = env * ratio;
                    tail = next / (1.0 - ratio);
                    if tail <= 1e-17 * sum.norm().max(1.0) {
                        break;
                    }
                }
            }
            prev_env = env;
        }
    }
    ComplexSample::new(sum, tail + f64::EPSILON * abs_sum, Regime::Series)
}

struct SteepestPath {
    nu: f64,
}

/// sin(x)/x - 1 without cancellation for small x.
fn sinc_m1(x: f64) -> f64 {
    if x.abs() < 0.2 {
        let x2 = x * x;
        -x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x.sin() / x - 1.0
    }
}

impl SteepestPath {
    /// ln ρ(φ), where ρ^{1-ν} = sin(νφ) / (ν sin φ).
    fn log_radius(&self, phi: f64) -> f64 {
        let nu = self.nu;
        ((sinc_m1(nu * phi)).ln_1p() - sinc_m1(phi).ln_1p()) / (1.0 - nu)
    }

    fn radius(&self, phi: f64) -> f64 {
        self.log_radius(phi).exp()
    }

    /// ρ'(φ) / ρ(φ)
    fn log_radius_slope(&self, phi: f64) -> f64 {
        let nu = self.nu;
        let d = if phi < 1e-4 {
            phi * (1.0 - nu * nu) / 3.0
        } else {
            nu / (nu * phi).tan() - 1.0 / phi.tan()
        };
        d / (1.0 - nu)
    }

    /// h(φ) - h(0) for h = Re(w - w^ν/ν) along the path (the imaginary part
    /// vanishes). On the path h = -ρ sin((1-ν)φ) / sin(νφ), which is written
    /// through sinc - 1 terms so that large saddle scales do not amplify
    /// rounding.
    fn exponent_shift(&self, phi: f64) -> f64 {
        let nu = self.nu;
        let m = self.log_radius(phi) + sinc_m1((1.0 - nu) * phi).ln_1p() - sinc_m1(nu * phi).ln_1p();
        -(1.0 - nu) / nu * m.exp_m1()
    }
}

fn negative_axis(nu: f64, delta: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    let path = SteepestPath { nu };
    let s0 = (y * nu).powf(1.0 / (1.0 - nu));
    let h0 = 1.0 - 1.0 / nu;
    let log_prefactor = (1.0 - delta) * s0.ln() + s0 * h0 - PI.ln();
    if log_prefactor < -745.0 {
        // Below the smallest subnormal; the integral itself is O(1).
        return Ok((0.0, 0.0));
    }
    // Truncate where the exponent has dropped by 60 below its saddle value.
    let drop = |phi: f64| s0 * path.exponent_shift(phi) + 60.0;
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid >= PI * (1.0 - 1e-15) || drop(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let phi_max = hi;
    let integrand = |phi: f64| {
        let r = path.radius(phi);
        let dr = r * path.log_radius_slope(phi);
        let w = (s0 * path.exponent_shift(phi)).exp() * r.powf(-delta);
        let a = (1.0 - delta) * phi;
        w * (dr * a.sin() + r * a.cos())
    };
    let est = integrate(integrand, 0.0, phi_max, QuadOptions::new(0.0, 0.02 * tol).with_max_intervals(500));
    let prefactor = log_prefactor.exp();
    if !est.converged {
        return Err(Error::Convergence {
            what: "wright_phi steepest-descent quadrature",
            tol,
            best_err: prefactor * est.abs_err,
        });
    }
    let err = prefactor * (est.abs_err + 8.0 * f64::EPSILON * est.abs_value);
    Ok((prefactor * est.value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;

    fn re(z: f64) -> Complex64 {
        Complex64::new(z, 0.0)
    }

    #[test]
    fn origin_is_reciprocal_gamma() {
        for (rho, delta) in [(-0.75, -0.75), (-0.5, 0.5), (-0.3, 2.0)] {
            let v = wright_phi(rho, delta, re(0.0)).unwrap();
            assert!((v.value.re - rgamma(delta)).abs() < 1e-15);
        }
    }

    #[test]
    fn density_start_value() {
        let v = wright_density(1.5, 0.0).unwrap();
        assert!((v.value.re - 1.0 / gamma(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn half_order_is_gaussian() {
        // M_{1/2}(z) = exp(-z²/4)/√π
        for z in [0.5f64, 1.0, 2.0, 4.0, 7.0] {
            let v = wright_phi(-0.5, 0.5, re(-z)).unwrap();
            let want = (-z * z / 4.0).exp() / PI.sqrt();
            assert!((v.value.re - want).abs() < 1e-13, "z = {z}: {} vs {want}", v.value.re);
        }
    }

    #[test]
    fn contour_matches_series_on_overlap() {
        for (nu, delta) in [(0.75, -0.75), (0.875, 0.0), (2.0 / 3.0, 1.0 / 3.0), (0.625, -0.25)] {
            for y in [0.6, 1.0, 1.5, 2.0] {
                let s = wright_phi_with(-nu, delta, re(-y), &EvalOptions::forced(Regime::Series)).unwrap();
                let q = wright_phi_with(-nu, delta, re(-y), &EvalOptions::forced(Regime::Quadrature))
                    .unwrap();
                assert!(
                    (s.value - q.value).norm() < 1e-12 + s.abs_err + q.abs_err,
                    "nu={nu} delta={delta} y={y}: {} vs {}",
                    s.value,
                    q.value
                );
            }
        }
    }

    #[test]
    fn decays_far_out() {
        let v = wright_phi(-0.75, -0.75, re(-20.0)).unwrap();
        assert!(v.value.re.abs() < 1e-300 || v.value.re.abs() < 1e-100);
        assert!(v.abs_err.is_finite());
    }
}
