//! Two-parameter Mittag-Leffler function E_{α,β}(z) for 0 < α ≤ 2.
//!
//! Three regimes:
//! * the defining power series for |z| up to [`crossover_radius`];
//! * the exponential-plus-algebraic expansion once its optimally truncated
//!   remainder is below tolerance (|z|^{1/α} ≳ 32);
//! * in between, the inverse-Laplace (Hankel contour) representation
//!   `E = Σ residues + (1/2πi) ∫_C e^s s^{α-β} / (s^α - z) ds`,
//!   integrated numerically along two rays and a small arc.

use super::gamma::{ln_gamma, rgamma};
use super::{polar_pow, ComplexSample, EvalOptions, FracParams, Regime};
use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate, integrate_with_breaks, QuadOptions};
use num_complex::Complex64;
use std::f64::consts::PI;

const EPS: f64 = f64::EPSILON;

/// |z| below which the power series is used.
pub fn crossover_radius(alpha: f64) -> f64 {
    (5.0 + 5.0 * alpha).min(9f64.powf(alpha))
}

/// |z| above which the asymptotic expansion is accurate to about 1e-14.
pub fn asymptotic_threshold(alpha: f64) -> f64 {
    32f64.powf(alpha)
}

pub fn mittag_leffler(alpha: f64, beta: f64, z: Complex64) -> Result<ComplexSample> {
    mittag_leffler_with(alpha, beta, z, &EvalOptions::default())
}

pub fn mittag_leffler_with(
    alpha: f64,
    beta: f64,
    z: Complex64,
    opts: &EvalOptions,
) -> Result<ComplexSample> {
    ensure_finite("mittag_leffler", &[alpha, beta, z.re, z.im])?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (0, 2]")));
    }
    if beta <= 0.0 {
        return Err(Error::invalid("beta", format!("{beta} must be positive")));
    }
    if z.norm() == 0.0 {
        return Ok(ComplexSample::new(
            Complex64::new(rgamma(beta), 0.0),
            0.0,
            Regime::Series,
        ));
    }
    match opts.regime {
        Some(Regime::Series) => Ok(series(alpha, beta, z)),
        Some(Regime::Asymptotic) => Ok(asymptotic(alpha, beta, z)),
        Some(Regime::Quadrature) => contour(alpha, beta, z, opts.tol),
        None => {
            if z.norm() <= crossover_radius(alpha) {
                return Ok(series(alpha, beta, z));
            }
            let asym = asymptotic(alpha, beta, z);
            if asym.within(opts.tol) {
                return Ok(asym);
            }
            let quad = contour(alpha, beta, z, opts.tol)?;
            if quad.within(opts.tol) || quad.abs_err < asym.abs_err {
                Ok(quad)
            } else {
                Ok(asym)
            }
        }
    }
}

/// φ_ω(t) = E_α(i^α ω^α t^α), which oscillates without decay and never
/// vanishes on the ray arg z = πα/2.
pub fn mittag_leffler_on_ray(params: &FracParams, t: f64) -> Result<ComplexSample> {
    ensure_finite("mittag_leffler_on_ray", &[t])?;
    if t < 0.0 {
        return Err(Error::invalid("t", format!("{t} must be non-negative")));
    }
    let z = polar_pow(params.omega * t, PI / 2.0, params.alpha);
    let s = mittag_leffler(params.alpha, 1.0, z)?;
    if s.value.norm() <= s.abs_err {
        return Err(Error::Invariant {
            invariant: "phi_nonvanishing".into(),
            detail: format!("|phi({t})| = {} below abs_err {}", s.value.norm(), s.abs_err),
        });
    }
    Ok(s)
}

fn series(alpha: f64, beta: f64, z: Complex64) -> ComplexSample {
    let ln_z = z.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut zk = Complex64::new(1.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for k in 0..4000usize {
        let arg = alpha * k as f64 + beta;
        let term = if arg < 170.0 && zk.norm() < 1e300 {
            zk * rgamma(arg)
        } else {
            (ln_z * k as f64 - ln_gamma(arg)).exp()
        };
        zk *= z;
        let mag = term.norm();
        sum += term;
        abs_sum += mag;
        if k > 2 && mag < prev_mag {
            let ratio = mag / prev_mag;
            if ratio < 0.9 {
                tail = mag * ratio / (1.0 - ratio);
                if tail <= 1e-17 * sum.norm().max(1.0) {
                    break;
                }
            }
        }
        prev_mag = mag;
    }
    ComplexSample::new(sum, tail + 4.0 * EPS * abs_sum, Regime::Series)
}

/// Poles s of e^s s^{α-β}/(s^α - z) on the principal sheet, as (modulus, arg).
fn poles(alpha: f64, z: Complex64) -> Vec<(f64, f64)> {
    let r = z.norm().powf(1.0 / alpha);
    let theta = z.arg();
    (-4..=4)
        .map(|k| (theta + 2.0 * PI * k as f64) / alpha)
        .filter(|a| a.abs() < PI)
        .map(|a| (r, a))
        .collect()
}

fn residue(alpha: f64, beta: f64, r: f64, phi: f64) -> Complex64 {
    let s = Complex64::from_polar(r, phi);
    polar_pow(r, phi, 1.0 - beta) * s.exp() / alpha
}

fn asymptotic(alpha: f64, beta: f64, z: Complex64) -> ComplexSample {
    let mut exp_part = Complex64::new(0.0, 0.0);
    for (r, phi) in poles(alpha, z) {
        exp_part += residue(alpha, beta, r, phi);
    }
    let zinv = 1.0 / z;
    let mut alg = Complex64::new(0.0, 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut next_mag = 0.0;
    let mut abs_sum = 0.0;
    for j in 1..400usize {
        zpow *= zinv;
        let term = -zpow * rgamma(beta - alpha * j as f64);
        let mag = term.norm();
        if mag > prev {
            next_mag = mag;
            break;
        }
        alg += term;
        abs_sum += mag;
        if mag != 0.0 {
            prev = mag;
        }
        if mag < 1e-18 * (alg + exp_part).norm().max(1e-300) && mag != 0.0 {
            next_mag = mag;
            break;
        }
    }
    let r = z.norm().powf(1.0 / alpha);
    // Exponentials crossing the cut arg s = ±π switch on smoothly; their size
    // bounds what the sharp inclusion rule can get wrong.
    let stokes = z.norm().powf((1.0 - beta) / alpha) * (-r).exp() / alpha;
    let value = exp_part + alg;
    ComplexSample::new(
        value,
        next_mag + stokes + 4.0 * EPS * (abs_sum + exp_part.norm()),
        Regime::Asymptotic,
    )
}

fn contour(alpha: f64, beta: f64, z: Complex64, tol: f64) -> Result<ComplexSample> {
    let pole_list = poles(alpha, z);
    let r = z.norm().powf(1.0 / alpha);

    // Ray angle in (π/2, π] staying well away from every pole direction.
    let candidates = [PI, 0.9 * PI, 0.8 * PI, 0.7 * PI, 0.6 * PI];
    let clearance = |th: f64| {
        pole_list
            .iter()
            .map(|(_, a)| (a.abs() - th).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let mut theta = candidates[0];
    let mut best = clearance(theta);
    for &c in &candidates[1..] {
        if best >= 0.15 * PI {
            break;
        }
        let d = clearance(c);
        if d > best + 1e-12 {
            best = d;
            theta = c;
        }
    }

    let mut res_sum = Complex64::new(0.0, 0.0);
    for &(pr, pa) in &pole_list {
        if pa.abs() < theta {
            res_sum += residue(alpha, beta, pr, pa);
        }
    }

    let eps_r = (0.5 * r).min(1.0);
    let g = |rho: f64, phi: f64| -> Complex64 {
        let s = Complex64::from_polar(rho, phi);
        s.exp() * polar_pow(rho, phi, alpha - beta) / (polar_pow(rho, phi, alpha) - z)
    };
    let scale = res_sum.norm().max(1.0 / z.norm()).max(1e-30);
    let qopts = QuadOptions::new(0.05 * tol * scale, 0.05 * tol).with_max_intervals(400);

    let rho_max = 3.0 * r + 50.0 / theta.cos().abs().max(0.3);
    let mut breaks = vec![eps_r];
    for f in [0.5, 0.9, 1.1, 1.5, 2.0] {
        let b = f * r;
        if b > eps_r && b < rho_max {
            breaks.push(b);
        }
    }
    breaks.push(rho_max);
    breaks.dedup();
    let up = Complex64::from_polar(1.0, theta);
    let down = Complex64::from_polar(1.0, -theta);
    let rays = integrate_with_breaks(
        |rho| g(rho, theta) * up - g(rho, -theta) * down,
        &breaks,
        qopts,
    );
    let arc = integrate(
        |phi| g(eps_r, phi) * Complex64::new(0.0, eps_r) * Complex64::from_polar(1.0, phi),
        -theta,
        theta,
        qopts,
    );
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let value = res_sum + (rays.value + arc.value) / two_pi_i;
    let abs_err = (rays.abs_err + arc.abs_err) / (2.0 * PI)
        + 8.0 * EPS * (res_sum.norm() + (rays.abs_value + arc.abs_value) / (2.0 * PI));
    if !rays.converged || !arc.converged {
        return Err(Error::Convergence {
            what: "mittag_leffler contour quadrature",
            tol,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(value, abs_err, Regime::Quadrature))
}
