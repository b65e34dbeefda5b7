//! The forcing kernel Γ_{α,n}(x, t) and its Laplace/Fourier transforms in t.

use super::fhalf::f_alpha_half;
use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{
    macdonald_k, principal_power, wright_phi, ComplexSample, FracParams, Regime,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How Γ_{α,n} is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPath {
    /// Closed form where one exists (n = 3: a single Wright function),
    /// otherwise the f_{α/2} integral.
    Auto,
    /// Always through the f_{α/2} integral.
    Integral,
}

fn check_dims(n: usize, r: f64, t: f64) -> Result<()> {
    ensure_finite("gamma_kernel", &[r, t])?;
    if n < 3 {
        return Err(Error::invalid("n", format!("dimension {n} is below 3")));
    }
    if r <= 0.0 {
        return Err(Error::invalid("r", format!("{r} must be positive (kernel is singular at r = 0)")));
    }
    if t <= 0.0 {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    Ok(())
}

/// Γ_{α,n}(x, t) with |x| = r:
/// `2^{-n} π^{(1-n)/2} t^{α-αn/2-1} f_{α/2}(t^{-α/2} r; n-1, α-αn/2)`.
pub fn gamma_kernel(params: &FracParams, n: usize, r: f64, t: f64) -> Result<ComplexSample> {
    gamma_kernel_with(params.alpha, n, r, t, KernelPath::Auto)
}

pub fn gamma_kernel_with(alpha: f64, n: usize, r: f64, t: f64, path: KernelPath) -> Result<ComplexSample> {
    check_dims(n, r, t)?;
    let nf = n as f64;
    let nu = 0.5 * alpha;
    let z = r * t.powf(-nu);
    if n == 3 && path == KernelPath::Auto {
        // f_{α/2}(z; 2, -ν) = (2/z) Φ(-ν, 0; -z)
        let phi = wright_phi(-nu, 0.0, Complex64::new(-z, 0.0))?;
        let scale = 1.0 / (4.0 * PI * r * t);
        return Ok(ComplexSample::new(phi.value * scale, phi.abs_err * scale, phi.regime));
    }
    let f = f_alpha_half(alpha, z, nf - 1.0, alpha - alpha * nf / 2.0)?;
    let scale = 2f64.powf(-nf) * PI.powf(0.5 * (1.0 - nf)) * t.powf(alpha - alpha * nf / 2.0 - 1.0);
    Ok(ComplexSample::new(f.value * scale, f.abs_err * scale, f.regime))
}

/// Closed form of ∫₀^∞ e^{-st} Γ_{α,n}(x, t) dt for Re s ≥ 0, s ≠ 0:
/// `(2π)^{-n/2} r^{1-n/2} s^{-α/2+αn/4} K_{n/2-1}(s^{α/2} r)` (principal powers).
pub fn laplace_gamma_transform(alpha: f64, n: usize, r: f64, s: Complex64) -> Result<ComplexSample> {
    check_dims(n, r, 1.0)?;
    ensure_finite("laplace_gamma_transform", &[s.re, s.im])?;
    if s.re < 0.0 || s.norm() == 0.0 {
        return Err(Error::invalid("s", format!("{s} must satisfy Re s >= 0, s != 0")));
    }
    let nf = n as f64;
    let arg = principal_power(s, 0.5 * alpha)? * r;
    let k = macdonald_k(0.5 * nf - 1.0, arg)?;
    let pre = (2.0 * PI).powf(-0.5 * nf)
        * r.powf(1.0 - 0.5 * nf)
        * principal_power(s, -0.5 * alpha + alpha * nf / 4.0)?;
    Ok(ComplexSample::new(pre * k.value, pre.norm() * k.abs_err, k.regime))
}

/// Right-hand side of ∫₀^∞ e^{-iωt} Γ_{α,n}(x, t) dt, the closed form
/// evaluated at s = i·ω_lt.
pub fn fourier_gamma_transform(params: &FracParams, n: usize, r: f64, omega_lt: f64) -> Result<ComplexSample> {
    if omega_lt == 0.0 {
        return Err(Error::invalid("omega_lt", "zero frequency (transform is the s → 0 limit)"));
    }
    laplace_gamma_transform(params.alpha, n, r, Complex64::new(0.0, omega_lt))
}

/// The transform integral computed directly in t, for comparison with the
/// closed form.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransformCheck {
    pub closed_form: ComplexSample,
    pub quadrature: ComplexSample,
    pub discrepancy: f64,
}

/// ∫₀^∞ e^{-st} Γ_{α,n}(r, t) dt by quadrature, for Re s ≥ 0.
///
/// The range [0, T] is split at every period of e^{-i Im(s) t}; beyond T
/// two integration-by-parts terms `e^{-sT}(g(T)/s + g'(T)/s²)` replace the
/// tail, with g' from a central difference.
pub fn laplace_gamma_transform_quadrature(
    alpha: f64,
    n: usize,
    r: f64,
    s: Complex64,
    path: KernelPath,
) -> Result<ComplexSample> {
    check_dims(n, r, 1.0)?;
    if s.re < 0.0 || s.norm() == 0.0 {
        return Err(Error::invalid("s", format!("{s} must satisfy Re s >= 0, s != 0")));
    }
    let g = |t: f64| gamma_kernel_with(alpha, n, r, t, path).map(|v| v.value.re);
    let t_end = if s.re >= 0.3 * s.norm() {
        70.0 / s.re
    } else {
        200.0 / s.norm()
    };
    // Below t_lo the kernel is below e^{-60} (stretched-exponential decay in r t^{-α/2}).
    let nu = 0.5 * alpha;
    let sigma = crate::specfun::wright_decay_rate(nu);
    let t_lo = r.powf(1.0 / nu) * (sigma / 60.0).powf((2.0 - alpha) / alpha);
    let mut breaks = vec![t_lo];
    let mut x = t_lo;
    while x < t_end.min(1.0) {
        x *= 2.0;
        breaks.push(x.min(t_end));
    }
    if s.im != 0.0 {
        let period = 2.0 * PI / s.im.abs();
        let mut k = (x / period).ceil();
        while k * period < t_end {
            if k * period > x {
                breaks.push(k * period);
            }
            k += 1.0;
        }
    } else {
        while x < t_end {
            x = (x * 2.0).min(t_end);
            breaks.push(x);
        }
    }
    if *breaks.last().unwrap() < t_end {
        breaks.push(t_end);
    }
    let mut failure: Option<Error> = None;
    let est = integrate_with_breaks(
        |t: f64| match g(t) {
            Ok(v) => (-s * t).exp() * v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        &breaks,
        QuadOptions::new(0.0, 1e-11).with_max_intervals(20_000),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let h = 1e-3 * t_end;
    let g_end = g(t_end)?;
    let dg_end = (g(t_end + h)? - g(t_end - h)?) / (2.0 * h);
    let boundary = (-s * t_end).exp();
    let tail = boundary * (g_end / s + dg_end / (s * s));
    // Next integration-by-parts term, with g'' ~ g·(1+α/2)(2+α/2)/T².
    let next = boundary.norm() * g_end.abs() * (1.0 + nu) * (2.0 + nu) / (t_end * t_end * s.norm().powi(3));
    let abs_err = est.abs_err + next + 1e-6 * dg_end.abs() / s.norm_sqr();
    if !est.converged {
        return Err(Error::Convergence {
            what: "Laplace transform quadrature of gamma_kernel",
            tol: 1e-11,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(est.value + tail, abs_err, Regime::Quadrature))
}

/// Closed form and quadrature of the Fourier transform side by side.
pub fn fourier_gamma_transform_check(
    params: &FracParams,
    n: usize,
    r: f64,
    omega_lt: f64,
    path: KernelPath,
) -> Result<TransformCheck> {
    let closed_form = fourier_gamma_transform(params, n, r, omega_lt)?;
    let quadrature =
        laplace_gamma_transform_quadrature(params.alpha, n, r, Complex64::new(0.0, omega_lt), path)?;
    Ok(TransformCheck {
        closed_form,
        quadrature,
        discrepancy: (closed_form.value - quadrature.value).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_integral_path() {
        for alpha in [1.25, 1.5, 1.75] {
            for (r, t) in [(0.5, 1.0), (1.0, 0.3), (2.0, 5.0), (1.0, 50.0)] {
                let a = gamma_kernel_with(alpha, 3, r, t, KernelPath::Auto).unwrap();
                let b = gamma_kernel_with(alpha, 3, r, t, KernelPath::Integral).unwrap();
                assert!(
                    (a.value - b.value).norm() <= 1e-9 * a.value.norm().max(1e-6),
                    "alpha={alpha} r={r} t={t}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn three_dim_transform_is_damped_spherical_wave() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let v = fourier_gamma_transform(&p, 3, r, 1.0).unwrap();
            let want = (-p.helmholtz_root * r).exp() / (4.0 * PI * r);
            assert!((v.value - want).norm() < 1e-12, "{} vs {want}", v.value);
        }
    }

    #[test]
    fn fourier_quadrature_matches_closed_form() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        let c = fourier_gamma_transform_check(&p, 3, 1.0, 1.0, KernelPath::Auto).unwrap();
        assert!(c.discrepancy < 1e-7, "{c:?}");
    }

    #[test]
    fn conjugate_symmetry() {
        for s in [Complex64::new(0.7, 0.0), Complex64::new(0.0, 1.3), Complex64::new(0.5, 2.0)] {
            let a = laplace_gamma_transform_quadrature(1.5, 3, 1.0, s, KernelPath::Auto).unwrap();
            let b = laplace_gamma_transform_quadrature(1.5, 3, 1.0, s.conj(), KernelPath::Auto).unwrap();
            assert!((a.value - b.value.conj()).norm() < 1e-12, "{s}");
        }
    }

    #[test]
    fn continuity_at_imaginary_axis() {
        let real = laplace_gamma_transform(1.5, 3, 1.0, Complex64::new(1e-2, 0.0)).unwrap();
        let imag = laplace_gamma_transform(1.5, 3, 1.0, Complex64::new(0.0, 1e-2)).unwrap();
        let origin = 1.0 / (4.0 * PI);
        assert!((real.value.re - origin).abs() < 0.05 * origin);
        assert!((imag.value - origin).norm() < 0.05 * origin);
    }

    #[test]
    fn rejects_origin() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        assert!(gamma_kernel(&p, 3, 0.0, 1.0).is_err());
        assert!(fourier_gamma_transform(&p, 3, 0.0, 1.0).is_err());
    }
}
