//! The initial-value kernel Z₁ = H_α(t, r), recovered from its Fourier
//! symbol E_α(-|ξ|² t^α).
//!
//! In three dimensions the radial inverse transform is
//! `H = (1/(2π² r)) Im ∫₀^∞ k e^{ikr} E_α(-k² t^α) dk`.
//! On the real axis the integrand decays only like 1/k; rotating to
//! `k = ρ e^{iθ}` with `0 < θ < π(2-α)/4` keeps E_α algebraically bounded
//! while e^{ikr} decays exponentially.

use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{mittag_leffler, wright_phi, ComplexSample, FracParams, Regime};
use num_complex::Complex64;
use std::f64::consts::PI;

const REL_TOL: f64 = 1e-10;

fn check(n: usize, r: f64, t: f64) -> Result<()> {
    ensure_finite("z1_kernel", &[r, t])?;
    if n != 3 {
        return Err(Error::invalid("n", format!("only n = 3 is implemented (got {n})")));
    }
    if r <= 0.0 {
        return Err(Error::invalid("r", format!("{r}: the kernel is singular at r = 0")));
    }
    if t <= 0.0 {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    Ok(())
}

/// ∫₀^∞ k^{power} e^{ikr} E_α(-k² t^α) dk along the rotated ray.
fn rotated_integral(alpha: f64, r: f64, t: f64, power: i32) -> Result<(Complex64, f64)> {
    let theta = PI * (2.0 - alpha) / 8.0;
    let dir = Complex64::from_polar(1.0, theta);
    let ta = t.powf(alpha);
    let decay = r * theta.sin();
    let rho_max = (60.0 + (power as f64 + 1.0) * (1.0 + 1.0 / decay).ln()) / decay;
    let knee = t.powf(-0.5 * alpha);
    let mut breaks = vec![0.0];
    for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
        breaks.push(c * knee);
        breaks.push(c / decay);
    }
    breaks.retain(|&b| b < rho_max);
    breaks.push(rho_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut failure: Option<Error> = None;
    let est = integrate_with_breaks(
        |rho: f64| {
            let k = dir * rho;
            match mittag_leffler(alpha, 1.0, -k * k * ta) {
                Ok(e) => k.powi(power) * (Complex64::i() * k * r).exp() * e.value * dir,
                Err(err) => {
                    failure.get_or_insert(err);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &breaks,
        QuadOptions::new(0.0, REL_TOL).with_max_intervals(4000),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let err = est.abs_err + 1e-12 * est.abs_value;
    if !est.converged {
        return Err(Error::Convergence {
            what: "Z1 inverse transform",
            tol: REL_TOL,
            best_err: err,
        });
    }
    Ok((est.value, err))
}

/// H_α(t, r) by inversion of the Fourier symbol (n = 3).
pub fn z1_kernel(params: &FracParams, n: usize, r: f64, t: f64) -> Result<ComplexSample> {
    check(n, r, t)?;
    let (i1, e1) = rotated_integral(params.alpha, r, t, 1)?;
    let scale = 1.0 / (2.0 * PI * PI * r);
    Ok(ComplexSample::new(
        Complex64::new(scale * i1.im, 0.0),
        scale * e1,
        Regime::Quadrature,
    ))
}

/// ∂H_α/∂r from the differentiated inversion integral:
/// `-H/r + (1/(2π² r)) Im ∫ i k² e^{ikr} E_α(-k² t^α) dk`.
pub fn z1_radial_derivative(params: &FracParams, n: usize, r: f64, t: f64) -> Result<ComplexSample> {
    check(n, r, t)?;
    let (i1, e1) = rotated_integral(params.alpha, r, t, 1)?;
    let (i2, e2) = rotated_integral(params.alpha, r, t, 2)?;
    let scale = 1.0 / (2.0 * PI * PI * r);
    let h = scale * i1.im;
    let value = -h / r + scale * i2.re;
    Ok(ComplexSample::new(
        Complex64::new(value, 0.0),
        scale * (e1 / r + e2),
        Regime::Quadrature,
    ))
}

/// H_α(t, r) = t^{-α} Φ(-α/2, 1-α; -r t^{-α/2}) / (4π r), the three-dimensional
/// closed form (radial derivative of the one-dimensional M-Wright kernel).
pub fn z1_closed_form(alpha: f64, r: f64, t: f64) -> Result<ComplexSample> {
    check(3, r, t)?;
    let nu = 0.5 * alpha;
    let phi = wright_phi(-nu, 1.0 - alpha, Complex64::new(-r * t.powf(-nu), 0.0))?;
    let scale = t.powf(-alpha) / (4.0 * PI * r);
    Ok(ComplexSample::new(phi.value * scale, phi.abs_err * scale, phi.regime))
}

/// Z₂(t, r) = t^{1-α} Φ(-α/2, 2-α; -r t^{-α/2}) / (4π r), the three-dimensional
/// kernel with Fourier symbol t E_{α,2}(-|ξ|² t^α) (the time integral of Z₁).
pub fn z2_closed_form(alpha: f64, r: f64, t: f64) -> Result<ComplexSample> {
    check(3, r, t)?;
    let nu = 0.5 * alpha;
    let phi = wright_phi(-nu, 2.0 - alpha, Complex64::new(-r * t.powf(-nu), 0.0))?;
    let scale = t.powf(1.0 - alpha) / (4.0 * PI * r);
    Ok(ComplexSample::new(phi.value * scale, phi.abs_err * scale, phi.regime))
}

/// ∂H_α/∂r from the closed form.
pub fn z1_closed_form_derivative(alpha: f64, r: f64, t: f64) -> Result<ComplexSample> {
    let h = z1_closed_form(alpha, r, t)?;
    let nu = 0.5 * alpha;
    let phi = wright_phi(-nu, 1.0 - alpha - nu, Complex64::new(-r * t.powf(-nu), 0.0))?;
    let scale = t.powf(-alpha - nu) / (4.0 * PI * r);
    Ok(ComplexSample::new(
        -h.value / r - phi.value * scale,
        h.abs_err / r + phi.abs_err * scale,
        phi.regime,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_matches_closed_form() {
        for alpha in [1.25, 1.5, 1.75] {
            let p = FracParams::new(alpha, 1.0).unwrap();
            for (r, t) in [(0.2, 1.0), (1.0, 1.0), (2.0, 0.5), (1.0, 10.0), (3.0, 2.0)] {
                let a = z1_kernel(&p, 3, r, t).unwrap();
                let b = z1_closed_form(alpha, r, t).unwrap();
                assert!(
                    (a.value.re - b.value.re).abs() < 1e-8 * b.value.re.abs().max(1e-4),
                    "alpha={alpha} r={r} t={t}: {} vs {}",
                    a.value.re,
                    b.value.re
                );
            }
        }
    }

    #[test]
    fn derivative_matches_closed_form_and_difference() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        let (r, t) = (1.0, 1.0);
        let d = z1_radial_derivative(&p, 3, r, t).unwrap();
        let c = z1_closed_form_derivative(1.5, r, t).unwrap();
        assert!((d.value.re - c.value.re).abs() < 1e-8, "{} vs {}", d.value.re, c.value.re);
        let h = 1e-4;
        let fd = (z1_kernel(&p, 3, r + h, t).unwrap().value.re - z1_kernel(&p, 3, r - h, t).unwrap().value.re)
            / (2.0 * h);
        assert!((fd - d.value.re).abs() < 1e-6, "{fd} vs {}", d.value.re);
    }

    #[test]
    fn negative_near_origin() {
        // Φ(-α/2, 1-α; 0) = 1/Γ(1-α) < 0 for 1 < α < 2
        let v = z1_closed_form(1.5, 1e-3, 1.0).unwrap();
        assert!(v.value.re < 0.0);
    }

    #[test]
    fn z2_is_time_integral_of_z1() {
        use crate::quad::{integrate, QuadOptions};
        let alpha = 1.5;
        for (r, t) in [(0.5, 1.0f64), (1.0, 2.0), (2.0, 3.0)] {
            // substitute s = v^{2/α} to absorb the onset of Z₁ near s = 0
            let est = integrate(
                |v: f64| {
                    let s = v.powf(2.0 / alpha);
                    z1_closed_form(alpha, r, s).unwrap().re() * (2.0 / alpha) * v.powf(2.0 / alpha - 1.0)
                },
                0.0,
                t.powf(alpha / 2.0),
                QuadOptions::new(0.0, 1e-11),
            );
            let z2 = z2_closed_form(alpha, r, t).unwrap().re();
            assert!((est.value - z2).abs() < 1e-9 * z2.abs().max(1e-3), "{r} {t}: {} vs {z2}", est.value);
        }
    }

    #[test]
    fn rejects_other_dimensions() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        assert!(z1_kernel(&p, 4, 1.0, 1.0).is_err());
        assert!(z1_kernel(&p, 3, 0.0, 1.0).is_err());
    }
}
