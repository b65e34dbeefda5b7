//! f_{α/2}(z; μ, δ) = (2/Γ(μ/2)) ∫₁^∞ Φ(-α/2, δ; -zt) (t² - 1)^{μ/2-1} dt.

use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::gamma::rgamma;
use crate::specfun::{wright_decay_rate, wright_phi, ComplexSample, Regime};
use num_complex::Complex64;

/// Relative tolerance of the outer quadrature.
const REL_TOL: f64 = 1e-11;

pub fn f_alpha_half(alpha: f64, z: f64, mu: f64, delta: f64) -> Result<ComplexSample> {
    ensure_finite("f_alpha_half", &[alpha, z, mu, delta])?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    if z <= 0.0 {
        return Err(Error::invalid("z", format!("{z} must be positive")));
    }
    if mu <= 0.0 {
        return Err(Error::invalid("mu", format!("{mu} must be positive")));
    }
    let nu = 0.5 * alpha;
    let q = 1.0 / (1.0 - nu);
    let sigma = wright_decay_rate(nu);

    // Φ(-ν, δ; -y) ≲ y^{|δ|+1} exp(-σ y^q); stop once that and the weight
    // (t²-1)^{μ/2-1} leave the product below e^{-60}.
    let mut t_max = 2.0;
    loop {
        let y = z * t_max;
        let log_env = -sigma * y.powf(q) + (delta.abs() + 1.0) * y.max(1.0).ln()
            + (mu - 2.0).max(0.0) * t_max.ln();
        if log_env < -60.0 {
            break;
        }
        t_max *= 1.25;
    }

    let phi = |t: f64| -> Result<f64> { Ok(wright_phi(-nu, delta, Complex64::new(-z * t, 0.0))?.value.re) };
    let mut failure: Option<Error> = None;
    let mut guard = |v: Result<f64>| match v {
        Ok(x) => x,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };

    // Singular weight for μ < 2: substitute t - 1 = v^{2/μ}, giving a
    // bounded integrand (2/μ)(t + 1)^{μ/2-1}.
    let est = if mu < 2.0 {
        let p = 2.0 / mu;
        let v_max = (t_max - 1.0).powf(1.0 / p);
        let breaks = unit_breaks(v_max);
        integrate_with_breaks(
            |v: f64| {
                let t = 1.0 + v.powf(p);
                guard(phi(t)) * p * (t + 1.0).powf(0.5 * mu - 1.0)
            },
            &breaks,
            QuadOptions::new(0.0, REL_TOL).with_max_intervals(2000),
        )
    } else {
        let breaks: Vec<f64> = unit_breaks(t_max - 1.0).into_iter().map(|s| 1.0 + s).collect();
        integrate_with_breaks(
            |t: f64| guard(phi(t)) * (t * t - 1.0).powf(0.5 * mu - 1.0),
            &breaks,
            QuadOptions::new(0.0, REL_TOL).with_max_intervals(2000),
        )
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = 2.0 * rgamma(0.5 * mu);
    let abs_err = scale * (est.abs_err + 1e-12 * est.abs_value) + (-60f64).exp() * scale * est.abs_value;
    if !est.converged {
        return Err(Error::Convergence {
            what: "f_alpha_half quadrature",
            tol: REL_TOL,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(
        Complex64::new(scale * est.value, 0.0),
        abs_err,
        Regime::Quadrature,
    ))
}

/// Breakpoints on [0, end] refined geometrically toward 0.
fn unit_breaks(end: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = (end * 1e-4).min(1e-3);
    while x < end {
        out.push(x);
        x *= 4.0;
    }
    out.push(end);
    out
}
