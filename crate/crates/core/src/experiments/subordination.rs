use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{wright_decay_rate, wright_density, ComplexSample, Regime};
use num_complex::Complex64;

const REL_TOL: f64 = 1e-10;

/// Trajectory span needed for a transform at time t: S ≥ 30 t^{1/α}.
pub fn required_span(alpha: f64, t: f64) -> f64 {
    30.0 * t.powf(1.0 / alpha)
}

/// Heat-equation value u₁(t) = ∫₀^∞ t^{-1/α} Φ_{1/α}(s t^{-1/α}) u_α(s) ds
/// from a trajectory of the fractional problem known on s ∈ [0, span].
///
/// In the variable z = s t^{-1/α} the weight is the density Φ_{1/α}(z); it is
/// cut where it has decayed by e^{-40}, and the discarded mass is bounded by
/// the largest |u_α| seen times the density tail.
pub fn subordination_transform<F>(mut u_alpha: F, span: f64, alpha: f64, t: f64) -> Result<ComplexSample>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    ensure_finite("subordination_transform", &[span, alpha, t])?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    if t <= 0.0 {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    let required = required_span(alpha, t);
    if span < required {
        return Err(Error::InsufficientSpan { span, required });
    }
    let gamma = 1.0 / alpha;
    let z_cut = (40.0 / wright_decay_rate(gamma)).powf(1.0 - gamma);
    let z_end = z_cut.min(span * t.powf(-gamma));
    let scale = t.powf(gamma);
    let breaks: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
        .into_iter()
        .filter(|&z| z < z_end)
        .chain(std::iter::once(z_end))
        .collect();
    let mut failure: Option<Error> = None;
    let mut sup = 0.0f64;
    let est = integrate_with_breaks(
        |z: f64| {
            let w = wright_density(alpha, z);
            let u = u_alpha(scale * z);
            match (w, u) {
                (Ok(w), Ok(u)) => {
                    sup = sup.max(u.norm());
                    u * w.value.re
                }
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &breaks,
        QuadOptions::new(1e-14, REL_TOL).with_max_intervals(2000),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !est.converged {
        return Err(Error::Convergence {
            what: "subordination integral",
            tol: REL_TOL,
            best_err: est.abs_err,
        });
    }
    let tail = sup * (-40f64).exp() * z_end;
    Ok(ComplexSample::new(est.value, est.abs_err + tail, Regime::Quadrature))
}
