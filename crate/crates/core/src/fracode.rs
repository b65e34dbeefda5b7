//! Scalar fractional ODE D^α y + λ y = φ with y(0) = y'(0) = 0: the discrete
//! Caputo–Dzhrbashyan derivative, an implicit time stepper, the Duhamel
//! integral and the closed-form solution for φ(t) = E_α(i^α ω^α t^α).

use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::gamma::gamma;
use crate::specfun::{mittag_leffler, mittag_leffler_on_ray, ComplexSample, FracParams, Regime};
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

/// Uniform grid t_k = k·h, k = 0..=steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    pub h: f64,
    pub t: Vec<f64>,
}

impl TimeGrid {
    pub fn new(h: f64, steps: usize) -> Result<Self> {
        ensure_finite("TimeGrid", &[h])?;
        if h <= 0.0 {
            return Err(Error::invalid("h", format!("{h} must be positive")));
        }
        Ok(TimeGrid {
            h,
            t: (0..=steps).map(|k| k as f64 * h).collect(),
        })
    }

    /// Grid from 0 to `t_end` with step as close to `h` as divides evenly.
    pub fn covering(t_end: f64, h: f64) -> Result<Self> {
        ensure_finite("TimeGrid", &[t_end, h])?;
        if t_end <= 0.0 || h <= 0.0 {
            return Err(Error::invalid("t_end", "t_end and h must be positive"));
        }
        let steps = (t_end / h).round().max(1.0) as usize;
        TimeGrid::new(t_end / steps as f64, steps)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarTrajectory {
    pub grid: TimeGrid,
    pub y: Vec<Complex64>,
    pub dy0: Complex64,
}

impl ScalarTrajectory {
    /// Samples `f` on the grid.
    pub fn sample<F: Fn(f64) -> Complex64>(grid: TimeGrid, f: F, dy0: Complex64) -> Self {
        let y = grid.t.iter().map(|&t| f(t)).collect();
        ScalarTrajectory { grid, y, dy0 }
    }

    /// CSV with columns t, re, im.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re,im")?;
        for (t, y) in self.grid.t.iter().zip(&self.y) {
            writeln!(out, "{t},{},{}", y.re, y.im)?;
        }
        Ok(())
    }
}

/// Weights b_j = (j+1)^{2-α} - j^{2-α}, j = 0..n.
fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 2.0 - alpha;
    (0..n).map(|j| (j as f64 + 1.0).powf(e) - (j as f64).powf(e)).collect()
}

/// Part of the discrete derivative at step k that does not involve y_k:
/// `-Σ_{j=1}^{k-1} (b_{j-1} - b_j) δ_{k-j} - b_{k-1} y'(0)`, where
/// δ_m = (y_m - y_{m-1})/h.
fn history(b: &[f64], y: &[Complex64], h: f64, dy0: Complex64, k: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..k {
        let m = k - j;
        acc += (y[m] - y[m - 1]) * ((b[j - 1] - b[j]) / h);
    }
    -acc - dy0 * b[k - 1]
}

/// Discrete D^α u at t_k: the L1 rule applied to u' in
/// `D^α u = (1/Γ(2-α)) ∫₀^t (t-τ)^{1-α} u''(τ) dτ`, with u' at half steps from
/// divided differences and the explicit u'(0) term.
pub fn caputo_derivative(traj: &ScalarTrajectory, alpha: f64, k: usize) -> Result<Complex64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    if k < 2 {
        return Err(Error::invalid("k", format!("index {k} needs two history points")));
    }
    if k >= traj.y.len() {
        return Err(Error::invalid("k", format!("index {k} beyond trajectory of length {}", traj.y.len())));
    }
    let h = traj.grid.h;
    let b = l1_weights(alpha, k);
    let c = h.powf(1.0 - alpha) / gamma(3.0 - alpha);
    let lead = (traj.y[k] - traj.y[k - 1]) * (b[0] / h);
    Ok(c * (lead + history(&b, &traj.y, h, traj.dy0, k)))
}

/// Implicit L1 stepping of D^α y + λ y = φ(t), y(0) = y'(0) = 0.
/// The history sum is evaluated directly, O(N²).
pub fn caputo_stepper<F: Fn(f64) -> Complex64>(
    lambda: Complex64,
    forcing: F,
    grid: &TimeGrid,
    alpha: f64,
) -> Result<ScalarTrajectory> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    ensure_finite("caputo_stepper", &[lambda.re, lambda.im])?;
    if lambda.re < 0.0 {
        return Err(Error::invalid("lambda", "Re λ must be non-negative"));
    }
    let n = grid.len();
    let h = grid.h;
    let b = l1_weights(alpha, n.max(1));
    let c = h.powf(1.0 - alpha) / gamma(3.0 - alpha);
    let diag = c * b[0] / h + lambda;
    let dy0 = Complex64::new(0.0, 0.0);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    let mut scale = 1.0f64;
    for k in 1..n {
        let f = forcing(grid.t[k]);
        scale = scale.max(f.norm());
        let rhs = f + c * b[0] / h * y[k - 1] - c * history(&b, &y, h, dy0, k);
        y[k] = rhs / diag;
        let norm = y[k].norm();
        if !norm.is_finite() || norm > 1e12 * scale * (1.0 + grid.t[k]).powf(alpha) {
            return Err(Error::Unstable { step: k, norm });
        }
    }
    Ok(ScalarTrajectory {
        grid: grid.clone(),
        y,
        dy0,
    })
}

/// y_λ(t) = ∫₀^t (t-τ)^{α-1} E_{α,α}(-λ(t-τ)^α) φ_ω(τ) dτ by quadrature.
///
/// The range is split at t/2. Near τ = t the substitution t - τ = v^{1/α}
/// absorbs the weight (t-τ)^{α-1}; near τ = 0 the substitution τ = w²
/// smooths the τ^α behaviour of φ_ω.
pub fn duhamel_solution(lambda: f64, params: &FracParams, t: f64) -> Result<ComplexSample> {
    ensure_finite("duhamel_solution", &[lambda, t])?;
    if lambda < 0.0 {
        return Err(Error::invalid("lambda", format!("{lambda} must be non-negative")));
    }
    if t < 0.0 {
        return Err(Error::invalid("t", format!("{t} must be non-negative")));
    }
    if t == 0.0 {
        return Ok(ComplexSample::new(Complex64::new(0.0, 0.0), 0.0, Regime::Quadrature));
    }
    let alpha = params.alpha;
    let mut failure: Option<Error> = None;
    let mut eval = |u: f64, tau: f64| -> Complex64 {
        let k = mittag_leffler(alpha, alpha, Complex64::new(-lambda * u.powf(alpha), 0.0));
        let f = mittag_leffler_on_ray(params, tau);
        match (k, f) {
            (Ok(k), Ok(f)) => k.value * f.value,
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let opts = QuadOptions::new(0.0, 1e-12).with_max_intervals(4000);
    let half = 0.5 * t;
    // τ ∈ [t/2, t], u = t - τ = v^{1/α}, u^{α-1} du = dv/α
    let v_end = half.powf(alpha);
    let near = integrate_with_breaks(
        |v: f64| {
            let u = v.powf(1.0 / alpha);
            eval(u, t - u) * (1.0 / alpha)
        },
        &period_breaks(0.0, v_end, params.omega, |v| v.powf(1.0 / alpha)),
        opts,
    );
    // τ ∈ [0, t/2], τ = w²
    let w_end = half.sqrt();
    let far = integrate_with_breaks(
        |w: f64| {
            let tau = w * w;
            let u = t - tau;
            eval(u, tau) * (u.powf(alpha - 1.0) * 2.0 * w)
        },
        &period_breaks(0.0, w_end, params.omega, |w| w * w),
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let abs_err = near.abs_err + far.abs_err + 1e-13 * (near.abs_value + far.abs_value);
    if !near.converged || !far.converged {
        return Err(Error::Convergence {
            what: "Duhamel integral",
            tol: 1e-12,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(near.value + far.value, abs_err, Regime::Quadrature))
}

/// Breakpoints in the substituted variable at about one per oscillation
/// period of φ_ω, given the map back to the time variable.
pub(crate) fn period_breaks<M: Fn(f64) -> f64>(start: f64, end: f64, omega: f64, to_time: M) -> Vec<f64> {
    let span = (to_time(end) - to_time(start)).abs();
    let pieces = ((span * omega / (2.0 * std::f64::consts::PI)).ceil() as usize).clamp(1, 10_000);
    (0..=pieces)
        .map(|i| start + (end - start) * i as f64 / pieces as f64)
        .collect()
}

/// y_λ(t) = t^α [λ E_{α,α+1}(-λt^α) + c E_{α,α+1}(c t^α)] / (λ + c), c = i^α ω^α.
pub fn closed_form_forced(lambda: f64, params: &FracParams, t: f64) -> Result<ComplexSample> {
    ensure_finite("closed_form_forced", &[lambda, t])?;
    if lambda < 0.0 {
        return Err(Error::invalid("lambda", format!("{lambda} must be non-negative")));
    }
    if t < 0.0 {
        return Err(Error::invalid("t", format!("{t} must be non-negative")));
    }
    if t == 0.0 {
        return Ok(ComplexSample::new(Complex64::new(0.0, 0.0), 0.0, Regime::Series));
    }
    let alpha = params.alpha;
    let ta = t.powf(alpha);
    let c = params.forcing_eig;
    let e_osc = mittag_leffler(alpha, alpha + 1.0, c * ta)?;
    let denom = c + lambda;
    if lambda == 0.0 {
        return Ok(ComplexSample::new(
            e_osc.value * ta,
            e_osc.abs_err * ta,
            e_osc.regime,
        ));
    }
    let e_dec = mittag_leffler(alpha, alpha + 1.0, Complex64::new(-lambda * ta, 0.0))?;
    let value = (e_dec.value * lambda + e_osc.value * c) * ta / denom;
    let abs_err = (lambda * e_dec.abs_err + c.norm() * e_osc.abs_err) * ta / denom.norm();
    Ok(ComplexSample::new(value, abs_err, e_osc.regime))
}
