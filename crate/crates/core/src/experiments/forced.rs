use super::green::green_convolution;
use super::source::CompactSource;
use crate::error::{ensure_finite, Error, Result};
use crate::fracode::period_breaks;
use crate::kernels::{gamma_kernel, z1_closed_form, z2_closed_form, BoundSample};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{mittag_leffler_on_ray, ComplexSample, FracParams, Regime};
use num_complex::Complex64;
use serde::Serialize;

const SPACE_TOL: f64 = 1e-9;
const TIME_TOL: f64 = 1e-8;

/// ∫₀^t K(t - τ) φ_ω(τ) dτ for a kernel with K(s) ~ s^{α-1} as s → 0.
///
/// Split at τ = t/2. On [t/2, t] the substitution t - τ = v^{1/α} removes the
/// weak singularity; on [0, t/2] the substitution τ = w² smooths the τ^α
/// onset of φ_ω.
fn time_convolution<K>(params: &FracParams, t: f64, mut kernel: K, what: &'static str) -> Result<ComplexSample>
where
    K: FnMut(f64) -> Result<f64>,
{
    let alpha = params.alpha;
    let mut failure: Option<Error> = None;
    let mut eval = |s: f64, tau: f64| -> Complex64 {
        match (kernel(s), mittag_leffler_on_ray(params, tau)) {
            (Ok(k), Ok(f)) => f.value * k,
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let opts = QuadOptions::new(0.0, TIME_TOL).with_max_intervals(4000);
    let half = 0.5 * t;
    let near = integrate_with_breaks(
        |v: f64| {
            let s = v.powf(1.0 / alpha);
            eval(s, t - s) * (s.powf(1.0 - alpha) / alpha)
        },
        &period_breaks(0.0, half.powf(alpha), params.omega, |v| v.powf(1.0 / alpha)),
        opts,
    );
    let far = integrate_with_breaks(
        |w: f64| {
            let tau = w * w;
            eval(t - tau, tau) * (2.0 * w)
        },
        &period_breaks(0.0, half.sqrt(), params.omega, |w| w * w),
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let abs_err = near.abs_err + far.abs_err;
    if !near.converged || !far.converged {
        return Err(Error::Convergence {
            what,
            tol: TIME_TOL,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(near.value + far.value, abs_err, Regime::Quadrature))
}

fn check_time(t: f64) -> Result<()> {
    ensure_finite("t", &[t])?;
    if t <= 0.0 {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    Ok(())
}

/// k(t, x) = ∫₀^t Γ_{α,3}(x, t - τ) φ_ω(τ) dτ with |x| = r.
pub fn forcing_kernel(params: &FracParams, r: f64, t: f64) -> Result<ComplexSample> {
    check_time(t)?;
    ensure_finite("r", &[r])?;
    if r <= 0.0 {
        return Err(Error::invalid("r", format!("{r} must be positive")));
    }
    time_convolution(params, t, |s| Ok(gamma_kernel(params, 3, r, s)?.re()), "forcing kernel time integral")
}

/// Radii where a kernel of spatial scale s^{α/2} changes character.
fn kernel_breaks(alpha: f64, s: f64) -> Vec<f64> {
    let scale = s.powf(0.5 * alpha);
    [0.25, 0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|f| f * scale).collect()
}

/// ∫ K(|x - ξ|) F(ξ) dξ for a real radial kernel, as a fallible quadrature.
fn spatial<K>(source: &CompactSource, x: &[f64; 3], breaks: &[f64], mut kernel: K, what: &'static str) -> Result<(f64, f64)>
where
    K: FnMut(f64) -> Result<f64>,
{
    let mut failure: Option<Error> = None;
    let (value, abs_err, ok): (f64, f64, bool) = source.radial_convolution(
        x,
        |rho| match kernel(rho) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        breaks,
        SPACE_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !ok {
        return Err(Error::Convergence {
            what,
            tol: SPACE_TOL,
            best_err: abs_err,
        });
    }
    Ok((value, abs_err))
}

/// u₃(t, x) = ∫ k(t, x - ξ) F(ξ) dξ in R³.
///
/// The order of integration is swapped: u₃ = ∫₀^t K(t - τ) φ_ω(τ) dτ with
/// K(s) = ∫ Γ_{α,3}(x - ξ, s) F(ξ) dξ, evaluated as a radial integral over
/// spheres around x.
pub fn forced_solution_r3(source: &CompactSource, params: &FracParams, x: &[f64; 3], t: f64) -> Result<ComplexSample> {
    source.validate()?;
    ensure_finite("x", x)?;
    check_time(t)?;
    let alpha = params.alpha;
    let mut space_rel = 0.0f64;
    let mut out = time_convolution(
        params,
        t,
        |s| {
            let (v, e) = spatial(
                source,
                x,
                &kernel_breaks(alpha, s),
                |rho| Ok(gamma_kernel(params, 3, rho, s)?.re()),
                "forced solution spatial integral",
            )?;
            if v != 0.0 {
                space_rel = space_rel.max(e / v.abs());
            }
            Ok(v)
        },
        "forced solution time integral",
    )?;
    out.abs_err += space_rel * out.value.norm();
    Ok(out)
}

/// u₁(t, x) = ∫ Z₁(x - ξ, t) u⁰(ξ) dξ in R³.
pub fn initial_value_part(u0: &CompactSource, params: &FracParams, x: &[f64; 3], t: f64) -> Result<ComplexSample> {
    u0.validate()?;
    check_time(t)?;
    let alpha = params.alpha;
    let (v, e) = spatial(
        u0,
        x,
        &kernel_breaks(alpha, t),
        |rho| Ok(z1_closed_form(alpha, rho, t)?.re()),
        "initial-value part",
    )?;
    Ok(ComplexSample::new(Complex64::new(v, 0.0), e, Regime::Quadrature))
}

/// u₂(t, x) = ∫ Z₂(x - ξ, t) u¹(ξ) dξ in R³.
pub fn initial_velocity_part(u1: &CompactSource, params: &FracParams, x: &[f64; 3], t: f64) -> Result<ComplexSample> {
    u1.validate()?;
    check_time(t)?;
    let alpha = params.alpha;
    let (v, e) = spatial(
        u1,
        x,
        &kernel_breaks(alpha, t),
        |rho| Ok(z2_closed_form(alpha, rho, t)?.re()),
        "initial-velocity part",
    )?;
    Ok(ComplexSample::new(Complex64::new(v, 0.0), e, Regime::Quadrature))
}

/// |k(t, x)| on a (t, r) grid.
pub fn forcing_kernel_samples(params: &FracParams, times: &[f64], radii: &[f64]) -> Result<Vec<BoundSample>> {
    times
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| (t, r)))
        .map(|(t, r)| {
            Ok(BoundSample {
                t,
                r,
                value: forcing_kernel(params, r, t)?.value.norm(),
            })
        })
        .collect()
}

/// C = safety · max |k(t, x)|·|x|, a constant for |k(t,x)| ≤ C/|x| uniform in t.
pub fn fit_uniform_kernel_bound(samples: &[BoundSample], safety: f64) -> f64 {
    safety * samples.iter().map(|s| s.value * s.r).fold(0.0, f64::max)
}

/// Samples with |k(t, x)|·|x| > C.
pub fn uniform_kernel_violations(samples: &[BoundSample], c: f64) -> Vec<BoundSample> {
    samples.iter().filter(|s| s.value * s.r > c).copied().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioPoint {
    pub t: f64,
    /// u(t,x) / φ_ω(t)
    pub ratio: Complex64,
    pub target: Complex64,
    /// |ratio - target|
    pub residual: f64,
    pub initial_value_part: Complex64,
    pub initial_velocity_part: Complex64,
    pub forced_part: Complex64,
}

/// Data of the Cauchy problem D^α u - Δu = F(x) φ_ω(t) in R³.
#[derive(Clone, Copy, Debug, Default)]
pub struct CauchyData<'a> {
    pub forcing: Option<&'a CompactSource>,
    pub u0: Option<&'a CompactSource>,
    pub u1: Option<&'a CompactSource>,
}

/// u(t,x)/φ_ω(t) along a schedule, with u = u₁ + u₂ + u₃, against the
/// limit ∫ G(x - ξ) F(ξ) dξ.
pub fn limiting_amplitude_r3(
    data: CauchyData<'_>,
    params: &FracParams,
    x: &[f64; 3],
    t_schedule: &[f64],
) -> Result<Vec<RatioPoint>> {
    let zero = Complex64::new(0.0, 0.0);
    let target = match data.forcing {
        Some(f) => green_convolution(params, f, x)?.value,
        None => zero,
    };
    t_schedule
        .iter()
        .map(|&t| {
            let p1 = match data.u0 {
                Some(s) => initial_value_part(s, params, x, t)?.value,
                None => zero,
            };
            let p2 = match data.u1 {
                Some(s) => initial_velocity_part(s, params, x, t)?.value,
                None => zero,
            };
            let p3 = match data.forcing {
                Some(s) => forced_solution_r3(s, params, x, t)?.value,
                None => zero,
            };
            let phi = mittag_leffler_on_ray(params, t)?.value;
            let ratio = (p1 + p2 + p3) / phi;
            Ok(RatioPoint {
                t,
                ratio,
                target,
                residual: (ratio - target).norm(),
                initial_value_part: p1,
                initial_velocity_part: p2,
                forced_part: p3,
            })
        })
        .collect()
}
