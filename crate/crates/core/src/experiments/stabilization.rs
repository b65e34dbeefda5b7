use super::ball::tail_statistics;
use super::forced::initial_value_part;
use super::source::CompactSource;
use crate::error::{ensure_finite, Error, Result};
use crate::fit::loglog_fit;
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{wright_decay_rate, wright_phi, FracParams};
use crate::spectral::{evolve_field, LatticeField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Bounded initial data u⁰ for the homogeneous problem with u¹ = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Constant { c: f64 },
    /// c + a compactly supported bump
    BumpPlusConstant { c: f64, bump: CompactSource },
    /// amplitude · sin(ξ·x) with ξ = 2π m / period
    PlaneWave { amplitude: f64, modes: [i64; 3], period: f64 },
    /// amplitude · sign(sin(ln(1 + |x|²))): radial shells whose ball averages
    /// oscillate without a limit
    LogPeriodicBlocks { amplitude: f64 },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialData::Constant { c } => ensure_finite("c", &[*c]),
            InitialData::BumpPlusConstant { c, bump } => {
                ensure_finite("c", &[*c])?;
                bump.validate()
            }
            InitialData::PlaneWave { amplitude, modes, period } => {
                ensure_finite("plane_wave", &[*amplitude, *period])?;
                if *period <= 0.0 {
                    return Err(Error::invalid("period", format!("{period} must be positive")));
                }
                if modes.iter().all(|&m| m == 0) {
                    return Err(Error::invalid("modes", "a plane wave needs a nonzero wave vector"));
                }
                Ok(())
            }
            InitialData::LogPeriodicBlocks { amplitude } => ensure_finite("amplitude", &[*amplitude]),
        }
    }

    pub fn value(&self, x: &[f64; 3]) -> f64 {
        match self {
            InitialData::Constant { c } => *c,
            InitialData::BumpPlusConstant { c, bump } => c + bump.value(x),
            InitialData::PlaneWave { amplitude, modes, period } => {
                let phase: f64 = modes.iter().zip(x).map(|(&m, &xa)| 2.0 * PI * m as f64 / period * xa).sum();
                amplitude * phase.sin()
            }
            InitialData::LogPeriodicBlocks { amplitude } => {
                let r2 = x.iter().map(|a| a * a).sum::<f64>();
                amplitude * log_periodic_sign(r2.sqrt())
            }
        }
    }

    /// The value u_α(t, x) is expected to approach, when one exists.
    pub fn expected_limit(&self) -> Option<f64> {
        match self {
            InitialData::Constant { c } | InitialData::BumpPlusConstant { c, .. } => Some(*c),
            InitialData::PlaneWave { .. } => Some(0.0),
            InitialData::LogPeriodicBlocks { .. } => None,
        }
    }

    /// Radii (about the origin) where radial data jumps, up to `r_max`.
    pub fn radial_breaks(&self, r_max: f64) -> Vec<f64> {
        match self {
            InitialData::LogPeriodicBlocks { .. } => log_periodic_jumps(r_max),
            _ => Vec::new(),
        }
    }
}

fn log_periodic_sign(r: f64) -> f64 {
    let s = (r * r).ln_1p().sin();
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// r_k = √(e^{kπ} - 1), where ln(1 + r²) crosses a multiple of π.
fn log_periodic_jumps(r_max: f64) -> Vec<f64> {
    (1..)
        .map(|k| ((k as f64 * PI).exp() - 1.0).sqrt())
        .take_while(|&r| r < r_max)
        .collect()
}

/// How u_α(t, x) is computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum StabilizationRoute {
    /// Closed forms on R³: the Z₁ convolution for bumps, the radial formula
    /// at the symmetry center for radial data, E_α(-|ξ|²t^α) for plane waves.
    Kernel,
    /// Spectral evolution on a periodic lattice. For non-periodic data the
    /// box is checked against the kernel reach over the schedule.
    Torus { points_per_axis: usize, spacing: f64, wrap_tol: f64 },
}

/// Box length needed so that Z₁ mass wrapping around the torus stays below
/// `wrap_tol` up to `t_max`: L ≥ reach + t_max^{α/2} (ln(1/tol)/σ₀)^{(2-α)/2},
/// where `reach` bounds the distance from the probes to the data support.
pub fn required_torus_length(alpha: f64, t_max: f64, reach: f64, wrap_tol: f64) -> f64 {
    let nu = 0.5 * alpha;
    let sigma = wright_decay_rate(nu);
    reach + t_max.powf(nu) * ((1.0 / wrap_tol).ln() / sigma).powf(1.0 - nu)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSeries {
    pub x: [f64; 3],
    pub values: Vec<f64>,
    /// Mean of the last third of the values.
    pub limit_estimate: f64,
    /// Largest deviation of a tail value from the tail mean.
    pub tail_spread: f64,
    /// log-log slope of |u - limit| over the tail, when a limit is known.
    pub deviation_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationReport {
    pub times: Vec<f64>,
    pub expected_limit: Option<f64>,
    pub probes: Vec<ProbeSeries>,
}

/// u_α(t, x) for the homogeneous problem with u(0) = u⁰, ∂_t u(0) = 0 at every
/// probe and schedule time.
pub fn stabilization_run(
    data: &InitialData,
    params: &FracParams,
    probes: &[[f64; 3]],
    t_schedule: &[f64],
    route: &StabilizationRoute,
) -> Result<StabilizationReport> {
    data.validate()?;
    if probes.is_empty() {
        return Err(Error::invalid("probes", "at least one probe point is required"));
    }
    if t_schedule.is_empty() || t_schedule.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("t_schedule", "times must be positive and finite"));
    }
    for x in probes {
        ensure_finite("probes", x)?;
    }
    let series: Vec<Vec<f64>> = match route {
        StabilizationRoute::Kernel => kernel_route(data, params, probes, t_schedule)?,
        StabilizationRoute::Torus {
            points_per_axis,
            spacing,
            wrap_tol,
        } => torus_route(data, params, probes, t_schedule, *points_per_axis, *spacing, *wrap_tol)?,
    };
    let expected_limit = data.expected_limit();
    let probes = probes
        .iter()
        .zip(series)
        .map(|(x, values)| {
            let (limit_estimate, tail_spread) = tail_statistics(&values);
            let deviation_slope = expected_limit.and_then(|c| {
                let k = values.len() / 2;
                let dev: Vec<f64> = values[k..].iter().map(|v| (v - c).abs()).collect();
                loglog_fit(&t_schedule[k..], &dev).map(|f| f.slope)
            });
            ProbeSeries {
                x: *x,
                values,
                limit_estimate,
                tail_spread,
                deviation_slope,
            }
        })
        .collect();
    Ok(StabilizationReport {
        times: t_schedule.to_vec(),
        expected_limit,
        probes,
    })
}

fn kernel_route(data: &InitialData, params: &FracParams, probes: &[[f64; 3]], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let alpha = params.alpha;
    probes
        .iter()
        .map(|x| {
            times
                .iter()
                .map(|&t| match data {
                    InitialData::Constant { c } => Ok(*c),
                    InitialData::BumpPlusConstant { c, bump } => Ok(c + initial_value_part(bump, params, x, t)?.re()),
                    InitialData::PlaneWave { modes, period, .. } => {
                        let lam: f64 = modes.iter().map(|&m| (2.0 * PI * m as f64 / period).powi(2)).sum();
                        let e = crate::specfun::mittag_leffler(alpha, 1.0, Complex64::new(-lam * t.powf(alpha), 0.0))?;
                        Ok(e.value.re * data.value(x))
                    }
                    InitialData::LogPeriodicBlocks { .. } => {
                        if x.iter().any(|&a| a != 0.0) {
                            return Err(Error::invalid(
                                "probes",
                                "radial data is evaluated at its symmetry center (the origin) only",
                            ));
                        }
                        radial_center_value(|r| data.value(&[r, 0.0, 0.0]), &data.radial_breaks(f64::INFINITY), alpha, t)
                    }
                })
                .collect()
        })
        .collect()
}

/// u_α(t, 0) = ∫₀^∞ z Φ(-α/2, 1-α; -z) u⁰(t^{α/2} z) dz for data radial about
/// the origin. `jumps` lists radii where u⁰ is discontinuous.
pub fn radial_center_value<F: Fn(f64) -> f64>(u0: F, jumps: &[f64], alpha: f64, t: f64) -> Result<f64> {
    ensure_finite("radial_center_value", &[alpha, t])?;
    if t <= 0.0 {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    let nu = 0.5 * alpha;
    // beyond z_max the weight is below e^{-40} relative to its scale
    let z_max = (40.0 / wright_decay_rate(nu)).powf(1.0 - nu);
    let scale = t.powf(nu);
    let mut breaks: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0, z_max]
        .into_iter()
        .chain(jumps.iter().map(|r| r / scale))
        .filter(|&z| z <= z_max)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut failure: Option<Error> = None;
    let est = integrate_with_breaks(
        |z: f64| match wright_phi(-nu, 1.0 - alpha, Complex64::new(-z, 0.0)) {
            Ok(p) => z * p.value.re * u0(scale * z),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &breaks,
        QuadOptions::new(1e-13, 1e-11).with_max_intervals(4000),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !est.converged {
        return Err(Error::Convergence {
            what: "radial stabilization integral",
            tol: 1e-11,
            best_err: est.abs_err,
        });
    }
    Ok(est.value)
}

fn torus_route(
    data: &InitialData,
    params: &FracParams,
    probes: &[[f64; 3]],
    times: &[f64],
    n: usize,
    spacing: f64,
    wrap_tol: f64,
) -> Result<Vec<Vec<f64>>> {
    ensure_finite("torus", &[spacing, wrap_tol])?;
    if !(wrap_tol > 0.0 && wrap_tol < 1.0) {
        return Err(Error::invalid("wrap_tol", format!("{wrap_tol} must lie in (0, 1)")));
    }
    let length = n as f64 * spacing;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    match data {
        InitialData::BumpPlusConstant { bump, .. } => {
            let reach = probes
                .iter()
                .flat_map(|x| bump.centers.iter().map(move |c| (0..3).map(|a| (x[a] - c[a]).abs()).fold(0.0, f64::max)))
                .fold(0.0, f64::max)
                + bump.support_radius();
            let required = required_torus_length(params.alpha, t_max, reach, wrap_tol);
            if length < required {
                return Err(Error::DomainTooSmall {
                    length,
                    t_max,
                    required,
                });
            }
        }
        InitialData::PlaneWave { period, .. } => {
            let cells = length / period;
            if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
                return Err(Error::invalid(
                    "torus",
                    format!("box length {length} is not a multiple of the plane-wave period {period}"),
                ));
            }
        }
        InitialData::LogPeriodicBlocks { .. } => {
            return Err(Error::invalid("route", "radial block data has no periodic representation"));
        }
        InitialData::Constant { .. } => {}
    }
    let shape = [n, n, n];
    let u0 = LatticeField::from_fn(&shape, spacing, |x| Complex64::new(data.value(&[x[0], x[1], x[2]]), 0.0))?;
    let mut out = vec![Vec::with_capacity(times.len()); probes.len()];
    for &t in times {
        let u = evolve_field(&u0, None, None, params, t)?;
        for (series, x) in out.iter_mut().zip(probes) {
            series.push(u.interpolate(x)?.re);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> FracParams {
        FracParams::new(1.5, 1.0).unwrap()
    }

    #[test]
    fn constant_data_is_exact() {
        let d = InitialData::Constant { c: 3.25 };
        let route = StabilizationRoute::Torus {
            points_per_axis: 4,
            spacing: 1.0,
            wrap_tol: 1e-10,
        };
        let rep = stabilization_run(&d, &params(), &[[0.0; 3], [0.7, 0.1, 0.0]], &[1.0, 10.0, 100.0], &route).unwrap();
        for p in &rep.probes {
            assert!(p.values.iter().all(|v| (v - 3.25).abs() < 1e-14));
        }
    }

    #[test]
    fn plane_wave_routes_agree() {
        let d = InitialData::PlaneWave {
            amplitude: 1.0,
            modes: [1, 0, 1],
            period: 4.0,
        };
        let torus = StabilizationRoute::Torus {
            points_per_axis: 8,
            spacing: 0.5,
            wrap_tol: 1e-10,
        };
        let probes = [[0.3, 0.0, 0.4]];
        let a = stabilization_run(&d, &params(), &probes, &[0.5, 2.0, 8.0], &torus).unwrap();
        let b = stabilization_run(&d, &params(), &probes, &[0.5, 2.0, 8.0], &StabilizationRoute::Kernel).unwrap();
        for (x, y) in a.probes[0].values.iter().zip(&b.probes[0].values) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn radial_weight_has_unit_mass() {
        for alpha in [1.25, 1.5, 1.75] {
            let v = radial_center_value(|_| 1.0, &[], alpha, 3.0).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{alpha}: {v}");
        }
    }

    #[test]
    fn small_torus_is_rejected() {
        let d = InitialData::BumpPlusConstant {
            c: 1.0,
            bump: CompactSource::gaussian([0.0; 3], 0.5, 1.0),
        };
        let route = StabilizationRoute::Torus {
            points_per_axis: 16,
            spacing: 0.5,
            wrap_tol: 1e-10,
        };
        let err = stabilization_run(&d, &params(), &[[0.0; 3]], &[1.0, 50.0], &route).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { .. }));
    }

    #[test]
    fn log_periodic_jumps_are_sign_changes() {
        for r in log_periodic_jumps(1e6) {
            assert_ne!(log_periodic_sign(r * (1.0 - 1e-9)), log_periodic_sign(r * (1.0 + 1e-9)));
        }
    }
}
