use crate::error::{ensure_finite, Error, Result};
use crate::fit::loglog_fit;
use crate::fracode::closed_form_forced;
use crate::specfun::{mittag_leffler_on_ray, FracParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A nonnegative selfadjoint operator with finitely many eigenvalues, and the
/// coordinates of the forcing profile f₀ in its eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpectralOperator {
    eigenvalues: Vec<f64>,
    weights: Vec<Complex64>,
}

impl FiniteSpectralOperator {
    pub fn new(eigenvalues: Vec<f64>, weights: Vec<Complex64>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} eigenvalues vs {} weights (need equal, non-zero lengths)",
                eigenvalues.len(),
                weights.len()
            )));
        }
        ensure_finite("FiniteSpectralOperator", &eigenvalues)?;
        if let Some(l) = eigenvalues.iter().find(|l| **l < 0.0) {
            return Err(Error::invalid("eigenvalues", format!("{l} is negative")));
        }
        for w in &weights {
            ensure_finite("FiniteSpectralOperator", &[w.re, w.im])?;
        }
        Ok(FiniteSpectralOperator {
            eigenvalues,
            weights,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FiniteSpectralOperator {
            eigenvalues: self.eigenvalues.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    /// ‖f₀‖ in ℓ².
    pub fn forcing_norm(&self) -> f64 {
        l2(&self.weights)
    }

    /// (A + i^α ω^α)^{-1} f₀ coordinate-wise.
    pub fn resolvent_target(&self, params: &FracParams) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w / (params.forcing_eig + l))
            .collect()
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Coefficients u_k(t) = y_{λ_k}(t) · w_k of the forced solution.
pub fn evolve_operator(op: &FiniteSpectralOperator, params: &FracParams, t: f64) -> Result<Vec<Complex64>> {
    op.eigenvalues
        .par_iter()
        .zip(&op.weights)
        .map(|(&l, w)| Ok(closed_form_forced(l, params, t)?.value * w))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    /// ‖u(t)/φ_ω(t) - (A + i^α ω^α)^{-1} f₀‖
    pub residual: f64,
    /// residual / ‖f₀‖
    pub normalized: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitingAmplitudeReport {
    pub target: Vec<Complex64>,
    pub points: Vec<ResidualPoint>,
    /// log-log slope of the residual over the second half of the schedule.
    pub tail_slope: Option<f64>,
    /// Residual strictly decreasing over the second half of the schedule.
    pub monotone_tail: bool,
}

/// Residual of u(t)/φ_ω(t) against the resolvent target along a t-schedule.
pub fn limiting_amplitude_operator(
    op: &FiniteSpectralOperator,
    params: &FracParams,
    t_schedule: &[f64],
) -> Result<LimitingAmplitudeReport> {
    if let Some(l) = op.eigenvalues.iter().find(|l| **l <= 0.0) {
        return Err(Error::invalid(
            "eigenvalues",
            format!("{l}: zero must not be an eigenvalue for the limit to exist"),
        ));
    }
    let target = op.resolvent_target(params);
    let norm = op.forcing_norm();
    let points = t_schedule
        .iter()
        .map(|&t| {
            let u = evolve_operator(op, params, t)?;
            let phi = mittag_leffler_on_ray(params, t)?.value;
            let diff: Vec<Complex64> = u.iter().zip(&target).map(|(u, g)| u / phi - g).collect();
            let residual = l2(&diff);
            Ok(ResidualPoint {
                t,
                residual,
                normalized: if norm > 0.0 { residual / norm } else { 0.0 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &points[points.len() / 2..];
    let ts: Vec<f64> = tail.iter().map(|p| p.t).collect();
    let rs: Vec<f64> = tail.iter().map(|p| p.residual).collect();
    let tail_slope = loglog_fit(&ts, &rs).map(|f| f.slope);
    let monotone_tail = rs.windows(2).all(|w| w[1] < w[0]);
    Ok(LimitingAmplitudeReport {
        target,
        points,
        tail_slope,
        monotone_tail,
    })
}

/// t_j = t0 · factor^j, j = 0..count.
pub fn geometric_schedule(t0: f64, factor: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| t0 * factor.powi(j as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> FracParams {
        FracParams::new(1.5, 1.0).unwrap()
    }

    #[test]
    fn single_mode_is_closed_form() {
        let p = params();
        let op = FiniteSpectralOperator::new(vec![2.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let u = evolve_operator(&op, &p, 3.0).unwrap();
        assert_eq!(u[0], closed_form_forced(2.0, &p, 3.0).unwrap().value);
        assert!(evolve_operator(&op, &p, 0.0).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn target_value() {
        let p = params();
        let op = FiniteSpectralOperator::new(vec![1.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let want = 1.0 / (1.0 + Complex64::from_polar(1.0, 0.75 * PI));
        assert!((op.resolvent_target(&p)[0] - want).norm() < 1e-15);
        let rep = limiting_amplitude_operator(&op, &p, &[200.0]).unwrap();
        assert!(rep.points[0].residual < 1e-2);
    }

    #[test]
    fn scaling_leaves_normalized_residual() {
        let p = params();
        let op = FiniteSpectralOperator::new(
            vec![1.0, 2.0, 3.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.2), Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        let sched = geometric_schedule(1.0, 2.0, 6);
        let a = limiting_amplitude_operator(&op, &p, &sched).unwrap();
        let b = limiting_amplitude_operator(&op.scaled(Complex64::new(2.0, 0.0)), &p, &sched).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!((x.normalized - y.normalized).abs() < 1e-13);
        }
    }

    #[test]
    fn validation() {
        assert!(FiniteSpectralOperator::new(vec![], vec![]).is_err());
        assert!(FiniteSpectralOperator::new(vec![1.0], vec![]).is_err());
        assert!(FiniteSpectralOperator::new(vec![-1.0], vec![Complex64::new(1.0, 0.0)]).is_err());
        let op = FiniteSpectralOperator::new(vec![0.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(limiting_amplitude_operator(&op, &params(), &[1.0]).is_err());
    }
}
