//! Macdonald function K_ν(z) for real ν ≥ 0 and Re z > 0, from
//! K_ν(z) = ∫₀^∞ exp(-z cosh u) cosh(νu) du.

use super::{ComplexSample, Regime, DEFAULT_TOL};
use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use num_complex::Complex64;

pub fn macdonald_k(nu: f64, z: Complex64) -> Result<ComplexSample> {
    macdonald_k_with(nu, z, DEFAULT_TOL)
}

pub fn macdonald_k_with(nu: f64, z: Complex64, tol: f64) -> Result<ComplexSample> {
    ensure_finite("macdonald_k", &[nu, z.re, z.im])?;
    if nu < 0.0 {
        return Err(Error::invalid("nu", format!("{nu} must be non-negative")));
    }
    if z.re <= 0.0 {
        return Err(Error::invalid(
            "z",
            format!("Re z = {} must be positive (principal branch)", z.re),
        ));
    }
    let small = (2.0 / z.norm()).ln().max(0.0);
    let budget = 52.0 + nu * small;
    let mut upper: f64 = 0.5;
    while z.re * upper.cosh() - nu * upper < budget {
        upper += 0.25;
    }
    let mut breaks = vec![0.0];
    let knee = (1.0 / z.re).acosh();
    if knee.is_finite() && knee > 0.0 && knee < upper {
        breaks.push(knee);
    }
    breaks.extend([0.5 * (breaks[breaks.len() - 1] + upper), upper]);
    let est = integrate_with_breaks(
        |u: f64| (-z * u.cosh()).exp() * (nu * u).cosh(),
        &breaks,
        QuadOptions::new(0.0, 0.01 * tol).with_max_intervals(1000),
    );
    let abs_err = est.abs_err + 8.0 * f64::EPSILON * est.abs_value;
    if !est.converged {
        return Err(Error::Convergence {
            what: "macdonald_k quadrature",
            tol,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(est.value, abs_err, Regime::Quadrature))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_closed_form() {
        for z in [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.05, 0.0),
            Complex64::new(3.0, 2.0),
            Complex64::new(0.3, 1.4),
        ] {
            let k = macdonald_k(0.5, z).unwrap();
            let want = (PI / (2.0 * z)).sqrt() * (-z).exp();
            assert!((k.value - want).norm() < 1e-12 * want.norm().max(1.0), "{z}");
        }
        let k = macdonald_k(0.5, Complex64::new(1.0, 0.0)).unwrap();
        assert!((k.value.re - 0.461_068_504_447_894_4).abs() < 1e-13);
    }

    #[test]
    fn order_three_halves_closed_form() {
        let z = Complex64::new(2.0, 0.5);
        let want = (PI / (2.0 * z)).sqrt() * (-z).exp() * (1.0 + 1.0 / z);
        let k = macdonald_k(1.5, z).unwrap();
        assert!((k.value - want).norm() < 1e-12);
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(macdonald_k(0.5, Complex64::new(0.0, 1.0)).is_err());
        assert!(macdonald_k(0.5, Complex64::new(-1.0, 0.0)).is_err());
    }
}
