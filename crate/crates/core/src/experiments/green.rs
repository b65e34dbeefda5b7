use super::source::CompactSource;
use crate::error::{ensure_finite, Error, Result};
use crate::specfun::{macdonald_k, principal_power, ComplexSample, FracParams, Regime};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Outgoing Green function of Δ - i^α ω^α in R^n:
/// `G(z) = (2π)^{-n/2} |z|^{1-n/2} (iω)^{-α/2+αn/4} K_{n/2-1}((iω)^{α/2}|z|)`.
pub fn green_function(params: &FracParams, z_norm: f64, n: usize) -> Result<ComplexSample> {
    ensure_finite("green_function", &[z_norm])?;
    if z_norm <= 0.0 {
        return Err(Error::invalid("z_norm", format!("{z_norm} must be positive")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    let nf = n as f64;
    let alpha = params.alpha;
    let iw = Complex64::new(0.0, params.omega);
    let k = macdonald_k(0.5 * nf - 1.0, params.helmholtz_root * z_norm)?;
    let pre = principal_power(iw, -0.5 * alpha + 0.25 * alpha * nf)?
        * ((2.0 * PI).powf(-0.5 * nf) * z_norm.powf(1.0 - 0.5 * nf));
    Ok(ComplexSample::new(pre * k.value, pre.norm() * k.abs_err, k.regime))
}

/// e^{-(iω)^{α/2} r} / (4π r).
pub fn green_function_r3(params: &FracParams, r: f64) -> Complex64 {
    (-params.helmholtz_root * r).exp() / (4.0 * PI * r)
}

/// v(x) = ∫ G(x - ξ) F(ξ) dξ in R³, the limit profile of u(t,x)/φ_ω(t).
pub fn green_convolution(params: &FracParams, source: &CompactSource, x: &[f64; 3]) -> Result<ComplexSample> {
    source.validate()?;
    ensure_finite("green_convolution", x)?;
    let (value, abs_err, ok) =
        source.radial_convolution(x, |rho| green_function_r3(params, rho), &[], 1e-11);
    if !ok {
        return Err(Error::Convergence {
            what: "Green convolution",
            tol: 1e-11,
            best_err: abs_err,
        });
    }
    Ok(ComplexSample::new(value, abs_err, Regime::Quadrature))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_reduction() {
        for (alpha, omega) in [(1.5, 1.0), (1.25, 2.0), (1.75, 0.5)] {
            let p = FracParams::new(alpha, omega).unwrap();
            for r in [0.5, 1.0, 2.0] {
                let g = green_function(&p, r, 3).unwrap().value;
                let want = green_function_r3(&p, r);
                assert!((g - want).norm() < 1e-12 * want.norm().max(1.0), "{alpha} {r}: {g} vs {want}");
            }
        }
    }

    #[test]
    fn omega_enters_through_scaled_distance() {
        // G(r; ω) · 4π r = exp(-(iω)^{α/2} r): a function of ω^{α/2} r alone
        let a = FracParams::new(1.5, 1.0).unwrap();
        let b = FracParams::new(1.5, 16.0).unwrap();
        let scale = 16f64.powf(0.75);
        for r in [0.3, 1.0, 2.5] {
            let ga = green_function(&a, r, 3).unwrap().value * (4.0 * PI * r);
            let gb = green_function(&b, r / scale, 3).unwrap().value * (4.0 * PI * r / scale);
            assert!((ga - gb).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_origin() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        assert!(green_function(&p, 0.0, 3).is_err());
    }
}
