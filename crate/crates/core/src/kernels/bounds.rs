//! Pointwise envelopes of the kernels and fitting of their constants.
//!
//! Every envelope has the shape `C · P(t, r) · μ_n(z) · exp(-σ z^{2/(2-α)})`
//! with z = r t^{-α/2}, where P is a power prefactor. The constants are
//! existential, so they are fitted on a calibration grid and then checked
//! on a separate grid.

use serde::{Deserialize, Serialize};

/// Which kernel estimate an envelope describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// |Z₁| ≤ C t^{-α} r^{2-n} ρ_σ
    Z1,
    /// |∂Z₁/∂r| ≤ C t^{-α} r^{1-n} ρ_σ
    Z1Derivative,
    /// |Z₂| ≤ C t^{1-α} r^{2-n} ρ_σ
    Z2,
    /// |Γ_{α,n}| ≤ C t^{α-αn/2-1} μ_n(z) ρ_σ
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub sigma: f64,
}

/// The auxiliary factors ρ_σ and μ_n of the envelopes.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeInputs {
    pub alpha: f64,
    pub n: usize,
    pub sigma: f64,
}

impl EnvelopeInputs {
    pub fn new(alpha: f64, n: usize, sigma: f64) -> Self {
        EnvelopeInputs { alpha, n, sigma }
    }

    /// exp{-σ (t^{-α/2} |x - ξ|)^{2/(2-α)}}
    pub fn rho_sigma(&self, t: f64, dist: f64) -> f64 {
        let z = dist * t.powf(-0.5 * self.alpha);
        (-self.sigma * z.powf(2.0 / (2.0 - self.alpha))).exp()
    }

    pub fn mu_n(&self, z: f64) -> f64 {
        match self.n {
            3 => 1.0,
            4 => 1.0 + z.ln().abs(),
            n => z.powi(4 - n as i32),
        }
    }
}

/// One tabulated kernel magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub t: f64,
    pub r: f64,
    pub value: f64,
}

/// The envelope without its constant C.
pub fn envelope(kind: BoundKind, alpha: f64, n: usize, sigma: f64, t: f64, r: f64) -> f64 {
    let env = EnvelopeInputs::new(alpha, n, sigma);
    let nf = n as f64;
    let z = r * t.powf(-0.5 * alpha);
    let pre = match kind {
        BoundKind::Z1 => t.powf(-alpha) * r.powf(2.0 - nf),
        BoundKind::Z1Derivative => t.powf(-alpha) * r.powf(1.0 - nf),
        BoundKind::Z2 => t.powf(1.0 - alpha) * r.powf(2.0 - nf),
        BoundKind::Y => t.powf(alpha - alpha * nf / 2.0 - 1.0) * env.mu_n(z),
    };
    pre * env.rho_sigma(t, r)
}

/// Fits σ from the decay of log(|K| / prefactor) against z^{2/(2-α)} on the
/// samples with z ≥ 1, keeps `sigma_fraction` of it, then takes C as
/// `safety` times the largest ratio |K| / envelope.
pub fn fit_bound(
    kind: BoundKind,
    alpha: f64,
    n: usize,
    samples: &[BoundSample],
    sigma_fraction: f64,
    safety: f64,
) -> Option<BoundParams> {
    let q = 2.0 / (2.0 - alpha);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in samples {
        let z = s.r * s.t.powf(-0.5 * alpha);
        let pre = envelope(kind, alpha, n, 0.0, s.t, s.r);
        if z >= 1.0 && s.value > 0.0 {
            xs.push(z.powf(q));
            ys.push((s.value / pre).ln());
        }
    }
    let slope = crate::fit::linear_fit(&xs, &ys)?.slope;
    if !(slope < 0.0) {
        return None;
    }
    let sigma = -slope * sigma_fraction;
    let worst = samples
        .iter()
        .map(|s| s.value / envelope(kind, alpha, n, sigma, s.t, s.r))
        .fold(0.0, f64::max);
    if !(worst > 0.0 && worst.is_finite()) {
        return None;
    }
    Some(BoundParams {
        c: safety * worst,
        sigma,
    })
}

/// Samples exceeding `C · envelope`.
pub fn bound_violations(
    kind: BoundKind,
    alpha: f64,
    n: usize,
    params: &BoundParams,
    samples: &[BoundSample],
) -> Vec<BoundSample> {
    samples
        .iter()
        .filter(|s| s.value > params.c * envelope(kind, alpha, n, params.sigma, s.t, s.r))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_factors() {
        let e = EnvelopeInputs::new(1.5, 3, 0.4);
        assert_eq!(e.mu_n(0.3), 1.0);
        assert!((EnvelopeInputs::new(1.5, 4, 0.4).mu_n(0.5) - (1.0 + 2f64.ln())).abs() < 1e-15);
        assert!((EnvelopeInputs::new(1.5, 6, 0.4).mu_n(0.5) - 4.0).abs() < 1e-15);
        let rho = e.rho_sigma(2.0, 3.0);
        assert!(rho > 0.0 && rho <= 1.0);
        assert_eq!(e.rho_sigma(1.0, 0.0), 1.0);
    }

    #[test]
    fn fit_recovers_synthetic_rate() {
        let alpha = 1.5;
        let mut samples = Vec::new();
        for t in [0.5, 1.0, 2.0] {
            for r in [0.5, 1.0, 2.0, 3.0, 4.0] {
                let value = 2.0 * envelope(BoundKind::Z1, alpha, 3, 0.3, t, r);
                samples.push(BoundSample { t, r, value });
            }
        }
        let p = fit_bound(BoundKind::Z1, alpha, 3, &samples, 1.0, 1.0).unwrap();
        assert!((p.sigma - 0.3).abs() < 1e-10);
        assert!((p.c - 2.0).abs() < 1e-8);
        assert!(bound_violations(BoundKind::Z1, alpha, 3, &BoundParams { c: 1.9, sigma: 0.3 }, &samples).len() == samples.len());
    }
}
