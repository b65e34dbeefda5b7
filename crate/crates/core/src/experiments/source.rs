use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, Integrand, QuadOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// A · exp(-|x - c|² / (2 scale²))
    GaussianBump,
    /// A on the ball |x - c| ≤ scale
    BallIndicator,
    /// A sum of Gaussian bumps, one per center
    MultiBump,
}

/// Bounded, integrable, effectively compactly supported data in R³.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSource {
    pub kind: SourceKind,
    pub centers: Vec<[f64; 3]>,
    pub scale: f64,
    pub amplitude: f64,
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl CompactSource {
    pub fn gaussian(center: [f64; 3], scale: f64, amplitude: f64) -> Self {
        CompactSource {
            kind: SourceKind::GaussianBump,
            centers: vec![center],
            scale,
            amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("CompactSource", &[self.scale, self.amplitude])?;
        for c in &self.centers {
            ensure_finite("CompactSource", c)?;
        }
        if self.scale <= 0.0 {
            return Err(Error::invalid("scale", format!("{} must be positive", self.scale)));
        }
        match (self.kind, self.centers.len()) {
            (_, 0) => Err(Error::invalid("centers", "at least one center is required")),
            (SourceKind::GaussianBump | SourceKind::BallIndicator, n) if n > 1 => Err(Error::invalid(
                "centers",
                "single-center kinds take exactly one center (use multi_bump)",
            )),
            _ => Ok(()),
        }
    }

    /// Radius beyond which the source is below 1e-14 relative to its peak.
    pub fn support_radius(&self) -> f64 {
        match self.kind {
            SourceKind::BallIndicator => self.scale,
            _ => 8.0 * self.scale,
        }
    }

    pub fn value(&self, x: &[f64; 3]) -> f64 {
        self.centers
            .iter()
            .map(|c| {
                let d = dist(x, c);
                match self.kind {
                    SourceKind::BallIndicator => {
                        if d <= self.scale {
                            self.amplitude
                        } else {
                            0.0
                        }
                    }
                    _ => self.amplitude * (-0.5 * d * d / (self.scale * self.scale)).exp(),
                }
            })
            .sum()
    }

    /// ∫_{R³} F.
    pub fn integral(&self) -> f64 {
        let one = match self.kind {
            SourceKind::BallIndicator => 4.0 / 3.0 * PI * self.scale.powi(3),
            _ => (2.0 * PI).powf(1.5) * self.scale.powi(3),
        };
        self.amplitude * one * self.centers.len() as f64
    }

    /// Surface integral of F over the sphere |ξ - x| = ρ.
    pub fn shell_mass(&self, x: &[f64; 3], rho: f64) -> f64 {
        let s = self.scale;
        self.centers
            .iter()
            .map(|c| {
                let d = dist(x, c);
                match self.kind {
                    SourceKind::BallIndicator => {
                        if rho + d <= s {
                            4.0 * PI * rho * rho
                        } else if rho >= d + s || rho <= d - s {
                            0.0
                        } else {
                            PI * rho * (s * s - (rho - d).powi(2)) / d
                        }
                    }
                    _ => {
                        let g = |u: f64| (-0.5 * u * u / (s * s)).exp();
                        if d < 1e-8 * s {
                            4.0 * PI * rho * rho * g(rho)
                        } else {
                            2.0 * PI * rho * s * s / d * (g(d - rho) - g(d + rho))
                        }
                    }
                }
            })
            .sum::<f64>()
            * self.amplitude
    }

    /// Radii where the shell mass around x changes character.
    pub fn shell_breaks(&self, x: &[f64; 3]) -> Vec<f64> {
        let sup = self.support_radius();
        let mut b = vec![0.0];
        for c in &self.centers {
            let d = dist(x, c);
            for r in [d - sup, d - self.scale, d, d + self.scale, d + sup] {
                if r > 0.0 {
                    b.push(r);
                }
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// ∫ K(|x - ξ|) F(ξ) dξ = ∫₀^∞ K(ρ) shell_mass(x, ρ) dρ.
    pub fn radial_convolution<T, K>(&self, x: &[f64; 3], kernel: K, extra_breaks: &[f64], rel_tol: f64) -> (T, f64, bool)
    where
        T: Integrand,
        K: FnMut(f64) -> T,
    {
        let mut breaks = self.shell_breaks(x);
        let end = *breaks.last().unwrap();
        breaks.extend(extra_breaks.iter().copied().filter(|&b| b > 0.0 && b < end));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut kernel = kernel;
        let est = integrate_with_breaks(
            |rho: f64| {
                let m = self.shell_mass(x, rho);
                if m == 0.0 {
                    T::default()
                } else {
                    kernel(rho) * m
                }
            },
            &breaks,
            QuadOptions::new(0.0, rel_tol).with_max_intervals(4000),
        );
        (est.value, est.abs_err + 1e-13 * est.abs_value, est.converged)
    }
}
