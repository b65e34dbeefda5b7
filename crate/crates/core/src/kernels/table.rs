use super::bounds::{bound_violations, BoundKind, BoundParams, BoundSample};
use super::gamma::gamma_kernel;
use super::z1::{z1_kernel, z2_closed_form};
use crate::error::{Error, Result};
use crate::specfun::FracParams;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Z1,
    Z2,
    Y,
}

impl KernelKind {
    fn label(self) -> &'static str {
        match self {
            KernelKind::Z1 => "Z1",
            KernelKind::Z2 => "Z2",
            KernelKind::Y => "Y",
        }
    }

    fn bound(self) -> BoundKind {
        match self {
            KernelKind::Z1 => BoundKind::Z1,
            KernelKind::Z2 => BoundKind::Z2,
            KernelKind::Y => BoundKind::Y,
        }
    }
}

/// Radial profile of a kernel at fixed t.
#[derive(Clone, Debug, Serialize)]
pub struct RadialKernel {
    pub kind: KernelKind,
    pub alpha: f64,
    pub dim: usize,
    pub t: f64,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    pub abs_err: Vec<f64>,
}

impl RadialKernel {
    /// Evaluates the kernel at every radius (in parallel; the result does not
    /// depend on scheduling).
    pub fn tabulate(kind: KernelKind, params: &FracParams, dim: usize, t: f64, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("radii", "must be positive and strictly increasing"));
        }
        let eval = |r: f64| match kind {
            KernelKind::Z1 => z1_kernel(params, dim, r, t),
            KernelKind::Y => gamma_kernel(params, dim, r, t),
            KernelKind::Z2 if dim == 3 => z2_closed_form(params.alpha, r, t),
            KernelKind::Z2 => Err(Error::invalid("dim", "Z2 is implemented for n = 3 only")),
        };
        let samples: Vec<_> = radii.par_iter().map(|&r| eval(r)).collect::<Result<_>>()?;
        let values = samples.iter().map(|s| s.value).collect();
        let abs_err = samples.iter().map(|s| s.abs_err).collect();
        Ok(RadialKernel {
            kind,
            alpha: params.alpha,
            dim,
            t,
            radii: radii.to_vec(),
            values,
            abs_err,
        })
    }

    pub fn bound_samples(&self) -> Vec<BoundSample> {
        self.radii
            .iter()
            .zip(&self.values)
            .map(|(&r, v)| BoundSample {
                t: self.t,
                r,
                value: v.norm(),
            })
            .collect()
    }

    /// Radii where the tabulated magnitude exceeds the fitted envelope.
    pub fn violations(&self, bound: &BoundParams) -> Vec<f64> {
        bound_violations(self.kind.bound(), self.alpha, self.dim, bound, &self.bound_samples())
            .into_iter()
            .map(|s| s.r)
            .collect()
    }

    /// CSV with columns kind, alpha, n, t, r, re, im, abs_err.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "kind,alpha,n,t,r,re,im,abs_err")?;
        for ((r, v), e) in self.radii.iter().zip(&self.values).zip(&self.abs_err) {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.kind.label(),
                self.alpha,
                self.dim,
                self.t,
                r,
                v.re,
                v.im,
                e
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        let k = RadialKernel::tabulate(KernelKind::Y, &p, 3, 1.0, &[0.5, 1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        k.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        let re: f64 = lines[2].split(',').nth(5).unwrap().parse().unwrap();
        assert_eq!(re, k.values[1].re);
    }

    #[test]
    fn rejects_unsorted_radii() {
        let p = FracParams::new(1.5, 1.0).unwrap();
        assert!(RadialKernel::tabulate(KernelKind::Y, &p, 3, 1.0, &[1.0, 0.5]).is_err());
        assert!(RadialKernel::tabulate(KernelKind::Z2, &p, 2, 1.0, &[1.0]).is_err());
        assert!(RadialKernel::tabulate(KernelKind::Z2, &p, 3, 1.0, &[1.0]).is_ok());
    }
}
