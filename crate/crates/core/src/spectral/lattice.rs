use crate::error::{ensure_finite, Error, Result};
use crate::fracode::closed_form_forced;
use crate::specfun::{mittag_leffler, FracParams};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

/// Complex field on a periodic lattice in d ∈ {1, 2, 3} dimensions, stored
/// row-major together with its discrete Fourier coefficients.
///
/// Site `i` along an axis of size N sits at x = (i - N/2)·spacing, so the
/// origin is in the middle of the box. Coefficients are normalized so that
/// mode 0 is the lattice mean.
#[derive(Clone, Debug)]
pub struct LatticeField {
    shape: Vec<usize>,
    spacing: f64,
    values: Vec<Complex64>,
    modes: Vec<Complex64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldMetadata {
    pub shape: Vec<usize>,
    pub spacing: f64,
    pub t: f64,
}

fn check_shape(shape: &[usize], spacing: f64) -> Result<usize> {
    ensure_finite("LatticeField", &[spacing])?;
    if shape.is_empty() || shape.len() > 3 {
        return Err(Error::invalid("shape", format!("dimension {} is not 1, 2 or 3", shape.len())));
    }
    if shape.contains(&0) {
        return Err(Error::invalid("shape", "every axis needs at least one site"));
    }
    if spacing <= 0.0 {
        return Err(Error::invalid("spacing", format!("{spacing} must be positive")));
    }
    Ok(shape.iter().product())
}

/// In-place n-dimensional FFT over row-major data.
fn fft_nd(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    for (axis, &n) in shape.iter().enumerate() {
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft(n, direction);
        let stride: usize = shape[axis + 1..].iter().product();
        let lines: Vec<usize> = (0..total / n)
            .map(|l| (l / stride) * stride * n + l % stride)
            .collect();
        let transformed: Vec<Vec<Complex64>> = lines
            .par_iter()
            .map(|&start| {
                let mut buf: Vec<Complex64> = (0..n).map(|i| data[start + i * stride]).collect();
                fft.process(&mut buf);
                buf
            })
            .collect();
        for (start, buf) in lines.iter().zip(transformed) {
            for (i, v) in buf.into_iter().enumerate() {
                data[start + i * stride] = v;
            }
        }
    }
}

impl LatticeField {
    pub fn from_values(shape: &[usize], spacing: f64, values: Vec<Complex64>) -> Result<Self> {
        let total = check_shape(shape, spacing)?;
        if values.len() != total {
            return Err(Error::ShapeMismatch(format!("{} values for {total} sites", values.len())));
        }
        let mut modes = values.clone();
        fft_nd(&mut modes, shape, FftDirection::Forward);
        let inv = 1.0 / total as f64;
        modes.iter_mut().for_each(|m| *m *= inv);
        Ok(LatticeField {
            shape: shape.to_vec(),
            spacing,
            values,
            modes,
        })
    }

    pub fn from_modes(shape: &[usize], spacing: f64, modes: Vec<Complex64>) -> Result<Self> {
        let total = check_shape(shape, spacing)?;
        if modes.len() != total {
            return Err(Error::ShapeMismatch(format!("{} modes for {total} sites", modes.len())));
        }
        let mut values = modes.clone();
        fft_nd(&mut values, shape, FftDirection::Inverse);
        Ok(LatticeField {
            shape: shape.to_vec(),
            spacing,
            values,
            modes,
        })
    }

    /// Samples `f(x)` at every site.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64 + Sync>(shape: &[usize], spacing: f64, f: F) -> Result<Self> {
        let total = check_shape(shape, spacing)?;
        let probe = LatticeField {
            shape: shape.to_vec(),
            spacing,
            values: Vec::new(),
            modes: Vec::new(),
        };
        let values = (0..total)
            .into_par_iter()
            .map(|i| f(&probe.position(i)))
            .collect();
        LatticeField::from_values(shape, spacing, values)
    }

    pub fn zeros(shape: &[usize], spacing: f64) -> Result<Self> {
        let total = check_shape(shape, spacing)?;
        LatticeField::from_values(shape, spacing, vec![Complex64::new(0.0, 0.0); total])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// Box length per axis.
    pub fn lengths(&self) -> Vec<f64> {
        self.shape.iter().map(|&n| n as f64 * self.spacing).collect()
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.shape)
            .map(|(&i, &n)| (i as f64 - (n / 2) as f64) * self.spacing)
            .collect()
    }

    /// Flat index of the site nearest to `x` (periodic wrap).
    pub fn site_index(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.shape.len() {
            return Err(Error::ShapeMismatch(format!("point of dimension {} on a {}-d lattice", x.len(), self.shape.len())));
        }
        let mut flat = 0;
        for (a, &n) in self.shape.iter().enumerate() {
            let i = (x[a] / self.spacing).round() as i64 + (n / 2) as i64;
            flat = flat * n + i.rem_euclid(n as i64) as usize;
        }
        Ok(flat)
    }

    /// Value at the site nearest to `x`.
    pub fn value_at(&self, x: &[f64]) -> Result<Complex64> {
        Ok(self.values[self.site_index(x)?])
    }

    /// Trigonometric interpolation of the field at an arbitrary point; the
    /// Nyquist frequency on even axes contributes its cosine part.
    pub fn interpolate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.shape.len() {
            return Err(Error::ShapeMismatch(format!("point of dimension {} on a {}-d lattice", x.len(), self.shape.len())));
        }
        ensure_finite("interpolate", x)?;
        let lengths = self.lengths();
        let mut sum = Complex64::new(0.0, 0.0);
        for (flat, c) in self.modes.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mut factor = Complex64::new(1.0, 0.0);
            for (a, m) in self.mode_numbers(flat).into_iter().enumerate() {
                let n = self.shape[a];
                // site i sits at x = (i - N/2) h, so i = x/h + N/2
                let theta = 2.0 * PI * m as f64 * (x[a] / lengths[a] + (n / 2) as f64 / n as f64);
                factor *= if n.is_multiple_of(2) && 2 * m.unsigned_abs() as usize == n {
                    Complex64::new(theta.cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, theta)
                };
            }
            sum += c * factor;
        }
        Ok(sum)
    }

    /// Signed integer frequencies m of a flat mode index (FFT ordering).
    pub fn mode_numbers(&self, flat: usize) -> Vec<i64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.shape)
            .map(|(&i, &n)| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect()
    }

    /// |ξ|² of the continuum Laplacian at a lattice frequency, ξ_a = 2π m_a / L_a.
    pub fn symbol(&self, flat: usize) -> f64 {
        self.mode_numbers(flat)
            .iter()
            .zip(self.lengths())
            .map(|(&m, l)| (2.0 * PI * m as f64 / l).powi(2))
            .sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.modes[0]
    }

    /// Round-trip error of values → modes → values, relative to max |value|.
    pub fn round_trip_error(&self) -> f64 {
        let back = LatticeField::from_modes(&self.shape, self.spacing, self.modes.clone()).unwrap();
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        back.values
            .iter()
            .zip(&self.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn same_grid(&self, other: &LatticeField) -> bool {
        self.shape == other.shape && self.spacing == other.spacing
    }

    /// CSV with columns index, re, im.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{i},{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn metadata(&self, t: f64) -> FieldMetadata {
        FieldMetadata {
            shape: self.shape.clone(),
            spacing: self.spacing,
            t,
        }
    }
}

/// Treatment of the ξ = 0 mode during evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroMode {
    /// Evolve it like every other mode (torus problem).
    Keep,
    /// Remove it; used when the lattice emulates decaying data on R^n, where
    /// the torus mean is an artefact of periodization.
    Drop,
}

/// Per-mode symbols for one |ξ|².
#[derive(Clone, Copy)]
struct ModeSymbols {
    initial: Complex64,
    slope: Complex64,
    forced: Complex64,
}

fn mode_symbols(lam: f64, params: &FracParams, t: f64, need: [bool; 3]) -> Result<ModeSymbols> {
    let alpha = params.alpha;
    let z = Complex64::new(-lam * t.powf(alpha), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(ModeSymbols {
        initial: if need[0] { mittag_leffler(alpha, 1.0, z)?.value } else { zero },
        slope: if need[1] { z2_symbol(params, lam, t)? } else { zero },
        forced: if need[2] { closed_form_forced(lam, params, t)?.value } else { zero },
    })
}

/// Solution at time t of D^α u - Δu = F(x)·E_α(i^α ω^α t^α) on the torus
/// with u(0) = u⁰, ∂_t u(0) = u¹, mode by mode:
/// `û(t) = E_α(-|ξ|²t^α) û⁰ + t E_{α,2}(-|ξ|²t^α) û¹ + y_{|ξ|²}(t) F̂`.
pub fn evolve_field(
    u0: &LatticeField,
    u1: Option<&LatticeField>,
    forcing: Option<&LatticeField>,
    params: &FracParams,
    t: f64,
) -> Result<LatticeField> {
    evolve_field_with(u0, u1, forcing, params, t, ZeroMode::Keep)
}

pub fn evolve_field_with(
    u0: &LatticeField,
    u1: Option<&LatticeField>,
    forcing: Option<&LatticeField>,
    params: &FracParams,
    t: f64,
    zero_mode: ZeroMode,
) -> Result<LatticeField> {
    ensure_finite("evolve_field", &[t])?;
    if t < 0.0 {
        return Err(Error::invalid("t", format!("{t} must be non-negative")));
    }
    for other in [u1, forcing].into_iter().flatten() {
        if !u0.same_grid(other) {
            return Err(Error::ShapeMismatch(format!(
                "{:?}/{} vs {:?}/{}",
                u0.shape, u0.spacing, other.shape, other.spacing
            )));
        }
    }
    let need = [true, u1.is_some(), forcing.is_some()];

    // Symbols depend on |ξ|² only; evaluate each distinct value once.
    let keys: Vec<u64> = (0..u0.modes.len()).map(|i| u0.symbol(i).to_bits()).collect();
    let mut distinct: Vec<u64> = keys.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let table: HashMap<u64, ModeSymbols> = distinct
        .par_iter()
        .map(|&k| Ok((k, mode_symbols(f64::from_bits(k), params, t, need)?)))
        .collect::<Result<_>>()?;

    let modes: Vec<Complex64> = (0..u0.modes.len())
        .map(|i| {
            if i == 0 && zero_mode == ZeroMode::Drop {
                return Complex64::new(0.0, 0.0);
            }
            let s = table[&keys[i]];
            let mut m = s.initial * u0.modes[i];
            if let Some(v) = u1 {
                m += s.slope * v.modes[i];
            }
            if let Some(f) = forcing {
                m += s.forced * f.modes[i];
            }
            m
        })
        .collect();
    LatticeField::from_modes(&u0.shape, u0.spacing, modes)
}

/// Fourier symbol of Z₂: t·E_{α,2}(-λ t^α).
pub fn z2_symbol(params: &FracParams, lam: f64, t: f64) -> Result<Complex64> {
    ensure_finite("z2_symbol", &[lam, t])?;
    if lam < 0.0 || t < 0.0 {
        return Err(Error::invalid("lam", "λ and t must be non-negative"));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e = mittag_leffler(params.alpha, 2.0, Complex64::new(-lam * t.powf(params.alpha), 0.0))?;
    Ok(e.value * t)
}
