use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How ball averages are computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BallAverageMethod {
    /// Uniform samples in each ball from a seeded ChaCha stream; radius j
    /// uses stream j so the result does not depend on scheduling.
    MonteCarlo { samples: usize, seed: u64 },
    /// Data radial about x₀: (3/R³) ∫₀^R r² f(r) dr, with f(r) read along
    /// the first axis. `breaks` lists radii where f jumps.
    Radial { breaks: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallAverageReport {
    pub x0: [f64; 3],
    pub radii: Vec<f64>,
    pub averages: Vec<f64>,
    /// One standard error per radius (zero for deterministic quadrature).
    pub std_errors: Vec<f64>,
    pub limit_estimate: f64,
    /// max |average - limit_estimate| over the tail
    pub tail_spread: f64,
    pub converged: bool,
}

/// Number of trailing entries used for tail statistics.
pub(crate) fn tail_len(n: usize) -> usize {
    (n.div_ceil(3)).max(2).min(n)
}

/// Mean of the last third of `values` and the largest deviation from it.
pub(crate) fn tail_statistics(values: &[f64]) -> (f64, f64) {
    let tail = &values[values.len() - tail_len(values.len())..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let spread = tail.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    (mean, spread)
}

/// Averages of u⁰ over balls K_R(x₀), R in `radii`, with the limit estimated
/// from the tail. `converged` holds when every tail average lies within
/// `tol` of the estimate.
pub fn ball_average<F>(u0: F, x0: [f64; 3], radii: &[f64], method: &BallAverageMethod, tol: f64) -> Result<BallAverageReport>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    ensure_finite("x0", &x0)?;
    ensure_finite("radii", radii)?;
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "at least two radii are needed for a tail estimate"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii", "radii must be positive and strictly ascending"));
    }
    let (averages, std_errors): (Vec<f64>, Vec<f64>) = match method {
        BallAverageMethod::MonteCarlo { samples, seed } => {
            if *samples < 2 {
                return Err(Error::invalid("samples", "need at least two samples per ball"));
            }
            radii
                .par_iter()
                .enumerate()
                .map(|(j, &r)| monte_carlo(&u0, &x0, r, *samples, *seed, j as u64))
                .unzip()
        }
        BallAverageMethod::Radial { breaks } => {
            let radial = |r: f64| u0(&[x0[0] + r, x0[1], x0[2]]);
            radii
                .iter()
                .map(|&big_r| {
                    let mut b: Vec<f64> = std::iter::once(0.0)
                        .chain(breaks.iter().copied().filter(|&x| x > 0.0 && x < big_r))
                        .chain(std::iter::once(big_r))
                        .collect();
                    b.dedup();
                    let est = integrate_with_breaks(
                        |r: f64| r * r * radial(r),
                        &b,
                        QuadOptions::new(0.0, 1e-12).with_max_intervals(100_000),
                    );
                    (3.0 * est.value / big_r.powi(3), 3.0 * est.abs_err / big_r.powi(3))
                })
                .unzip()
        }
    };
    if averages.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite("ball_average"));
    }
    let (limit_estimate, tail_spread) = tail_statistics(&averages);
    Ok(BallAverageReport {
        x0,
        radii: radii.to_vec(),
        averages,
        std_errors,
        limit_estimate,
        tail_spread,
        converged: tail_spread <= tol,
    })
}

fn monte_carlo<F: Fn(&[f64; 3]) -> f64>(u0: &F, x0: &[f64; 3], r: f64, n: usize, seed: u64, stream: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut taken = 0usize;
    while taken < n {
        let p: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if p.iter().map(|c| c * c).sum::<f64>() > 1.0 {
            continue;
        }
        let v = u0(&[x0[0] + r * p[0], x0[1] + r * p[1], x0[2] + r * p[2]]);
        sum += v;
        sum_sq += v * v;
        taken += 1;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}
