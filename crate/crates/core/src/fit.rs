//! Least-squares line fits, mainly for log-log decay exponents.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

/// Ordinary least squares y ≈ intercept + slope·x. `None` for fewer than two
/// distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = ((0..n)
        .map(|i| (ys[i] - intercept - slope * xs[i]).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Some(LineFit {
        slope,
        intercept,
        rms,
    })
}

/// Fit of log|y| against log t; points with y = 0 are skipped.
pub fn loglog_fit(ts: &[f64], ys: &[f64]) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(ys)
        .filter(|(t, y)| **t > 0.0 && y.abs() > 0.0)
        .map(|(t, y)| (t.ln(), y.abs().ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let ts: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-1.5)).collect();
        let f = loglog_fit(&ts, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.rms < 1e-12);
    }

    #[test]
    fn degenerate_input() {
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
