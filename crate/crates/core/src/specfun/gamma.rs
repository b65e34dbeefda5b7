//! Real Gamma function helpers continued to negative arguments by reflection.

use statrs::function::gamma as sg;
use std::f64::consts::PI;

/// sin(πx) with exact zeros at the integers.
pub fn sinpi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    // Reduce to r in [-1, 1).
    let mut r = x % 2.0;
    if r >= 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Γ(x) for real x; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x > 0.0 && x.fract() == 0.0 && x <= 171.0 {
        return factorial_f64(x as usize - 1);
    }
    if x >= 0.5 {
        sg::gamma(x)
    } else {
        PI / (sinpi(x) * sg::gamma(1.0 - x))
    }
}

/// 1/Γ(x), which is entire: zero at x = 0, -1, -2, ...
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.0 && x.fract() == 0.0 && x <= 171.0 {
        return 1.0 / factorial_f64(x as usize - 1);
    }
    if x >= 0.5 {
        if x > 171.0 {
            return (-sg::ln_gamma(x)).exp();
        }
        1.0 / sg::gamma(x)
    } else {
        let (ln_abs, sign) = ln_rgamma(x);
        sign * ln_abs.exp()
    }
}

/// (ln|1/Γ(x)|, sign(1/Γ(x))). At the poles of Γ the sign is 0 and the log is -∞.
pub fn ln_rgamma(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x >= 0.5 {
        (-sg::ln_gamma(x), 1.0)
    } else {
        // 1/Γ(x) = Γ(1-x) sin(πx) / π
        let s = sinpi(x);
        (sg::ln_gamma(1.0 - x) + s.abs().ln() - PI.ln(), s.signum())
    }
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// ln(n!) for integer n ≥ 0.
pub fn ln_factorial(n: usize) -> f64 {
    sg::ln_gamma(n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(1.0 / 3.0) - 2.678_938_534_707_747_6).abs() < 2e-15);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-1.5) - 4.0 * PI.sqrt() / 3.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        for n in 0..20 {
            assert_eq!(rgamma(-(n as f64)), 0.0);
        }
        assert!((rgamma(-2.5) * gamma(-2.5) - 1.0).abs() < 1e-14);
        let (l, s) = ln_rgamma(-200.25);
        assert!(l.is_finite() && s != 0.0);
    }

    #[test]
    fn sinpi_exact_and_symmetric() {
        assert_eq!(sinpi(3.0), 0.0);
        assert!((sinpi(0.5) - 1.0).abs() < 1e-16);
        assert!((sinpi(-1.5) - 1.0).abs() < 1e-16);
        assert!((sinpi(2.25) - (PI / 4.0).sin()).abs() < 1e-15);
    }
}
