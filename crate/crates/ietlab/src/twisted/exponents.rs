//! Exponent bookkeeping for the quantitative weak-mixing criterion and the
//! logarithmic rate for rotation-class permutations.

use serde::Serialize;

use crate::error::{Error, Result};

/// `γ = min{ε/16, −ε log(1 − c₁′ε²)/(8θ₁)}`.
pub fn qvc_gamma(eps: f64, c1p: f64, theta1: f64) -> Result<f64> {
    if !(eps > 0.0 && c1p > 0.0 && theta1 > 0.0 && c1p * eps * eps < 1.0) {
        return Err(Error::InvalidArgument("need ε, c₁′, θ₁ > 0 and c₁′ε² < 1".into()));
    }
    Ok((eps / 16.0).min(-eps * (-c1p * eps * eps).ln_1p() / (8.0 * theta1)))
}

/// `c₁′ = c₁ C_ζ⁻²`.
pub fn c1_prime(c1: f64, c_zeta: f64) -> f64 {
    c1 / (c_zeta * c_zeta)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentBundle {
    pub eps: f64,
    pub c1p: f64,
    pub theta1: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `γ/(α+β)`.
    pub eta: f64,
    /// `αγ/(α+β)`.
    pub alpha_prime: f64,
}

impl ExponentBundle {
    /// `α′ < min(α, γ)`, which holds exactly when `γ < α + β`.
    pub fn is_consistent(&self) -> bool {
        self.alpha_prime < self.alpha.min(self.gamma)
    }
}

pub fn exponent_bundle(eps: f64, c1p: f64, theta1: f64, alpha: f64, beta: f64) -> Result<ExponentBundle> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidArgument("α and β must be positive".into()));
    }
    let gamma = qvc_gamma(eps, c1p, theta1)?;
    Ok(ExponentBundle {
        eps,
        c1p,
        theta1,
        gamma,
        alpha,
        beta,
        eta: gamma / (alpha + beta),
        alpha_prime: alpha * gamma / (alpha + beta),
    })
}

/// Solution of `u² g(u)/M = log N`, `g(u) = log u − log log u − (1+δ) log log log u`.
#[derive(Clone, Debug, Serialize)]
pub struct RateSolution {
    pub u: f64,
    /// `1/u`.
    pub eps: f64,
    /// `1 − M ε²`, the power of `N` in the twisted-sum bound.
    pub exponent: f64,
    /// `N^{−M/u²} = e^{−g(u)}`.
    pub decay: f64,
    /// `(log N)^{−1/6}`.
    pub log_bound: f64,
    /// `|F(u)/log N − 1|`.
    pub residual: f64,
}

impl RateSolution {
    pub fn sandwich_holds(&self) -> bool {
        self.decay < self.log_bound
    }
}

fn g(u: f64, delta: f64) -> f64 {
    let (l1, l2) = (u.ln(), u.ln().ln());
    l1 - l2 - (1.0 + delta) * l2.ln()
}

/// Value and location of the minimum of `u² g(u)` on `(e, ∞)`.
fn argmin(delta: f64) -> (f64, f64) {
    let f = |u: f64| u * u * g(u, delta);
    let (mut a, mut b) = (std::f64::consts::E + 1e-9, 64.0);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u))
}

/// Larger root of `u² g(u)/M = log N`, on the branch where the function
/// increases. Fails when `log N` is below the function's minimum.
pub fn rotation_class_rate(m: f64, delta: f64, n: f64) -> Result<RateSolution> {
    if !(m > 0.0 && delta > 0.0 && n > 1.0 && n.is_finite()) {
        return Err(Error::InvalidArgument("need M > 0, δ > 0, N > 1".into()));
    }
    let target = n.ln();
    let (umin, fmin) = argmin(delta);
    if fmin / m >= target {
        return Err(Error::TooSmallN);
    }
    let f = |u: f64| u * u * g(u, delta) / m;
    let (mut lo, mut hi) = (umin, umin * 2.0);
    while f(hi) < target {
        hi *= 2.0;
    }
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = if (f(lo) - target).abs() < (f(hi) - target).abs() { lo } else { hi };
    let eps = 1.0 / u;
    Ok(RateSolution {
        u,
        eps,
        exponent: 1.0 - m * eps * eps,
        decay: (-g(u, delta)).exp(),
        log_bound: target.powf(-1.0 / 6.0),
        residual: (f(u) / target - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_example() {
        let g = qvc_gamma(0.1, 0.5, 1.0).unwrap();
        let expect = (0.1f64 / 16.0).min(-0.1 * 0.995f64.ln() / 8.0);
        assert!((g - expect).abs() < 1e-15);
        assert!((g - 6.2657e-5).abs() < 1e-8);
    }

    #[test]
    fn gamma_vanishes_with_eps() {
        let mut prev = f64::INFINITY;
        for k in 1..10 {
            let g = qvc_gamma(10f64.powi(-k), 0.5, 1.0).unwrap();
            assert!(g < prev);
            prev = g;
        }
        assert!(prev < 1e-20);
    }

    #[test]
    fn bundle_relation() {
        let b = exponent_bundle(0.1, 0.5, 1.0, 0.3, 0.2).unwrap();
        assert!(b.is_consistent());
        assert!((b.eta * (b.alpha + b.beta) - b.gamma).abs() < 1e-18);
    }

    #[test]
    fn rate_is_monotone_and_tight() {
        let mut prev = 0.0;
        for n in [1e6, 1e9, 1e12, 1e15] {
            let s = rotation_class_rate(5.0, 0.1, n).unwrap();
            assert!(s.u > prev);
            assert!(s.residual < 1e-12);
            prev = s.u;
        }
    }

    #[test]
    fn small_n_is_rejected() {
        assert_eq!(rotation_class_rate(0.01, 0.1, 1e9).unwrap_err(), Error::TooSmallN);
        assert_eq!(rotation_class_rate(5.0, 0.1, 10.0).unwrap_err(), Error::TooSmallN);
    }
}
