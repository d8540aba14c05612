//! Fejér-kernel bounds and empirical spectral masses.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::observable::Observable;
use crate::scalar::{f64_to_rational, Scalar};

/// `∫_{−R}^{R} (R − |ℓ|) e^{2πiℓξ} dℓ = (sin(πRξ)/(πξ))²`, equal to `R²` at 0.
pub fn fejer_kernel(r: f64, xi: f64) -> f64 {
    let x = PI * xi;
    if x.abs() < 1e-8 {
        // sin(Rx)/x = R(1 − (Rx)²/6 + …)
        let y = r * (1.0 - (r * x).powi(2) / 6.0);
        return y * y;
    }
    ((r * x).sin() / x).powi(2)
}

/// `σ_f([ω−r, ω+r]) ≤ π² 2^{−2α} C₁² r^{2(1−α)}` given twisted sums bounded
/// by `C₁ R^{1−α}` for `R ≥ R₀`; valid for `r ≤ 1/(2R₀)`.
pub fn fejer_mass_bound(c1: f64, alpha: f64, r0: f64, _omega: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    if !(r > 0.0 && r0 > 0.0 && r <= 1.0 / (2.0 * r0)) {
        return Err(Error::InvalidArgument("radius must satisfy 0 < r ≤ 1/(2 R0)".into()));
    }
    Ok(PI * PI * 2f64.powf(-2.0 * alpha) * c1 * c1 * r.powf(2.0 * (1.0 - alpha)))
}

/// Windowed spectral mass estimate around `ω`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralMass {
    pub omega: f64,
    pub r: f64,
    pub n: usize,
    pub seed: u64,
    pub base_points: usize,
    pub centers: Vec<f64>,
    /// `Σ_c N⁻² E|S_N(c)|²` over centers `c` spaced `1/N` covering the window.
    pub estimate: f64,
    /// `(π²/4) · estimate`: the Fejér kernel is at least `(4/π²) N²` on each
    /// window of width `1/N` around a center.
    pub certified_upper: f64,
}

/// `f(Tⁿx)` for `n < N` at `count` uniform base points.
pub fn orbit_samples(iet: &Iet, f: &Observable, n: usize, count: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..count).map(|_| rng.gen::<f64>()).collect();
    xs.par_iter()
        .map(|&x| {
            let orbit = iet.orbit(&Scalar::Exact(f64_to_rational(x)), n.saturating_sub(1))?;
            Ok(orbit
                .iter()
                .take(n)
                .map(|y| match y {
                    Scalar::Exact(q) => f.eval(q),
                    Scalar::Ball(b) => f.eval(&b.midpoint()),
                })
                .collect())
        })
        .collect()
}

/// `N⁻² E_x |Σ_{n<N} e^{−2πinω} f(Tⁿx)|²` for each `ω` in `freqs`.
pub fn window_masses(samples: &[Vec<Complex64>], freqs: &[f64]) -> Vec<f64> {
    let n = samples.first().map_or(0, Vec::len);
    if n == 0 {
        return vec![0.0; freqs.len()];
    }
    freqs
        .par_iter()
        .map(|&w| {
            let step = Complex64::from_polar(1.0, -2.0 * PI * w);
            let total: f64 = samples
                .iter()
                .map(|vals| {
                    let mut phase = Complex64::new(1.0, 0.0);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, v) in vals.iter().enumerate() {
                        if k % 64 == 0 {
                            phase = Complex64::from_polar(1.0, -2.0 * PI * (w * k as f64).fract());
                        }
                        acc += phase * v;
                        phase *= step;
                    }
                    acc.norm_sqr()
                })
                .sum();
            total / (samples.len() as f64 * (n * n) as f64)
        })
        .collect()
}

/// Monte Carlo estimate of `σ_f([ω−r, ω+r])` from twisted sums of length `N`.
pub fn empirical_spectral_mass(
    iet: &Iet,
    f: &Observable,
    omega: f64,
    r: f64,
    n: usize,
    base_points: usize,
    seed: u64,
) -> Result<SpectralMass> {
    if n == 0 || base_points == 0 || !(r >= 0.0) {
        return Err(Error::InvalidArgument("need N ≥ 1, at least one base point and r ≥ 0".into()));
    }
    let k = ((r * n as f64) - 0.5).ceil().max(0.0) as i64;
    let centers: Vec<f64> = (-k..=k).map(|j| omega + j as f64 / n as f64).collect();
    let samples = orbit_samples(iet, f, n, base_points, seed)?;
    let estimate: f64 = window_masses(&samples, &centers).iter().sum();
    Ok(SpectralMass {
        omega,
        r,
        n,
        seed,
        base_points,
        centers,
        estimate,
        certified_upper: PI * PI / 4.0 * estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limit_and_quadrature() {
        assert!((fejer_kernel(3.0, 0.0) - 9.0).abs() < 1e-12);
        assert!((fejer_kernel(3.0, 1e-10) - 9.0).abs() < 1e-9);
        // ∫_{−R}^{R} (R − |ℓ|) cos(2πℓξ) dℓ by composite Simpson
        let (r, xi) = (3.0, 0.2);
        let m = 20_000;
        let h = 2.0 * r / m as f64;
        let g = |l: f64| (r - l.abs()) * (2.0 * PI * l * xi).cos();
        let mut s = g(-r) + g(r);
        for i in 1..m {
            s += g(-r + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * h / 3.0 - fejer_kernel(r, xi)).abs() < 1e-9);
    }

    #[test]
    fn mass_bound_value() {
        let b = fejer_mass_bound(1.0, 0.5, 10.0, 0.0, 1e-2).unwrap();
        assert!((b - PI * PI * 0.5 * 1e-2).abs() < 1e-15);
        assert!(fejer_mass_bound(1.0, 0.5, 100.0, 0.0, 1e-2).is_err());
    }

    #[test]
    fn constant_function_mass() {
        let t = Iet::parse("A B C / C B A", "1/3 1/5 7/15").unwrap();
        let m = empirical_spectral_mass(&t, &Observable::constant(1.0), 0.0, 1e-4, 200, 4, 1).unwrap();
        assert!((m.estimate - 1.0).abs() < 1e-12);
        assert!(m.estimate <= m.certified_upper);
    }
}
