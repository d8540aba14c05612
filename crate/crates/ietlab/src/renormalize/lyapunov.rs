//! Monte Carlo estimates of the top Lyapunov exponents of the Zorich cocycle.
//!
//! Lengths are sampled uniformly from the simplex and induced in double
//! precision; the heights cocycle `h ↦ B h` of each Zorich block acts on a
//! 2-frame taken inside `H(π)`, re-orthonormalized every
//! [`REORTHO_EVERY`] blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::surface_data;
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const REORTHO_EVERY: usize = 16;

/// Seeded source of Zorich blocks for a typical length vector.
#[derive(Clone, Debug)]
pub struct LebesgueSampler {
    pub seed: u64,
}

impl LebesgueSampler {
    fn draw_lengths(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..d).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }

    /// Step kinds of a double-precision induction run from a sampled length
    /// vector. Once rounding dominates the sequence is merely a seeded path.
    pub fn kinds(&self, perm: &Permutation, n: usize) -> Vec<crate::perm::StepKind> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut lengths = Self::draw_lengths(&mut rng, perm.d());
        let mut p = perm.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (top, _, _) = float_step(&mut p, &mut lengths);
            out.push(if top { crate::perm::StepKind::Top } else { crate::perm::StepKind::Bottom });
            let s: f64 = lengths.iter().sum();
            lengths.iter_mut().for_each(|x| *x /= s);
        }
        out
    }
}

/// Per-sample exponents and their spread.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Exponents per Zorich step.
    pub theta1: f64,
    pub theta2: Option<f64>,
    pub stderr1: f64,
    pub stderr2: Option<f64>,
    /// Exponents divided by the growth rate of `log |B_γ|` along the same run,
    /// so that the top one is close to 1.
    pub theta1_per_log_norm: f64,
    pub theta2_per_log_norm: Option<f64>,
    pub n_steps: usize,
    pub n_samples: usize,
}

/// One double-precision Rauzy step on `(monodromy-free) labels`; returns the
/// winner and loser.
fn float_step(perm: &mut Permutation, lengths: &mut [f64]) -> (bool, usize, usize) {
    let (t, b) = (perm.top_last(), perm.bottom_last());
    let top = lengths[t] > lengths[b];
    let (w, l) = if top { (t, b) } else { (b, t) };
    lengths[w] -= lengths[l];
    *perm = perm.rauzy_move(if top { crate::perm::StepKind::Top } else { crate::perm::StepKind::Bottom });
    (top, w, l)
}

struct SampleRun {
    sums: [f64; 2],
    log_norm: f64,
}

fn run_sample(perm: &Permutation, frame_dims: usize, seed: u64, n_steps: usize) -> Result<SampleRun> {
    let d = perm.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lengths = LebesgueSampler::draw_lengths(&mut rng, d);
    let mut perm = perm.clone();
    let omega = surface_data(&perm)?.omega;
    // frame vectors: random combinations of the columns of Ω, which span H(π)
    let mut frame: Vec<Vec<f64>> = (0..frame_dims)
        .map(|_| {
            let c: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
            (0..d).map(|i| (0..d).map(|j| omega[i][j] as f64 * c[j]).sum()).collect()
        })
        .collect();
    let mut sums = [0.0; 2];
    let mut log_norm = 0.0;
    orthonormalize(&mut frame, &mut sums)?;
    sums = [0.0; 2];
    for z in 0..n_steps {
        let (first, _, _) = peek_kind(&perm, &lengths);
        loop {
            let (top, w, l) = float_step(&mut perm, &mut lengths);
            debug_assert_eq!(top, first);
            // heights: h ← B h with B = I + E_{loser,winner}
            for v in frame.iter_mut() {
                v[l] += v[w];
            }
            let (next, _, _) = peek_kind(&perm, &lengths);
            if next != first {
                break;
            }
        }
        let total: f64 = lengths.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateFrame);
        }
        log_norm -= total.ln();
        for x in lengths.iter_mut() {
            *x /= total;
        }
        if (z + 1) % REORTHO_EVERY == 0 || z + 1 == n_steps {
            orthonormalize(&mut frame, &mut sums)?;
        }
    }
    Ok(SampleRun { sums, log_norm })
}

fn peek_kind(perm: &Permutation, lengths: &[f64]) -> (bool, usize, usize) {
    let (t, b) = (perm.top_last(), perm.bottom_last());
    (lengths[t] > lengths[b], t, b)
}

/// Gram–Schmidt; adds the log of each new diagonal entry to `sums`.
fn orthonormalize(frame: &mut [Vec<f64>], sums: &mut [f64; 2]) -> Result<()> {
    for i in 0..frame.len() {
        for j in 0..i {
            let dot: f64 = frame[i].iter().zip(&frame[j]).map(|(a, b)| a * b).sum();
            let fj = frame[j].clone();
            for (x, y) in frame[i].iter_mut().zip(&fj) {
                *x -= dot * y;
            }
        }
        let n: f64 = frame[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 1e-300) {
            return Err(Error::DegenerateFrame);
        }
        for x in frame[i].iter_mut() {
            *x /= n;
        }
        sums[i] += n.ln();
    }
    Ok(())
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Top exponents of the Zorich cocycle on `H(π)`; the second slot is empty
/// when the genus is one.
pub fn lyapunov_estimate(perm: &Permutation, sampler: &LebesgueSampler, n_steps: usize, n_samples: usize) -> Result<LyapunovEstimate> {
    if n_steps == 0 || n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one step and one sample".into()));
    }
    let genus = surface_data(perm)?.genus;
    let dims = genus.min(2);
    let runs: Vec<SampleRun> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| run_sample(perm, dims, sampler.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i), n_steps))
        .collect::<Result<_>>()?;
    let per = |k: usize| -> Vec<f64> { runs.iter().map(|r| r.sums[k] / n_steps as f64).collect() };
    let per_norm = |k: usize| -> Vec<f64> { runs.iter().map(|r| r.sums[k] / r.log_norm).collect() };
    let (theta1, stderr1) = mean_stderr(&per(0));
    let (t1n, _) = mean_stderr(&per_norm(0));
    let (theta2, stderr2, t2n) = if dims == 2 {
        let (t, s) = mean_stderr(&per(1));
        (Some(t), Some(s), Some(mean_stderr(&per_norm(1)).0))
    } else {
        (None, None, None)
    };
    Ok(LyapunovEstimate {
        theta1,
        theta2,
        stderr1,
        stderr2,
        theta1_per_log_norm: t1n,
        theta2_per_log_norm: t2n,
        n_steps,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_statistics() {
        let p: Permutation = "A B / B A".parse().unwrap();
        let e = lyapunov_estimate(&p, &LebesgueSampler { seed: 1 }, 1, 1).unwrap();
        assert!(e.stderr1.is_infinite());
        assert!(e.theta2.is_none());
    }

    #[test]
    fn gauss_map_exponent() {
        // For d = 2 a Zorich step is one continued-fraction digit, so the
        // exponent per step is Lévy's constant π²/(12 ln 2).
        let p: Permutation = "A B / B A".parse().unwrap();
        let e = lyapunov_estimate(&p, &LebesgueSampler { seed: 3 }, 20_000, 8).unwrap();
        let levy = std::f64::consts::PI.powi(2) / (12.0 * 2f64.ln());
        assert!((e.theta1 - levy).abs() < 0.05 * levy, "{e:?}");
        assert!((e.theta1_per_log_norm - 1.0).abs() < 0.05, "{e:?}");
    }
}
