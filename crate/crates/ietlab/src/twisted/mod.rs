//! Exponential sums over substitution words and the twisted cocycle.
//!
//! Phases `ω·|w|_s` are reduced modulo one in exact rational arithmetic
//! (floating inputs are dyadic rationals), so long words do not accumulate
//! rounding error before the final `exp`.

mod exponents;
mod spectral;

pub use exponents::{c1_prime, exponent_bundle, qvc_gamma, rotation_class_rate, ExponentBundle, RateSolution};
pub use spectral::{empirical_spectral_mass, fejer_kernel, fejer_mass_bound, SpectralMass};

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::CocycleMatrix;
use crate::perm::{Permutation, StepKind};
use crate::renormalize::RauzyPath;
use crate::scalar::{dist_to_int, f64_to_rational, rational_to_f64};
use crate::substitution::{population_vector, Substitution, Word};

/// Dense complex matrix, row-major.
pub type CMatrix = Vec<Vec<Complex64>>;

pub fn cmatrix_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn cmatrix_identity(d: usize) -> CMatrix {
    (0..d).map(|i| (0..d).map(|j| if i == j { Complex64::one() } else { Complex64::zero() }).collect()).collect()
}

/// Ratio of two big integers as a float, robust to huge magnitudes.
fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = den.bits().saturating_sub(60);
    let (n, d) = (num >> shift, den >> shift);
    n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
}

/// Per-letter phase increments `ω s_α mod 1` over a common denominator.
struct Phases {
    denom: BigInt,
    incr: Vec<BigInt>,
}

impl Phases {
    fn new(omega: &BigRational, weights: &[BigRational]) -> Self {
        let scaled: Vec<BigRational> = weights.iter().map(|w| omega * w).collect();
        let denom = scaled.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let incr = scaled
            .iter()
            .map(|x| (x.numer() * (&denom / x.denom())).mod_floor(&denom))
            .collect();
        Phases { denom, incr }
    }

    /// `Φ_α(v)` for every letter at once.
    fn phi_all(&self, v: &[usize], d: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); d];
        let mut acc = BigInt::zero();
        for &a in v {
            let t = ratio_f64(&acc, &self.denom);
            out[a] += Complex64::from_polar(1.0, -2.0 * PI * t);
            acc += &self.incr[a];
            if acc >= self.denom {
                acc -= &self.denom;
            }
        }
        out
    }
}

fn exact_weights(s: &[f64]) -> Result<Vec<BigRational>> {
    s.iter()
        .map(|&x| {
            if x.is_finite() && x > 0.0 {
                Ok(f64_to_rational(x))
            } else {
                Err(Error::InvalidArgument("weights must be positive and finite".into()))
            }
        })
        .collect()
}

fn exact_omega(omega: f64) -> Result<BigRational> {
    if omega.is_finite() {
        Ok(f64_to_rational(omega))
    } else {
        Err(Error::InvalidArgument("frequency must be finite".into()))
    }
}

/// `Φ_α^s(v, ω) = Σ_j [v_j = α] exp(−2πiω|v_1⋯v_{j−1}|_s)`.
pub fn phi(v: &[usize], alpha: usize, s: &[f64], omega: f64) -> Result<Complex64> {
    Ok(phi_all(v, s, omega)?[alpha])
}

/// `Φ_α` for every letter `α`.
pub fn phi_all(v: &[usize], s: &[f64], omega: f64) -> Result<Vec<Complex64>> {
    let p = Phases::new(&exact_omega(omega)?, &exact_weights(s)?);
    Ok(p.phi_all(v, s.len()))
}

/// `Φ` with exact rational weights and frequency.
pub fn phi_exact(v: &[usize], s: &[BigRational], omega: &BigRational) -> Vec<Complex64> {
    Phases::new(omega, s).phi_all(v, s.len())
}

/// `S_ξᵗ s` in exact arithmetic.
fn pulled_weights(xi: &CocycleMatrix, s: &[BigRational]) -> Vec<BigRational> {
    let d = xi.d();
    (0..d)
        .map(|b| (0..d).map(|a| BigRational::from_integer(xi.get(a, b).clone()) * &s[a]).sum())
        .collect()
}

/// `M^s_{ξ,ζ}(ω)(β, γ) = Φ^{S_ξᵗ s}_γ(ζ(β), ω)`, taking `S_ξ` as a matrix.
pub fn twisted_matrix_from(xi: &CocycleMatrix, zeta: &Substitution, s: &[BigRational], omega: &BigRational) -> CMatrix {
    let p = Phases::new(omega, &pulled_weights(xi, s));
    zeta.images().iter().map(|w| p.phi_all(w, zeta.d())).collect()
}

/// `M^s_{ξ,ζ}(ω)`.
pub fn twisted_matrix(xi: &Substitution, zeta: &Substitution, s: &[f64], omega: f64) -> Result<CMatrix> {
    Ok(twisted_matrix_from(&xi.matrix(), zeta, &exact_weights(s)?, &exact_omega(omega)?))
}

/// `Π_n = M_n ⋯ M_1` with `M_k = M_{ζ^{[k−1]}, ζ_k}`.
pub fn pi_n(seq: &[Substitution], s: &[f64], omega: f64, n: usize) -> Result<CMatrix> {
    if n > seq.len() {
        return Err(Error::InvalidArgument(format!("sequence has {} substitutions, need {n}", seq.len())));
    }
    let d = seq.first().map_or(s.len(), Substitution::d);
    let (s, omega) = (exact_weights(s)?, exact_omega(omega)?);
    let mut prefix = CocycleMatrix::identity(d);
    let mut pi = cmatrix_identity(d);
    for z in &seq[..n] {
        let m = twisted_matrix_from(&prefix, z, &s, &omega);
        pi = cmatrix_mul(&m, &pi);
        prefix = prefix.mul(&z.matrix());
    }
    Ok(pi)
}

/// `col(A) = max_{i,j,k} A_ij / A_kj`; fails if a column mixes zero and
/// nonzero entries.
pub fn col(a: &CocycleMatrix) -> Result<BigRational> {
    let d = a.d();
    let mut best = BigRational::zero();
    for j in 0..d {
        let c = a.column(j);
        let (lo, hi) = (c.iter().min().unwrap(), c.iter().max().unwrap());
        if lo.is_negative() {
            return Err(Error::InvalidArgument("col needs a non-negative matrix".into()));
        }
        if hi.is_zero() {
            continue;
        }
        if lo.is_zero() {
            return Err(Error::InvalidArgument(format!("column {j} has a zero denominator")));
        }
        let r = BigRational::new(hi.clone(), lo.clone());
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// `c₁ = (2d · max Q · col(Qᵗ))⁻¹` for a strictly positive `Q`.
pub fn c1(q: &CocycleMatrix) -> Result<BigRational> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument("c1 needs a strictly positive matrix".into()));
    }
    let denom = BigRational::from_integer(BigInt::from(2 * q.d()) * q.max_entry()) * col(&q.transpose())?;
    Ok(denom.recip())
}

/// A sequence `ζ_j = ζ ∘ ξ_j ∘ ζ`.
#[derive(Clone, Debug)]
pub struct SadicSequence {
    pub zeta: Substitution,
    pub middles: Vec<Substitution>,
}

impl SadicSequence {
    pub fn new(zeta: Substitution, middles: Vec<Substitution>) -> Result<Self> {
        if middles.iter().any(|m| m.labels() != zeta.labels()) {
            return Err(Error::StructureViolation("alphabets differ".into()));
        }
        Ok(SadicSequence { zeta, middles })
    }

    /// Builds the sequence from Rauzy loops at `start`, each of which must
    /// begin and end with the loop `q` (the two copies may not overlap).
    pub fn from_path_blocks(start: &Permutation, q: &[StepKind], blocks: &[Vec<StepKind>]) -> Result<Self> {
        let qpath = RauzyPath::from_kinds(start, q);
        if q.is_empty() || qpath.end()? != *start {
            return Err(Error::StructureViolation("q is not a loop".into()));
        }
        let mut middles = vec![];
        for (i, b) in blocks.iter().enumerate() {
            let ok = b.len() >= 2 * q.len() && b.starts_with(q) && b.ends_with(q);
            if !ok {
                return Err(Error::StructureViolation(format!("block {i} does not begin and end with q")));
            }
            let mid = RauzyPath::from_kinds(start, &b[q.len()..b.len() - q.len()]);
            if mid.end()? != *start {
                return Err(Error::StructureViolation(format!("block {i} is not a loop")));
            }
            middles.push(Substitution::from_path(&mid));
        }
        SadicSequence::new(Substitution::from_path(&qpath), middles)
    }

    /// `ζ_j` for each block.
    pub fn substitutions(&self) -> Vec<Substitution> {
        self.middles.iter().map(|m| self.zeta.compose(m).compose(&self.zeta)).collect()
    }

    /// `S^{[n]}` for `n = 0..=N`.
    pub fn prefix_matrices(&self, n: usize) -> Result<Vec<CocycleMatrix>> {
        if n > self.middles.len() {
            return Err(Error::InvalidArgument(format!("sequence has {} blocks, need {n}", self.middles.len())));
        }
        let mut out = vec![CocycleMatrix::identity(self.zeta.d())];
        for z in self.substitutions().iter().take(n) {
            let next = out.last().unwrap().mul(&z.matrix());
            out.push(next);
        }
        Ok(out)
    }
}

/// Contraction bound for `|Φ_α(ζ^{[N]}(β))|`.
#[derive(Clone, Debug, Serialize)]
pub struct MainBound {
    pub bound: f64,
    /// `‖S^{[N]}‖₁`, maximal column sum.
    pub norm: BigInt,
    pub c1: f64,
    /// `1 − c₁ max_v ‖ω|ζ^{[n]}(v)|_s‖²` for `n = 0..N`.
    pub factors: Vec<f64>,
}

/// `‖S^{[N]}‖₁ ∏_{n<N} (1 − c₁ max_{v∈GR(ζ)} ‖ω|ζ^{[n]}(v)|_s‖²)`.
pub fn mainbound(seq: &SadicSequence, s: &[f64], omega: f64, n: usize) -> Result<MainBound> {
    let q = seq.zeta.matrix();
    if !q.is_positive() {
        return Err(Error::StructureViolation("S_ζ is not positive".into()));
    }
    let gr = seq.zeta.good_return_words();
    if gr.is_empty() {
        return Err(Error::StructureViolation("ζ has no good return words".into()));
    }
    let c1v = rational_to_f64(&c1(&q)?);
    let (s, omega) = (exact_weights(s)?, exact_omega(omega)?);
    let d = seq.zeta.d();
    let pops: Vec<Vec<i64>> = gr.iter().map(|v| population_vector(v, d)).collect();
    let mats = seq.prefix_matrices(n)?;
    let mut factors = Vec::with_capacity(n);
    let mut bound = 1.0;
    for m in &mats[..n] {
        let weights = pulled_weights(m, &s);
        let worst = pops
            .iter()
            .map(|l| {
                let len: BigRational = l.iter().zip(&weights).map(|(&c, w)| BigRational::from_integer(c.into()) * w).sum();
                rational_to_f64(&dist_to_int(&(&omega * len))).powi(2)
            })
            .fold(0.0, f64::max);
        let f = 1.0 - c1v * worst;
        factors.push(f);
        bound *= f;
    }
    let norm = mats[n].norm1();
    Ok(MainBound { bound: bound * rational_to_f64(&BigRational::from_integer(norm.clone())), norm, c1: c1v, factors })
}

/// `max_{α,β} |Φ_α(ζ^{[N]}(β))|` through the cocycle.
pub fn max_phi(seq: &SadicSequence, s: &[f64], omega: f64, n: usize) -> Result<f64> {
    let subs = seq.substitutions();
    let pi = pi_n(&subs[..n.min(subs.len())], s, omega, n)?;
    Ok(pi.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `max_v ‖⟨ℓ(v), x⟩‖_{ℝ/ℤ}` compared with `‖x‖_{ℝ^d/ℤ^d}`: returns the
/// smallest `C` with `C⁻¹‖x‖ ≤ max_v ‖⟨ℓ(v), x⟩‖ ≤ C‖x‖` over sampled `x`
/// at several scales.
pub fn norm_equivalence(words: &[Word], d: usize, samples: usize, seed: u64) -> Result<f64> {
    if words.is_empty() {
        return Err(Error::InvalidArgument("no words".into()));
    }
    let pops: Vec<Vec<i64>> = words.iter().map(|v| population_vector(v, d)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let torus = |y: f64| (y - y.round()).abs();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..5 {
        let scale = 10f64.powi(-k);
        for _ in 0..samples {
            let x: Vec<f64> = (0..d).map(|_| (rng.gen::<f64>() - 0.5) * scale).collect();
            let nx = x.iter().map(|&y| torus(y)).fold(0.0, f64::max);
            if nx == 0.0 {
                continue;
            }
            let m = pops
                .iter()
                .map(|l| torus(l.iter().zip(&x).map(|(&c, &y)| c as f64 * y).sum()))
                .fold(0.0, f64::max);
            let r = m / nx;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if lo == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    Ok(hi.max(1.0 / lo))
}

/// Fraction of `i ≤ n` with `‖A_i · t h‖_{ℝ^d/ℤ^d} > ε`, `h = (1, …, 1)`,
/// where `A_i` is the matrix of the first `i` steps of `path`.
pub fn veech_frequency(path: &RauzyPath, t: &BigRational, eps: f64, n: usize) -> Result<f64> {
    if n == 0 || n > path.len() {
        return Err(Error::InvalidArgument(format!("need 1 ≤ n ≤ {}", path.len())));
    }
    path.vertices()?;
    let mut h = vec![BigInt::one(); path.start.d()];
    let mut count = 0usize;
    for s in &path.steps[..n] {
        h[s.loser] = &h[s.loser] + &h[s.winner];
        if torus_dist(&h, t) > eps {
            count += 1;
        }
    }
    Ok(count as f64 / n as f64)
}

/// Same fraction for an explicit list of matrices.
pub fn veech_frequency_matrices(mats: &[CocycleMatrix], t: &BigRational, eps: f64) -> Result<f64> {
    if mats.is_empty() {
        return Err(Error::InvalidArgument("no matrices".into()));
    }
    let count = mats
        .iter()
        .filter(|m| torus_dist(&m.col_action(&vec![BigInt::one(); m.d()]), t) > eps)
        .count();
    Ok(count as f64 / mats.len() as f64)
}

/// `max_i ‖t·h_i‖_{ℝ/ℤ}` exactly.
fn torus_dist(h: &[BigInt], t: &BigRational) -> f64 {
    h.iter()
        .map(|x| rational_to_f64(&dist_to_int(&(t * BigRational::from_integer(x.clone())))))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    fn fib() -> Substitution {
        Substitution::new(ab(), vec![vec![0, 1], vec![0]]).unwrap()
    }

    /// Term-by-term evaluation in floating point.
    fn phi_naive(v: &[usize], alpha: usize, s: &[f64], omega: f64) -> Complex64 {
        let mut acc = 0.0;
        let mut out = Complex64::zero();
        for &a in v {
            if a == alpha {
                out += Complex64::from_polar(1.0, -2.0 * PI * omega * acc);
            }
            acc += s[a];
        }
        out
    }

    #[test]
    fn phi_examples() {
        let s = [1.0, 1.0];
        assert!((phi(&[0, 1], 0, &s, 0.3).unwrap() - Complex64::one()).norm() < 1e-15);
        let e = Complex64::from_polar(1.0, -2.0 * PI * 0.3);
        assert!((phi(&[0, 1], 1, &s, 0.3).unwrap() - e).norm() < 1e-15);
        assert_eq!(phi(&[0, 1, 0], 0, &s, 0.0).unwrap(), Complex64::new(2.0, 0.0));
        let f3 = fib().compose(&fib()).compose(&fib());
        for b in 0..2 {
            for a in 0..2 {
                let got = phi(f3.image(b), a, &[1.0, 0.5], 0.3).unwrap();
                assert!((got - phi_naive(f3.image(b), a, &[1.0, 0.5], 0.3)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_frequency_gives_transpose() {
        let m = twisted_matrix(&fib(), &fib().compose(&fib()), &[1.0, 2.0], 0.0).unwrap();
        let st = fib().compose(&fib()).matrix().transpose();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m[i][j], Complex64::new(st.get(i, j).to_f64().unwrap(), 0.0));
            }
        }
    }

    #[test]
    fn pi_two_matches_direct() {
        let seq = vec![fib(), fib()];
        let p = pi_n(&seq, &[1.0, 1.0], 0.25, 2).unwrap();
        let z2 = fib().compose(&fib());
        for b in 0..2 {
            let direct = phi_all(z2.image(b), &[1.0, 1.0], 0.25).unwrap();
            for a in 0..2 {
                assert!((p[b][a] - direct[a]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn col_and_c1() {
        let q = CocycleMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(col(&q.transpose()).unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(c1(&q).unwrap(), BigRational::new(1.into(), 16.into()));
        assert!(col(&CocycleMatrix::from_rows(&[vec![1, 0], vec![0, 1]])).is_err());
        assert!(c1(&CocycleMatrix::identity(2)).is_err());
    }

    #[test]
    fn veech_integer_case() {
        let mats = vec![CocycleMatrix::from_rows(&[vec![2, 0], vec![0, 2]])];
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(veech_frequency_matrices(&mats, &half, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn structure_is_checked() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let q = StepKind::parse_word("tb").unwrap();
        let good = vec![StepKind::parse_word("tbtb").unwrap()];
        assert!(SadicSequence::from_path_blocks(&swap, &q, &good).is_ok());
        let bad = vec![StepKind::parse_word("tbbt").unwrap()];
        assert!(matches!(SadicSequence::from_path_blocks(&swap, &q, &bad), Err(Error::StructureViolation(_))));
    }
}
