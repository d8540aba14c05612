//! Certified lower bounds on `Q_N` for rotation-class IETs.
//!
//! A small interval `J_N` near 0 returns close to itself at a large explicit
//! set of times `S`. A second interval `J_N″` of the same length is placed in
//! a gap of the union `H_N(J_N′)` of the rotation images that can reach the
//! base around time `N`, so bumps on the two intervals have vanishing
//! correlation at every `n ∈ S`, and each such `n` contributes
//! `(∫f∫g)²` to `Q_N`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::correlation::Correlator;
use super::rotation::{denjoy_koksma_check, RotationRepresentation};
use crate::error::{Error, Result};
use crate::lattice::{common_denominator, LatticeIet, Seg};
use crate::observable::Observable;
use crate::scalar::{frac, rational_to_f64};

/// Bits kept in the dyadic truncation of `s`.
const S_BITS: u32 = 40;

#[derive(Clone, Debug)]
pub struct LowerBoundConfig {
    pub n: u64,
    pub eps: f64,
    /// Overrides `c₀ = 1/(30A)`.
    pub c0: Option<f64>,
    /// Overrides the measured Denjoy–Koksma constant.
    pub dk_constant: Option<f64>,
    pub seed: u64,
    pub piece_budget: usize,
}

impl LowerBoundConfig {
    pub fn new(n: u64, eps: f64) -> Self {
        LowerBoundConfig { n, eps, c0: None, dk_constant: None, seed: 0, piece_budget: super::correlation::DEFAULT_PIECE_BUDGET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundCertificate {
    pub n: u64,
    pub eps: f64,
    #[serde(serialize_with = "super::ser_q")]
    pub a: BigRational,
    #[serde(serialize_with = "super::ser_q")]
    pub theta: BigRational,
    /// Denjoy–Koksma constant `C` used for `A = 2aC + 1`.
    pub dk_constant: f64,
    pub big_a: f64,
    pub c0: f64,
    #[serde(serialize_with = "super::ser_q")]
    pub s: BigRational,
    #[serde(serialize_with = "super::ser_qs")]
    pub j_n: Vec<BigRational>,
    #[serde(serialize_with = "super::ser_qs")]
    pub j_n_prime: Vec<BigRational>,
    #[serde(serialize_with = "super::ser_qs")]
    pub j_n_second: Vec<BigRational>,
    /// Range of rotation exponents covered by `H_N(J_N′)`.
    pub ell_range: (i64, i64),
    pub h_measure: f64,
    pub s_set: Vec<u64>,
    pub s_count: usize,
    /// Elements of `S` below `N`, the ones that enter `Q_N`.
    pub s_count_in_sum: usize,
    /// `aN|J_N|/4`.
    pub s_lower: f64,
    /// `J_N″` misses `T^m(J_N)` for every `m ∈ S`, checked on the lattice.
    pub disjoint: bool,
    pub f: String,
    pub g: String,
    pub f_lipschitz_norm: f64,
    pub g_lipschitz_norm: f64,
    /// `15/s`.
    pub lipschitz_cap: f64,
    pub f_l1: f64,
    pub g_l1: f64,
    pub q_n: f64,
    /// `Q_N / (‖f‖²_{L¹}‖g‖²_{L¹} #S)`.
    pub ratio: f64,
}

impl LowerBoundCertificate {
    /// Named checks of the certificate.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let s = rational_to_f64(&self.s);
        vec![
            ("count", self.s_count as f64 >= self.s_lower),
            ("disjoint", self.disjoint),
            ("lipschitz", self.f_lipschitz_norm <= self.lipschitz_cap && self.g_lipschitz_norm <= self.lipschitz_cap),
            ("l1_floor", (self.f_l1 * self.g_l1).powi(2) >= (s / 2.0).powi(4)),
            ("ratio", self.ratio >= 1.0),
        ]
    }

    pub fn holds(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }
}

fn floor_int(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Merged union of half-open intervals inside `[0, a)`.
fn union(mut v: Vec<(BigRational, BigRational)>) -> Vec<(BigRational, BigRational)> {
    v.sort();
    let mut out: Vec<(BigRational, BigRational)> = vec![];
    for (lo, hi) in v {
        if let Some(last) = out.last_mut() {
            if lo <= last.1 {
                if hi > last.1 {
                    last.1 = hi;
                }
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

pub fn lower_bound_construct(rep: &RotationRepresentation, cfg: &LowerBoundConfig) -> Result<LowerBoundCertificate> {
    let n = cfg.n;
    let nf = n as f64;
    if n < 3 || nf.ln().ln() <= 1.0 {
        return Err(Error::TooSmallN);
    }
    if rep.degenerate {
        return Err(Error::InvalidArgument("the base must be shorter than the whole interval".into()));
    }
    let a = rep.a.clone();
    let af = rational_to_f64(&a);
    let log_term = nf.ln() * nf.ln().ln().powf(1.0 + cfg.eps);

    let dk_constant = match cfg.dk_constant {
        Some(c) => c,
        None => {
            let (breaks, values) = rep.roof_on_circle();
            let mut k_grid = vec![];
            let mut k = 16usize;
            while k as u64 <= n {
                k_grid.push(k);
                k *= 2;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let xs: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
            denjoy_koksma_check(rational_to_f64(&rep.theta), &breaks, &values, &k_grid, cfg.eps, &xs)?.c_eps
        }
    };
    let big_a = 2.0 * af * dk_constant + 1.0;
    let c0 = cfg.c0.unwrap_or(1.0 / (30.0 * big_a));
    let s_target = c0 * af / log_term;
    let scale = 2f64.powi(S_BITS as i32 - s_target.log2().floor() as i32);
    let s_num = (s_target * scale).floor();
    if !(s_num >= 1.0) {
        return Err(Error::TooSmallN);
    }
    let s = BigRational::new(BigInt::from(s_num as u64), BigInt::from(scale as u128));
    let three = BigRational::from_integer(3.into());
    if &s * &three >= a {
        return Err(Error::TooSmallN);
    }
    let two_s = &s + &s;
    let j_n = vec![s.clone(), two_s.clone()];
    let j_prime = vec![BigRational::zero(), &s * &three];

    // H_N(J′): rotation images for the exponents that can bring the base back at time ≈ N
    let a_n = floor_int(&(&a * BigRational::from_integer(n.into())));
    let a_n_i64 = a_n.to_i64().ok_or(Error::InvalidArgument("N too large".into()))?;
    let lo = a_n_i64 - (af * dk_constant * log_term).floor() as i64;
    let hi = a_n_i64 + ((1.0 + af * dk_constant) * log_term).ceil() as i64;
    let width3 = &s * &three;
    let mut pieces = vec![];
    for ell in lo..=hi {
        let off = frac(&(BigRational::from_integer(ell.into()) * &rep.theta)) * &a;
        let end = &off + &width3;
        if end <= a {
            pieces.push((off, end));
        } else {
            pieces.push((off, a.clone()));
            pieces.push((BigRational::zero(), end - &a));
        }
    }
    let h = union(pieces);
    let h_measure: BigRational = h.iter().map(|(l, r)| r - l).sum();
    let mut gap_start = None;
    let mut cursor = BigRational::zero();
    for (l, r) in h.iter().chain(std::iter::once(&(a.clone(), a.clone()))) {
        if l - &cursor >= s {
            gap_start = Some(cursor.clone());
            break;
        }
        if r > &cursor {
            cursor = r.clone();
        }
    }
    let g0 = gap_start.ok_or(Error::NoGapFound { measure: rational_to_f64(&h_measure) })?;
    let j_second = vec![g0.clone(), &g0 + &s];

    // S = {1 ≤ n ≤ N : (⌊aN⌋ − ⌊an⌋)·aθ mod a ∈ [0, s/2)}
    let (p, q) = (rep.theta.numer().clone(), rep.theta.denom().clone());
    let threshold = &s / (BigRational::from_integer(2.into()) * &a) * BigRational::from_integer(q.clone());
    let mut s_set = vec![];
    for m in 1..=n {
        let k = &a_n - floor_int(&(&a * BigRational::from_integer(m.into())));
        let r = (k * &p).mod_floor(&q);
        if BigRational::from_integer(r) < threshold {
            s_set.push(m);
        }
    }

    let f = Observable::trapezoid(&j_second[0], &s)?;
    let g = Observable::trapezoid(&j_n[0], &s)?;

    let lengths = rep.iet.exact_lengths().expect("rational");
    let mut vals = lengths.clone();
    vals.extend([s.clone(), g0.clone(), a.clone()]);
    vals.extend(f.breakpoints());
    vals.extend(g.breakpoints());
    let lat = LatticeIet::with_denominator(&rep.iet, &common_denominator(vals.iter()))?;
    let disjoint = {
        let (t0, t1) = (lat.to_units(&j_second[0])?, lat.to_units(&j_second[1])?);
        let mut segs = vec![Seg { start: lat.to_units(&j_n[0])?, end: lat.to_units(&j_n[1])?, shift: 0, tag: 0 }];
        let mut next = vec![];
        let mut ok = true;
        let mut si = 0;
        for m in 1..=n {
            next.clear();
            for sg in &segs {
                lat.push(*sg, &mut next);
            }
            std::mem::swap(&mut segs, &mut next);
            if si < s_set.len() && s_set[si] == m {
                si += 1;
                if segs.iter().any(|sg| sg.start < t1 && t0 < sg.end) {
                    ok = false;
                    break;
                }
            }
            if segs.len() > cfg.piece_budget {
                return Err(Error::QuadratureBlowup { pieces: segs.len() });
            }
        }
        ok
    };

    let q_n: f64 = Correlator::new(&rep.iet, &f, &g, cfg.piece_budget)?
        .centered(n as usize)?
        .iter()
        .map(|c| c.norm_sqr())
        .sum();
    let (f_l1, g_l1) = (f.l1_norm(), g.l1_norm());
    let sf = rational_to_f64(&s);
    let s_count = s_set.len();
    Ok(LowerBoundCertificate {
        n,
        eps: cfg.eps,
        theta: rep.theta.clone(),
        dk_constant,
        big_a,
        c0,
        ell_range: (lo, hi),
        h_measure: rational_to_f64(&h_measure),
        s_count_in_sum: s_set.iter().filter(|&&m| m < n).count(),
        s_lower: af * nf * sf / 4.0,
        disjoint,
        f: f.name.clone(),
        g: g.name.clone(),
        f_lipschitz_norm: f.lipschitz_norm(),
        g_lipschitz_norm: g.lipschitz_norm(),
        lipschitz_cap: 15.0 / sf,
        f_l1,
        g_l1,
        q_n,
        ratio: q_n / ((f_l1 * g_l1).powi(2) * s_count as f64),
        s_count,
        s_set,
        a,
        s,
        j_n,
        j_n_prime: j_prime,
        j_n_second: j_second,
    })
}

#[cfg(test)]
mod tests {
    use super::super::rotation::golden_tower;
    use super::*;
    use num_traits::One;

    #[test]
    fn tiny_n_is_rejected() {
        let rep = golden_tower(40).unwrap();
        assert!(matches!(lower_bound_construct(&rep, &LowerBoundConfig::new(3, 0.1)), Err(Error::TooSmallN | Error::NoGapFound { .. })));
    }

    #[test]
    fn small_certificate() {
        let rep = golden_tower(40).unwrap();
        let c = lower_bound_construct(&rep, &LowerBoundConfig::new(1 << 10, 0.1)).unwrap();
        assert!(c.holds(), "{:?}", c.checks());
        assert!(c.s_count >= 1);
        assert!(BigRational::one() > c.s);
    }
}
