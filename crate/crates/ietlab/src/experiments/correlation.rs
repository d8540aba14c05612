//! Exact correlation sequences `⟨f∘Tⁿ, g⟩` of rational IETs.
//!
//! The pieces of `g` are pushed forward on the integer lattice of the IET, so
//! after `n` steps every tracked segment is an interval on which `Tⁿ` is a
//! single translation. Each overlap with a piece of `f` is then a product of
//! two smooth functions on an interval and is integrated by Gauss–Legendre
//! quadrature, which is exact for the piecewise-affine bumps used here.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::lattice::{LatticeIet, Seg};
use crate::observable::{integrate, Observable, PieceFn};

/// Segment count above which overlaps are integrated in parallel.
const PAR_THRESHOLD: usize = 4096;
/// Tracked segments are merged every this many steps.
const MERGE_EVERY: usize = 8;

pub const DEFAULT_PIECE_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug)]
struct LatPiece {
    start: i128,
    end: i128,
    func: PieceFn,
    freq: f64,
}

fn lattice_pieces(lat: &LatticeIet, f: &Observable) -> Result<Vec<LatPiece>> {
    f.pieces()
        .iter()
        .map(|p| {
            Ok(LatPiece { start: lat.to_units(&p.start)?, end: lat.to_units(&p.end)?, func: p.func.clone(), freq: p.func.max_freq() })
        })
        .collect()
}

/// Correlation engine for a fixed triple `(T, f, g)`.
#[derive(Clone, Debug)]
pub struct Correlator {
    lat: LatticeIet,
    f: Vec<LatPiece>,
    g: Vec<LatPiece>,
    mean_product: Complex64,
    budget: usize,
}

impl Correlator {
    /// `budget` caps the number of tracked segments.
    pub fn new(iet: &Iet, f: &Observable, g: &Observable, budget: usize) -> Result<Self> {
        let mut extra = f.breakpoints();
        extra.extend(g.breakpoints());
        let lat = LatticeIet::from_iet(iet, &extra)?;
        Ok(Correlator {
            f: lattice_pieces(&lat, f)?,
            g: lattice_pieces(&lat, g)?,
            mean_product: f.mean() * g.mean().conj(),
            lat,
            budget,
        })
    }

    /// `∫f · conj(∫g)`.
    pub fn mean_product(&self) -> Complex64 {
        self.mean_product
    }

    fn overlap(&self, seg: &Seg) -> Complex64 {
        let dd = self.lat.denom() as f64;
        let gp = &self.g[seg.tag as usize];
        let mut acc = Complex64::zero();
        let first = self.f.partition_point(|p| p.end <= seg.start);
        for fp in &self.f[first..] {
            if fp.start >= seg.end {
                break;
            }
            let lo = fp.start.max(seg.start);
            let hi = fp.end.min(seg.end);
            let width = (hi - lo) as f64 / dd;
            let tf = (lo - fp.start) as f64 / dd;
            let yf = lo as f64 / dd;
            let pre = lo - seg.shift;
            let tg = (pre - gp.start) as f64 / dd;
            let yg = pre as f64 / dd;
            acc += integrate(width, fp.freq + gp.freq, |s| fp.func.eval(tf + s, yf + s) * gp.func.eval(tg + s, yg + s).conj());
        }
        acc
    }

    /// `⟨f∘Tⁿ, g⟩` for `n = 0, …, count−1`.
    pub fn raw(&self, count: usize) -> Result<Vec<Complex64>> {
        let mut segs: Vec<Seg> = self
            .g
            .iter()
            .enumerate()
            .map(|(i, p)| Seg { start: p.start, end: p.end, shift: 0, tag: i as u32 })
            .collect();
        let mut out = Vec::with_capacity(count);
        let mut next = Vec::new();
        for n in 0..count {
            let c = if segs.len() >= PAR_THRESHOLD {
                segs.par_iter().map(|s| self.overlap(s)).sum()
            } else {
                segs.iter().map(|s| self.overlap(s)).sum()
            };
            out.push(c);
            if n + 1 == count {
                break;
            }
            next.clear();
            for s in &segs {
                self.lat.push(*s, &mut next);
            }
            std::mem::swap(&mut segs, &mut next);
            if n % MERGE_EVERY == MERGE_EVERY - 1 {
                merge(&mut segs);
            }
            if segs.len() > self.budget {
                return Err(Error::QuadratureBlowup { pieces: segs.len() });
            }
        }
        Ok(out)
    }

    /// `⟨f∘Tⁿ, g⟩ − ∫f·conj(∫g)`.
    pub fn centered(&self, count: usize) -> Result<Vec<Complex64>> {
        Ok(self.raw(count)?.into_iter().map(|c| c - self.mean_product).collect())
    }
}

/// Joins image-adjacent segments carrying the same translation and tag.
fn merge(segs: &mut Vec<Seg>) {
    segs.sort_unstable_by_key(|s| s.start);
    let mut w = 0;
    for r in 0..segs.len() {
        if w > 0 {
            let last = segs[w - 1];
            let cur = segs[r];
            if last.end == cur.start && last.shift == cur.shift && last.tag == cur.tag {
                segs[w - 1].end = cur.end;
                continue;
            }
        }
        segs[w] = segs[r];
        w += 1;
    }
    segs.truncate(w);
}

/// Cesàro statistics of a centered correlation sequence on an `N` grid.
#[derive(Clone, Debug, Serialize)]
pub struct DecaySeries {
    pub iet_id: String,
    pub f: String,
    pub g: String,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    /// `C_N = N⁻¹ Σ_{n<N} |c_n|`.
    pub c: Vec<f64>,
    /// `Q_N = Σ_{n<N} |c_n|²`.
    pub q: Vec<f64>,
    /// `(‖f‖₂‖g‖₂ + |∫f∫g|)²`, the per-term ceiling of `Q_N`.
    pub term_bound: f64,
}

impl DecaySeries {
    pub fn invariants_hold(&self) -> bool {
        self.c.iter().all(|&c| c >= 0.0)
            && self.q.iter().all(|&q| q >= 0.0)
            && self.n_grid.iter().zip(&self.q).all(|(&n, &q)| q <= n as f64 * self.term_bound * (1.0 + 1e-9))
    }

    /// CSV with columns `N,C_N,Q_N`, floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,C_N,Q_N\n");
        for ((n, c), q) in self.n_grid.iter().zip(&self.c).zip(&self.q) {
            s.push_str(&format!("{n},{c:.16e},{q:.16e}\n"));
        }
        s
    }
}

/// `C_N` and `Q_N` on `n_grid` from the exact correlation sequence.
pub fn cesaro_decay(
    iet: &Iet,
    iet_id: &str,
    f: &Observable,
    g: &Observable,
    n_grid: &[usize],
    seed: u64,
    budget: usize,
) -> Result<DecaySeries> {
    if n_grid.contains(&0) {
        return Err(Error::InvalidArgument("grid values must be positive".into()));
    }
    let max = n_grid.iter().copied().max().unwrap_or(0);
    let engine = Correlator::new(iet, f, g, budget)?;
    let c = engine.centered(max)?;
    let mut abs_prefix = vec![0.0f64; max + 1];
    let mut sq_prefix = vec![0.0f64; max + 1];
    for (i, v) in c.iter().enumerate() {
        abs_prefix[i + 1] = abs_prefix[i] + v.norm();
        sq_prefix[i + 1] = sq_prefix[i] + v.norm_sqr();
    }
    let bound = (f.l2_norm_sq().sqrt() * g.l2_norm_sq().sqrt() + engine.mean_product().norm()).powi(2);
    Ok(DecaySeries {
        iet_id: iet_id.to_string(),
        f: f.name.clone(),
        g: g.name.clone(),
        seed,
        n_grid: n_grid.to_vec(),
        c: n_grid.iter().map(|&n| abs_prefix[n] / n as f64).collect(),
        q: n_grid.iter().map(|&n| sq_prefix[n]).collect(),
        term_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;
    use std::f64::consts::PI;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn rotation_cosine_closed_form() {
        let alpha = q(34, 89);
        let t = Iet::exact("A B / B A".parse().unwrap(), &[BigRational::one() - &alpha, alpha]).unwrap();
        let f = Observable::cosine(1);
        let eng = Correlator::new(&t, &f, &f, 1000).unwrap();
        let c = eng.raw(200).unwrap();
        for (n, v) in c.iter().enumerate() {
            let expect = 0.5 * (2.0 * PI * n as f64 * 34.0 / 89.0).cos();
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn zero_observable_gives_zeros() {
        let t = Iet::parse("A B C / C B A", "1/3 1/5 7/15").unwrap();
        let g = Observable::trapezoid(&q(1, 10), &q(1, 5)).unwrap();
        let s = cesaro_decay(&t, "t", &Observable::zero(), &g, &[1, 8, 64], 0, 1000).unwrap();
        assert!(s.c.iter().chain(&s.q).all(|&x| x == 0.0));
        let s = cesaro_decay(&t, "t", &g, &Observable::zero(), &[1, 8, 64], 0, 1000).unwrap();
        assert!(s.c.iter().chain(&s.q).all(|&x| x == 0.0));
    }

    #[test]
    fn blowup_is_reported() {
        let t = Iet::parse("A B C D / D C B A", "1/5 1/7 2/9 3/11").unwrap();
        let f = Observable::cosine(1);
        assert!(matches!(Correlator::new(&t, &f, &f, 4).unwrap().raw(100), Err(Error::QuadratureBlowup { .. })));
    }
}
