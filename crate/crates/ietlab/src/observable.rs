//! Piecewise-smooth test functions on `[0,1)` with exact piece boundaries.
//!
//! A piece carries a polynomial in the local coordinate `t = x - start` plus a
//! finite sum of Fourier modes `a·e^{2πikx}` in the absolute coordinate.
//! Everything outside the pieces is zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

const GL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            out.push(((1.0 - x) / 2.0, w / 2.0));
        }
        out
    })
}

/// Integrates `g` over `[0, len]`, splitting so that every chunk spans at most
/// half a period of the fastest oscillation.
pub fn integrate(len: f64, max_freq: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
    if len <= 0.0 {
        return Complex64::zero();
    }
    let chunks = ((len * max_freq * 2.0).ceil() as usize).max(1);
    let h = len / chunks as f64;
    let nodes = gauss_legendre();
    let mut acc = Complex64::zero();
    for c in 0..chunks {
        let a = c as f64 * h;
        for &(x, w) in nodes {
            acc += g(a + x * h) * w;
        }
    }
    acc * h
}

/// Smooth part of one piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceFn {
    /// Coefficients in the local coordinate, lowest degree first.
    pub poly: Vec<Complex64>,
    /// Fourier modes `(amplitude, frequency)` in the absolute coordinate.
    pub waves: Vec<(Complex64, i64)>,
}

impl PieceFn {
    pub fn constant(c: f64) -> Self {
        PieceFn { poly: vec![Complex64::new(c, 0.0)], waves: vec![] }
    }

    pub fn affine(at_start: f64, slope: f64) -> Self {
        PieceFn { poly: vec![Complex64::new(at_start, 0.0), Complex64::new(slope, 0.0)], waves: vec![] }
    }

    /// Value at local coordinate `t`, with `y` the absolute position mod 1.
    pub fn eval(&self, t: f64, y: f64) -> Complex64 {
        let mut v = self.poly.iter().rev().fold(Complex64::zero(), |acc, c| acc * t + c);
        for &(a, k) in &self.waves {
            v += a * Complex64::from_polar(1.0, 2.0 * PI * frac_f64(k as f64 * y));
        }
        v
    }

    /// Highest absolute frequency present.
    pub fn max_freq(&self) -> f64 {
        self.waves.iter().map(|&(_, k)| k.unsigned_abs() as f64).fold(0.0, f64::max)
    }

    fn lipschitz_on(&self, width: f64) -> f64 {
        let poly: f64 = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c.norm() * width.powi(k as i32 - 1))
            .sum();
        let waves: f64 = self.waves.iter().map(|&(a, k)| 2.0 * PI * (k.unsigned_abs() as f64) * a.norm()).sum();
        poly + waves
    }

    fn sup_on(&self, width: f64, y0: f64) -> f64 {
        if self.waves.is_empty() && self.poly.len() <= 2 {
            return self.eval(0.0, y0).norm().max(self.eval(width, y0 + width).norm());
        }
        let m = 256;
        let h = width / m as f64;
        let sampled = (0..=m).map(|i| self.eval(i as f64 * h, y0 + i as f64 * h).norm()).fold(0.0, f64::max);
        sampled + self.lipschitz_on(width) * h / 2.0
    }
}

fn frac_f64(x: f64) -> f64 {
    x - x.floor()
}

/// A piece `[start, end)` with its function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: BigRational,
    pub end: BigRational,
    pub func: PieceFn,
}

impl Piece {
    pub fn width(&self) -> f64 {
        rational_to_f64(&(&self.end - &self.start))
    }
    pub fn start_f64(&self) -> f64 {
        rational_to_f64(&self.start)
    }
    /// Exact integral of the piece.
    pub fn integral(&self) -> Complex64 {
        let y0 = self.start_f64();
        self.func_integral(0.0, self.width(), y0)
    }
    fn func_integral(&self, t0: f64, t1: f64, y0: f64) -> Complex64 {
        integrate(t1 - t0, self.func.max_freq(), |s| self.func.eval(t0 + s, y0 + t0 + s))
    }
}

/// Piecewise-Lipschitz function on `[0,1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub name: String,
    pieces: Vec<Piece>,
    sup: f64,
    lip: f64,
}

impl Observable {
    /// Pieces must be disjoint, ordered and inside `[0,1)`.
    pub fn from_pieces(name: impl Into<String>, pieces: Vec<Piece>) -> Result<Self> {
        let mut prev_end = BigRational::zero();
        for p in &pieces {
            if p.start < prev_end || p.end <= p.start {
                return Err(Error::InvalidArgument("observable pieces must be ordered, disjoint and nonempty".into()));
            }
            prev_end = p.end.clone();
        }
        if prev_end > BigRational::one() {
            return Err(Error::InvalidArgument("observable pieces must lie in [0,1)".into()));
        }
        let sup = pieces.iter().map(|p| p.func.sup_on(p.width(), p.start_f64())).fold(0.0, f64::max);
        let lip = pieces.iter().map(|p| p.func.lipschitz_on(p.width())).fold(0.0, f64::max);
        Ok(Observable { name: name.into(), pieces, sup, lip })
    }

    pub fn zero() -> Self {
        Observable::from_pieces("zero", vec![]).unwrap()
    }

    pub fn constant(c: f64) -> Self {
        let piece = Piece { start: BigRational::zero(), end: BigRational::one(), func: PieceFn::constant(c) };
        Observable::from_pieces(format!("const({c})"), vec![piece]).unwrap()
    }

    /// Indicator of `[a, b)`.
    pub fn indicator(a: BigRational, b: BigRational) -> Result<Self> {
        let name = format!("1[{a},{b})");
        Observable::from_pieces(name, vec![Piece { start: a, end: b, func: PieceFn::constant(1.0) }])
    }

    /// `amp·e^{2πikx}` on all of `[0,1)`.
    pub fn wave(k: i64, amp: Complex64) -> Self {
        let func = PieceFn { poly: vec![], waves: vec![(amp, k)] };
        let piece = Piece { start: BigRational::zero(), end: BigRational::one(), func };
        Observable::from_pieces(format!("wave({k})"), vec![piece]).unwrap()
    }

    /// `cos(2πkx)`.
    pub fn cosine(k: i64) -> Self {
        let h = Complex64::new(0.5, 0.0);
        let func = PieceFn { poly: vec![], waves: vec![(h, k), (h, -k)] };
        let piece = Piece { start: BigRational::zero(), end: BigRational::one(), func };
        Observable::from_pieces(format!("cos({k})"), vec![piece]).unwrap()
    }

    /// Trapezoid bump on `[a, a+s)`: zero on the outer `s/10` collars, one on
    /// the central `s/2`, linear in between.
    pub fn trapezoid(a: &BigRational, s: &BigRational) -> Result<Self> {
        let frac = |p: i64, q: i64| a + s * BigRational::new(p.into(), q.into());
        let ramp = rational_to_f64(s) * 3.0 / 20.0;
        let up = Piece { start: frac(1, 10), end: frac(1, 4), func: PieceFn::affine(0.0, 1.0 / ramp) };
        let top = Piece { start: frac(1, 4), end: frac(3, 4), func: PieceFn::constant(1.0) };
        let down = Piece { start: frac(3, 4), end: frac(9, 10), func: PieceFn::affine(1.0, -1.0 / ramp) };
        Observable::from_pieces(format!("bump[{a},+{s})"), vec![up, top, down])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `‖f‖_∞` (an upper bound, exact for piecewise-affine functions).
    pub fn sup_norm(&self) -> f64 {
        self.sup
    }
    /// Largest Lipschitz constant over the pieces.
    pub fn lipschitz(&self) -> f64 {
        self.lip
    }
    /// `‖f‖_L = ‖f‖_∞ + Lip(f)`.
    pub fn lipschitz_norm(&self) -> f64 {
        self.sup + self.lip
    }

    /// `∫₀¹ f`, the sum of the piece integrals.
    pub fn mean(&self) -> Complex64 {
        self.pieces.iter().map(Piece::integral).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let y0 = p.start_f64();
                integrate(p.width(), p.func.max_freq().max(1.0) * 4.0, |s| Complex64::new(p.func.eval(s, y0 + s).norm(), 0.0)).re
            })
            .sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let y0 = p.start_f64();
                integrate(p.width(), 2.0 * p.func.max_freq(), |s| Complex64::new(p.func.eval(s, y0 + s).norm_sqr(), 0.0)).re
            })
            .sum()
    }

    /// Index of the piece containing `x`, if any.
    pub fn piece_at(&self, x: &BigRational) -> Option<usize> {
        let i = self.pieces.partition_point(|p| &p.end <= x);
        (i < self.pieces.len() && &self.pieces[i].start <= x).then_some(i)
    }

    /// Exact-position evaluation.
    pub fn eval(&self, x: &BigRational) -> Complex64 {
        match self.piece_at(x) {
            Some(i) => {
                let p = &self.pieces[i];
                let t = rational_to_f64(&(x - &p.start));
                let y = rational_to_f64(&(x - x.floor()));
                p.func.eval(t, y)
            }
            None => Complex64::zero(),
        }
    }

    pub fn eval_f64(&self, x: f64) -> Complex64 {
        let i = self.pieces.partition_point(|p| rational_to_f64(&p.end) <= x);
        match self.pieces.get(i) {
            Some(p) if p.start_f64() <= x => p.func.eval(x - p.start_f64(), x),
            _ => Complex64::zero(),
        }
    }

    /// `f − ∫f`, defined on all of `[0,1)`.
    pub fn centered(&self) -> Observable {
        let m = self.mean();
        let mut pieces = vec![];
        let mut cursor = BigRational::zero();
        let fill = |a: &BigRational, b: &BigRational, out: &mut Vec<Piece>| {
            if a < b {
                out.push(Piece { start: a.clone(), end: b.clone(), func: PieceFn { poly: vec![-m], waves: vec![] } });
            }
        };
        for p in &self.pieces {
            fill(&cursor, &p.start, &mut pieces);
            let mut func = p.func.clone();
            if func.poly.is_empty() {
                func.poly.push(Complex64::zero());
            }
            func.poly[0] -= m;
            pieces.push(Piece { start: p.start.clone(), end: p.end.clone(), func });
            cursor = p.end.clone();
        }
        fill(&cursor, &BigRational::one(), &mut pieces);
        Observable::from_pieces(format!("{}-mean", self.name), pieces).expect("pieces stay ordered")
    }

    /// All piece boundaries.
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = self.pieces.iter().flat_map(|p| [p.start.clone(), p.end.clone()]).collect();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn quadrature_is_exact_on_polynomials() {
        let v = integrate(2.0, 0.0, |s| Complex64::new(s.powi(7), 0.0));
        assert!((v.re - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_shape() {
        let s = q(1, 100);
        let f = Observable::trapezoid(&q(1, 10), &s).unwrap();
        // area = s/2 + 2 · (3s/20)/2
        assert!((f.mean().re - 0.01 * 0.65).abs() < 1e-15);
        assert!((f.sup_norm() - 1.0).abs() < 1e-15);
        assert!(f.lipschitz_norm() <= 15.0 / 0.01);
        assert!((f.eval(&q(1, 10)).re).abs() < 1e-15);
        assert!((f.eval(&(q(1, 10) + q(1, 200))).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wave_integrals() {
        let f = Observable::wave(3, Complex64::new(1.0, 0.0));
        assert!(f.mean().norm() < 1e-14);
        assert!((f.l2_norm_sq() - 1.0).abs() < 1e-13);
        let c = Observable::cosine(1);
        assert!((c.l2_norm_sq() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn centering_kills_the_mean() {
        let f = Observable::indicator(q(1, 4), q(1, 2)).unwrap();
        let g = f.centered();
        assert!(g.mean().norm() < 1e-15);
        assert!((g.eval(&q(0, 1)).re + 0.25).abs() < 1e-15);
        assert!((g.eval(&q(1, 4)).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn left_closed_pieces() {
        let f = Observable::indicator(q(1, 4), q(1, 2)).unwrap();
        assert_eq!(f.eval(&q(1, 4)).re, 1.0);
        assert_eq!(f.eval(&q(1, 2)).re, 0.0);
    }
}
