//! Interval exchange transformations and their orbits.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::perm::Permutation;
use crate::scalar::{parse_rational, Scalar};

/// Normalized IET: lengths indexed by label, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Iet {
    perm: Permutation,
    lengths: Vec<Scalar>,
    top_left: Vec<Scalar>,
    translation: Vec<Scalar>,
}

fn partial_sums(order: &[usize], lengths: &[Scalar]) -> Vec<Scalar> {
    let mut left = vec![Scalar::zero(); lengths.len()];
    let mut acc = Scalar::zero();
    for &a in order {
        left[a] = acc.clone();
        acc = acc.add(&lengths[a]);
    }
    left
}

impl Iet {
    /// Validates, normalizes to total length one, and precomputes endpoints.
    pub fn new(perm: Permutation, lengths: Vec<Scalar>, strict: bool) -> Result<Self> {
        let d = perm.d();
        if lengths.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: lengths.len() });
        }
        for (a, l) in lengths.iter().enumerate() {
            if l.sign()? != Ordering::Greater {
                return Err(Error::NonPositiveLength { label: perm.label(a).to_string() });
            }
        }
        if strict && !perm.is_irreducible() {
            return Err(Error::ReduciblePermutation);
        }
        let total = lengths.iter().fold(Scalar::zero(), |acc, l| acc.add(l));
        let lengths: Vec<Scalar> = if total == Scalar::one() {
            lengths
        } else {
            lengths.iter().map(|l| l.div(&total)).collect::<Result<_>>()?
        };
        let top_left = partial_sums(&perm.top_order(), &lengths);
        let bottom_left = partial_sums(&perm.bottom_order(), &lengths);
        let translation = bottom_left.iter().zip(&top_left).map(|(b, t)| b.sub(t)).collect();
        Ok(Iet { perm, lengths, top_left, translation })
    }

    /// Exact IET from rational lengths (normalized automatically).
    pub fn exact(perm: Permutation, lengths: &[BigRational]) -> Result<Self> {
        Iet::new(perm, lengths.iter().cloned().map(Scalar::Exact).collect(), false)
    }

    /// Parses a permutation string and whitespace-separated rationals.
    pub fn parse(perm: &str, lengths: &str) -> Result<Self> {
        let perm: Permutation = perm.parse()?;
        let lengths: Vec<BigRational> = lengths.split_whitespace().map(parse_rational).collect::<Result<_>>()?;
        Iet::exact(perm, &lengths)
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }
    pub fn d(&self) -> usize {
        self.perm.d()
    }
    pub fn lengths(&self) -> &[Scalar] {
        &self.lengths
    }
    pub fn length(&self, a: usize) -> &Scalar {
        &self.lengths[a]
    }
    pub fn top_left(&self, a: usize) -> &Scalar {
        &self.top_left[a]
    }
    pub fn translation(&self, a: usize) -> &Scalar {
        &self.translation[a]
    }
    pub fn translations(&self) -> &[Scalar] {
        &self.translation
    }
    pub fn is_exact(&self) -> bool {
        self.lengths.iter().all(Scalar::is_exact)
    }

    /// Exact lengths, when in rational mode.
    pub fn exact_lengths(&self) -> Option<Vec<BigRational>> {
        self.lengths.iter().map(|l| l.as_exact().cloned()).collect()
    }

    /// Interior discontinuities: left endpoints of all but the first top interval.
    pub fn discontinuities(&self) -> Vec<Scalar> {
        let mut order = self.perm.top_order();
        order.remove(0);
        order.into_iter().map(|a| self.top_left[a].clone()).collect()
    }

    /// Label of the top interval containing `x`.
    pub fn locate(&self, x: &Scalar) -> Result<usize> {
        if !x.ge(&Scalar::zero())? || x.ge(&Scalar::one())? {
            return Err(Error::OutOfDomain);
        }
        let order = self.perm.top_order();
        for &a in order.iter().rev() {
            if x.ge(&self.top_left[a])? {
                return Ok(a);
            }
        }
        Err(Error::OutOfDomain)
    }

    /// `T(x) = x + w_α` on the top interval `I_α` containing `x`.
    pub fn apply(&self, x: &Scalar) -> Result<Scalar> {
        let a = self.locate(x)?;
        Ok(x.add(&self.translation[a]))
    }

    /// `[x, Tx, …, Tⁿx]`; hitting an interior discontinuity before the last
    /// point is reported with its step index.
    pub fn orbit(&self, x: &Scalar, n: usize) -> Result<Vec<Scalar>> {
        let cuts = self.discontinuities();
        let mut out = Vec::with_capacity(n + 1);
        let mut y = x.clone();
        for step in 0..n {
            for c in &cuts {
                if y.compare(c)? == Ordering::Equal {
                    return Err(Error::SingularOrbit { step });
                }
            }
            let next = self.apply(&y)?;
            out.push(y);
            y = next;
        }
        if n == 0 {
            self.locate(&y)?;
        }
        out.push(y);
        Ok(out)
    }

    /// Smallest `p ≤ max` with `Tᵖx = x`.
    pub fn period(&self, x: &Scalar, max: usize) -> Result<Option<usize>> {
        let mut y = x.clone();
        for p in 1..=max {
            y = self.apply(&y)?;
            if y.compare(x)? == Ordering::Equal {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// `Σ_{i<n} f(Tⁱx)`.
    pub fn birkhoff_sum(&self, f: &Observable, x: &Scalar, n: usize) -> Result<Complex64> {
        self.twisted_birkhoff_sum(f, x, 0.0, n)
    }

    /// `Σ_{n<N} e^{2πinθ} f(Tⁿx)`.
    pub fn twisted_birkhoff_sum(&self, f: &Observable, x: &Scalar, theta: f64, n: usize) -> Result<Complex64> {
        if n == 0 {
            return Ok(Complex64::zero());
        }
        let orbit = self.orbit(x, n - 1)?;
        let mut acc = Complex64::zero();
        for (i, y) in orbit.iter().enumerate() {
            let v = match y {
                Scalar::Exact(q) => f.eval(q),
                Scalar::Ball(b) => f.eval(&b.midpoint()),
            };
            let phase = (i as f64 * theta).fract();
            acc += Complex64::from_polar(1.0, 2.0 * PI * phase) * v;
        }
        Ok(acc)
    }

    /// The inverse map, itself an IET with top and bottom exchanged.
    pub fn inverse(&self) -> Iet {
        let perm = Permutation::from_orders(
            self.perm.labels().to_vec(),
            &self.perm.bottom_order(),
            &self.perm.top_order(),
        )
        .expect("valid");
        Iet::new(perm, self.lengths.clone(), false).expect("lengths already valid")
    }

    /// Exact piecewise-translation form (rational mode only).
    pub fn pieces(&self) -> Result<PiecewiseTranslation> {
        let lengths = self.exact_lengths().ok_or(Error::InvalidArgument("pieces need rational lengths".into()))?;
        Ok(PiecewiseTranslation::from_lengths(&self.perm, &lengths))
    }
}

/// An injective map of `[0, L)` that translates each of finitely many pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseTranslation {
    pub length: BigRational,
    /// `(start, end, shift)` in increasing order of `start`.
    pub pieces: Vec<(BigRational, BigRational, BigRational)>,
}

impl PiecewiseTranslation {
    /// The IET with the given unnormalized lengths acting on `[0, Σλ)`.
    pub fn from_lengths(perm: &Permutation, lengths: &[BigRational]) -> Self {
        let mut top = BigRational::zero();
        let mut top_left = vec![BigRational::zero(); perm.d()];
        for a in perm.top_order() {
            top_left[a] = top.clone();
            top += &lengths[a];
        }
        let mut bottom = BigRational::zero();
        let mut shift = vec![BigRational::zero(); perm.d()];
        for a in perm.bottom_order() {
            shift[a] = &bottom - &top_left[a];
            bottom += &lengths[a];
        }
        let pieces = perm
            .top_order()
            .into_iter()
            .map(|a| (top_left[a].clone(), &top_left[a] + &lengths[a], shift[a].clone()))
            .collect();
        PiecewiseTranslation { length: top, pieces }
    }

    /// Merges neighbouring pieces that carry the same translation.
    pub fn merged(&self) -> PiecewiseTranslation {
        let mut out: Vec<(BigRational, BigRational, BigRational)> = vec![];
        for (s, e, w) in &self.pieces {
            if let Some(last) = out.last_mut() {
                if &last.1 == s && &last.2 == w {
                    last.1 = e.clone();
                    continue;
                }
            }
            out.push((s.clone(), e.clone(), w.clone()));
        }
        PiecewiseTranslation { length: self.length.clone(), pieces: out }
    }

    /// Same map, ignoring how it is cut into pieces.
    pub fn same_map(&self, other: &PiecewiseTranslation) -> bool {
        self.merged() == other.merged()
    }

    /// Image of a point.
    pub fn apply(&self, x: &BigRational) -> Option<BigRational> {
        let i = self.pieces.partition_point(|p| &p.1 <= x);
        let (s, _, w) = self.pieces.get(i)?;
        (s <= x).then(|| x + w)
    }

    /// Renormalized IET with fresh labels `A, B, …` in top order.
    pub fn to_iet(&self) -> Result<Iet> {
        let d = self.pieces.len();
        if d < 2 {
            return Err(Error::InvalidPermutation("fewer than two pieces".into()));
        }
        let mut by_image: Vec<usize> = (0..d).collect();
        by_image.sort_by(|&i, &j| {
            let (si, _, wi) = &self.pieces[i];
            let (sj, _, wj) = &self.pieces[j];
            (si + wi).cmp(&(sj + wj))
        });
        let perm = Permutation::from_bottom_order(&by_image)?;
        let lengths: Vec<BigRational> = self.pieces.iter().map(|(s, e, _)| e - s).collect();
        let scale = BigRational::one() / &self.length;
        Iet::exact(perm, &lengths.iter().map(|l| l * &scale).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Interval;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn swap_is_rotation() {
        let t = Iet::parse("A B / B A", "1/4 3/4").unwrap();
        assert_eq!(t.translation(0), &Scalar::ratio(3, 4));
        assert_eq!(t.translation(1), &Scalar::ratio(-1, 4));
        assert_eq!(t.apply(&Scalar::ratio(1, 10)).unwrap(), Scalar::ratio(17, 20));
        assert_eq!(t.apply(&Scalar::ratio(1, 2)).unwrap(), Scalar::ratio(1, 4));
    }

    #[test]
    fn reversal_translations() {
        let t = Iet::parse("A B C / C B A", "1/3 1/3 1/3").unwrap();
        let w: Vec<Scalar> = t.translations().to_vec();
        assert_eq!(w, vec![Scalar::ratio(2, 3), Scalar::zero(), Scalar::ratio(-2, 3)]);
    }

    #[test]
    fn symmetric_midpoints_reverse_blocks() {
        let t = Iet::parse("A B C D / D C B A", "1 1 1 1").unwrap();
        for i in 0..4 {
            let mid = Scalar::ratio(2 * i + 1, 8);
            assert_eq!(t.apply(&mid).unwrap(), Scalar::ratio(2 * (3 - i) + 1, 8));
        }
    }

    #[test]
    fn guards() {
        let p: Permutation = "A B / B A".parse().unwrap();
        assert!(matches!(Iet::exact(p.clone(), &[q(0, 1), q(1, 1)]), Err(Error::NonPositiveLength { .. })));
        assert!(matches!(Iet::exact(p.clone(), &[q(1, 1)]), Err(Error::DimensionMismatch { .. })));
        let red: Permutation = "A B C / B A C".parse().unwrap();
        let ones = vec![Scalar::one(); 3];
        assert!(matches!(Iet::new(red.clone(), ones.clone(), true), Err(Error::ReduciblePermutation)));
        assert!(Iet::new(red, ones, false).is_ok());
        let t = Iet::exact(p, &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(t.apply(&Scalar::one()), Err(Error::OutOfDomain));
    }

    #[test]
    fn orbit_and_singularities() {
        let t = Iet::parse("A B / B A", "1/4 3/4").unwrap();
        assert_eq!(t.orbit(&Scalar::ratio(1, 8), 0).unwrap().len(), 1);
        assert_eq!(t.period(&Scalar::ratio(1, 8), 10).unwrap(), Some(4));
        assert_eq!(t.orbit(&Scalar::zero(), 5), Err(Error::SingularOrbit { step: 3 }));
    }

    #[test]
    fn interval_mode_refuses_straddling_points() {
        let t = Iet::parse("A B / B A", "1/4 3/4").unwrap();
        let fuzzy = Scalar::Ball(Interval::new(q(1, 4) - q(1, 1000), q(1, 4) + q(1, 1000), 64));
        assert!(matches!(t.apply(&fuzzy), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn constant_sums() {
        let t = Iet::parse("A B C / C B A", "1/5 1/3 7/15").unwrap();
        let one = Observable::constant(1.0);
        let x = Scalar::ratio(1, 7);
        assert!((t.birkhoff_sum(&one, &x, 37).unwrap().re - 37.0).abs() < 1e-12);
        let th = 0.3;
        let n = 25;
        let s = t.twisted_birkhoff_sum(&one, &x, th, n).unwrap();
        let e = |a: f64| Complex64::from_polar(1.0, 2.0 * PI * a);
        let closed = (e(n as f64 * th) - 1.0) / (e(th) - 1.0);
        assert!((s - closed).norm() < 1e-12);
    }

    #[test]
    fn inverse_undoes() {
        let t = Iet::parse("A B C D / D C B A", "1/5 1/7 2/9 3/11").unwrap();
        let inv = t.inverse();
        let x = Scalar::ratio(3, 17);
        assert_eq!(inv.apply(&t.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn piecewise_roundtrip() {
        let t = Iet::parse("A B C / C A B", "1/5 1/3 7/15").unwrap();
        let pt = t.pieces().unwrap();
        let back = pt.to_iet().unwrap();
        assert!(back.pieces().unwrap().same_map(&pt));
        let x = q(2, 9);
        assert_eq!(Scalar::Exact(pt.apply(&x).unwrap()), t.apply(&Scalar::Exact(x)).unwrap());
    }
}
