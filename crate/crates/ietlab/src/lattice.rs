//! Rational IETs rescaled to integer endpoints.
//!
//! When every length and every point of interest is a multiple of `1/D`, the
//! map acts on integers and interval images can be tracked with `i128`
//! arithmetic instead of big rationals. Results stay exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::iet::Iet;

/// Largest common denominator accepted, keeping sums far from overflow.
pub const MAX_DENOM_BITS: u64 = 100;

/// A half-open integer segment `[start, end)` carried by a translation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seg {
    pub start: i128,
    pub end: i128,
    /// Accumulated translation since tracking began.
    pub shift: i128,
    /// Caller-defined tag, preserved through splitting.
    pub tag: u32,
}

#[derive(Clone, Debug)]
pub struct LatticeIet {
    denom: i128,
    /// Left endpoints of top intervals in top order.
    starts: Vec<i128>,
    /// Translations in top order.
    shifts: Vec<i128>,
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

impl LatticeIet {
    /// Rescales `iet` by the least common denominator of its lengths and `extra`.
    pub fn from_iet(iet: &Iet, extra: &[BigRational]) -> Result<Self> {
        let lengths = iet.exact_lengths().ok_or(Error::InvalidArgument("lattice form needs rational lengths".into()))?;
        let denom = common_denominator(lengths.iter().chain(extra));
        LatticeIet::with_denominator(iet, &denom)
    }

    /// Rescales by a caller-chosen common denominator.
    pub fn with_denominator(iet: &Iet, denom: &BigInt) -> Result<Self> {
        if denom.bits() > MAX_DENOM_BITS {
            return Err(Error::InvalidArgument(format!("common denominator has {} bits", denom.bits())));
        }
        if !iet.is_exact() {
            return Err(Error::InvalidArgument("lattice form needs rational lengths".into()));
        }
        let dd = BigRational::from_integer(denom.clone());
        let to_int = |x: &BigRational| -> Result<i128> {
            let y = x * &dd;
            if !y.is_integer() {
                return Err(Error::InvalidArgument("denominator is not common".into()));
            }
            Ok(y.to_integer().to_i128().expect("bounded by MAX_DENOM_BITS"))
        };
        let order = iet.perm().top_order();
        let mut starts = Vec::with_capacity(order.len());
        let mut shifts = Vec::with_capacity(order.len());
        for &a in &order {
            starts.push(to_int(iet.top_left(a).as_exact().unwrap())?);
            shifts.push(to_int(iet.translation(a).as_exact().unwrap())?);
        }
        Ok(LatticeIet { denom: denom.to_i128().unwrap(), starts, shifts })
    }

    pub fn denom(&self) -> i128 {
        self.denom
    }

    /// Converts a rational to lattice units; it must be a multiple of `1/D`.
    pub fn to_units(&self, x: &BigRational) -> Result<i128> {
        let y = x * BigRational::from_integer(self.denom.into());
        if !y.is_integer() {
            return Err(Error::InvalidArgument(format!("{x} is not on the lattice")));
        }
        y.to_integer().to_i128().ok_or(Error::InvalidArgument("value out of range".into()))
    }

    pub fn from_units(&self, x: i128) -> BigRational {
        BigRational::new(x.into(), self.denom.into())
    }

    fn position(&self, x: i128) -> usize {
        self.starts.partition_point(|&s| s <= x) - 1
    }

    /// Image of a lattice point in `[0, D)`.
    pub fn apply(&self, x: i128) -> i128 {
        x + self.shifts[self.position(x)]
    }

    /// Interior discontinuities in lattice units.
    pub fn cuts(&self) -> &[i128] {
        &self.starts[1..]
    }

    /// Pushes the image of `seg` under one application of the map to `out`.
    pub fn push(&self, seg: Seg, out: &mut Vec<Seg>) {
        let mut a = seg.start;
        let mut i = self.position(a);
        while a < seg.end {
            let stop = if i + 1 < self.starts.len() { self.starts[i + 1].min(seg.end) } else { seg.end };
            let w = self.shifts[i];
            out.push(Seg { start: a + w, end: stop + w, shift: seg.shift + w, tag: seg.tag });
            a = stop;
            i += 1;
        }
    }

    /// Inverse map on the same lattice.
    pub fn inverse(&self) -> LatticeIet {
        let mut pairs: Vec<(i128, i128)> = self.starts.iter().zip(&self.shifts).map(|(&s, &w)| (s + w, -w)).collect();
        pairs.sort();
        LatticeIet {
            denom: self.denom,
            starts: pairs.iter().map(|p| p.0).collect(),
            shifts: pairs.iter().map(|p| p.1).collect(),
        }
    }
}
