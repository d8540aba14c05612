//! Exact rationals and certified dyadic intervals behind one type.
//!
//! Interval mode keeps both endpoints as dyadic rationals rounded outward to
//! a fixed number of significant bits, so every result encloses the true
//! value. Sign queries that cannot be decided return
//! [`Error::PrecisionExhausted`] instead of guessing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default working precision of interval mode.
pub const DEFAULT_BITS: u32 = 256;
/// Upper limit for automatic precision escalation.
pub const MAX_BITS: u32 = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Rounds `x` to a dyadic with at most `bits` significant bits.
fn round_dyadic(x: &BigRational, bits: u32, dir: Round) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let n = x.numer().abs();
    let d = x.denom();
    let e = n.bits() as i64 - d.bits() as i64;
    let k = bits as i64 - e + 1;
    let (num, den) = if k >= 0 {
        (x.numer() << k as u64, d.clone())
    } else {
        (x.numer().clone(), d << (-k) as u64)
    };
    let m = match dir {
        Round::Down => num.div_floor(&den),
        Round::Up => -((-num).div_floor(&den)),
    };
    if k >= 0 {
        BigRational::new(m, pow2(k as u64))
    } else {
        BigRational::from_integer(m * pow2((-k) as u64))
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
    bits: u32,
}

impl Interval {
    /// Encloses an exact rational at the given precision.
    pub fn from_rational(x: &BigRational, bits: u32) -> Self {
        Interval {
            lo: round_dyadic(x, bits, Round::Down),
            hi: round_dyadic(x, bits, Round::Up),
            bits,
        }
    }

    /// Builds an interval from explicit endpoints, rounding outward.
    pub fn new(lo: BigRational, hi: BigRational, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval {
            lo: round_dyadic(&lo, bits, Round::Down),
            hi: round_dyadic(&hi, bits, Round::Up),
            bits,
        }
    }

    /// Encloses the unique root of `poly` (coefficients from degree 0 up)
    /// inside `[lo, hi]` by bisection; the polynomial must change sign there.
    pub fn root_of(poly: &[BigRational], lo: BigRational, hi: BigRational, bits: u32) -> Result<Self> {
        let eval = |x: &BigRational| {
            poly.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
        };
        let (mut a, mut b) = (lo, hi);
        let sa = eval(&a).signum();
        let sb = eval(&b).signum();
        if sa.is_zero() {
            return Ok(Interval::from_rational(&a, bits));
        }
        if sb.is_zero() {
            return Ok(Interval::from_rational(&b, bits));
        }
        if sa == sb {
            return Err(Error::InvalidArgument("root bracket has no sign change".into()));
        }
        let scale = a.abs().max(b.abs()).max(BigRational::one());
        let tol = scale / BigRational::from_integer(pow2(bits as u64 + 4));
        let two = BigRational::from_integer(2.into());
        while &b - &a > tol {
            let m = (&a + &b) / &two;
            let sm = eval(&m).signum();
            if sm.is_zero() {
                return Ok(Interval::from_rational(&m, bits));
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(Interval::new(a, b, bits))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }
    pub fn hi(&self) -> &BigRational {
        &self.hi
    }
    pub fn bits(&self) -> u32 {
        self.bits
    }
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }
    pub fn radius(&self) -> BigRational {
        (&self.hi - &self.lo) / BigRational::from_integer(2.into())
    }
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi, self.bits.min(o.bits))
    }
    fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo, self.bits.min(o.bits))
    }
    fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi, self.bits.min(o.bits))
    }
    fn div(&self, o: &Interval) -> Result<Interval> {
        let bits = self.bits.min(o.bits);
        if o.lo.is_negative() && o.hi.is_positive() || o.lo.is_zero() || o.hi.is_zero() {
            return Err(Error::PrecisionExhausted { bits });
        }
        let inv = Interval::new(o.hi.recip(), o.lo.recip(), bits);
        Ok(self.mul(&inv))
    }
}

/// A real number that is either exact or a certified enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Ball(Interval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }
    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(n.into()))
    }
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(BigRational::new(p.into(), q.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(x) => Some(x),
            Scalar::Ball(_) => None,
        }
    }

    /// Precision of interval mode, `None` for exact values.
    pub fn bits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Ball(b) => Some(b.bits),
        }
    }

    /// Lower and upper bound of the value.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            Scalar::Exact(x) => (x.clone(), x.clone()),
            Scalar::Ball(b) => (b.lo.clone(), b.hi.clone()),
        }
    }

    /// Converts to interval mode at the given precision.
    pub fn to_ball(&self, bits: u32) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Ball(Interval::from_rational(x, bits)),
            Scalar::Ball(b) => Scalar::Ball(b.clone()),
        }
    }

    fn lift(a: &Scalar, b: &Scalar) -> (Interval, Interval) {
        let bits = a.bits().into_iter().chain(b.bits()).min().unwrap_or(DEFAULT_BITS);
        let up = |s: &Scalar| match s {
            Scalar::Exact(x) => Interval::from_rational(x, bits),
            Scalar::Ball(i) => i.clone(),
        };
        (up(a), up(b))
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => {
                let (a, b) = Scalar::lift(self, o);
                Scalar::Ball(a.add(&b))
            }
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => {
                let (a, b) = Scalar::lift(self, o);
                Scalar::Ball(a.sub(&b))
            }
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => {
                let (a, b) = Scalar::lift(self, o);
                Scalar::Ball(a.mul(&b))
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if b.is_zero() {
                    Err(Error::InvalidArgument("division by zero".into()))
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            _ => {
                let (a, b) = Scalar::lift(self, o);
                Ok(Scalar::Ball(a.div(&b)?))
            }
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Ball(b) => Scalar::Ball(Interval { lo: -&b.hi, hi: -&b.lo, bits: b.bits }),
        }
    }

    /// Certified sign; fails when zero is interior to the enclosure.
    pub fn sign(&self) -> Result<Ordering> {
        match self {
            Scalar::Exact(a) => Ok(a.cmp(&BigRational::zero())),
            Scalar::Ball(b) => {
                if b.lo.is_positive() {
                    Ok(Ordering::Greater)
                } else if b.hi.is_negative() {
                    Ok(Ordering::Less)
                } else if b.lo.is_zero() && b.hi.is_zero() {
                    Ok(Ordering::Equal)
                } else {
                    Err(Error::PrecisionExhausted { bits: b.bits })
                }
            }
        }
    }

    /// Certified comparison of two scalars.
    pub fn compare(&self, o: &Scalar) -> Result<Ordering> {
        self.sub(o).sign()
    }

    /// Certified strict comparison `self < o`.
    pub fn lt(&self, o: &Scalar) -> Result<bool> {
        Ok(self.compare(o)? == Ordering::Less)
    }

    /// Certified test of `self >= o`, decidable when the enclosure of the
    /// difference lies in `[0, ∞)` or in `(-∞, 0)`.
    pub fn ge(&self, o: &Scalar) -> Result<bool> {
        let (lo, hi) = self.sub(o).bounds();
        if !lo.is_negative() {
            Ok(true)
        } else if hi.is_negative() {
            Ok(false)
        } else {
            Err(Error::PrecisionExhausted { bits: self.bits().or(o.bits()).unwrap_or(0) })
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(a) => rational_to_f64(a),
            Scalar::Ball(b) => rational_to_f64(&b.midpoint()),
        }
    }

    /// Width of the enclosure (zero in exact mode).
    pub fn width(&self) -> BigRational {
        match self {
            Scalar::Exact(_) => BigRational::zero(),
            Scalar::Ball(b) => &b.hi - &b.lo,
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(x: BigRational) -> Self {
        Scalar::Exact(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(a) => write!(f, "{}", format_rational(a)),
            Scalar::Ball(b) => write!(f, "{:.17e}±{:.3e}", rational_to_f64(&b.midpoint()), rational_to_f64(&b.radius())),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Scalar::Exact)
    }
}

/// Accurate conversion that survives huge numerators and denominators.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64 - 60;
    let q = if shift >= 0 { n / (d << shift as u64) } else { (n << (-shift) as u64) / d };
    q.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Parses `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || !ip.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        let n: BigInt = if digits.is_empty() { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Distance from `x` to the nearest integer, exact.
pub fn dist_to_int(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// Fractional part of an exact rational.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Retries `f` with doubled precision while it reports exhaustion.
pub fn with_escalation<T>(start_bits: u32, cap_bits: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut bits = start_bits.max(8);
    loop {
        match f(bits) {
            Err(Error::PrecisionExhausted { .. }) if bits < cap_bits => bits = (bits * 2).min(cap_bits),
            other => return other,
        }
    }
}

/// The sign of a [`BigInt`] as an ordering.
pub fn bigint_sign(x: &BigInt) -> Ordering {
    match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn rounding_encloses() {
        let x = q(1, 3);
        let i = Interval::from_rational(&x, 20);
        assert!(i.contains(&x));
        assert!(i.hi() - i.lo() < q(1, 1 << 19));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/10").unwrap(), q(3, 10));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn sign_refuses_to_guess() {
        let a = Scalar::Exact(q(1, 3)).to_ball(16);
        let b = Scalar::Exact(q(1, 3)).to_ball(16);
        assert!(matches!(a.sub(&b).sign(), Err(Error::PrecisionExhausted { .. })));
        assert_eq!(Scalar::ratio(1, 3).sub(&Scalar::ratio(1, 3)).sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn golden_enclosure() {
        let one = BigRational::one();
        let poly = [-one.clone(), -one.clone(), one.clone()];
        let phi = Interval::root_of(&poly, q(1, 1), q(2, 1), 128).unwrap();
        let mid = rational_to_f64(&phi.midpoint());
        assert!((mid - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(phi.radius() < q(1, 1 << 62));
    }

    #[test]
    fn escalation_doubles() {
        let mut seen = vec![];
        let r = with_escalation(64, 512, |b| {
            seen.push(b);
            if b < 256 {
                Err(Error::PrecisionExhausted { bits: b })
            } else {
                Ok(b)
            }
        });
        assert_eq!(r.unwrap(), 256);
        assert_eq!(seen, vec![64, 128, 256]);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400);
        let x = BigRational::new(big.clone() * 3, big * 7);
        assert!((rational_to_f64(&x) - 3.0 / 7.0).abs() < 1e-15);
    }
}
