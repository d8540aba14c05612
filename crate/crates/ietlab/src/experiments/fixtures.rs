//! Named, seeded fixture IETs shared by tests, experiments and the CLI.

use num_bigint::BigInt;
use num_rational::BigRational;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::perm::{Permutation, StepKind};
use crate::scalar::{Interval, Scalar};
use crate::renormalize::LebesgueSampler;
use crate::renormalize::{iet_from_path, left_mul_step, Induction, RauzyPath, RauzyStep};
use crate::matrix::CocycleMatrix;

pub const FIXTURE_NAMES: [&str; 3] = ["golden2", "rev3", "sym4"];

/// Bits of the common denominator of seeded path fixtures.
pub const PATH_FIXTURE_BITS: u64 = 64;

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: String,
    pub seed: u64,
    #[serde(serialize_with = "crate::experiments::ser_iet")]
    pub iet: Iet,
    /// Induction steps the fixture is known to follow.
    pub kinds: Vec<StepKind>,
}

/// `F_k` with `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(k: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for _ in 0..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// Rotation 2-IET with lengths `(F_{k+1}, F_k)/F_{k+2}`, a rational
/// approximant of the golden rotation.
pub fn golden_rotation(k: usize) -> Iet {
    let den = fibonacci(k + 2);
    let l = [BigRational::new(fibonacci(k + 1), den.clone()), BigRational::new(fibonacci(k), den)];
    Iet::exact("A B / B A".parse().unwrap(), &l).expect("positive lengths")
}

/// The golden rotation 2-IET, lengths `(1/φ, 1/φ²)` as interval enclosures.
pub fn golden_interval(bits: u32) -> Result<Iet> {
    let poly: Vec<BigRational> = [-1, 1, 1].iter().map(|&c| BigRational::from_integer(c.into())).collect();
    let half = BigRational::new(1.into(), 2.into());
    let inv_phi = Interval::root_of(&poly, half, BigRational::from_integer(1.into()), bits)?;
    let a = Scalar::Ball(inv_phi);
    let b = Scalar::one().sub(&a);
    Iet::new("A B / B A".parse().unwrap(), vec![a, b], true)
}

/// Shortest prefix of a seeded induction path whose matrix has at least
/// `bits` bits in its total mass, turned into an exact IET.
pub fn path_fixture(name: &str, perm: &Permutation, seed: u64, bits: u64) -> Result<Fixture> {
    let sampler = LebesgueSampler { seed };
    let mut chunk = 64 * perm.d();
    loop {
        let kinds = sampler.kinds(perm, chunk);
        let mut m = CocycleMatrix::identity(perm.d());
        let mut p = perm.clone();
        for (i, &k) in kinds.iter().enumerate() {
            left_mul_step(&mut m, &RauzyStep::at(&p, k));
            p = p.rauzy_move(k);
            let total: BigInt = m.column_sums().iter().sum();
            if total.bits() >= bits && m.is_positive() {
                let depth = i + 1;
                let built = iet_from_path(perm, &kinds, depth, depth)?;
                return Ok(Fixture { name: name.into(), seed, iet: built.iet, kinds: kinds[..depth].to_vec() });
            }
        }
        if chunk > 1 << 20 {
            return Err(Error::NonContractingPath { window: chunk });
        }
        chunk *= 2;
    }
}

/// Fixture by name; unknown names are configuration errors.
pub fn fixture(name: &str, seed: u64) -> Result<Fixture> {
    match name {
        "golden2" => {
            let k = 60;
            let iet = golden_rotation(k);
            let mut st = Induction::new(&iet);
            let kinds = st.run(k - 3)?.into_iter().map(|s| s.kind).collect();
            Ok(Fixture { name: name.into(), seed, iet, kinds })
        }
        "rev3" => path_fixture(name, &Permutation::symmetric(3), seed, PATH_FIXTURE_BITS),
        "sym4" => path_fixture(name, &Permutation::symmetric(4), seed, PATH_FIXTURE_BITS),
        other => Err(Error::InvalidArgument(format!("unknown fixture {other:?}; known: {}", FIXTURE_NAMES.join(", ")))),
    }
}

/// Seeded induction path of `n` steps from the fixture's permutation.
pub fn fixture_path(name: &str, seed: u64, n: usize) -> Result<RauzyPath> {
    let perm = match name {
        "golden2" => "A B / B A".parse::<Permutation>().unwrap(),
        "rev3" => Permutation::symmetric(3),
        "sym4" => Permutation::symmetric(4),
        other => return Err(Error::InvalidArgument(format!("unknown fixture {other:?}"))),
    };
    let kinds = LebesgueSampler { seed }.kinds(&perm, n);
    Ok(RauzyPath::from_kinds(&perm, &kinds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn fixtures_follow_their_paths() {
        for name in FIXTURE_NAMES {
            let fx = fixture(name, 7).unwrap();
            let mut st = Induction::new(&fx.iet);
            for (i, &k) in fx.kinds.iter().enumerate() {
                assert_eq!(st.step().unwrap().kind, k, "{name} step {i}");
            }
        }
    }

    #[test]
    fn golden_lengths() {
        let t = golden_rotation(10);
        assert_eq!(t.exact_lengths().unwrap()[0], BigRational::new(89.into(), 144.into()));
        assert!(BigRational::one() > t.exact_lengths().unwrap()[1]);
    }

    #[test]
    fn golden_interval_alternates() {
        let t = golden_interval(256).unwrap();
        let mut st = Induction::new(&t);
        let kinds: Vec<StepKind> = st.run(60).unwrap().into_iter().map(|s| s.kind).collect();
        assert!(kinds.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn unknown_fixture() {
        assert!(fixture("nope", 1).unwrap_err().is_config_error());
    }
}
