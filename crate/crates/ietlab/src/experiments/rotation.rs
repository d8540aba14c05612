//! Rotation-class IETs as integer-time special flows over a rotation, and
//! Denjoy–Koksma deviations of the roof.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::is_rotation_class;
use crate::error::{Error, Result};
use crate::iet::{Iet, PiecewiseTranslation};
use crate::perm::StepKind;
use crate::renormalize::{Induction, RauzyPath};
use crate::scalar::{frac, rational_to_f64, Scalar};
use crate::substitution::Substitution;

/// Tower over one interval of the base.
#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    #[serde(serialize_with = "super::ser_q")]
    pub start: BigRational,
    #[serde(serialize_with = "super::ser_q")]
    pub len: BigRational,
    pub roof: u64,
    /// Translation from the base interval to each floor; `offsets[0] = 0`.
    #[serde(serialize_with = "super::ser_qs")]
    pub offsets: Vec<BigRational>,
}

/// `T` seen as the time-one map of the special flow over
/// `R(x) = x + aθ mod a` on `[0, a)` under a piecewise constant roof.
#[derive(Clone, Debug, Serialize)]
pub struct RotationRepresentation {
    #[serde(serialize_with = "super::ser_iet")]
    pub iet: Iet,
    #[serde(serialize_with = "super::ser_q")]
    pub a: BigRational,
    #[serde(serialize_with = "super::ser_q")]
    pub theta: BigRational,
    /// Towers in base order.
    pub towers: Vec<Tower>,
    /// Induction steps used to reach the rotation.
    pub path: Vec<StepKind>,
    /// Base of full length: the IET is itself a rotation.
    pub degenerate: bool,
}

impl RotationRepresentation {
    /// `Σ |I_α| r_α`, which equals one exactly.
    pub fn kac_sum(&self) -> BigRational {
        self.towers.iter().map(|t| &t.len * BigRational::from_integer(t.roof.into())).sum()
    }

    pub fn kac_holds(&self) -> bool {
        self.kac_sum().is_one()
    }

    /// Mean roof over the base, `a⁻¹ ∫_{[0,a)} r`; equals `1/a`.
    pub fn mean_roof(&self) -> BigRational {
        self.kac_sum() / &self.a
    }

    /// Total variation of the roof on the circle `[0, a)`.
    pub fn roof_variation(&self) -> u64 {
        let k = self.towers.len();
        (0..k).map(|i| self.towers[i].roof.abs_diff(self.towers[(i + 1) % k].roof)).sum()
    }

    /// Roof on the unit circle: breakpoints `start/a` and values.
    pub fn roof_on_circle(&self) -> (Vec<f64>, Vec<f64>) {
        let breaks = self.towers.iter().map(|t| rational_to_f64(&(&t.start / &self.a))).collect();
        let values = self.towers.iter().map(|t| t.roof as f64).collect();
        (breaks, values)
    }

    /// Rotation of the base.
    pub fn rotate(&self, x: &BigRational) -> BigRational {
        let y = x + &self.a * &self.theta;
        if y >= self.a {
            y - &self.a
        } else {
            y
        }
    }

    /// Flow coordinates `(tower, base point, floor)` of a point of `[0,1)`.
    pub fn locate(&self, y: &BigRational) -> Option<(usize, BigRational, u64)> {
        for (i, t) in self.towers.iter().enumerate() {
            for (h, off) in t.offsets.iter().enumerate() {
                let x = y - off;
                if x >= t.start && x < &t.start + &t.len {
                    return Some((i, x, h as u64));
                }
            }
        }
        None
    }

    /// One unit of flow time, mapped back to `[0,1)`.
    pub fn flow_step(&self, y: &BigRational) -> Option<BigRational> {
        let (i, x, h) = self.locate(y)?;
        let t = &self.towers[i];
        if h + 1 < t.roof {
            return Some(x + &t.offsets[h as usize + 1]);
        }
        let bx = self.rotate(&x);
        Some(bx)
    }

    /// Points of `samples` (dyadic, seeded) where the flow and `T` disagree.
    pub fn round_trip_failures(&self, samples: usize, seed: u64) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let den = BigRational::from_integer(num_bigint::BigInt::one() << 40u32);
        let mut bad = 0;
        for _ in 0..samples {
            let y = BigRational::from_integer(rng.gen_range(0u64..1 << 40).into()) / &den;
            let flow = self.flow_step(&y);
            let direct = self.iet.apply(&Scalar::Exact(y.clone()))?;
            if flow.as_ref() != direct.as_exact() {
                bad += 1;
            }
        }
        Ok(bad)
    }
}

/// Induces on `[0, |λ^{(n)}|)` at the first rotation vertex of the induction.
pub fn rotation_representation(iet: &Iet) -> Result<RotationRepresentation> {
    if !iet.is_exact() {
        return Err(Error::InvalidArgument("rotation representation needs rational lengths".into()));
    }
    if !is_rotation_class(iet.perm())? {
        return Err(Error::NotRotationClass);
    }
    let mut st = Induction::new(iet);
    let mut kinds = vec![];
    while !st.perm.is_rotation() {
        kinds.push(st.step()?.kind);
    }
    let path = RauzyPath::from_kinds(iet.perm(), &kinds);
    let zeta = Substitution::from_path(&path);
    let lengths: Vec<BigRational> = st.lengths.iter().map(|l| l.as_exact().unwrap().clone()).collect();
    let a: BigRational = lengths.iter().sum();
    let w: Vec<BigRational> = iet.translations().iter().map(|t| t.as_exact().unwrap().clone()).collect();
    let induced = PiecewiseTranslation::from_lengths(&st.perm, &lengths);
    let theta = &induced.pieces[0].2 / &a;
    let mut towers = vec![];
    for ((start, end, _), label) in induced.pieces.iter().zip(st.perm.top_order()) {
        let word = zeta.image(label);
        let mut offsets = vec![BigRational::zero()];
        for &l in &word[..word.len() - 1] {
            let next = offsets.last().unwrap() + &w[l];
            offsets.push(next);
        }
        towers.push(Tower { start: start.clone(), len: end - start, roof: word.len() as u64, offsets });
    }
    Ok(RotationRepresentation {
        iet: iet.clone(),
        degenerate: a.is_one(),
        a,
        theta: frac(&theta),
        towers,
        path: kinds,
    })
}

/// The IET on `[0,1)` obtained by stacking floors of the given widths and
/// integer heights over the rotation by `aθ` of the base `[0, a)`.
///
/// Base intervals are laid out in order from 0; upper floors follow the base
/// tower by tower. `Σ len·roof` must be one.
pub fn from_tower(theta: &BigRational, base: &[(BigRational, u64)]) -> Result<RotationRepresentation> {
    if base.is_empty() || base.iter().any(|(l, r)| !l.is_positive() || *r == 0) {
        return Err(Error::InvalidArgument("towers need positive widths and heights".into()));
    }
    if theta.is_negative() || theta >= &BigRational::one() {
        return Err(Error::InvalidArgument("rotation number must lie in [0,1)".into()));
    }
    let total: BigRational = base.iter().map(|(l, r)| l * BigRational::from_integer((*r).into())).sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument("floor widths times heights must sum to one".into()));
    }
    let a: BigRational = base.iter().map(|(l, _)| l.clone()).sum();
    let mut towers = vec![];
    let mut cursor = BigRational::zero();
    for (len, _) in base {
        towers.push(Tower { start: cursor.clone(), len: len.clone(), roof: 0, offsets: vec![BigRational::zero()] });
        cursor += len;
    }
    for (t, (len, roof)) in towers.iter_mut().zip(base) {
        t.roof = *roof;
        for _ in 1..*roof {
            t.offsets.push(&cursor - &t.start);
            cursor += len;
        }
    }
    let shift = &a * theta;
    let mut pieces = vec![];
    for t in &towers {
        let (lo, hi) = (t.start.clone(), &t.start + &t.len);
        for h in 0..t.roof as usize {
            let here = &t.offsets[h];
            if h + 1 < t.roof as usize {
                pieces.push((&lo + here, &hi + here, &t.offsets[h + 1] - here));
                continue;
            }
            // top floor returns to the base through the rotation
            let cut = &a - &shift;
            if hi <= cut {
                pieces.push((&lo + here, &hi + here, &shift - here));
            } else if lo >= cut {
                pieces.push((&lo + here, &hi + here, &shift - &a - here));
            } else {
                pieces.push((&lo + here, &cut + here, &shift - here));
                pieces.push((&cut + here, &hi + here, &shift - &a - here));
            }
        }
    }
    pieces.sort();
    let map = PiecewiseTranslation { length: BigRational::one(), pieces }.merged();
    let iet = map.to_iet()?;
    Ok(RotationRepresentation { iet, degenerate: a.is_one(), a, theta: theta.clone(), towers, path: vec![] })
}

/// Golden-mean tower: base `[0, 2/3)` split in halves with roofs 1 and 2,
/// rotated by the Fibonacci approximant `F_k/F_{k+1}`.
pub fn golden_tower(k: usize) -> Result<RotationRepresentation> {
    use super::fixtures::fibonacci;
    let theta = BigRational::new(fibonacci(k), fibonacci(k + 1));
    let third = BigRational::new(1.into(), 3.into());
    from_tower(&theta, &[(third.clone(), 1), (third, 2)])
}

/// Deviations `|Σ_{i<k} r(x + iθ) − k∫r|` on a grid of `k`.
#[derive(Clone, Debug, Serialize)]
pub struct DeviationTable {
    pub theta: f64,
    pub eps: f64,
    pub variation: f64,
    pub mean: f64,
    pub k_grid: Vec<usize>,
    pub xs: Vec<f64>,
    /// `deviations[j][i]` at `xs[j]`, `k_grid[i]`.
    pub deviations: Vec<Vec<f64>>,
    /// `Var(r) log k (log log k)^{1+ε}`.
    pub scale: Vec<f64>,
    /// Smallest constant valid at each base point.
    pub c_by_x: Vec<f64>,
    /// Smallest constant valid on the whole grid.
    pub c_eps: f64,
}

/// `r` is given by breakpoints `breaks[0] = 0 < breaks[1] < …` on the unit
/// circle and the value on each piece.
pub fn denjoy_koksma_check(
    theta: f64,
    breaks: &[f64],
    values: &[f64],
    k_grid: &[usize],
    eps: f64,
    xs: &[f64],
) -> Result<DeviationTable> {
    if breaks.len() != values.len() || breaks.is_empty() {
        return Err(Error::DimensionMismatch { expected: breaks.len(), found: values.len() });
    }
    if k_grid.iter().any(|&k| k < 16) {
        return Err(Error::InvalidArgument("grid values must be at least 16".into()));
    }
    let m = breaks.len();
    let widths: Vec<f64> = (0..m).map(|i| if i + 1 < m { breaks[i + 1] - breaks[i] } else { 1.0 - breaks[i] }).collect();
    let mean: f64 = widths.iter().zip(values).map(|(w, v)| w * v).sum();
    let variation: f64 = (0..m).map(|i| (values[(i + 1) % m] - values[i]).abs()).sum();
    let kmax = k_grid.iter().copied().max().unwrap_or(0);
    let eval = |u: f64| values[breaks.partition_point(|&b| b <= u) - 1];
    let scale: Vec<f64> = k_grid
        .iter()
        .map(|&k| {
            let l = (k as f64).ln();
            variation * l * l.ln().powf(1.0 + eps)
        })
        .collect();
    let mut deviations = vec![];
    let mut c_by_x = vec![];
    for &x in xs {
        let mut sums = vec![0.0f64; kmax + 1];
        for i in 0..kmax {
            let u = (x + (i as f64 * theta).fract()).fract();
            sums[i + 1] = sums[i] + eval(u);
        }
        let dev: Vec<f64> = k_grid.iter().map(|&k| (sums[k] - k as f64 * mean).abs()).collect();
        let c = dev.iter().zip(&scale).map(|(d, s)| if *s > 0.0 { d / s } else { 0.0 }).fold(0.0, f64::max);
        c_by_x.push(c);
        deviations.push(dev);
    }
    let c_eps = c_by_x.iter().copied().fold(0.0, f64::max);
    Ok(DeviationTable { theta, eps, variation, mean, k_grid: k_grid.to_vec(), xs: xs.to_vec(), deviations, scale, c_by_x, c_eps })
}
