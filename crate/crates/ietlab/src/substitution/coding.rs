//! Symbolic codings of orbits through induced towers.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{Substitution, Word};
use crate::error::{Error, Result};
use crate::iet::{Iet, PiecewiseTranslation};
use crate::perm::Permutation;
use crate::renormalize::Induction;
use crate::scalar::Scalar;

/// Labels visited by `x` under the map induced on the level-`level` interval
/// `[0, |λ^{(level)}|)`, in original coordinates.
pub fn symbolic_coding(iet: &Iet, x: &Scalar, n: usize, level: usize) -> Result<Word> {
    let mut state = Induction::new(iet);
    state.run(level)?;
    let total = state.total();
    let induced = state.to_iet()?;
    let y = x.div(&total)?;
    let orbit = induced.orbit(&y, n.saturating_sub(1))?;
    orbit.iter().take(n).map(|p| induced.locate(p)).collect()
}

/// `x^{(ℓ)}[0, N) = p_ℓ ζ(p_{ℓ+1}) ⋯ ζ^{[ℓ+1,n]}(w) ⋯ ζ(s_{ℓ+1}) s_ℓ`, where
/// `p_k`/`s_k` are proper suffixes/prefixes of images of `ζ_{k+1}` and `w`
/// lists the complete level-`n` blocks.
#[derive(Clone, Debug, Serialize)]
pub struct PrefixSuffix {
    pub level: usize,
    /// Deepest level with a complete block inside the window.
    pub depth: usize,
    pub window: usize,
    pub prefixes: Vec<Word>,
    pub middle: Word,
    pub suffixes: Vec<Word>,
    /// `ζ_{k+1}` for `k = level..=depth`.
    pub steps: Vec<Substitution>,
    /// The level-`level` coding of the window.
    pub coding: Word,
}

/// Top intervals of an unnormalized induced map, for point location.
struct Level {
    perm: Permutation,
    left: Vec<BigRational>,
    total: BigRational,
}

impl Level {
    fn new(state: &Induction) -> Result<Self> {
        let lengths: Vec<BigRational> = state
            .lengths
            .iter()
            .map(|l| l.as_exact().cloned().ok_or(Error::InvalidArgument("decomposition needs rational lengths".into())))
            .collect::<Result<_>>()?;
        let mut left = vec![BigRational::zero(); lengths.len()];
        let mut acc = BigRational::zero();
        for a in state.perm.top_order() {
            left[a] = acc.clone();
            acc += &lengths[a];
        }
        Ok(Level { perm: state.perm.clone(), left, total: acc })
    }

    fn locate(&self, y: &BigRational) -> Option<usize> {
        if y >= &self.total {
            return None;
        }
        self.perm.top_order().into_iter().rev().find(|&a| y >= &self.left[a])
    }
}

/// Prefix–suffix decomposition of the level-`level` coding of `x` over a
/// window of `window` letters, built from the visits of the orbit to deeper
/// induced intervals. `x` must lie in the level-`level` interval.
pub fn prefix_suffix(iet: &Iet, x: &BigRational, window: usize, level: usize, max_depth: usize) -> Result<PrefixSuffix> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let mut state = Induction::new(iet);
    state.run(level)?;
    let base = Level::new(&state)?;
    let map: PiecewiseTranslation = state.pieces()?;
    let mut orbit = Vec::with_capacity(window);
    let mut y = x.clone();
    for step in 0..window {
        if base.locate(&y).is_none() || y < BigRational::zero() {
            return Err(Error::OutOfDomain);
        }
        if step + 1 < window && base.left.iter().any(|l| l == &y && !l.is_zero()) {
            return Err(Error::SingularOrbit { step });
        }
        let next = map.apply(&y).ok_or(Error::OutOfDomain)?;
        orbit.push(y);
        y = next;
    }
    let coding: Word = orbit.iter().map(|p| base.locate(p).unwrap()).collect();
    let labels = iet.perm().labels().to_vec();

    // visits[k - level] = (time, level-k label) for each visit to J_k
    let mut visits: Vec<Vec<(usize, usize)>> = vec![coding.iter().copied().enumerate().collect()];
    let mut heights: Vec<Vec<usize>> = vec![vec![1; iet.d()]];
    let mut steps = vec![];
    loop {
        let k = level + visits.len() - 1;
        let complete = visits.last().unwrap().iter().any(|&(t, a)| t + heights.last().unwrap()[a] <= window);
        if !complete {
            break;
        }
        if k >= level + max_depth {
            return Err(Error::StepBudgetExceeded { budget: max_depth });
        }
        let step = state.step()?;
        let z = Substitution::from_step(&labels, &step);
        let h: Vec<usize> = z.images().iter().map(|w| w.iter().map(|&a| heights.last().unwrap()[a]).sum()).collect();
        let lv = Level::new(&state)?;
        let vs: Vec<(usize, usize)> =
            orbit.iter().enumerate().filter_map(|(t, p)| lv.locate(p).map(|a| (t, a))).collect();
        steps.push(z);
        heights.push(h);
        visits.push(vs);
    }
    // the last level has no complete block; the one before is the depth
    visits.pop();
    heights.pop();
    let depth = level + visits.len() - 1;
    let complete = |j: usize| -> Vec<(usize, usize)> {
        visits[j].iter().copied().filter(|&(t, a)| t + heights[j][a] <= window).collect()
    };
    let top = complete(visits.len() - 1);
    let (first, last_end) = (top[0].0, top.last().map(|&(t, a)| t + heights[visits.len() - 1][a]).unwrap());
    let middle: Word = top.iter().map(|&(_, a)| a).collect();
    let mut prefixes = vec![];
    let mut suffixes = vec![];
    for j in 0..visits.len() - 1 {
        let blocks = complete(j);
        let next = complete(j + 1);
        let (lo, hi) = match (next.first(), next.last()) {
            (Some(f), Some(l)) => (f.0, l.0 + heights[j + 1][l.1]),
            _ => (first, last_end),
        };
        prefixes.push(blocks.iter().filter(|&&(t, _)| t < lo).map(|&(_, a)| a).collect());
        suffixes.push(blocks.iter().filter(|&&(t, _)| t >= hi).map(|&(_, a)| a).collect());
    }
    Ok(PrefixSuffix { level, depth, window, prefixes, middle, suffixes, steps, coding })
}

impl PrefixSuffix {
    /// `ζ_{level+1} ∘ ⋯ ∘ ζ_k`.
    pub fn composed(&self, k: usize) -> Substitution {
        let mut acc = Substitution::identity(self.steps[0].labels().to_vec());
        for s in &self.steps[..k - self.level] {
            acc = acc.compose(s);
        }
        acc
    }

    fn expand(&self, k: usize, w: &[usize]) -> Word {
        self.composed(k).apply(w)
    }

    /// Concatenation of the pieces, to be compared with `coding`.
    pub fn reassemble(&self) -> Word {
        let mut out = vec![];
        for (j, p) in self.prefixes.iter().enumerate() {
            out.extend(self.expand(self.level + j, p));
        }
        out.extend(self.expand(self.depth, &self.middle));
        for (j, s) in self.suffixes.iter().enumerate().rev() {
            out.extend(self.expand(self.level + j, s));
        }
        out
    }

    /// `p_k` is a proper suffix and `s_k` a proper prefix of some `ζ_{k+1}(β)`.
    pub fn pieces_are_proper(&self) -> bool {
        self.prefixes.iter().zip(&self.suffixes).zip(&self.steps).all(|((p, s), z)| {
            z.images().iter().any(|w| p.len() < w.len() && w.ends_with(p))
                && z.images().iter().any(|w| s.len() < w.len() && w.starts_with(s))
        })
    }

    /// `min_β |ζ^{[ℓ+1,n]}(β)| ≤ N ≤ 2 max_β |ζ^{[ℓ+1,n+1]}(β)|`.
    pub fn sandwich(&self) -> bool {
        let lo = self.composed(self.depth).min_image_len();
        let hi = self.composed(self.depth + 1).max_image_len();
        lo <= self.window && self.window <= 2 * hi
    }

    /// Reassembly, properness of the pieces and the length sandwich.
    pub fn verify(&self) -> bool {
        self.reassemble() == self.coding && self.pieces_are_proper() && self.sandwich()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Interval;

    /// The coding of 0 under the rotation by 1/φ² is `A` followed by the
    /// fixed point of `A → AB, B → A`.
    #[test]
    fn golden_coding_is_fibonacci() {
        let poly: Vec<BigRational> = [-1, 1, 1].iter().map(|&c| BigRational::from_integer(c.into())).collect();
        let inv_phi = Interval::root_of(&poly, BigRational::new(1.into(), 2.into()), BigRational::from_integer(1.into()), 256).unwrap();
        let a = Scalar::Ball(inv_phi);
        let b = Scalar::one().sub(&a);
        let t = Iet::new("A B / B A".parse().unwrap(), vec![a, b], true).unwrap();
        let got = symbolic_coding(&t, &Scalar::zero(), 20, 0).unwrap();
        let fib = Substitution::new(vec!["A".into(), "B".into()], vec![vec![0, 1], vec![0]]).unwrap();
        let mut w = vec![0];
        while w.len() < 30 {
            w = fib.apply(&w);
        }
        let mut expect = vec![0];
        expect.extend_from_slice(&w[..19]);
        assert_eq!(got, expect);
    }

    #[test]
    fn induced_coding_expands_to_base() {
        let t = Iet::parse("A B C D / D C B A", "13/97 29/97 31/97 24/97").unwrap();
        let x = Scalar::ratio(1, 1000);
        for level in 1..4 {
            let deep = symbolic_coding(&t, &x, 6, level).unwrap();
            let mut state = Induction::new(&t);
            let labels = t.perm().labels().to_vec();
            let mut z = Substitution::identity(labels.clone());
            for _ in 0..level {
                z = z.compose(&Substitution::from_step(&labels, &state.step().unwrap()));
            }
            let expanded = z.apply(&deep);
            let base = symbolic_coding(&t, &x, expanded.len(), 0).unwrap();
            assert_eq!(expanded, base, "level {level}");
        }
    }
}
