//! Rauzy–Veech induction, Zorich acceleration and path cocycles.

mod lyapunov;

pub use lyapunov::{lyapunov_estimate, LebesgueSampler, LyapunovEstimate};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, PiecewiseTranslation};
use crate::matrix::CocycleMatrix;
use crate::perm::{Permutation, StepKind};
use crate::scalar::Scalar;

/// Default cap on elementary steps inside one Zorich block.
pub const ZORICH_BUDGET: usize = 1_000_000;

/// One elementary induction step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RauzyStep {
    pub kind: StepKind,
    /// Label whose interval survives shortened.
    pub winner: usize,
    /// Label whose interval is removed from the end.
    pub loser: usize,
    pub d: usize,
}

impl RauzyStep {
    /// The step the combinatorics of `perm` dictates for `kind`.
    pub fn at(perm: &Permutation, kind: StepKind) -> Self {
        let (t, b) = (perm.top_last(), perm.bottom_last());
        match kind {
            StepKind::Top => RauzyStep { kind, winner: t, loser: b, d: perm.d() },
            StepKind::Bottom => RauzyStep { kind, winner: b, loser: t, d: perm.d() },
        }
    }

    /// `I + E_{α_b α_t}` for top steps, `I + E_{α_t α_b}` for bottom steps.
    pub fn matrix(&self) -> CocycleMatrix {
        CocycleMatrix::elementary(self.d, self.loser, self.winner)
    }
}

/// Decides the type of the next step from unnormalized lengths.
pub fn step_kind(perm: &Permutation, lengths: &[Scalar]) -> Result<StepKind> {
    let (t, b) = (perm.top_last(), perm.bottom_last());
    match lengths[t].compare(&lengths[b])? {
        Ordering::Greater => Ok(StepKind::Top),
        Ordering::Less => Ok(StepKind::Bottom),
        Ordering::Equal => Err(Error::TieLengths),
    }
}

/// One induction step on unnormalized lengths.
pub fn rauzy_step_raw(perm: &Permutation, lengths: &[Scalar]) -> Result<(Permutation, Vec<Scalar>, RauzyStep)> {
    let kind = step_kind(perm, lengths)?;
    let step = RauzyStep::at(perm, kind);
    let mut next = lengths.to_vec();
    next[step.winner] = lengths[step.winner].sub(&lengths[step.loser]);
    Ok((perm.rauzy_move(kind), next, step))
}

/// Induced IET on `[0, 1 − λ_loser)`, rescaled to total length one.
pub fn rauzy_step(iet: &Iet) -> Result<(Iet, RauzyStep)> {
    let (perm, lengths, step) = rauzy_step_raw(iet.perm(), iet.lengths())?;
    Ok((Iet::new(perm, lengths, false)?, step))
}

/// Unnormalized induction state.
#[derive(Clone, Debug, PartialEq)]
pub struct Induction {
    pub perm: Permutation,
    pub lengths: Vec<Scalar>,
}

impl Induction {
    pub fn new(iet: &Iet) -> Self {
        Induction { perm: iet.perm().clone(), lengths: iet.lengths().to_vec() }
    }

    pub fn step(&mut self) -> Result<RauzyStep> {
        let (perm, lengths, step) = rauzy_step_raw(&self.perm, &self.lengths)?;
        self.perm = perm;
        self.lengths = lengths;
        Ok(step)
    }

    /// Performs `n` steps and returns them.
    pub fn run(&mut self, n: usize) -> Result<Vec<RauzyStep>> {
        (0..n).map(|_| self.step()).collect()
    }

    /// Total length of the current inducing interval.
    pub fn total(&self) -> Scalar {
        self.lengths.iter().fold(Scalar::zero(), |a, l| a.add(l))
    }

    pub fn to_iet(&self) -> Result<Iet> {
        Iet::new(self.perm.clone(), self.lengths.clone(), false)
    }

    /// Induced map on `[0, total)` in original coordinates.
    pub fn pieces(&self) -> Result<PiecewiseTranslation> {
        let exact: Option<Vec<BigRational>> = self.lengths.iter().map(|l| l.as_exact().cloned()).collect();
        let exact = exact.ok_or(Error::InvalidArgument("pieces need rational lengths".into()))?;
        Ok(PiecewiseTranslation::from_lengths(&self.perm, &exact))
    }
}

/// Runs induction until the step type changes; returns the renormalized IET
/// and the block of equal-type steps.
pub fn zorich_step(iet: &Iet, budget: usize) -> Result<(Iet, Vec<RauzyStep>)> {
    let mut state = Induction::new(iet);
    let steps = zorich_block(&mut state, budget)?;
    Ok((state.to_iet()?, steps))
}

/// Zorich block on an unnormalized state.
pub fn zorich_block(state: &mut Induction, budget: usize) -> Result<Vec<RauzyStep>> {
    let first = state.step()?;
    let mut steps = vec![first];
    loop {
        if step_kind(&state.perm, &state.lengths)? != first.kind {
            return Ok(steps);
        }
        if steps.len() >= budget {
            return Err(Error::StepBudgetExceeded { budget });
        }
        steps.push(state.step()?);
    }
}

/// A path in a Rauzy diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RauzyPath {
    pub start: Permutation,
    pub steps: Vec<RauzyStep>,
}

impl RauzyPath {
    /// Follows the given step kinds from `start`.
    pub fn from_kinds(start: &Permutation, kinds: &[StepKind]) -> Self {
        let mut perm = start.clone();
        let mut steps = Vec::with_capacity(kinds.len());
        for &k in kinds {
            steps.push(RauzyStep::at(&perm, k));
            perm = perm.rauzy_move(k);
        }
        RauzyPath { start: start.clone(), steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }

    /// Permutations visited, starting with `start` and ending with the end vertex.
    pub fn vertices(&self) -> Result<Vec<Permutation>> {
        let mut perm = self.start.clone();
        let mut out = vec![perm.clone()];
        for (index, s) in self.steps.iter().enumerate() {
            if *s != RauzyStep::at(&perm, s.kind) {
                return Err(Error::PathMismatch { index });
            }
            perm = perm.rauzy_move(s.kind);
            out.push(perm.clone());
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<Permutation> {
        Ok(self.vertices()?.pop().unwrap())
    }

    /// Concatenation; fails unless `other` starts where `self` ends.
    pub fn concat(&self, other: &RauzyPath) -> Result<RauzyPath> {
        if self.end()? != other.start {
            return Err(Error::PathMismatch { index: self.len() });
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(RauzyPath { start: self.start.clone(), steps })
    }
}

/// `B_γ = B_{γ_k} ⋯ B_{γ_1}`, so that `λ^{(γ)} B_γ = λ` for row vectors.
pub fn path_matrix(path: &RauzyPath) -> Result<CocycleMatrix> {
    path.vertices()?;
    let d = path.start.d();
    let mut m = CocycleMatrix::identity(d);
    for s in &path.steps {
        left_mul_step(&mut m, s);
    }
    Ok(m)
}

/// `M ← (I + E_{loser,winner}) M`: row `loser` gains row `winner`.
pub fn left_mul_step(m: &mut CocycleMatrix, s: &RauzyStep) {
    for j in 0..m.d() {
        let v = m.get(s.loser, j) + m.get(s.winner, j);
        m.set(s.loser, j, v);
    }
}

/// Result of building an IET from a prescribed path.
#[derive(Clone, Debug)]
pub struct PathIet {
    pub iet: Iet,
    /// Sup-norm diameter of the normalized simplex image; every normalized λ
    /// following the path lies within this distance of `iet`'s lengths.
    pub radius: BigRational,
    pub matrix: CocycleMatrix,
}

/// Exact rational IET whose first `depth` induction steps follow `kinds`.
///
/// λ is the normalized image `(1,…,1)·B_γ` of the barycentre. Every block of
/// at most `window` consecutive steps must contain a positive product.
pub fn iet_from_path(perm: &Permutation, kinds: &[StepKind], depth: usize, window: usize) -> Result<PathIet> {
    if kinds.len() < depth {
        return Err(Error::InvalidArgument(format!("path has {} steps, need {depth}", kinds.len())));
    }
    let path = RauzyPath::from_kinds(perm, &kinds[..depth]);
    let d = perm.d();
    let mut block = CocycleMatrix::identity(d);
    let mut block_len = 0;
    let mut found = false;
    for s in &path.steps {
        left_mul_step(&mut block, s);
        block_len += 1;
        if block.is_positive() {
            found = true;
            block = CocycleMatrix::identity(d);
            block_len = 0;
        } else if block_len >= window {
            return Err(Error::NonContractingPath { window });
        }
    }
    if !found {
        return Err(Error::NonContractingPath { window });
    }
    let matrix = path_matrix(&path)?;
    let sums = matrix.column_sums();
    let total: BigInt = sums.iter().sum();
    let lengths: Vec<BigRational> = sums.iter().map(|s| BigRational::new(s.clone(), total.clone())).collect();
    let rows: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let r = matrix.row(i);
            let t: BigInt = r.iter().sum();
            r.iter().map(|x| BigRational::new(x.clone(), t.clone())).collect()
        })
        .collect();
    let mut radius = BigRational::zero();
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                let diff = (&rows[i][k] - &rows[j][k]).abs();
                if diff > radius {
                    radius = diff;
                }
            }
        }
    }
    Ok(PathIet { iet: Iet::exact(perm.clone(), &lengths)?, radius, matrix })
}

/// First-return map of a rational IET to `[0, ell)` by direct orbit
/// simulation of whole intervals; no induction formulas are used.
pub fn first_return_map(iet: &Iet, ell: &BigRational, budget: usize) -> Result<PiecewiseTranslation> {
    if !ell.is_positive() || ell > &BigRational::from_integer(1.into()) {
        return Err(Error::InvalidArgument("inducing length must lie in (0, 1]".into()));
    }
    let map = iet.pieces()?;
    let mut active = vec![(BigRational::zero(), ell.clone(), BigRational::zero())];
    let mut returned = vec![];
    for _ in 0..budget {
        let mut next = vec![];
        for (a, b, shift) in active {
            let mut i = map.pieces.partition_point(|p| p.1 <= a);
            let mut lo = a;
            while lo < b {
                let (_, pe, w) = &map.pieces[i];
                let hi = if pe < &b { pe.clone() } else { b.clone() };
                let (ia, ib, s) = (&lo + w, &hi + w, &shift + w);
                if &ib <= ell {
                    returned.push((&ia - &s, &ib - &s, s));
                } else if &ia >= ell {
                    next.push((ia, ib, s));
                } else {
                    returned.push((&ia - &s, ell - &s, s.clone()));
                    next.push((ell.clone(), ib, s));
                }
                lo = hi;
                i += 1;
            }
        }
        active = next;
        if active.is_empty() {
            returned.sort();
            return Ok(PiecewiseTranslation { length: ell.clone(), pieces: returned });
        }
    }
    Err(Error::ReturnBudgetExceeded { budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn swap_top_step() {
        let t = Iet::parse("A B / B A", "3/10 7/10").unwrap();
        let mut st = Induction::new(&t);
        let s = st.step().unwrap();
        assert_eq!(s.kind, StepKind::Top);
        assert_eq!(st.lengths, vec![Scalar::ratio(3, 10), Scalar::ratio(4, 10)]);
        assert_eq!(&st.perm, t.perm());
        let oracle = first_return_map(&t, &q(7, 10), 100).unwrap();
        assert!(oracle.same_map(&st.pieces().unwrap()));
    }

    #[test]
    fn tie_is_reported() {
        let t = Iet::parse("A B / B A", "1/2 1/2").unwrap();
        assert_eq!(rauzy_step(&t).unwrap_err(), Error::TieLengths);
    }

    #[test]
    fn identity_inducing() {
        let t = Iet::parse("A B C D / D C B A", "1/5 1/7 2/9 3/11").unwrap();
        let m = first_return_map(&t, &q(1, 1), 10).unwrap();
        assert!(m.same_map(&t.pieces().unwrap()));
    }

    #[test]
    fn golden_two_steps_matrix() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let path = RauzyPath::from_kinds(&swap, &[StepKind::Top, StepKind::Bottom]);
        let m = path_matrix(&path).unwrap();
        assert_eq!(m, CocycleMatrix::from_rows(&[vec![1, 1], vec![1, 2]]));
        assert_eq!(path_matrix(&RauzyPath::from_kinds(&swap, &[])).unwrap(), CocycleMatrix::identity(2));
    }

    #[test]
    fn mismatched_path() {
        let p: Permutation = "A B C / C B A".parse().unwrap();
        let mut path = RauzyPath::from_kinds(&p, &[StepKind::Top, StepKind::Top]);
        path.steps[1].winner = path.steps[1].loser;
        assert_eq!(path_matrix(&path).unwrap_err(), Error::PathMismatch { index: 1 });
    }

    #[test]
    fn zorich_singleton_block() {
        // λ_B > λ_A then λ_A > λ_B': one top step, then the type flips
        let t = Iet::parse("A B / B A", "2/5 3/5").unwrap();
        let (_, steps) = zorich_step(&t, ZORICH_BUDGET).unwrap();
        assert_eq!(steps.len(), 1);
    }

    #[test]
    fn all_top_path_does_not_contract() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let kinds = vec![StepKind::Top; 50];
        assert!(matches!(iet_from_path(&swap, &kinds, 50, 20), Err(Error::NonContractingPath { .. })));
    }

    #[test]
    fn alternating_path_contracts() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let kinds: Vec<StepKind> = (0..40).map(|i| if i % 2 == 0 { StepKind::Top } else { StepKind::Bottom }).collect();
        let built = iet_from_path(&swap, &kinds, 40, 8).unwrap();
        assert!(crate::scalar::rational_to_f64(&built.radius) < 1e-15);
        let mut st = Induction::new(&built.iet);
        let got: Vec<StepKind> = st.run(40).unwrap().iter().map(|s| s.kind).collect();
        assert_eq!(got, kinds);
    }
}
