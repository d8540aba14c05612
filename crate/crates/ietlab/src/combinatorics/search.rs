//! Shortest-first searches for loops in a labeled Rauzy diagram.

use std::collections::VecDeque;

use num_bigint::BigInt;
use serde::Serialize;

use super::closure;
use crate::error::{Error, Result};
use crate::matrix::{lattice_index, CocycleMatrix};
use crate::perm::{Permutation, StepKind};
use crate::renormalize::{left_mul_step, RauzyPath, RauzyStep};
use crate::substitution::{population_vector, Substitution, Word};

const KINDS: [StepKind; 2] = [StepKind::Top, StepKind::Bottom];

/// Labeled diagram of `start` with distances back to `start`.
struct LoopGraph {
    vertices: Vec<Permutation>,
    succ: Vec<[usize; 2]>,
    dist_home: Vec<usize>,
}

impl LoopGraph {
    fn new(start: &Permutation) -> Result<Self> {
        if !start.is_irreducible() {
            return Err(Error::ReduciblePermutation);
        }
        let (vertices, succ) = closure(start, Permutation::clone);
        let n = vertices.len();
        let mut pred: Vec<Vec<usize>> = vec![vec![]; n];
        for (i, s) in succ.iter().enumerate() {
            for &j in s {
                pred[j].push(i);
            }
        }
        let mut dist_home = vec![usize::MAX; n];
        dist_home[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &u in &pred[v] {
                if dist_home[u] == usize::MAX {
                    dist_home[u] = dist_home[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        Ok(LoopGraph { vertices, succ, dist_home })
    }

    /// Visits loops at the start vertex in order of length, calling `visit`
    /// with `(vertex sequence, kinds, B_γ)`; stops when it returns `true`.
    /// Each explored arrow costs one unit of `budget`.
    fn search(
        &self,
        budget: usize,
        max_len: usize,
        mut visit: impl FnMut(&[usize], &[StepKind], &CocycleMatrix) -> bool,
    ) -> Result<Option<Vec<StepKind>>> {
        let mut spent = 0usize;
        let d = self.vertices[0].d();
        for len in 1..=max_len {
            let mut verts = vec![0usize];
            let mut kinds = vec![];
            let mut mats = vec![CocycleMatrix::identity(d)];
            let mut choice = vec![0usize];
            while let Some(&c) = choice.last() {
                if c == 2 {
                    choice.pop();
                    if kinds.pop().is_some() {
                        verts.pop();
                        mats.pop();
                        *choice.last_mut().unwrap() += 1;
                    }
                    continue;
                }
                if spent >= budget {
                    return Err(Error::BudgetExceeded { best_index: None });
                }
                spent += 1;
                let v = *verts.last().unwrap();
                let w = self.succ[v][c];
                let depth = kinds.len() + 1;
                if self.dist_home[w] > len - depth {
                    *choice.last_mut().unwrap() += 1;
                    continue;
                }
                let mut m = mats.last().unwrap().clone();
                left_mul_step(&mut m, &RauzyStep::at(&self.vertices[v], KINDS[c]));
                verts.push(w);
                kinds.push(KINDS[c]);
                mats.push(m);
                if depth == len {
                    if w == 0 && visit(&verts, &kinds, mats.last().unwrap()) {
                        return Ok(Some(kinds));
                    }
                    verts.pop();
                    kinds.pop();
                    mats.pop();
                    *choice.last_mut().unwrap() += 1;
                } else {
                    choice.push(0);
                }
            }
        }
        Ok(None)
    }
}

/// Shortest loop at `perm` whose matrix `B_γ` has all entries positive.
pub fn find_positive_loop(perm: &Permutation, budget: usize) -> Result<RauzyPath> {
    let g = LoopGraph::new(perm)?;
    match g.search(budget, usize::MAX, |_, _, m| m.is_positive())? {
        Some(kinds) => Ok(RauzyPath::from_kinds(perm, &kinds)),
        None => Err(Error::BudgetExceeded { best_index: None }),
    }
}

/// No nonempty proper prefix of the arrow sequence equals a suffix, so two
/// occurrences of the loop cannot overlap.
pub fn is_simple(path: &RauzyPath) -> Result<bool> {
    let verts = path.vertices()?;
    let arrows: Vec<(&Permutation, StepKind)> = verts.iter().zip(path.kinds()).collect();
    let m = arrows.len();
    Ok((1..m).all(|i| arrows[..i] != arrows[m - i..]))
}

/// A simple positive loop whose substitution has good return words with
/// population vectors generating `ℤ^d`.
#[derive(Clone, Debug, Serialize)]
pub struct GoodWord {
    pub path: RauzyPath,
    pub word: String,
    pub substitution: Substitution,
    pub good_return_words: Vec<String>,
    pub lattice_index: BigInt,
}

impl GoodWord {
    pub fn good_return_letters(&self) -> Vec<Word> {
        self.good_return_words.iter().map(|w| self.substitution.parse_word(w).expect("own labels")).collect()
    }
}

/// Index of the lattice spanned by the population vectors of `words`.
pub fn population_index(words: &[Word], d: usize) -> Option<BigInt> {
    let vecs: Vec<Vec<i64>> = words.iter().map(|w| population_vector(w, d)).collect();
    lattice_index(&vecs, d)
}

/// Searches loops at `perm` shortest first.
pub fn find_good_word(perm: &Permutation, budget: usize) -> Result<GoodWord> {
    let g = LoopGraph::new(perm)?;
    let d = perm.d();
    let mut best: Option<BigInt> = None;
    let mut found = None;
    let outcome = g.search(budget, usize::MAX, |verts, kinds, m| {
        if !m.is_positive() {
            return false;
        }
        let m_len = kinds.len();
        let simple = (1..m_len).all(|i| (0..i).any(|j| verts[j] != verts[m_len - i + j] || kinds[j] != kinds[m_len - i + j]));
        if !simple {
            return false;
        }
        let path = RauzyPath::from_kinds(perm, kinds);
        let z = Substitution::from_path(&path);
        let gr = z.good_return_words();
        match population_index(&gr, d) {
            Some(idx) if idx == BigInt::from(1) => {
                found = Some(GoodWord {
                    word: kinds.iter().map(|k| k.letter()).collect(),
                    good_return_words: gr.iter().map(|w| z.format_word(w)).collect(),
                    path,
                    substitution: z,
                    lattice_index: idx,
                });
                true
            }
            Some(idx) => {
                if best.as_ref().is_none_or(|b| &idx < b) {
                    best = Some(idx);
                }
                false
            }
            None => false,
        }
    });
    match outcome {
        Ok(Some(_)) => Ok(found.expect("set on success")),
        Ok(None) | Err(Error::BudgetExceeded { .. }) => {
            Err(Error::BudgetExceeded { best_index: best.map(|b| b.to_string()) })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renormalize::path_matrix;

    #[test]
    fn swap_loop() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let l = find_positive_loop(&swap, 1000).unwrap();
        assert_eq!(l.len(), 2);
        assert!(path_matrix(&l).unwrap().is_positive());
    }

    #[test]
    fn zero_budget() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        assert!(matches!(find_positive_loop(&swap, 0), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn reversal_loop_is_short() {
        let l = find_positive_loop(&Permutation::symmetric(3), 100_000).unwrap();
        assert!(l.len() <= 12);
        assert_eq!(l.end().unwrap(), Permutation::symmetric(3));
        assert!(path_matrix(&l).unwrap().min_entry() >= BigInt::from(1));
    }

    #[test]
    fn repeated_letter_is_not_simple() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let tt = RauzyPath::from_kinds(&swap, &StepKind::parse_word("tt").unwrap());
        assert!(!is_simple(&tt).unwrap());
        let tb = RauzyPath::from_kinds(&swap, &StepKind::parse_word("tb").unwrap());
        assert!(is_simple(&tb).unwrap());
        let tbt = RauzyPath::from_kinds(&swap, &StepKind::parse_word("tbt").unwrap());
        assert!(!is_simple(&tbt).unwrap());
    }

    #[test]
    fn swap_good_word() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let g = find_good_word(&swap, 1_000_000).unwrap();
        assert!(!g.good_return_words.is_empty());
        assert_eq!(g.lattice_index, BigInt::from(1));
        assert!(is_simple(&g.path).unwrap());
    }
}
