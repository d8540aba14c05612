//! Labeled permutation pairs `(π_t, π_b)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which side wins a Rauzy step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    /// The last top interval is longer.
    Top,
    /// The last bottom interval is longer.
    Bottom,
}

impl StepKind {
    pub fn letter(self) -> char {
        match self {
            StepKind::Top => 't',
            StepKind::Bottom => 'b',
        }
    }

    pub fn from_letter(c: char) -> Result<Self> {
        match c {
            't' | 'T' => Ok(StepKind::Top),
            'b' | 'B' => Ok(StepKind::Bottom),
            _ => Err(Error::InvalidArgument(format!("step kind must be t or b, got {c:?}"))),
        }
    }

    /// Parses a word such as `"tbbt"`.
    pub fn parse_word(s: &str) -> Result<Vec<StepKind>> {
        s.chars().filter(|c| !c.is_whitespace()).map(StepKind::from_letter).collect()
    }
}

/// Alphabet plus top and bottom positions of every label (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    labels: Vec<String>,
    top: Vec<usize>,
    bottom: Vec<usize>,
}

fn inverse(pos: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; pos.len()];
    for (a, &p) in pos.iter().enumerate() {
        inv[p] = a;
    }
    inv
}

fn default_labels(d: usize) -> Vec<String> {
    if d <= 26 {
        (0..d).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        (1..=d).map(|i| i.to_string()).collect()
    }
}

impl Permutation {
    /// Builds a permutation from label names and the label order on each line.
    pub fn from_orders(labels: Vec<String>, top_order: &[usize], bottom_order: &[usize]) -> Result<Self> {
        let d = labels.len();
        if d < 2 {
            return Err(Error::InvalidPermutation("need at least two labels".into()));
        }
        if top_order.len() != d || bottom_order.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: top_order.len().max(bottom_order.len()) });
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != d {
            return Err(Error::InvalidPermutation("repeated label".into()));
        }
        for order in [top_order, bottom_order] {
            let mut seen = vec![false; d];
            for &a in order {
                if a >= d || seen[a] {
                    return Err(Error::InvalidPermutation("line is not a bijection".into()));
                }
                seen[a] = true;
            }
        }
        Ok(Permutation { labels, top: inverse(top_order), bottom: inverse(bottom_order) })
    }

    /// Permutation on labels `A, B, ...` whose top line is `A B ...` and
    /// whose bottom line has label `p[i]` at position `i`.
    pub fn from_bottom_order(bottom_order: &[usize]) -> Result<Self> {
        let d = bottom_order.len();
        let top: Vec<usize> = (0..d).collect();
        Permutation::from_orders(default_labels(d), &top, bottom_order)
    }

    /// The standard permutation `A B … / … B A` on `d` letters.
    pub fn symmetric(d: usize) -> Self {
        let bottom: Vec<usize> = (0..d).rev().collect();
        Permutation::from_bottom_order(&bottom).expect("d >= 2")
    }

    /// The rotation permutation whose bottom line is the top line shifted by `c`.
    pub fn rotation(d: usize, c: usize) -> Self {
        let bottom: Vec<usize> = (0..d).map(|i| (i + d - c % d) % d).collect();
        Permutation::from_bottom_order(&bottom).expect("d >= 2")
    }

    pub fn d(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }
    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// 0-based position of label `a` on the top line.
    pub fn top_pos(&self, a: usize) -> usize {
        self.top[a]
    }
    /// 0-based position of label `a` on the bottom line.
    pub fn bottom_pos(&self, a: usize) -> usize {
        self.bottom[a]
    }
    /// Labels in top order.
    pub fn top_order(&self) -> Vec<usize> {
        inverse(&self.top)
    }
    /// Labels in bottom order.
    pub fn bottom_order(&self) -> Vec<usize> {
        inverse(&self.bottom)
    }

    /// Last label on the top line (`α_t`).
    pub fn top_last(&self) -> usize {
        self.top.iter().position(|&p| p == self.d() - 1).unwrap()
    }
    /// Last label on the bottom line (`α_b`).
    pub fn bottom_last(&self) -> usize {
        self.bottom.iter().position(|&p| p == self.d() - 1).unwrap()
    }

    /// `p[i]` is the bottom position of the label at top position `i`.
    pub fn monodromy(&self) -> Vec<usize> {
        self.top_order().iter().map(|&a| self.bottom[a]).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        let top = self.top_order();
        let bottom = self.bottom_order();
        let mut in_top = vec![false; self.d()];
        let mut in_bottom = vec![false; self.d()];
        let mut shared = 0;
        for k in 0..self.d() - 1 {
            let (a, b) = (top[k], bottom[k]);
            in_top[a] = true;
            if in_bottom[a] {
                shared += 1;
            }
            in_bottom[b] = true;
            if in_top[b] {
                shared += 1;
            }
            if shared == k + 1 {
                return false;
            }
        }
        true
    }

    /// Bottom∘top⁻¹ is a nontrivial power of the cyclic shift.
    pub fn is_rotation(&self) -> bool {
        let p = self.monodromy();
        let d = self.d();
        let c = p[0];
        c != 0 && p.iter().enumerate().all(|(i, &pi)| pi == (i + c) % d)
    }

    /// Relabels so that the top line reads `A B C …`.
    pub fn canonical(&self) -> Permutation {
        Permutation::from_bottom_order(&inverse(&self.monodromy())).expect("valid")
    }

    /// Applies one Rauzy move of the given kind to the combinatorics.
    pub fn rauzy_move(&self, kind: StepKind) -> Permutation {
        let d = self.d();
        let mut out = self.clone();
        match kind {
            StepKind::Top => {
                let winner = self.top_last();
                let loser = self.bottom_last();
                let k = self.bottom[winner];
                for a in 0..d {
                    if self.bottom[a] > k && a != loser {
                        out.bottom[a] = self.bottom[a] + 1;
                    }
                }
                out.bottom[loser] = k + 1;
            }
            StepKind::Bottom => {
                let winner = self.bottom_last();
                let loser = self.top_last();
                let k = self.top[winner];
                for a in 0..d {
                    if self.top[a] > k && a != loser {
                        out.top[a] = self.top[a] + 1;
                    }
                }
                out.top[loser] = k + 1;
            }
        }
        out
    }

    /// All irreducible permutations on `d` letters in canonical form.
    pub fn all_irreducible(d: usize) -> Vec<Permutation> {
        let mut out = vec![];
        let mut items: Vec<usize> = (0..d).collect();
        heap_permutations(&mut items, d, &mut |order| {
            let p = Permutation::from_bottom_order(order).expect("valid");
            if p.is_irreducible() {
                out.push(p);
            }
        });
        out.sort_by_key(|p| p.bottom_order());
        out
    }
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |order: Vec<usize>| order.iter().map(|&a| self.labels[a].as_str()).collect::<Vec<_>>().join(" ");
        write!(f, "{} / {}", line(self.top_order()), line(self.bottom_order()))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses `"A B C D / D C B A"`; the alphabet is the top line.
    fn from_str(s: &str) -> Result<Self> {
        let (top, bottom) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidPermutation("expected `top / bottom`".into()))?;
        let top: Vec<String> = top.split_whitespace().map(String::from).collect();
        let bottom: Vec<&str> = bottom.split_whitespace().collect();
        if top.len() != bottom.len() {
            return Err(Error::DimensionMismatch { expected: top.len(), found: bottom.len() });
        }
        let mut bottom_order = Vec::with_capacity(bottom.len());
        for b in bottom {
            let a = top
                .iter()
                .position(|t| t == b)
                .ok_or_else(|| Error::InvalidPermutation(format!("label {b} missing from the top line")))?;
            bottom_order.push(a);
        }
        let top_order: Vec<usize> = (0..top.len()).collect();
        Permutation::from_orders(top, &top_order, &bottom_order)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p: Permutation = "A B C D / D C B A".parse().unwrap();
        assert_eq!(p.to_string(), "A B C D / D C B A");
        assert_eq!(p.top_last(), 3);
        assert_eq!(p.bottom_last(), 0);
        assert!(p.is_irreducible());
        assert!(!p.is_rotation());
    }

    #[test]
    fn reducible_detected() {
        let p: Permutation = "A B C / B A C".parse().unwrap();
        assert!(!p.is_irreducible());
        let q: Permutation = "A B C / A C B".parse().unwrap();
        assert!(!q.is_irreducible());
    }

    #[test]
    fn swap_is_rotation_and_fixed_by_moves() {
        let p: Permutation = "A B / B A".parse().unwrap();
        assert!(p.is_rotation());
        assert_eq!(p.rauzy_move(StepKind::Top), p);
        assert_eq!(p.rauzy_move(StepKind::Bottom), p);
    }

    #[test]
    fn top_move_inserts_loser_after_winner() {
        let p: Permutation = "A B C D / D C B A".parse().unwrap();
        // winner D sits first on the bottom line; A moves right behind it
        assert_eq!(p.rauzy_move(StepKind::Top).to_string(), "A B C D / D A C B");
        assert_eq!(p.rauzy_move(StepKind::Bottom).to_string(), "A D B C / D C B A");
    }

    #[test]
    fn irreducible_counts() {
        // sequence of indecomposable permutations: 1, 3, 13, 71
        assert_eq!(Permutation::all_irreducible(2).len(), 1);
        assert_eq!(Permutation::all_irreducible(3).len(), 3);
        assert_eq!(Permutation::all_irreducible(4).len(), 13);
        assert_eq!(Permutation::all_irreducible(5).len(), 71);
    }

    #[test]
    fn rotation_constructor() {
        let r = Permutation::rotation(4, 1);
        assert!(r.is_rotation());
        assert_eq!(r.monodromy(), vec![1, 2, 3, 0]);
    }
}
