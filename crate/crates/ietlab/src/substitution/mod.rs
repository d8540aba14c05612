//! Substitutions attached to Rauzy steps and the word combinatorics built on them.

mod coding;

pub use coding::{prefix_suffix, symbolic_coding, PrefixSuffix};

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::CocycleMatrix;
use crate::perm::StepKind;
use crate::renormalize::{RauzyPath, RauzyStep};

/// A word over label indices.
pub type Word = Vec<usize>;

/// Letter-to-word map on a labeled alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    labels: Vec<String>,
    images: Vec<Word>,
}

impl Substitution {
    pub fn new(labels: Vec<String>, images: Vec<Word>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), found: images.len() });
        }
        let d = labels.len();
        if images.iter().any(|w| w.is_empty() || w.iter().any(|&a| a >= d)) {
            return Err(Error::InvalidArgument("images must be nonempty words over the alphabet".into()));
        }
        Ok(Substitution { labels, images })
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let images = (0..labels.len()).map(|a| vec![a]).collect();
        Substitution { labels, images }
    }

    /// Top step: `ζ(α_b) = α_b α_t`; bottom step: `ζ(α_t) = α_b α_t`;
    /// every other letter is fixed. In both cases the loser gains the winner.
    pub fn from_step(labels: &[String], step: &RauzyStep) -> Self {
        let mut s = Substitution::identity(labels.to_vec());
        s.images[step.loser] = match step.kind {
            StepKind::Top => vec![step.loser, step.winner],
            StepKind::Bottom => vec![step.winner, step.loser],
        };
        s
    }

    /// `ζ_1 ∘ ζ_2 ∘ ⋯` along a path.
    pub fn from_path(path: &RauzyPath) -> Self {
        let labels = path.start.labels().to_vec();
        path.steps
            .iter()
            .fold(Substitution::identity(labels.clone()), |acc, s| acc.compose(&Substitution::from_step(&labels, s)))
    }

    pub fn d(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn image(&self, a: usize) -> &[usize] {
        &self.images[a]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &[usize]) -> Word {
        w.iter().flat_map(|&a| self.images[a].iter().copied()).collect()
    }

    /// `(self ∘ other)(α) = self(other(α))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let images = other.images.iter().map(|w| self.apply(w)).collect();
        Substitution { labels: self.labels.clone(), images }
    }

    /// `S(α, β)` = number of `α` in `ζ(β)`.
    pub fn matrix(&self) -> CocycleMatrix {
        let d = self.d();
        let mut m = CocycleMatrix::zeros(d);
        for (b, w) in self.images.iter().enumerate() {
            for &a in w {
                let v = m.get(a, b) + 1;
                m.set(a, b, v);
            }
        }
        m
    }

    /// Every letter occurs in some image and some image has length above one.
    pub fn is_admissible(&self) -> bool {
        let mut seen = vec![false; self.d()];
        for w in &self.images {
            for &a in w {
                seen[a] = true;
            }
        }
        seen.iter().all(|&s| s) && self.images.iter().any(|w| w.len() > 1)
    }

    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Good return words: `v` beginning with `c` such that `vc` occurs in
    /// every image. Such `vc` is a factor of the shortest image, so scanning
    /// its factors is exhaustive.
    pub fn good_return_words(&self) -> Vec<Word> {
        let shortest = self.images.iter().min_by_key(|w| w.len()).expect("nonempty alphabet");
        let mut found = BTreeSet::new();
        for i in 0..shortest.len() {
            for j in i + 2..=shortest.len() {
                let u = &shortest[i..j];
                if u[0] == u[u.len() - 1] && self.images.iter().all(|w| occurs(u, w)) {
                    found.insert(u[..u.len() - 1].to_vec());
                }
            }
        }
        found.into_iter().collect()
    }

    pub fn format_word(&self, w: &[usize]) -> String {
        format_word(&self.labels, w)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        parse_word(&self.labels, s)
    }
}

/// Whether `u` is a factor of `w`.
pub fn occurs(u: &[usize], w: &[usize]) -> bool {
    u.is_empty() || w.windows(u.len()).any(|x| x == u)
}

/// Abelianization `ℓ(v)`.
pub fn population_vector(v: &[usize], d: usize) -> Vec<i64> {
    let mut out = vec![0; d];
    for &a in v {
        out[a] += 1;
    }
    out
}

/// `|v|_s = ⟨ℓ(v), s⟩`.
pub fn tiling_length(v: &[usize], s: &[f64]) -> f64 {
    v.iter().map(|&a| s[a]).sum()
}

/// `|v|_s` for an integer weight vector.
pub fn tiling_length_int(v: &[usize], s: &[BigInt]) -> BigInt {
    v.iter().map(|&a| &s[a]).sum()
}

fn single_char(labels: &[String]) -> bool {
    labels.iter().all(|l| l.chars().count() == 1)
}

pub fn format_word(labels: &[String], w: &[usize]) -> String {
    let sep = if single_char(labels) { "" } else { " " };
    w.iter().map(|&a| labels[a].as_str()).collect::<Vec<_>>().join(sep)
}

pub fn parse_word(labels: &[String], s: &str) -> Result<Word> {
    let find = |t: &str| {
        labels.iter().position(|l| l == t).ok_or_else(|| Error::InvalidArgument(format!("unknown letter {t:?}")))
    };
    if single_char(labels) && !s.contains(' ') {
        s.chars().map(|c| find(&c.to_string())).collect()
    } else {
        s.split_whitespace().map(find).collect()
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, String> =
            self.labels.iter().zip(&self.images).map(|(l, w)| (l.as_str(), self.format_word(w))).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Substitution {
    /// Labels are taken in sorted key order.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        let labels: Vec<String> = map.keys().cloned().collect();
        let images = map
            .values()
            .map(|w| parse_word(&labels, w))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Substitution::new(labels, images).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use crate::renormalize::path_matrix;

    fn ab() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    fn fib() -> Substitution {
        Substitution::new(ab(), vec![vec![0, 1], vec![0]]).unwrap()
    }

    #[test]
    fn fibonacci_square() {
        let f2 = fib().compose(&fib());
        assert_eq!(f2.format_word(f2.image(0)), "ABA");
        assert_eq!(f2.format_word(f2.image(1)), "AB");
        assert_eq!(fib().matrix(), CocycleMatrix::from_rows(&[vec![1, 1], vec![1, 0]]));
        assert_eq!(f2.matrix(), CocycleMatrix::from_rows(&[vec![2, 1], vec![1, 1]]));
        assert_eq!(fib().compose(&Substitution::identity(ab())), fib());
    }

    #[test]
    fn swap_top_step() {
        let swap: Permutation = "A B / B A".parse().unwrap();
        let path = RauzyPath::from_kinds(&swap, &[StepKind::Top]);
        let z = Substitution::from_path(&path);
        assert_eq!(z.format_word(z.image(0)), "AB");
        assert_eq!(z.format_word(z.image(1)), "B");
        assert_eq!(z.matrix(), path_matrix(&path).unwrap().transpose());
    }

    #[test]
    fn fibonacci_has_no_good_return_word() {
        assert!(fib().good_return_words().is_empty());
    }

    #[test]
    fn good_return_words_of_square() {
        // images ABA and AB: only "AB"… has no repeated end letter; "ABA" is
        // not inside "AB"
        assert!(fib().compose(&fib()).good_return_words().is_empty());
        let z = Substitution::new(ab(), vec![vec![0, 1, 0, 0], vec![0, 0, 1]]).unwrap();
        let gr = z.good_return_words();
        assert_eq!(gr, vec![vec![0]]);
    }

    #[test]
    fn population_and_length() {
        assert_eq!(population_vector(&[0, 1, 0], 2), vec![2, 1]);
        assert_eq!(tiling_length(&[0, 1, 0], &[1.0, 1.0]), 3.0);
        assert_eq!(population_vector(&[], 2), vec![0, 0]);
        assert_eq!(tiling_length(&[], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&fib()).unwrap();
        assert_eq!(s, r#"{"A":"AB","B":"A"}"#);
        let back: Substitution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fib());
    }
}
