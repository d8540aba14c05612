//! Rauzy classes, the intersection form `Ω_π`, and loop searches.

mod search;

pub use search::{find_good_word, find_positive_loop, is_simple, GoodWord};

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{in_column_space, kernel_basis, rank, rref};
use crate::perm::{Permutation, StepKind};

/// A Rauzy class with vertices in canonical form (top line `A B C …`).
#[derive(Clone, Debug, Serialize)]
pub struct RauzyDiagram {
    /// The permutation the class was generated from, as given.
    pub start: Permutation,
    pub vertices: Vec<Permutation>,
    /// `(from, kind, to)` as vertex indices.
    pub edges: Vec<(usize, StepKind, usize)>,
    /// Smallest canonical vertex string; equal for equal classes.
    pub class_id: String,
}

/// Breadth-first closure of `perm` under both moves.
pub fn rauzy_class(perm: &Permutation) -> Result<RauzyDiagram> {
    if !perm.is_irreducible() {
        return Err(Error::ReduciblePermutation);
    }
    let (vertices, succ) = closure(&perm.canonical(), |p| p.canonical());
    let edges = succ
        .iter()
        .enumerate()
        .flat_map(|(i, s)| [(i, StepKind::Top, s[0]), (i, StepKind::Bottom, s[1])])
        .collect();
    let class_id = vertices.iter().map(|v| v.to_string()).min().unwrap();
    Ok(RauzyDiagram { start: perm.clone(), vertices, edges, class_id })
}

/// Closure under both moves after normalizing with `key`; returns vertices
/// and `[top, bottom]` successor indices.
pub(crate) fn closure(start: &Permutation, key: impl Fn(&Permutation) -> Permutation) -> (Vec<Permutation>, Vec<[usize; 2]>) {
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    let mut vertices = vec![start.clone()];
    index.insert(start.clone(), 0);
    let mut succ = vec![];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut s = [0; 2];
        for (slot, kind) in [StepKind::Top, StepKind::Bottom].into_iter().enumerate() {
            let next = key(&vertices[i].rauzy_move(kind));
            let j = *index.entry(next.clone()).or_insert_with(|| {
                vertices.push(next);
                queue.push_back(vertices.len() - 1);
                vertices.len() - 1
            });
            s[slot] = j;
        }
        if succ.len() <= i {
            succ.resize(i + 1, [0; 2]);
        }
        succ[i] = s;
    }
    (vertices, succ)
}

impl RauzyDiagram {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, perm: &Permutation) -> bool {
        let c = perm.canonical();
        self.vertices.contains(&c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "class_id": self.class_id,
            "start": self.start.to_string(),
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(a, k, b)| serde_json::json!([a, k.letter().to_string(), b])).collect::<Vec<_>>(),
        })
    }

    /// Graphviz text.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph rauzy {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{v}\"];");
        }
        for (a, k, b) in &self.edges {
            let _ = writeln!(s, "  v{a} -> v{b} [label=\"{}\"];", k.letter());
        }
        s.push_str("}\n");
        s
    }
}

/// Some vertex of the class is a rotation permutation.
pub fn is_rotation_class(perm: &Permutation) -> Result<bool> {
    Ok(rauzy_class(perm)?.vertices.iter().any(Permutation::is_rotation))
}

/// `Ω_π` indexed by labels.
pub fn omega(perm: &Permutation) -> Vec<Vec<i64>> {
    let d = perm.d();
    let mut m = vec![vec![0i64; d]; d];
    for a in 0..d {
        for b in 0..d {
            let (ta, tb) = (perm.top_pos(a), perm.top_pos(b));
            let (ba, bb) = (perm.bottom_pos(a), perm.bottom_pos(b));
            m[a][b] = if ta < tb && ba > bb {
                1
            } else if ta > tb && ba < bb {
                -1
            } else {
                0
            };
        }
    }
    m
}

/// Intersection-form data of an irreducible permutation.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceData {
    pub omega: Vec<Vec<i64>>,
    pub genus: usize,
    /// Number of singularities, counted as cycles of the boundary permutation.
    pub kappa: usize,
    /// Integral basis of `H(π) = image(Ω_π)`.
    pub h_basis: Vec<Vec<BigInt>>,
    /// Integral basis of `N(π) = ker(Ω_π)`.
    pub n_basis: Vec<Vec<BigInt>>,
}

/// Cycles of `σ(j) = p⁻¹(p(j) + 1) − 1` on `{0, …, d}`, with `p` the
/// monodromy extended by `p(0) = 0`, `p(d+1) = d+1` (1-based).
pub fn singularity_count(perm: &Permutation) -> usize {
    let d = perm.d();
    let mono = perm.monodromy();
    let mut p = vec![0usize; d + 2];
    for i in 0..d {
        p[i + 1] = mono[i] + 1;
    }
    p[d + 1] = d + 1;
    let mut inv = vec![0usize; d + 2];
    for (j, &v) in p.iter().enumerate() {
        inv[v] = j;
    }
    let sigma = |j: usize| inv[p[j] + 1] - 1;
    let mut seen = vec![false; d + 1];
    let mut cycles = 0;
    for j in 0..=d {
        if seen[j] {
            continue;
        }
        cycles += 1;
        let mut k = j;
        while !seen[k] {
            seen[k] = true;
            k = sigma(k);
        }
    }
    cycles
}

pub fn surface_data(perm: &Permutation) -> Result<SurfaceData> {
    if !perm.is_irreducible() {
        return Err(Error::ReduciblePermutation);
    }
    let om = omega(perm);
    let r = rank(&om);
    let d = perm.d();
    let kappa = singularity_count(perm);
    if !r.is_multiple_of(2) || d != r + kappa - 1 {
        return Err(Error::InvalidPermutation(format!("inconsistent surface data: rank {r}, kappa {kappa}")));
    }
    let mut rows: Vec<Vec<num_rational::BigRational>> = om
        .iter()
        .map(|row| row.iter().map(|&x| num_rational::BigRational::from_integer(x.into())).collect())
        .collect();
    let pivots = rref(&mut rows);
    let h_basis = pivots.iter().map(|&c| om.iter().map(|row| BigInt::from(row[c])).collect()).collect();
    Ok(SurfaceData { genus: r / 2, kappa, h_basis, n_basis: kernel_basis(&om), omega: om })
}

/// `(1, …, 1) ∉ image(Ω_π)`.
pub fn is_type_w(perm: &Permutation) -> Result<bool> {
    if !perm.is_irreducible() {
        return Err(Error::ReduciblePermutation);
    }
    Ok(!in_column_space(&omega(perm), &vec![1; perm.d()]))
}

/// Summary used by the command line and the FFI layer.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub permutation: String,
    pub canonical: String,
    pub rotation_class: bool,
    pub genus: usize,
    pub kappa: usize,
    pub type_w: bool,
    pub class_size: usize,
}

pub fn classify(perm: &Permutation) -> Result<Classification> {
    let class = rauzy_class(perm)?;
    let sd = surface_data(perm)?;
    Ok(Classification {
        permutation: perm.to_string(),
        canonical: perm.canonical().to_string(),
        rotation_class: class.vertices.iter().any(Permutation::is_rotation),
        genus: sd.genus,
        kappa: sd.kappa,
        type_w: is_type_w(perm)?,
        class_size: class.len(),
    })
}

/// All Rauzy classes on `d` letters keyed by class id.
pub fn all_classes(d: usize) -> BTreeMap<String, RauzyDiagram> {
    let mut out = BTreeMap::new();
    for p in Permutation::all_irreducible(d) {
        let c = rauzy_class(&p).expect("irreducible");
        out.entry(c.class_id.clone()).or_insert(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn small_classes() {
        assert_eq!(rauzy_class(&p("A B / B A")).unwrap().len(), 1);
        let c3 = rauzy_class(&p("A B C / C B A")).unwrap();
        assert_eq!(c3.len(), Permutation::all_irreducible(3).len());
        assert_eq!(rauzy_class(&p("A B C / A C B")).unwrap_err(), Error::ReduciblePermutation);
        let sizes: Vec<usize> = all_classes(4).values().map(RauzyDiagram::len).collect();
        let mut sizes = sizes;
        sizes.sort();
        assert_eq!(sizes, vec![6, 7]);
    }

    #[test]
    fn rotation_classes() {
        for q in Permutation::all_irreducible(3) {
            assert!(is_rotation_class(&q).unwrap());
        }
        assert!(is_rotation_class(&p("A B / B A")).unwrap());
        assert!(!is_rotation_class(&Permutation::symmetric(4)).unwrap());
    }

    #[test]
    fn surface_examples() {
        let s2 = surface_data(&p("A B / B A")).unwrap();
        assert_eq!(s2.omega, vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!((s2.genus, s2.kappa), (1, 1));
        let s4 = surface_data(&Permutation::symmetric(4)).unwrap();
        assert_eq!((s4.genus, s4.kappa), (2, 1));
        assert!(s4.n_basis.is_empty());
        let s3 = surface_data(&Permutation::symmetric(3)).unwrap();
        assert_eq!((s3.genus, s3.kappa), (1, 2));
        assert_eq!(s3.n_basis.len(), 1);
    }

    #[test]
    fn type_w_examples() {
        assert!(!is_type_w(&p("A B / B A")).unwrap());
        assert!(!is_type_w(&Permutation::symmetric(4)).unwrap());
        assert!(is_type_w(&Permutation::symmetric(3)).unwrap());
    }

    #[test]
    fn dot_export() {
        let dot = rauzy_class(&Permutation::symmetric(3)).unwrap().to_dot();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 6);
    }
}
