//! Big-integer square matrices and exact linear algebra over ℚ and ℤ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CocycleMatrix {
    d: usize,
    a: Vec<BigInt>,
}

impl CocycleMatrix {
    pub fn zeros(d: usize) -> Self {
        CocycleMatrix { d, a: vec![BigInt::zero(); d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = CocycleMatrix::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = BigInt::one();
        }
        m
    }

    /// `I + E_{ij}`.
    pub fn elementary(d: usize, i: usize, j: usize) -> Self {
        let mut m = CocycleMatrix::identity(d);
        m.a[i * d + j] += 1;
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let d = rows.len();
        let a = rows.iter().flat_map(|r| {
            assert_eq!(r.len(), d, "matrix must be square");
            r.iter().map(|&x| BigInt::from(x))
        });
        CocycleMatrix { d, a: a.collect() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.a[i * self.d + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.a[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.d).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &CocycleMatrix) -> CocycleMatrix {
        let d = self.d;
        let mut out = CocycleMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let y = o.get(k, j);
                    if !y.is_zero() {
                        out.a[i * d + j] += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> CocycleMatrix {
        let d = self.d;
        let mut out = CocycleMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.a[j * d + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.a.iter().all(|x| x.is_positive())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a.iter().all(|x| !x.is_negative())
    }

    pub fn min_entry(&self) -> BigInt {
        self.a.iter().min().cloned().unwrap_or_default()
    }

    pub fn max_entry(&self) -> BigInt {
        self.a.iter().max().cloned().unwrap_or_default()
    }

    pub fn row_sums(&self) -> Vec<BigInt> {
        (0..self.d).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<BigInt> {
        (0..self.d).map(|j| (0..self.d).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Induced ℓ¹ operator norm: the largest column sum of absolute values.
    pub fn norm1(&self) -> BigInt {
        (0..self.d).map(|j| (0..self.d).map(|i| self.get(i, j).abs()).sum::<BigInt>()).max().unwrap_or_default()
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let d = self.d;
        let mut m: Vec<Vec<BigInt>> = (0..d).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if m[k][k].is_zero() {
                match (k + 1..d).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[d - 1][d - 1]
    }

    /// Row-vector action `v ↦ v·M`.
    pub fn row_action(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.d)
            .map(|j| {
                (0..self.d).fold(Scalar::zero(), |acc, i| {
                    let m = self.get(i, j);
                    if m.is_zero() {
                        acc
                    } else {
                        acc.add(&v[i].mul(&Scalar::Exact(BigRational::from_integer(m.clone()))))
                    }
                })
            })
            .collect()
    }

    /// Column-vector action `h ↦ M·h`.
    pub fn col_action(&self, h: &[BigInt]) -> Vec<BigInt> {
        (0..self.d).map(|i| self.row(i).iter().zip(h).map(|(m, x)| m * x).sum()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.d).map(|i| self.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.d).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Display for CocycleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.d)
            .map(|i| format!("[{}]", self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl Serialize for CocycleMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CocycleMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in &rows {
            if r.len() != n {
                return Err(serde::de::Error::custom("matrix must be square"));
            }
            for x in r {
                a.push(x.parse::<BigInt>().map_err(serde::de::Error::custom)?);
            }
        }
        Ok(CocycleMatrix { d: n, a })
    }
}

/// Reduced row echelon form over ℚ; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
}

/// Rank over ℚ.
pub fn rank(m: &[Vec<i64>]) -> usize {
    rref(&mut to_rational(m)).len()
}

/// Integral basis of the right kernel `{x : M x = 0}`.
pub fn kernel_basis(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = to_rational(m);
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][f].clone();
            }
            clear_denominators(&v)
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Whether `b` lies in the column space of `m`, decided exactly.
pub fn in_column_space(m: &[Vec<i64>], b: &[i64]) -> bool {
    let aug: Vec<Vec<i64>> = m.iter().zip(b).map(|(r, &x)| r.iter().copied().chain([x]).collect()).collect();
    rank(&aug) == rank(m)
}

/// Index of the lattice spanned by `vectors` in ℤ^d, `None` if not of full rank.
pub fn lattice_index(vectors: &[Vec<i64>], d: usize) -> Option<BigInt> {
    let mut rows: Vec<Vec<BigInt>> =
        vectors.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut det = BigInt::one();
    let mut r0 = 0;
    for c in 0..d {
        loop {
            let nz: Vec<usize> = (r0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.is_empty() {
                return None;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            rows.swap(r0, p);
            let mut done = true;
            for i in r0 + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r0][c]);
                for j in c..d {
                    let v = &rows[r0][j] * &q;
                    rows[i][j] -= v;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        det *= rows[r0][c].abs();
        r0 += 1;
    }
    Some(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_products() {
        let a = CocycleMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(a.det(), BigInt::from(1));
        let b = CocycleMatrix::from_rows(&[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        assert_eq!(b.det(), BigInt::from(1));
        assert_eq!(a.mul(&CocycleMatrix::identity(2)), a);
        assert_eq!(a.norm1(), BigInt::from(3));
    }

    #[test]
    fn lattice_index_examples() {
        assert_eq!(lattice_index(&[vec![1, 0], vec![0, 1]], 2), Some(BigInt::from(1)));
        assert_eq!(lattice_index(&[vec![2, 0], vec![0, 1]], 2), Some(BigInt::from(2)));
        assert_eq!(lattice_index(&[vec![2, 1], vec![1, 1], vec![3, 2]], 2), Some(BigInt::from(1)));
        assert_eq!(lattice_index(&[vec![1, 1], vec![2, 2]], 2), None);
        assert_eq!(lattice_index(&[vec![4, 6], vec![6, 9], vec![2, 4]], 2), Some(BigInt::from(2)));
    }

    #[test]
    fn kernel_of_reversal_form() {
        let omega = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]];
        assert_eq!(rank(&omega), 2);
        let k = kernel_basis(&omega);
        assert_eq!(k.len(), 1);
        assert!(!in_column_space(&omega, &[1, 1, 1]));
    }

    #[test]
    fn serde_roundtrip() {
        let a = CocycleMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["2","1"],["1","1"]]"#);
        let b: CocycleMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
