//! Vectors, square matrices and the ℓ1 / ℓ∞ norms.
//!
//! Coordinates are 0-based in this API. Every container holds scalars of a
//! single [`Mode`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

fn uniform_mode<'a>(mut items: impl Iterator<Item = &'a Scalar>) -> Result<Mode> {
    let first = items.next().map(Scalar::mode).ok_or(Error::Empty("scalar sequence"))?;
    for s in items {
        if s.mode() != first {
            return Err(Error::MixedModes {
                expected: first,
                found: s.mode(),
            });
        }
    }
    Ok(first)
}

/// A nonempty coordinate vector. Ordering is lexicographic, which gives
/// levels and reports a deterministic layout.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Vector {
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        uniform_mode(coords.iter())?;
        Ok(Vector { coords })
    }

    pub fn zeros(dim: usize, mode: Mode) -> Self {
        assert!(dim > 0, "vectors have positive dimension");
        Vector {
            coords: vec![Scalar::zero(mode); dim],
        }
    }

    /// Canonical basis vector with a one at 0-based position `index`.
    pub fn unit(dim: usize, index: usize, mode: Mode) -> Self {
        let mut v = Self::zeros(dim, mode);
        v.coords[index] = Scalar::one(mode);
        v
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Vector {
            coords: values.iter().map(|&x| Scalar::from_int(Mode::Exact, x)).collect(),
        }
    }

    pub fn from_f64s(values: &[f64]) -> Self {
        Vector {
            coords: values.iter().map(|&x| Scalar::float(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn mode(&self) -> Mode {
        self.coords[0].mode()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn get(&self, index: usize) -> &Scalar {
        &self.coords[index]
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.coords.iter().any(Scalar::is_negative)
    }

    pub fn l1_norm(&self) -> Scalar {
        let zero = Scalar::zero(self.mode());
        self.coords.iter().fold(zero, |acc, x| acc + x.abs())
    }

    pub fn linf_norm(&self) -> Scalar {
        let zero = Scalar::zero(self.mode());
        self.coords
            .iter()
            .map(Scalar::abs)
            .fold(zero, |acc, x| if x > acc { x } else { acc })
    }

    pub fn scale(&self, factor: &Scalar) -> Vector {
        Vector {
            coords: self.coords.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &Vector) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }

    /// The sub-vector of coordinates `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> Vector {
        Vector {
            coords: self.coords[start..start + len].to_vec(),
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

pub fn l1_norm(x: &Vector) -> Scalar {
    x.l1_norm()
}

pub fn linf_norm(x: &Vector) -> Scalar {
    x.linf_norm()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("matrix"));
        }
        check_dim(n * n, entries.len())?;
        uniform_mode(entries.iter())?;
        Ok(Matrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            entries.extend(row);
        }
        Self::new(n, entries)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(Mode::Exact, x)).collect())
            .collect();
        Self::from_rows(rows).expect("well-formed integer matrix")
    }

    pub fn identity(n: usize, mode: Mode) -> Self {
        let mut m = Self::zero(n, mode);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one(mode);
        }
        m
    }

    pub fn zero(n: usize, mode: Mode) -> Self {
        assert!(n > 0, "matrices have positive dimension");
        Matrix {
            n,
            entries: vec![Scalar::zero(mode); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.entries[0].mode()
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.n + col]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.n)
    }

    pub fn column(&self, col: usize) -> Vector {
        Vector {
            coords: (0..self.n).map(|r| self.get(r, col).clone()).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.entries.iter().any(Scalar::is_negative)
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.n, x.dim())?;
        let coords = self
            .rows()
            .map(|row| dot(row, x.coords()))
            .collect();
        Ok(Vector { coords })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Scalar::zero(self.mode());
                for l in 0..n {
                    let (a, b) = (self.get(i, l), other.get(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                entries.push(acc);
            }
        }
        Ok(Matrix { n, entries })
    }

    /// Maximum absolute column sum.
    pub fn induced_l1_norm(&self) -> Scalar {
        let zero = Scalar::zero(self.mode());
        (0..self.n)
            .map(|j| self.rows().fold(Scalar::zero(self.mode()), |acc, row| acc + row[j].abs()))
            .fold(zero, |acc, s| if s > acc { s } else { acc })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
    }
}

fn dot(row: &[Scalar], x: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero(row[0].mode());
    for (a, b) in row.iter().zip(x) {
        if !a.is_zero() && !b.is_zero() {
            acc = acc + a * b;
        }
    }
    acc
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

pub fn induced_l1_norm(m: &Matrix) -> Scalar {
    m.induced_l1_norm()
}

pub fn mat_apply(m: &Matrix, x: &Vector) -> Result<Vector> {
    m.apply(x)
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.mul(b)
}

/// A basis of the span of `vectors`, by exact Gaussian elimination. The
/// result is in reduced row echelon form, so it is empty iff the span is
/// `{0}`.
pub fn span_basis(vectors: &[Vector]) -> Result<Vec<Vector>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim();
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        check_dim(dim, v.dim())?;
        if v.mode() != Mode::Exact {
            return Err(Error::ExactRequired("span_basis"));
        }
        rows.push(v.coords.clone());
    }

    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Scalar::one(Mode::Exact) / &rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&factor * p);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    Ok(rows.into_iter().map(|coords| Vector { coords }).collect())
}
