//! Sparse bilinear maps `B: R^n x R^n -> R^n` and bilinear systems `(B, v)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::{Mode, Scalar};

/// One coefficient: `B(x, y)[out] += coeff * x[left] * y[right]` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub out: usize,
    pub left: usize,
    pub right: usize,
    pub coeff: Scalar,
}

impl Term {
    pub fn new(out: usize, left: usize, right: usize, coeff: Scalar) -> Self {
        Term {
            out,
            left,
            right,
            coeff,
        }
    }

    pub fn key(&self) -> (usize, usize, usize) {
        (self.out, self.left, self.right)
    }
}

/// Bilinear map stored as sorted, duplicate-free, zero-free coefficient
/// triples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinearMap {
    dim: usize,
    terms: Vec<Term>,
}

impl BilinearMap {
    /// Builds a map from 0-based terms. Zero coefficients are dropped;
    /// repeated `(out, left, right)` keys and out-of-range indices are errors.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("bilinear map dimension"));
        }
        let mut by_key = BTreeMap::new();
        let mut mode = None;
        for term in terms {
            for index in [term.out, term.left, term.right] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: index + 1,
                        max: dim,
                    });
                }
            }
            match mode {
                None => mode = Some(term.coeff.mode()),
                Some(m) if m != term.coeff.mode() => {
                    return Err(Error::MixedModes {
                        expected: m,
                        found: term.coeff.mode(),
                    })
                }
                _ => {}
            }
            let key = term.key();
            if by_key.insert(key, term).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate coefficient for (out, i, j) = ({}, {}, {})",
                    key.0 + 1,
                    key.1 + 1,
                    key.2 + 1
                )));
            }
        }
        let terms = by_key.into_values().filter(|t| !t.coeff.is_zero()).collect();
        Ok(BilinearMap { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    /// Mode of the stored coefficients; `None` for the zero map.
    pub fn mode(&self) -> Option<Mode> {
        self.terms.first().map(|t| t.coeff.mode())
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.terms.iter().any(|t| t.coeff.is_negative())
    }

    pub fn coefficient(&self, out: usize, left: usize, right: usize) -> Option<&Scalar> {
        self.terms
            .binary_search_by(|t| t.key().cmp(&(out, left, right)))
            .ok()
            .map(|i| &self.terms[i].coeff)
    }

    /// Copy with one coefficient replaced; a zero value removes the term.
    pub fn with_coefficient(&self, out: usize, left: usize, right: usize, coeff: Scalar) -> Result<Self> {
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| t.key() != (out, left, right))
            .cloned()
            .collect();
        terms.push(Term::new(out, left, right, coeff));
        Self::new(self.dim, terms)
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        for v in [x, y] {
            if v.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.dim(),
                });
            }
        }
        let mut out = Vector::zeros(self.dim, x.mode()).into_coords();
        for term in &self.terms {
            let (a, b) = (x.get(term.left), y.get(term.right));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let slot = &mut out[term.out];
            *slot = &*slot + &(&(&term.coeff * a) * b);
        }
        Vector::new(out)
    }
}

pub fn eval(map: &BilinearMap, x: &Vector, y: &Vector) -> Result<Vector> {
    map.eval(x, y)
}

/// A bilinear map together with its initial vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearSystem {
    map: BilinearMap,
    initial: Vector,
}

impl BilinearSystem {
    pub fn new(map: BilinearMap, initial: Vector) -> Result<Self> {
        if initial.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: initial.dim(),
            });
        }
        if let Some(mode) = map.mode() {
            if mode != initial.mode() {
                return Err(Error::MixedModes {
                    expected: mode,
                    found: initial.mode(),
                });
            }
        }
        Ok(BilinearSystem { map, initial })
    }

    pub fn map(&self) -> &BilinearMap {
        &self.map
    }

    pub fn initial(&self) -> &Vector {
        &self.initial
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn mode(&self) -> Mode {
        self.initial.mode()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.map.is_nonnegative() && self.initial.is_nonnegative()
    }

    /// `(B, v / alpha)`.
    pub fn scale_initial(&self, alpha: &Scalar) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {alpha}")));
        }
        let inv = Scalar::one(alpha.mode()) / alpha;
        Self::new(self.map.clone(), self.initial.scale(&inv))
    }
}

pub fn is_nonnegative(sys: &BilinearSystem) -> bool {
    sys.is_nonnegative()
}

pub fn scale_initial(sys: &BilinearSystem, alpha: &Scalar) -> Result<BilinearSystem> {
    sys.scale_initial(alpha)
}
