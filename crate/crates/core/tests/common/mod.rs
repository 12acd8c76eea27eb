#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bilinear_jsr::{BilinearMap, BilinearSystem, Matrix, MatrixSet, Mode, Scalar, Term, Vector};
use rand::Rng;

/// `p/q` with `|p| <= 9`, `1 <= q <= 9`; nonnegative when asked.
pub fn rational(rng: &mut impl Rng, nonnegative: bool) -> Scalar {
    let p = if nonnegative { rng.gen_range(0..=9) } else { rng.gen_range(-9..=9) };
    Scalar::ratio(p, rng.gen_range(1..=9))
}

/// Like [`rational`] but zero about a third of the time, so products stay
/// sparse enough to be interesting.
pub fn sparse_rational(rng: &mut impl Rng, nonnegative: bool) -> Scalar {
    if rng.gen_bool(0.35) {
        Scalar::zero(Mode::Exact)
    } else {
        rational(rng, nonnegative)
    }
}

pub fn matrix(rng: &mut impl Rng, n: usize, nonnegative: bool) -> Matrix {
    let entries = (0..n * n).map(|_| sparse_rational(rng, nonnegative)).collect();
    Matrix::new(n, entries).unwrap()
}

/// `n <= 3`, `1..=4` matrices, nonnegative rational entries.
pub fn matrix_set(rng: &mut impl Rng) -> MatrixSet {
    let n = rng.gen_range(1..=3);
    let count = rng.gen_range(1..=4);
    MatrixSet::new((0..count).map(|_| matrix(rng, n, true)).collect()).unwrap()
}

pub fn vector(rng: &mut impl Rng, n: usize, nonnegative: bool) -> Vector {
    Vector::new((0..n).map(|_| rational(rng, nonnegative)).collect()).unwrap()
}

/// Dimension `1..=max_dim`, up to `max_terms` coefficient triples.
pub fn system(rng: &mut impl Rng, max_dim: usize, max_terms: usize, nonnegative: bool) -> BilinearSystem {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(1..=max_terms);
    let mut terms = BTreeMap::new();
    for _ in 0..count {
        let key = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        terms.insert(key, rational(rng, nonnegative));
    }
    let map = BilinearMap::new(n, terms.into_iter().map(|((o, i, j), c)| Term::new(o, i, j, c))).unwrap();
    BilinearSystem::new(map, vector(rng, n, nonnegative)).unwrap()
}

/// Brute-force check that every product of length `len` vanishes.
pub fn all_products_vanish(mats: &[Matrix], len: usize) -> bool {
    let mut frontier: BTreeSet<Matrix> = mats.iter().cloned().collect();
    for _ in 1..len {
        frontier = frontier
            .iter()
            .flat_map(|p| mats.iter().map(move |m| p.mul(m).unwrap()))
            .collect();
    }
    frontier.iter().all(Matrix::is_zero)
}
