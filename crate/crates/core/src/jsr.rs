//! Joint spectral radius of a finite matrix set: product enumeration,
//! finite-depth brackets and the zero-JSR decision.
//!
//! For every `t`, `max_{P in Σ^t} ||P||_1^(1/t)` is an upper bound on
//! `ρ(Σ)` (the induced ℓ1 norm is submultiplicative) and
//! `ρ_spec(P)^(1/t)` is a lower bound for every `P in Σ^t`.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::{span_basis, Matrix, Vector};
use crate::scalar::{Mode, Scalar};

/// A nonempty list of same-size, same-mode square matrices. Order and
/// repetitions are preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSet {
    n: usize,
    mats: Vec<Matrix>,
}

impl MatrixSet {
    pub fn new(mats: Vec<Matrix>) -> Result<Self> {
        let first = mats.first().ok_or(Error::Empty("matrix set"))?;
        let (n, mode) = (first.n(), first.mode());
        for m in &mats[1..] {
            if m.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.n(),
                });
            }
            if m.mode() != mode {
                return Err(Error::MixedModes {
                    expected: mode,
                    found: m.mode(),
                });
            }
        }
        Ok(MatrixSet { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn mode(&self) -> Mode {
        self.mats[0].mode()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mats.iter().all(Matrix::is_nonnegative)
    }

    fn distinct(&self) -> Vec<Matrix> {
        let set: BTreeSet<&Matrix> = self.mats.iter().collect();
        set.into_iter().cloned().collect()
    }
}

/// Distinct products of exactly `t` matrices, in sorted order.
pub fn products(set: &MatrixSet, t: usize) -> Result<Vec<Matrix>> {
    products_with(set, t, &Limits::default())
}

pub fn products_with(set: &MatrixSet, t: usize, limits: &Limits) -> Result<Vec<Matrix>> {
    let mut out = None;
    for_each_length(set, t, limits, |len, level| {
        if len == t {
            out = Some(level.to_vec());
        }
        Ok(())
    })?;
    Ok(out.expect("t >= 1 visits length t"))
}

/// Visits the distinct product sets of lengths `1..=t_max` in order.
fn for_each_length(
    set: &MatrixSet,
    t_max: usize,
    limits: &Limits,
    mut visit: impl FnMut(usize, &[Matrix]) -> Result<()>,
) -> Result<()> {
    if t_max == 0 {
        return Err(Error::InvalidArgument("product length must be at least 1".into()));
    }
    let generators = set.distinct();
    let mut level = generators.clone();
    visit(1, &level)?;
    for len in 2..=t_max {
        let count = level.len().saturating_mul(generators.len());
        if count > limits.max_products {
            return Err(Error::ResourceCap {
                what: "matrix products",
                count,
                cap: limits.max_products,
            });
        }
        let next: BTreeSet<Matrix> = level
            .par_iter()
            .flat_map_iter(|p| generators.iter().map(move |g| p.mul(g).expect("uniform dimension")))
            .collect();
        level = next.into_iter().collect();
        visit(len, &level)?;
    }
    Ok(())
}

fn max_norm(level: &[Matrix]) -> Scalar {
    level
        .par_iter()
        .map(Matrix::induced_l1_norm)
        .max()
        .expect("product sets are nonempty")
}

/// `max_{P in Σ^t} ||P||_1`, exact when the set is.
pub fn max_product_norm(set: &MatrixSet, t: usize) -> Result<Scalar> {
    Ok(max_norm(&products(set, t)?))
}

pub fn jsr_upper(set: &MatrixSet, t: usize) -> Result<f64> {
    jsr_upper_with(set, t, &Limits::default())
}

pub fn jsr_upper_with(set: &MatrixSet, t: usize, limits: &Limits) -> Result<f64> {
    Ok(max_norm(&products_with(set, t, limits)?).root(t))
}

const MAX_POWER_STEPS: usize = 200;

/// Perron root of a nonnegative matrix to within `tol`.
///
/// The matrix is split into strongly connected blocks (the spectral radius
/// of a nonnegative matrix is the largest over its irreducible diagonal
/// blocks). Each block is shifted by `ε·I` with `ε = tol / 10`, which makes
/// it primitive, and iterated from the all-ones vector until the
/// Collatz–Wielandt ratios `(My)_i / y_i` span less than `tol`. The result is
/// the midpoint minus `ε`. Iterates are produced with repeated squaring, so
/// step `k` sees `M^(2^k - 1)` applied to the start vector.
pub fn spectral_radius(m: &Matrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !m.is_nonnegative() {
        return Err(Error::NegativeEntry("spectral_radius"));
    }
    let a = m.to_f64_rows();
    let n = m.n();
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] != 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut best = 0.0f64;
    for component in tarjan_scc(&graph) {
        let idx: Vec<usize> = component.iter().map(|&node| graph[node]).collect();
        let value = if idx.len() == 1 {
            a[idx[0]][idx[0]]
        } else {
            let block: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect();
            perron_root_irreducible(&block, tol)?
        };
        best = best.max(value);
    }
    Ok(best)
}

fn perron_root_irreducible(block: &[Vec<f64>], tol: f64) -> Result<f64> {
    let n = block.len();
    let eps = tol / 10.0;
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| block[i][j] + if i == j { eps } else { 0.0 }).collect())
        .collect();
    let mut power = normalized(shifted.clone());
    let mut y = vec![1.0 / n as f64; n];
    let mut prev_width = f64::INFINITY;

    for _ in 0..MAX_POWER_STEPS {
        let my = mat_vec(&shifted, &y);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (num, den) in my.iter().zip(&y) {
            if den.is_nan() || *den <= 0.0 || !num.is_finite() {
                return Err(Error::NonConvergence(MAX_POWER_STEPS));
            }
            let r = num / den;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let width = hi - lo;
        // Past tol, keep refining while it is still paying off.
        if width < tol && (width <= 1e-13 * hi || width >= prev_width) {
            return Ok(((lo + hi) / 2.0 - eps).max(0.0));
        }
        prev_width = width;

        let next = mat_vec(&power, &y);
        let total: f64 = next.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::NonConvergence(MAX_POWER_STEPS));
        }
        y = next.into_iter().map(|v| v / total).collect();
        power = normalized(mat_mat(&power, &power));
    }
    Err(Error::NonConvergence(MAX_POWER_STEPS))
}

fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn mat_mat(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn normalized(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let max = a.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x));
    if max > 0.0 {
        for x in a.iter_mut().flatten() {
            *x /= max;
        }
    }
    a
}

fn max_spectral_root(level: &[Matrix], len: usize, tol: f64) -> Result<f64> {
    let roots = level
        .par_iter()
        .map(|p| spectral_radius(p, tol).map(|r| if r > 0.0 { r.powf(1.0 / len as f64) } else { 0.0 }))
        .collect::<Result<Vec<f64>>>()?;
    Ok(roots.into_iter().fold(0.0, f64::max))
}

/// `max_{P in Σ^1 ∪ ... ∪ Σ^t} ρ_spec(P)^(1/|P|)` for nonnegative sets.
pub fn jsr_lower(set: &MatrixSet, t: usize, tol: f64) -> Result<f64> {
    jsr_lower_with(set, t, tol, &Limits::default())
}

pub fn jsr_lower_with(set: &MatrixSet, t: usize, tol: f64, limits: &Limits) -> Result<f64> {
    if !set.is_nonnegative() {
        return Err(Error::NegativeEntry("jsr_lower"));
    }
    let mut best = 0.0f64;
    for_each_length(set, t, limits, |len, level| {
        best = best.max(max_spectral_root(level, len, tol)?);
        Ok(())
    })?;
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BracketRow {
    pub t: usize,
    /// Running maximum of the spectral lower bounds over lengths `1..=t`.
    pub lower: f64,
    /// `max_{P in Σ^t} ||P||_1^(1/t)` for this `t` alone.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JsrBracket {
    pub rows: Vec<BracketRow>,
}

impl JsrBracket {
    pub fn last(&self) -> &BracketRow {
        self.rows.last().expect("brackets have at least one row")
    }

    /// Smallest upper bound over all rows.
    pub fn best_upper(&self) -> f64 {
        self.rows.iter().map(|r| r.upper).fold(f64::INFINITY, f64::min)
    }
}

pub fn jsr_bracket(set: &MatrixSet, t_max: usize, tol: f64) -> Result<JsrBracket> {
    jsr_bracket_with(set, t_max, tol, &Limits::default())
}

pub fn jsr_bracket_with(set: &MatrixSet, t_max: usize, tol: f64, limits: &Limits) -> Result<JsrBracket> {
    if !set.is_nonnegative() {
        return Err(Error::NegativeEntry("jsr_bracket"));
    }
    let mut rows = Vec::with_capacity(t_max);
    let mut lower = 0.0f64;
    for_each_length(set, t_max, limits, |len, level| {
        lower = lower.max(max_spectral_root(level, len, tol)?);
        let upper = max_norm(level).root(len);
        rows.push(BracketRow { t: len, lower, upper });
        Ok(())
    })?;
    Ok(JsrBracket { rows })
}

/// Decides `ρ(Σ) = 0` exactly.
///
/// With `U_0 = R^n` and `U_{k+1} = span{ M u : M in Σ, u in U_k }`, the space
/// `U_k` is spanned by all `M_1...M_k x`, so every product of length `n`
/// vanishes, which is equivalent to `ρ(Σ) = 0`, iff `U_n = {0}`.
pub fn decide_jsr_zero(set: &MatrixSet) -> Result<bool> {
    if set.mode() != Mode::Exact {
        return Err(Error::ExactRequired("decide_jsr_zero"));
    }
    let n = set.n();
    let mut basis: Vec<Vector> = (0..n).map(|i| Vector::unit(n, i, Mode::Exact)).collect();
    for _ in 0..n {
        let mut images = Vec::with_capacity(basis.len() * set.len());
        for m in set.matrices() {
            for u in &basis {
                images.push(m.apply(u)?);
            }
        }
        basis = span_basis(&images)?;
        if basis.is_empty() {
            return Ok(true);
        }
    }
    Ok(basis.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> MatrixSet {
        MatrixSet::new(vec![
            Matrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            Matrix::from_int_rows(&[&[1, 0], &[1, 1]]),
        ])
        .unwrap()
    }

    fn single(m: Matrix) -> MatrixSet {
        MatrixSet::new(vec![m]).unwrap()
    }

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn matrix_set_validation() {
        assert!(MatrixSet::new(vec![]).is_err());
        let err = MatrixSet::new(vec![Matrix::identity(1, Mode::Exact), Matrix::identity(2, Mode::Exact)]);
        assert!(err.is_err());
        let err = MatrixSet::new(vec![Matrix::identity(1, Mode::Exact), Matrix::identity(1, Mode::Float)]);
        assert!(err.is_err());
    }

    #[test]
    fn product_examples() {
        let id = single(Matrix::identity(2, Mode::Exact));
        for t in 1..5 {
            assert_eq!(products(&id, t).unwrap(), vec![Matrix::identity(2, Mode::Exact)]);
        }
        let two = products(&golden(), 2).unwrap();
        assert!(two.len() <= 4);
        assert!(two.contains(&Matrix::from_int_rows(&[&[2, 1], &[1, 1]])));
        assert!(products(&golden(), 0).is_err());
    }

    #[test]
    fn product_cap() {
        let err = products_with(&golden(), 5, &Limits::uniform(8)).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
    }

    #[test]
    fn upper_examples() {
        assert_eq!(jsr_upper(&single(Matrix::identity(3, Mode::Exact)), 4).unwrap(), 1.0);
        let two = single(Matrix::from_int_rows(&[&[2]]));
        for t in 1..6 {
            assert!((jsr_upper(&two, t).unwrap() - 2.0).abs() < 1e-12);
        }
        assert_eq!(jsr_upper(&golden(), 1).unwrap(), 2.0);
    }

    #[test]
    fn spectral_radius_examples() {
        let tol = 1e-6;
        let r = spectral_radius(&Matrix::identity(3, Mode::Exact), tol).unwrap();
        assert!((r - 1.0).abs() <= tol);
        let r = spectral_radius(&Matrix::from_int_rows(&[&[0, 1], &[0, 0]]), tol).unwrap();
        assert!(r.abs() <= tol);
        let r = spectral_radius(&Matrix::from_int_rows(&[&[2, 1], &[1, 1]]), tol).unwrap();
        assert!((r - (3.0 + 5f64.sqrt()) / 2.0).abs() <= tol);
    }

    #[test]
    fn spectral_radius_reducible_and_periodic() {
        let tol = 1e-9;
        let diag = Matrix::from_int_rows(&[&[1, 0], &[0, 2]]);
        assert!((spectral_radius(&diag, tol).unwrap() - 2.0).abs() <= tol);
        let swap = Matrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        assert!((spectral_radius(&swap, tol).unwrap() - 1.0).abs() <= tol);
        let upper = Matrix::from_int_rows(&[&[1, 5, 0], &[0, 3, 1], &[0, 0, 2]]);
        assert!((spectral_radius(&upper, tol).unwrap() - 3.0).abs() <= tol);
        let cycle = Matrix::from_int_rows(&[&[0, 2, 0], &[0, 0, 2], &[2, 0, 0]]);
        assert!((spectral_radius(&cycle, tol).unwrap() - 2.0).abs() <= tol);
    }

    #[test]
    fn spectral_radius_errors() {
        let neg = Matrix::from_int_rows(&[&[-1]]);
        assert_eq!(spectral_radius(&neg, 1e-6), Err(Error::NegativeEntry("spectral_radius")));
        assert!(spectral_radius(&Matrix::identity(1, Mode::Exact), 0.0).is_err());
    }

    #[test]
    fn lower_examples() {
        let tol = 1e-6;
        assert!((jsr_lower(&single(Matrix::from_int_rows(&[&[2]])), 3, tol).unwrap() - 2.0).abs() <= tol);
        assert!((jsr_lower(&single(Matrix::identity(2, Mode::Exact)), 3, tol).unwrap() - 1.0).abs() <= tol);
        let lower = jsr_lower(&golden(), 2, tol).unwrap();
        assert!((lower - PHI).abs() <= tol);
    }

    #[test]
    fn bracket_examples() {
        let b = jsr_bracket(&single(Matrix::identity(2, Mode::Exact)), 4, 1e-6).unwrap();
        assert!(b.rows.iter().all(|r| (r.lower - 1.0).abs() < 1e-9 && r.upper == 1.0));
        let b = jsr_bracket(&single(Matrix::zero(2, Mode::Exact)), 4, 1e-6).unwrap();
        assert!(b.rows.iter().all(|r| r.lower == 0.0 && r.upper == 0.0));
        let b = jsr_bracket(&golden(), 8, 1e-6).unwrap();
        let last = b.last();
        assert!(last.lower <= PHI + 1e-6 && PHI <= last.upper);
        assert!(last.upper - last.lower <= 0.15);
    }

    #[test]
    fn zero_decision_examples() {
        assert!(decide_jsr_zero(&single(Matrix::zero(2, Mode::Exact))).unwrap());
        assert!(!decide_jsr_zero(&single(Matrix::identity(2, Mode::Exact))).unwrap());
        let set = MatrixSet::new(vec![
            Matrix::from_int_rows(&[&[0, 1], &[0, 0]]),
            Matrix::zero(2, Mode::Exact),
        ])
        .unwrap();
        assert!(decide_jsr_zero(&set).unwrap());
        // each matrix nilpotent, but the pair is not
        let set = MatrixSet::new(vec![
            Matrix::from_int_rows(&[&[0, 1], &[0, 0]]),
            Matrix::from_int_rows(&[&[0, 0], &[1, 0]]),
        ])
        .unwrap();
        assert!(!decide_jsr_zero(&set).unwrap());
        let float = single(Matrix::identity(1, Mode::Float));
        assert_eq!(decide_jsr_zero(&float), Err(Error::ExactRequired("decide_jsr_zero")));
    }
}
