//! Reduction from the joint spectral radius of `2^m` matrices to growth
//! rates of bilinear systems.
//!
//! The state space has `k + n` coordinates with `k = 2^(m+1)`. The first `k`
//! act as a controller that can only ever hold one indicator `e_j` (or
//! nothing); the last `n` carry the simulated vector. Starting from
//! `e_1 + e_{k+i}`, the controller needs exactly `3m` leaves to produce a
//! selector `e_{S_{m-1}+q}`, and combining a payload vector with that
//! selector multiplies the payload by `M_q`. Hence
//!
//! ```text
//! A_{3mr+1}(B, e_1 + e_{k+i}) = { τ(M e'_i) : M in Σ^r } ∪ {0}
//! ```
//!
//! and `ρ(Σ) = max_i λ(B, e_1 + e_{k+i})^(3m)`.
//!
//! Coordinates in comments are 1-based; the code converts when emitting
//! terms.

use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::{BilinearMap, BilinearSystem, Term};
use crate::error::{Error, Result};
use crate::growth::{expand_levels_with, Pruning};
use crate::limits::Limits;
use crate::linalg::Vector;
use crate::jsr::MatrixSet;
use crate::scalar::{Mode, Scalar};

/// `S_i = 2^(i+1) + 1`, i.e. `S_0 = 3` and `S_i = S_{i-1} + 2^i`.
pub fn s_index(i: u32) -> usize {
    (1usize << (i + 1)) + 1
}

/// Repeats the last matrix until there are `2^m` of them, with the smallest
/// `m >= 2`.
pub fn pad_power_of_two(set: &MatrixSet) -> (MatrixSet, u32) {
    let mut m = 2;
    while (1usize << m) < set.len() {
        m += 1;
    }
    let mut mats = set.matrices().to_vec();
    let last = mats.last().expect("matrix sets are nonempty").clone();
    mats.resize(1 << m, last);
    (MatrixSet::new(mats).expect("padding keeps the set well formed"), m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionArtifact {
    map: BilinearMap,
    m: u32,
    n: usize,
    k: usize,
    s_table: Vec<usize>,
    padded: MatrixSet,
}

/// Builds the bilinear map of the reduction for `set`.
pub fn build_reduction(set: &MatrixSet) -> ReductionArtifact {
    let (padded, m) = pad_power_of_two(set);
    let n = set.n();
    let mode = set.mode();
    let s_table: Vec<usize> = (0..=m).map(s_index).collect();
    let k = s_table[m as usize] - 1;
    let one = Scalar::one(mode);

    let mut terms = Vec::new();
    let mut push = |out: usize, left: usize, right: usize, c: Scalar| {
        terms.push(Term::new(out - 1, left - 1, right - 1, c));
    };
    // B_1 = 0, B_2 = x1 y1, B_3 = x1 y2, B_4 = x2 y1
    push(2, 1, 1, one.clone());
    push(3, 1, 2, one.clone());
    push(4, 2, 1, one.clone());
    // controller chain: level i doubles the indicators of level i - 1
    for i in 1..m as usize {
        for j in 0..1usize << i {
            push(2 * j + s_table[i], j + s_table[i - 1], 3, one.clone());
            push(2 * j + 1 + s_table[i], j + s_table[i - 1], 4, one.clone());
        }
    }
    // payload: π(B(x, y)) = Σ_q y_{q + S_{m-1}} M_q π(x)
    let selector_base = s_table[m as usize - 1];
    for (q, mat) in padded.matrices().iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let c = mat.get(a, b);
                if !c.is_zero() {
                    push(k + a + 1, k + b + 1, q + selector_base, c.clone());
                }
            }
        }
    }

    let map = BilinearMap::new(k + n, terms).expect("reduction terms are in range and distinct");
    ReductionArtifact {
        map,
        m,
        n,
        k,
        s_table,
        padded,
    }
}

impl ReductionArtifact {
    pub fn map(&self) -> &BilinearMap {
        &self.map
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of controller coordinates, `2^(m+1)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k + self.n
    }

    pub fn s_table(&self) -> &[usize] {
        &self.s_table
    }

    pub fn padded_sigma(&self) -> &MatrixSet {
        &self.padded
    }

    /// Leaves consumed per simulated matrix multiplication, `3m`.
    pub fn exponent(&self) -> usize {
        3 * self.m as usize
    }

    pub fn mode(&self) -> Mode {
        self.padded.mode()
    }

    /// Same bookkeeping around a different map of the same dimension. Used to
    /// probe the checkers with corrupted coefficients.
    pub fn with_map(&self, map: BilinearMap) -> Result<Self> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: map.dim(),
            });
        }
        Ok(ReductionArtifact { map, ..self.clone() })
    }

    /// `e_1 + e_{k+i}` for `i` in `1..=n`.
    pub fn initial_vector(&self, i: usize) -> Result<Vector> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange { index: i, max: self.n });
        }
        let mode = self.mode();
        let mut coords = Vector::zeros(self.dim(), mode).into_coords();
        coords[0] = Scalar::one(mode);
        coords[self.k + i - 1] = Scalar::one(mode);
        Vector::new(coords)
    }

    pub fn system(&self, i: usize) -> Result<BilinearSystem> {
        BilinearSystem::new(self.map.clone(), self.initial_vector(i)?)
    }

    /// π: the last `n` coordinates.
    pub fn pi_project(&self, z: &Vector) -> Result<Vector> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        Ok(z.slice(self.k, self.n))
    }

    /// τ: `k` zeros followed by `x`.
    pub fn tau_embed(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        let mut coords = Vector::zeros(self.k, x.mode()).into_coords();
        coords.extend(x.coords().iter().cloned());
        Vector::new(coords)
    }

    /// `3 + Σ_{i=1}^{m-1} 2^(i+1) + Σ_q nnz(M_q)`.
    pub fn expected_nnz(&self) -> usize {
        let chain: usize = (1..self.m).map(|i| 1usize << (i + 1)).sum();
        3 + chain + self.padded.matrices().iter().map(|m| m.nnz()).sum::<usize>()
    }
}

pub fn pi_project(art: &ReductionArtifact, z: &Vector) -> Result<Vector> {
    art.pi_project(z)
}

pub fn tau_embed(art: &ReductionArtifact, x: &Vector) -> Result<Vector> {
    art.tau_embed(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRhoRow {
    pub t: usize,
    /// `max_i max_{z in A_{3tm+1}} ||π(z)||_1`, exact.
    pub max_norm: Scalar,
    /// `max_norm^(1/t)`.
    pub rho_estimate: f64,
}

/// Reads `max_{P in Σ^t} ||P||_1^(1/t)` off the levels `A_{3tm+1}` of the
/// reduction systems, for `t = 1..=depth`.
pub fn jsr_via_growth(set: &MatrixSet, depth: usize) -> Result<Vec<GrowthRhoRow>> {
    jsr_via_growth_with(set, depth, &Limits::default())
}

pub fn jsr_via_growth_with(set: &MatrixSet, depth: usize, limits: &Limits) -> Result<Vec<GrowthRhoRow>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if set.mode() != Mode::Exact {
        return Err(Error::ExactRequired("jsr_via_growth"));
    }
    let art = build_reduction(set);
    let step = art.exponent();
    let t_max = step * depth + 1;

    // per initial index: the maxima at t = 1..=depth
    let per_index = (1..=art.n())
        .into_par_iter()
        .map(|i| {
            let levels = expand_levels_with(&art.system(i)?, t_max, Pruning::None, limits)?;
            (1..=depth)
                .map(|t| {
                    let level = &levels[step * t];
                    let mut best = Scalar::zero(Mode::Exact);
                    for z in level.iter() {
                        let norm = art.pi_project(z)?.l1_norm();
                        if norm > best {
                            best = norm;
                        }
                    }
                    Ok(best)
                })
                .collect::<Result<Vec<Scalar>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((1..=depth)
        .map(|t| {
            let max_norm = per_index
                .iter()
                .map(|row| row[t - 1].clone())
                .max()
                .expect("n >= 1");
            GrowthRhoRow {
                t,
                rho_estimate: max_norm.root(t),
                max_norm,
            }
        })
        .collect())
}
