//! Several bilinear maps simulated by one.
//!
//! Given maps `B_1..B_p` on `R^n` and a start vector `v`, the combined map
//! acts on `K + (p + 1) n` coordinates: `K` controller coordinates, one
//! simulated block holding the current value, and one temporary block per
//! input map. Combining two simulated values writes `B_l(x, y)` into
//! temporary block `l`; combining selector `e_{S+l}` with such a vector
//! copies block `l` back into the simulated block. For two maps this is
//!
//! ```text
//! B(x, y) = (0, x1 y1, x1 y2, x2 y1,
//!            x3 y[5+n..4+2n] + x4 y[5+2n..4+3n],
//!            B_1(x[5..4+n], y[5..4+n]),
//!            B_2(x[5..4+n], y[5..4+n]))
//! v' = (1, 0, 0, 0, v, 0, ..., 0)
//! ```
//!
//! For more maps the selectors come from the same doubling chain the matrix
//! reduction uses: with `d = max(1, ceil(log2 p))`, `K = 2^(d+1)` and the
//! selectors `e_{S_{d-1}}, ..., e_{S_d - 1}` cost `3d` leaves each. A joint
//! derivation with `r` leaves is therefore matched by a single-map
//! derivation with `s r - (s - 1)` leaves where `s = 3d + 1`.

use std::collections::BTreeSet;

use crate::bilinear::{BilinearMap, BilinearSystem, Term};
use crate::error::{Error, Result};
use crate::growth::{expand_levels_with, Pruning};
use crate::limits::Limits;
use crate::linalg::Vector;
use crate::oracle::{brute_force_joint_levels, Clause, Report};
use crate::reduction::s_index;
use crate::scalar::{Mode, Scalar};

/// Depth used by [`build_joint_reduction`]'s self-check.
pub const VALIDATION_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct JointReduction {
    system: BilinearSystem,
    maps: usize,
    n: usize,
    depth: u32,
}

impl JointReduction {
    pub fn system(&self) -> &BilinearSystem {
        &self.system
    }

    pub fn map_count(&self) -> usize {
        self.maps
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Controller width `K`.
    pub fn controller_len(&self) -> usize {
        s_index(self.depth) - 1
    }

    /// Tree-size inflation factor `s`.
    pub fn steps_per_application(&self) -> usize {
        3 * self.depth as usize + 1
    }

    /// Leaves of the simulating derivation for `r` joint leaves.
    pub fn inflated_leaves(&self, r: usize) -> usize {
        let s = self.steps_per_application();
        s * r - (s - 1)
    }

    /// 0-based offset of the simulated block.
    pub fn simulated_offset(&self) -> usize {
        self.controller_len()
    }

    /// 0-based offset of temporary block `l` (0-based).
    pub fn temp_offset(&self, l: usize) -> usize {
        self.controller_len() + (l + 1) * self.n
    }

    pub fn simulated_value(&self, z: &Vector) -> Vector {
        z.slice(self.simulated_offset(), self.n)
    }

    /// Copy with a different map, for probing the self-check.
    pub fn with_map(&self, map: BilinearMap) -> Result<Self> {
        let system = BilinearSystem::new(map, self.system.initial().clone())?;
        Ok(JointReduction { system, ..self.clone() })
    }
}

/// Builds the combined system and checks it against direct joint
/// enumeration up to [`VALIDATION_DEPTH`] leaves before returning it.
pub fn build_joint_reduction(maps: &[BilinearMap], v: &Vector) -> Result<JointReduction> {
    let joint = assemble_joint(maps, v)?;
    let report = validate_joint(&joint, maps, v, VALIDATION_DEPTH)?;
    if !report.passed() {
        let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
        return Err(Error::SelfValidation(format!(
            "joint simulation disagrees with direct enumeration at {}",
            failed.join(", ")
        )));
    }
    Ok(joint)
}

/// The combined system without the self-check.
pub fn assemble_joint(maps: &[BilinearMap], v: &Vector) -> Result<JointReduction> {
    let first = maps.first().ok_or(Error::Empty("map list"))?;
    let n = first.dim();
    for map in maps {
        if map.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: map.dim(),
            });
        }
    }
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.dim(),
        });
    }
    let mode = v.mode();
    let p = maps.len();
    let depth = (usize::BITS - (p - 1).leading_zeros()).max(1);
    let shape = JointReduction {
        system: BilinearSystem::new(BilinearMap::new(1, [])?, Vector::zeros(1, mode))?,
        maps: p,
        n,
        depth,
    };
    let k = shape.controller_len();
    let dim = k + (p + 1) * n;
    let one = Scalar::one(mode);

    // 1-based indices below
    let mut terms = Vec::new();
    let mut push = |out: usize, left: usize, right: usize, c: Scalar| {
        terms.push(Term::new(out - 1, left - 1, right - 1, c));
    };
    push(2, 1, 1, one.clone());
    push(3, 1, 2, one.clone());
    push(4, 2, 1, one.clone());
    for i in 1..depth {
        for j in 0..1usize << i {
            push(2 * j + s_index(i), j + s_index(i - 1), 3, one.clone());
            push(2 * j + 1 + s_index(i), j + s_index(i - 1), 4, one.clone());
        }
    }
    let sim = shape.simulated_offset() + 1;
    let selector = s_index(depth - 1);
    for (l, map) in maps.iter().enumerate().take(p) {
        let temp = shape.temp_offset(l) + 1;
        // simulated block += x_{selector l} * temp block l of y
        for a in 0..n {
            push(sim + a, selector + l, temp + a, one.clone());
        }
        // temp block l = B_l(sim(x), sim(y))
        for term in map.terms() {
            push(temp + term.out, sim + term.left, sim + term.right, term.coeff.clone());
        }
    }
    let map = BilinearMap::new(dim, terms)?;

    let mut start = Vector::zeros(dim, mode).into_coords();
    start[0] = one;
    for (a, x) in v.coords().iter().enumerate() {
        start[sim - 1 + a] = x.clone();
    }
    let system = BilinearSystem::new(map, Vector::new(start)?)?;
    Ok(JointReduction { system, ..shape })
}

/// Compares the simulated blocks of the combined system's inflated levels
/// with direct joint enumeration for `r = 1..=r_max` leaves.
///
/// For `r >= 2` every vector at the inflated level must be zero outside the
/// simulated block, and the nonzero simulated values must coincide with the
/// nonzero vectors of the direct level. The ℓ1 maxima are compared as well.
pub fn validate_joint(joint: &JointReduction, maps: &[BilinearMap], v: &Vector, r_max: usize) -> Result<Report> {
    if v.mode() != Mode::Exact {
        return Err(Error::ExactRequired("joint self-validation"));
    }
    let direct = brute_force_joint_levels(maps, v, r_max)?;
    let t_max = joint.inflated_leaves(r_max);
    let levels = expand_levels_with(joint.system(), t_max, Pruning::None, &Limits::default())?;
    let zero_n = Vector::zeros(joint.n(), Mode::Exact);
    let mut report = Report::new(format!(
        "joint simulation, {} maps, steps per application {}",
        joint.map_count(),
        joint.steps_per_application()
    ));

    for r in 1..=r_max {
        let t = joint.inflated_leaves(r);
        let level = &levels[t - 1];
        let simulated: BTreeSet<Vector> = level.iter().map(|z| joint.simulated_value(z)).collect();
        if r >= 2 {
            let stray: BTreeSet<Vector> = level
                .iter()
                .filter(|z| {
                    let mut rest = (*z).clone().into_coords();
                    let off = joint.simulated_offset();
                    rest.drain(off..off + joint.n());
                    rest.iter().any(|x| !x.is_zero())
                })
                .cloned()
                .collect();
            report.push(Clause::sets(format!("A_{t}_outside_simulated_block"), &BTreeSet::new(), &stray));
        }
        let nonzero = |s: &BTreeSet<Vector>| -> BTreeSet<Vector> { s.iter().filter(|x| **x != zero_n).cloned().collect() };
        let expected = nonzero(&direct[r - 1]);
        let got = nonzero(&simulated);
        report.push(Clause::sets(format!("r{r}_A_{t}_simulated_values"), &expected, &got));
        let max = |s: &BTreeSet<Vector>| s.iter().map(Vector::l1_norm).max().unwrap_or_default();
        report.push(Clause::values(format!("r{r}_A_{t}_max_l1"), max(&direct[r - 1]), max(&simulated)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled_product(c: i64) -> BilinearMap {
        BilinearMap::new(1, [Term::new(0, 0, 0, Scalar::from_int(Mode::Exact, c))]).unwrap()
    }

    #[test]
    fn two_map_layout_matches_printed_form() {
        let maps = [scaled_product(1), scaled_product(2)];
        let v = Vector::from_ints(&[5]);
        let joint = assemble_joint(&maps, &v).unwrap();
        assert_eq!(joint.system().initial(), &Vector::from_ints(&[1, 0, 0, 0, 5, 0, 0]));
        assert_eq!(joint.steps_per_application(), 4);
        let map = joint.system().map();
        let one = Scalar::one(Mode::Exact);
        let c = |o: usize, i: usize, j: usize| map.coefficient(o - 1, i - 1, j - 1).cloned();
        assert_eq!(c(2, 1, 1), Some(one.clone()));
        assert_eq!(c(3, 1, 2), Some(one.clone()));
        assert_eq!(c(4, 2, 1), Some(one.clone()));
        assert_eq!(c(5, 3, 6), Some(one.clone()));
        assert_eq!(c(5, 4, 7), Some(one.clone()));
        assert_eq!(c(6, 5, 5), Some(one));
        assert_eq!(c(7, 5, 5), Some(Scalar::from_int(Mode::Exact, 2)));
        assert_eq!(map.nnz(), 7);
    }

    #[test]
    fn two_scalar_maps_validate() {
        let maps = [scaled_product(1), scaled_product(2)];
        let joint = build_joint_reduction(&maps, &Vector::from_ints(&[1])).unwrap();
        let levels = expand_levels_with(joint.system(), 5, Pruning::None, &Limits::default()).unwrap();
        let best = levels[4].iter().map(|z| joint.simulated_value(z).l1_norm()).max().unwrap();
        assert_eq!(best, Scalar::from_int(Mode::Exact, 2));
    }

    #[test]
    fn single_map_degenerates() {
        let map = BilinearMap::new(
            2,
            [
                Term::new(0, 0, 1, Scalar::one(Mode::Exact)),
                Term::new(1, 1, 1, Scalar::ratio(1, 2)),
                Term::new(1, 0, 0, Scalar::one(Mode::Exact)),
            ],
        )
        .unwrap();
        let joint = build_joint_reduction(&[map], &Vector::from_ints(&[1, 2])).unwrap();
        assert_eq!(joint.steps_per_application(), 4);
        assert_eq!(joint.system().dim(), 4 + 2 * 2);
    }

    #[test]
    fn three_maps_use_a_deeper_selector_chain() {
        let maps = [scaled_product(1), scaled_product(2), scaled_product(3)];
        let joint = build_joint_reduction(&maps, &Vector::from_ints(&[1])).unwrap();
        assert_eq!(joint.steps_per_application(), 7);
        assert_eq!(joint.controller_len(), 8);
        assert_eq!(joint.system().dim(), 8 + 4);
    }

    #[test]
    fn errors() {
        assert!(assemble_joint(&[], &Vector::from_ints(&[1])).is_err());
        let a = scaled_product(1);
        let b = BilinearMap::new(2, []).unwrap();
        assert!(assemble_joint(&[a.clone(), b], &Vector::from_ints(&[1])).is_err());
        assert!(assemble_joint(&[a], &Vector::from_ints(&[1, 1])).is_err());
    }

    #[test]
    fn corrupted_temp_block_fails_validation() {
        let maps = [scaled_product(1), scaled_product(2)];
        let v = Vector::from_ints(&[1]);
        let joint = assemble_joint(&maps, &v).unwrap();
        // temp block 2 is coordinate 7: B(x, y)_7 = 2 x_5 y_5
        let broken = joint
            .with_map(joint.system().map().with_coefficient(6, 4, 4, Scalar::from_int(Mode::Exact, 3)).unwrap())
            .unwrap();
        assert!(!validate_joint(&broken, &maps, &v, 3).unwrap().passed());
    }
}
