//! Level sets `A_t(B, v)`, their norms `λ_t`, and growth profiles.
//!
//! `A_1 = {v}` and `A_t` is the union over `1 <= m < t` of
//! `{ B(x, y) : x in A_m, y in A_{t-m} }`. Levels are built bottom-up and
//! deduplicated by structural equality, so in exact mode the stored sets are
//! exactly `A_t`. In float mode deduplication is bitwise and level sizes may
//! over-count vectors that differ only by rounding.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::BilinearSystem;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::Vector;
use crate::scalar::{Mode, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    Linf,
}

impl Norm {
    pub fn of(self, x: &Vector) -> Scalar {
        match self {
            Norm::L1 => x.l1_norm(),
            Norm::Linf => x.linf_norm(),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Norm::L1),
            "linf" => Ok(Norm::Linf),
            other => Err(Error::InvalidArgument(format!("unknown norm {other:?}"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::Linf => "linf",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pruning {
    #[default]
    None,
    /// Drop componentwise-dominated vectors. Only sound for nonnegative
    /// systems, where `B` is monotone in both arguments.
    Dominance,
}

impl FromStr for Pruning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Pruning::None),
            "dominance" => Ok(Pruning::Dominance),
            other => Err(Error::InvalidArgument(format!("unknown pruning policy {other:?}"))),
        }
    }
}

/// One deduplicated level `A_t`, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    t: usize,
    vectors: BTreeSet<Vector>,
}

impl LevelSet {
    pub fn new(t: usize, vectors: impl IntoIterator<Item = Vector>) -> Self {
        assert!(t >= 1, "levels are indexed from 1");
        LevelSet {
            t,
            vectors: vectors.into_iter().collect(),
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &BTreeSet<Vector> {
        &self.vectors
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector> {
        self.vectors.iter()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.vectors.contains(x)
    }

    pub fn lambda(&self, norm: Norm) -> Scalar {
        lambda_t(self, norm)
    }
}

/// Expands `A_1..=A_t_max` with the default resource cap.
pub fn expand_levels(sys: &BilinearSystem, t_max: usize, pruning: Pruning) -> Result<Vec<LevelSet>> {
    expand_levels_with(sys, t_max, pruning, &Limits::default())
}

pub fn expand_levels_with(
    sys: &BilinearSystem,
    t_max: usize,
    pruning: Pruning,
    limits: &Limits,
) -> Result<Vec<LevelSet>> {
    if t_max == 0 {
        return Err(Error::InvalidArgument("level count must be at least 1".into()));
    }
    if pruning == Pruning::Dominance && !sys.is_nonnegative() {
        return Err(Error::NegativeEntry("dominance pruning"));
    }
    let cap = limits.max_level_vectors;
    let map = sys.map();
    let mut levels = vec![LevelSet::new(1, [sys.initial().clone()])];
    let mut stored = 1;

    for t in 2..=t_max {
        let budget = cap.saturating_sub(stored);
        let over = |count: usize| Error::ResourceCap {
            what: "level vectors",
            count: stored + count,
            cap,
        };
        // Each ordered split (m, t - m) is independent; the union is a set,
        // so the merged level does not depend on scheduling.
        let merged = (1..t)
            .into_par_iter()
            .map(|m| {
                let mut part = BTreeSet::new();
                for x in levels[m - 1].iter() {
                    for y in levels[t - m - 1].iter() {
                        part.insert(map.eval(x, y)?);
                        if part.len() > budget {
                            return Err(over(part.len()));
                        }
                    }
                }
                Ok(part)
            })
            .try_reduce(BTreeSet::new, |mut a, b| {
                if a.len() < b.len() {
                    return Ok(merge(b, a));
                }
                a.extend(b);
                Ok(a)
            })?;
        if merged.len() > budget {
            return Err(over(merged.len()));
        }
        let mut level = LevelSet { t, vectors: merged };
        if pruning == Pruning::Dominance {
            level = dominance_prune(&level)?;
        }
        stored += level.len();
        levels.push(level);
    }
    Ok(levels)
}

fn merge(mut big: BTreeSet<Vector>, small: BTreeSet<Vector>) -> BTreeSet<Vector> {
    big.extend(small);
    big
}

/// `max_{x in level} ||x||`. An empty level yields zero.
pub fn lambda_t(level: &LevelSet, norm: Norm) -> Scalar {
    let mut best: Option<Scalar> = None;
    for x in level.iter() {
        let value = norm.of(x);
        if best.as_ref().is_none_or(|b| value > *b) {
            best = Some(value);
        }
    }
    best.unwrap_or_default()
}

/// Removes every vector that is componentwise below some other stored
/// vector.
pub fn dominance_prune(level: &LevelSet) -> Result<LevelSet> {
    if level.iter().any(|x| !x.is_nonnegative()) {
        return Err(Error::NegativeEntry("dominance pruning"));
    }
    let all: Vec<&Vector> = level.iter().collect();
    let kept = all
        .iter()
        .filter(|x| !all.iter().any(|y| y != *x && x.dominated_by(y)))
        .map(|x| (*x).clone());
    Ok(LevelSet::new(level.t, kept))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: usize,
    pub lambda_t: Scalar,
    pub root: f64,
    pub level_size: usize,
}

/// The finite sequence `λ_t` and `λ_t^(1/t)` for `t = 1..=T`. No claim is
/// made that the roots converge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub norm: Norm,
    pub mode: Mode,
    pub rows: Vec<ProfileRow>,
}

impl GrowthProfile {
    /// Float levels deduplicate bitwise, so `level_size` can over-count.
    pub fn may_overcount(&self) -> bool {
        self.mode == Mode::Float
    }
}

pub fn growth_profile(sys: &BilinearSystem, t_max: usize, norm: Norm, pruning: Pruning) -> Result<GrowthProfile> {
    growth_profile_with(sys, t_max, norm, pruning, &Limits::default())
}

pub fn growth_profile_with(
    sys: &BilinearSystem,
    t_max: usize,
    norm: Norm,
    pruning: Pruning,
    limits: &Limits,
) -> Result<GrowthProfile> {
    let levels = expand_levels_with(sys, t_max, pruning, limits)?;
    Ok(profile_from_levels(&levels, norm, sys.mode()))
}

pub fn profile_from_levels(levels: &[LevelSet], norm: Norm, mode: Mode) -> GrowthProfile {
    let rows = levels
        .iter()
        .map(|level| {
            let lambda = lambda_t(level, norm);
            ProfileRow {
                t: level.t,
                root: lambda.root(level.t),
                lambda_t: lambda,
                level_size: level.len(),
            }
        })
        .collect();
    GrowthProfile { norm, mode, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::{BilinearMap, Term};

    fn scalar_system(v: i64) -> BilinearSystem {
        let map = BilinearMap::new(1, [Term::new(0, 0, 0, Scalar::one(Mode::Exact))]).unwrap();
        BilinearSystem::new(map, Vector::from_ints(&[v])).unwrap()
    }

    fn unit(dim: usize, one_based: usize) -> Vector {
        Vector::unit(dim, one_based - 1, Mode::Exact)
    }

    #[test]
    fn scalar_levels_are_powers_of_two() {
        let levels = expand_levels(&scalar_system(2), 3, Pruning::None).unwrap();
        let got: Vec<Vec<Vector>> = levels.iter().map(|l| l.iter().cloned().collect()).collect();
        assert_eq!(
            got,
            vec![
                vec![Vector::from_ints(&[2])],
                vec![Vector::from_ints(&[4])],
                vec![Vector::from_ints(&[8])]
            ]
        );
    }

    #[test]
    fn zero_levels_rejected() {
        assert!(expand_levels(&scalar_system(2), 0, Pruning::None).is_err());
    }

    #[test]
    fn dominance_needs_nonnegative_system() {
        assert_eq!(
            expand_levels(&scalar_system(-2), 3, Pruning::Dominance),
            Err(Error::NegativeEntry("dominance pruning"))
        );
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(
            lambda_t(&LevelSet::new(1, [Vector::from_ints(&[2])]), Norm::L1),
            Scalar::from_int(Mode::Exact, 2)
        );
        let level = LevelSet::new(6, [Vector::zeros(9, Mode::Exact), unit(9, 5), unit(9, 6), unit(9, 7), unit(9, 8)]);
        assert_eq!(lambda_t(&level, Norm::L1), Scalar::one(Mode::Exact));
        let zero = LevelSet::new(4, [Vector::zeros(9, Mode::Exact)]);
        assert_eq!(lambda_t(&zero, Norm::L1), Scalar::zero(Mode::Exact));
    }

    #[test]
    fn profile_scalar_roots() {
        let profile = growth_profile(&scalar_system(2), 5, Norm::L1, Pruning::None).unwrap();
        assert_eq!(profile.rows.len(), 5);
        for row in &profile.rows {
            assert_eq!(row.lambda_t, Scalar::from_int(Mode::Exact, 2).pow(row.t as u32));
            assert!((row.root - 2.0).abs() < 1e-12);
            assert_eq!(row.level_size, 1);
        }
    }

    #[test]
    fn profile_zero_vector() {
        let profile = growth_profile(&scalar_system(0), 4, Norm::Linf, Pruning::None).unwrap();
        assert!(profile.rows.iter().all(|r| r.lambda_t.is_zero() && r.root == 0.0));
    }

    #[test]
    fn dominance_examples() {
        let prune = |vs: Vec<Vector>| -> Vec<Vector> {
            dominance_prune(&LevelSet::new(2, vs)).unwrap().iter().cloned().collect()
        };
        assert_eq!(
            prune(vec![Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 3])]),
            vec![Vector::from_ints(&[2, 3])]
        );
        assert_eq!(
            prune(vec![Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 1])]),
            vec![Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 1])]
        );
        assert_eq!(prune(vec![Vector::zeros(9, Mode::Exact), unit(9, 5)]), vec![unit(9, 5)]);
        assert!(dominance_prune(&LevelSet::new(2, [Vector::from_ints(&[-1])])).is_err());
    }

    #[test]
    fn resource_cap_is_enforced() {
        // B(x, y) = (x1*y1, x1*y2 + x2*y1) from v = (1, 1) gives (1, t) at
        // level t, so two stored vectors exceed a cap of 1.
        let one = Scalar::one(Mode::Exact);
        let map = BilinearMap::new(
            2,
            [
                Term::new(0, 0, 0, one.clone()),
                Term::new(1, 0, 1, one.clone()),
                Term::new(1, 1, 0, one),
            ],
        )
        .unwrap();
        let sys = BilinearSystem::new(map, Vector::from_ints(&[1, 1])).unwrap();
        let err = expand_levels_with(&sys, 3, Pruning::None, &Limits::uniform(1)).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
        assert!(expand_levels_with(&sys, 3, Pruning::None, &Limits::uniform(3)).is_ok());
    }
}
