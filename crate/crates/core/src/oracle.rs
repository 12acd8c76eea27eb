//! Brute-force references and checkers for the reduction's level structure.
//!
//! Nothing here calls into `growth` or `jsr`: levels are recomputed by
//! direct recursion and matrix products by enumerating index sequences. The
//! checkers return [`Report`]s instead of failing, so callers can show every
//! clause that went wrong.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::bilinear::{BilinearMap, BilinearSystem};
use crate::error::{Error, Result};
use crate::growth::LevelSet;
use crate::jsr::MatrixSet;
use crate::linalg::{Matrix, Vector};
use crate::reduction::{build_reduction, ReductionArtifact};
use crate::scalar::{Mode, Scalar};

type Set = BTreeSet<Vector>;

/// `A_t` by plain recursion over the split point of the root, with no
/// memoization; cost grows like `3^t`, so keep `t_max` around 8.
pub fn brute_force_levels(sys: &BilinearSystem, t_max: usize) -> Result<Vec<LevelSet>> {
    if sys.mode() != Mode::Exact {
        return Err(Error::ExactRequired("brute_force_levels"));
    }
    (1..=t_max)
        .map(|t| Ok(LevelSet::new(t, trees(sys.map(), sys.initial(), t)?)))
        .collect()
}

fn trees(map: &BilinearMap, v: &Vector, t: usize) -> Result<Set> {
    if t == 1 {
        return Ok(BTreeSet::from([v.clone()]));
    }
    let mut out = Set::new();
    for m in 1..t {
        let left = trees(map, v, m)?;
        let right = trees(map, v, t - m)?;
        for x in &left {
            for y in &right {
                out.insert(map.eval(x, y)?);
            }
        }
    }
    Ok(out)
}

/// Levels of the joint system `({B_1, ..., B_p}, v)`: each internal node of
/// a derivation tree may use any of the maps. Index `r - 1` holds the level
/// with `r` leaves.
pub fn brute_force_joint_levels(maps: &[BilinearMap], v: &Vector, r_max: usize) -> Result<Vec<Set>> {
    if v.mode() != Mode::Exact {
        return Err(Error::ExactRequired("brute_force_joint_levels"));
    }
    (1..=r_max).map(|r| joint_trees(maps, v, r)).collect()
}

fn joint_trees(maps: &[BilinearMap], v: &Vector, r: usize) -> Result<Set> {
    if r == 1 {
        return Ok(BTreeSet::from([v.clone()]));
    }
    let mut out = Set::new();
    for m in 1..r {
        let left = joint_trees(maps, v, m)?;
        let right = joint_trees(maps, v, r - m)?;
        for map in maps {
            for x in &left {
                for y in &right {
                    out.insert(map.eval(x, y)?);
                }
            }
        }
    }
    Ok(out)
}

/// Memoized table of `A_1..=A_t_max`, for depths out of reach of
/// [`brute_force_levels`].
fn level_table(map: &BilinearMap, v: &Vector, t_max: usize) -> Result<Vec<Set>> {
    let mut table: Vec<Set> = vec![BTreeSet::from([v.clone()])];
    for t in 2..=t_max {
        let mut level = Set::new();
        for m in 1..t {
            for x in &table[m - 1] {
                for y in &table[t - m - 1] {
                    level.insert(map.eval(x, y)?);
                }
            }
        }
        table.push(level);
    }
    Ok(table)
}

/// Every product `M_{q1} ... M_{qr}` over index sequences, deduplicated.
fn all_products(mats: &[Matrix], r: usize) -> Result<BTreeSet<Matrix>> {
    let mut out = BTreeSet::new();
    let mut seq = vec![0usize; r];
    loop {
        let mut p = mats[seq[0]].clone();
        for &q in &seq[1..] {
            p = p.mul(&mats[q])?;
        }
        out.insert(p);
        // odometer increment
        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < mats.len() {
                break;
            }
            seq[pos] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClauseData {
    Sets {
        expected: Vec<Vector>,
        got: Vec<Vector>,
        missing: Vec<Vector>,
        unexpected: Vec<Vector>,
    },
    Values {
        expected: Scalar,
        got: Scalar,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub id: String,
    pub passed: bool,
    #[serde(flatten)]
    pub data: ClauseData,
}

impl Clause {
    pub fn sets(id: impl Into<String>, expected: &Set, got: &Set) -> Self {
        let missing: Vec<Vector> = expected.difference(got).cloned().collect();
        let unexpected: Vec<Vector> = got.difference(expected).cloned().collect();
        Clause {
            id: id.into(),
            passed: missing.is_empty() && unexpected.is_empty(),
            data: ClauseData::Sets {
                expected: expected.iter().cloned().collect(),
                got: got.iter().cloned().collect(),
                missing,
                unexpected,
            },
        }
    }

    pub fn values(id: impl Into<String>, expected: Scalar, got: Scalar) -> Self {
        Clause {
            id: id.into(),
            passed: expected == got,
            data: ClauseData::Values { expected, got },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub clauses: Vec<Clause>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            clauses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| !c.passed)
    }

    pub fn push(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }
}

fn show(vs: &[Vector]) -> String {
    let parts: Vec<String> = vs.iter().map(Vector::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.clauses {
            let status = if c.passed { "pass" } else { "FAIL" };
            match &c.data {
                ClauseData::Sets {
                    missing, unexpected, ..
                } => {
                    write!(f, "  [{status}] {}", c.id)?;
                    if !c.passed {
                        write!(f, " missing={} unexpected={}", show(missing), show(unexpected))?;
                    }
                    writeln!(f)?;
                }
                ClauseData::Values { expected, got } => {
                    writeln!(f, "  [{status}] {} expected={expected} got={got}", c.id)?;
                }
            }
        }
        Ok(())
    }
}

fn require_exact(art: &ReductionArtifact, what: &'static str) -> Result<()> {
    if art.mode() != Mode::Exact {
        return Err(Error::ExactRequired(what));
    }
    Ok(())
}

fn unit(dim: usize, one_based: usize) -> Vector {
    Vector::unit(dim, one_based - 1, Mode::Exact)
}

/// Checks the controller levels `A_2..=A_{3m}` from `e_1 + e_{k+i}`:
/// `A_2 = {e_2}`, `A_3 = {e_3, e_4}`, `A_t = {0}` when `3 ∤ t`, and
/// `A_{3r} = {0, e_{S_{r-1}}, ..., e_{S_r - 1}}`.
pub fn check_level_structure(art: &ReductionArtifact, i: usize) -> Result<Report> {
    require_exact(art, "check_level_structure")?;
    let v = art.initial_vector(i)?;
    let dim = art.dim();
    let top = art.exponent();
    let levels = level_table(art.map(), &v, top)?;
    let zero = Vector::zeros(dim, Mode::Exact);
    let s = art.s_table();

    let mut report = Report::new(format!("level structure, initial index {i}"));
    report.push(Clause::sets("A_2", &BTreeSet::from([unit(dim, 2)]), &levels[1]));
    report.push(Clause::sets("A_3", &BTreeSet::from([unit(dim, 3), unit(dim, 4)]), &levels[2]));
    for t in 4..=top {
        let expected: Set = if t % 3 != 0 {
            BTreeSet::from([zero.clone()])
        } else {
            let r = t / 3;
            std::iter::once(zero.clone())
                .chain((s[r - 1]..s[r]).map(|j| unit(dim, j)))
                .collect()
        };
        report.push(Clause::sets(format!("A_{t}"), &expected, &levels[t - 1]));
    }
    Ok(report)
}

/// Checks the simulation levels past `3m`: `A_t = {0}` unless
/// `t ≡ 1 (mod 3m)`, and `A_{3mr+1} = {τ(M e'_i) : M in Σ^r} ∪ {0}` for
/// `r <= r_max`.
pub fn check_simulation(art: &ReductionArtifact, i: usize, r_max: usize) -> Result<Report> {
    require_exact(art, "check_simulation")?;
    let v = art.initial_vector(i)?;
    let step = art.exponent();
    let t_max = step * r_max + 1;
    let levels = level_table(art.map(), &v, t_max)?;
    let zero = Vector::zeros(art.dim(), Mode::Exact);
    let basis = Vector::unit(art.n(), i - 1, Mode::Exact);

    let mut report = Report::new(format!("simulation, initial index {i}, r <= {r_max}"));
    for t in step + 1..=t_max {
        let expected: Set = if (t - 1) % step != 0 {
            BTreeSet::from([zero.clone()])
        } else {
            let r = (t - 1) / step;
            let mut set = BTreeSet::from([zero.clone()]);
            for p in all_products(art.padded_sigma().matrices(), r)? {
                set.insert(art.tau_embed(&p.apply(&basis)?)?);
            }
            set
        };
        report.push(Clause::sets(format!("A_{t}"), &expected, &levels[t - 1]));
    }
    Ok(report)
}

/// Compares `max_{M in Σ^t} ||M||_1` with
/// `max_i max_{z in A_{3tm+1}} ||π(z)||_1` as exact rationals.
pub fn finite_rho_identity(set: &MatrixSet, t: usize) -> Result<Report> {
    if set.mode() != Mode::Exact {
        return Err(Error::ExactRequired("finite_rho_identity"));
    }
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let art = build_reduction(set);
    finite_rho_identity_for(&art, t)
}

/// As [`finite_rho_identity`] on an existing artifact.
pub fn finite_rho_identity_for(art: &ReductionArtifact, t: usize) -> Result<Report> {
    require_exact(art, "finite_rho_identity")?;
    let mut direct = Scalar::zero(Mode::Exact);
    for p in all_products(art.padded_sigma().matrices(), t)? {
        direct = direct.max(p.induced_l1_norm());
    }
    let level = art.exponent() * t + 1;
    let mut simulated = Scalar::zero(Mode::Exact);
    for i in 1..=art.n() {
        let table = level_table(art.map(), &art.initial_vector(i)?, level)?;
        for z in &table[level - 1] {
            simulated = simulated.max(art.pi_project(z)?.l1_norm());
        }
    }
    let mut report = Report::new(format!("norm identity at t = {t}"));
    report.push(Clause::values(format!("max_norm_t{t}"), direct, simulated));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::Term;

    fn scalar_system(v: i64) -> BilinearSystem {
        let map = BilinearMap::new(1, [Term::new(0, 0, 0, Scalar::one(Mode::Exact))]).unwrap();
        BilinearSystem::new(map, Vector::from_ints(&[v])).unwrap()
    }

    fn scalar_set(c: i64) -> MatrixSet {
        MatrixSet::new(vec![Matrix::from_int_rows(&[&[c]])]).unwrap()
    }

    #[test]
    fn brute_force_scalar() {
        let levels = brute_force_levels(&scalar_system(2), 3).unwrap();
        let flat: Vec<Vec<Vector>> = levels.iter().map(|l| l.iter().cloned().collect()).collect();
        assert_eq!(
            flat,
            vec![vec![Vector::from_ints(&[2])], vec![Vector::from_ints(&[4])], vec![Vector::from_ints(&[8])]]
        );
        let zero = brute_force_levels(&scalar_system(0), 4).unwrap();
        assert!(zero.iter().all(|l| l.len() == 1 && l.iter().all(Vector::is_zero)));
    }

    #[test]
    fn products_by_sequence() {
        let a = Matrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let b = Matrix::from_int_rows(&[&[1, 0], &[1, 1]]);
        let two = all_products(&[a.clone(), b.clone()], 2).unwrap();
        assert_eq!(two.len(), 4);
        assert!(two.contains(&a.mul(&b).unwrap()));
        assert_eq!(all_products(&[a.clone(), a], 3).unwrap().len(), 1);
    }

    #[test]
    fn level_structure_passes_on_scalar_instance() {
        let art = build_reduction(&scalar_set(2));
        let report = check_level_structure(&art, 1).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.clauses.len(), 5);
    }

    #[test]
    fn payload_corruption_leaves_controller_intact() {
        let art = build_reduction(&scalar_set(2));
        let map = art.map().with_coefficient(8, 8, 4, Scalar::from_int(Mode::Exact, 5)).unwrap();
        let broken = art.with_map(map).unwrap();
        assert!(check_level_structure(&broken, 1).unwrap().passed());
        assert!(!check_simulation(&broken, 1, 1).unwrap().passed());
    }

    #[test]
    fn deleting_the_start_square_breaks_a2() {
        let art = build_reduction(&scalar_set(2));
        let map = art.map().with_coefficient(1, 0, 0, Scalar::zero(Mode::Exact)).unwrap();
        let report = check_level_structure(&art.with_map(map).unwrap(), 1).unwrap();
        let a2 = report.clauses.iter().find(|c| c.id == "A_2").unwrap();
        assert!(!a2.passed);
    }

    #[test]
    fn simulation_scalar_examples() {
        let art = build_reduction(&scalar_set(2));
        let report = check_simulation(&art, 1, 2).unwrap();
        assert!(report.passed(), "{report}");
        let a13 = report.clauses.iter().find(|c| c.id == "A_13").unwrap();
        let expected = BTreeSet::from([art.tau_embed(&Vector::from_ints(&[4])).unwrap(), Vector::zeros(9, Mode::Exact)]);
        match &a13.data {
            ClauseData::Sets { got, .. } => assert_eq!(got.iter().cloned().collect::<Set>(), expected),
            _ => panic!("set clause expected"),
        }

        let art = build_reduction(&scalar_set(0));
        let report = check_simulation(&art, 1, 1).unwrap();
        assert!(report.passed(), "{report}");
        let a7 = report.clauses.last().unwrap();
        match &a7.data {
            ClauseData::Sets { got, .. } => assert_eq!(got, &vec![Vector::zeros(9, Mode::Exact)]),
            _ => panic!("set clause expected"),
        }
    }

    #[test]
    fn rho_identity_examples() {
        let id = MatrixSet::new(vec![Matrix::identity(2, Mode::Exact)]).unwrap();
        let r = finite_rho_identity(&id, 2).unwrap();
        assert!(r.passed());
        assert_eq!(
            r.clauses[0].data,
            ClauseData::Values {
                expected: Scalar::one(Mode::Exact),
                got: Scalar::one(Mode::Exact)
            }
        );

        let r = finite_rho_identity(&scalar_set(2), 3).unwrap();
        let eight = Scalar::from_int(Mode::Exact, 8);
        assert_eq!(r.clauses[0].data, ClauseData::Values { expected: eight.clone(), got: eight });

        let golden = MatrixSet::new(vec![
            Matrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            Matrix::from_int_rows(&[&[1, 0], &[1, 1]]),
        ])
        .unwrap();
        let r = finite_rho_identity(&golden, 2).unwrap();
        let three = Scalar::from_int(Mode::Exact, 3);
        assert_eq!(r.clauses[0].data, ClauseData::Values { expected: three.clone(), got: three });
    }

    #[test]
    fn float_inputs_rejected() {
        let float = MatrixSet::new(vec![Matrix::identity(1, Mode::Float)]).unwrap();
        let art = build_reduction(&float);
        assert!(check_level_structure(&art, 1).is_err());
        assert!(check_simulation(&art, 1, 1).is_err());
        assert!(finite_rho_identity(&float, 1).is_err());
    }
}
