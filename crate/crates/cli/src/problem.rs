//! Problem files: one JSON object whose `kind` selects the payload.
//!
//! ```json
//! {"kind": "matrix_set", "mode": "exact", "matrices": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}
//! {"kind": "bilinear_system", "dim": 1, "map": [[1, 1, 1, "1/2"]], "v": [2]}
//! {"kind": "joint_system", "dim": 1, "maps": [[[1, 1, 1, 1]], [[1, 1, 1, 2]]], "v": [1]}
//! ```
//!
//! Map entries are `[out, i, j, c]` with 1-based indices, meaning
//! `B(x, y)_out += c * x_i * y_j`. In exact mode (the default) numbers must
//! be integers or `"p/q"` strings; in float mode they are decimal literals.
//! Unknown top-level fields are ignored, so files written by `reduce` and
//! `joint` carry their metadata alongside the payload.

use std::fs;
use std::path::Path;

use bilinear_jsr::{BilinearMap, BilinearSystem, Matrix, MatrixSet, Mode, Scalar, Term, Vector};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeName {
    #[default]
    Exact,
    Float,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Mode {
        match m {
            ModeName::Exact => Mode::Exact,
            ModeName::Float => Mode::Float,
        }
    }
}

type RawTerm = (usize, usize, usize, Value);

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawProblem {
    MatrixSet {
        #[serde(default)]
        mode: ModeName,
        matrices: Vec<Vec<Vec<Value>>>,
    },
    BilinearSystem {
        #[serde(default)]
        mode: ModeName,
        dim: usize,
        map: Vec<RawTerm>,
        v: Vec<Value>,
    },
    JointSystem {
        #[serde(default)]
        mode: ModeName,
        dim: usize,
        maps: Vec<Vec<RawTerm>>,
        v: Vec<Value>,
    },
}

#[derive(Clone, Debug)]
pub enum Problem {
    Matrices(MatrixSet),
    System(BilinearSystem),
    Joint { maps: Vec<BilinearMap>, v: Vector },
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Matrices(_) => "matrix_set",
            Problem::System(_) => "bilinear_system",
            Problem::Joint { .. } => "joint_system",
        }
    }

    pub fn into_matrices(self) -> Result<MatrixSet> {
        match self {
            Problem::Matrices(set) => Ok(set),
            other => Err(wrong_kind("matrix_set", &other)),
        }
    }

    pub fn into_system(self) -> Result<BilinearSystem> {
        match self {
            Problem::System(sys) => Ok(sys),
            other => Err(wrong_kind("bilinear_system", &other)),
        }
    }
}

fn wrong_kind(wanted: &str, got: &Problem) -> CliError {
    CliError::parse(format!("expected a {wanted} problem, found {}", got.kind()))
}

pub fn load(path: &Path) -> Result<Problem> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<Problem> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| CliError::parse(e.to_string()))?;
    let problem = match raw {
        RawProblem::MatrixSet { mode, matrices } => {
            let mode = mode.into();
            let mats = matrices
                .iter()
                .enumerate()
                .map(|(idx, rows)| matrix(rows, mode).map_err(|e| context(e, format!("matrix {}", idx + 1))))
                .collect::<Result<Vec<_>>>()?;
            Problem::Matrices(MatrixSet::new(mats).map_err(invalid)?)
        }
        RawProblem::BilinearSystem { mode, dim, map, v } => {
            let mode = mode.into();
            let map = bilinear_map(dim, &map, mode)?;
            let v = vector(&v, mode).map_err(|e| context(e, "v".into()))?;
            Problem::System(BilinearSystem::new(map, v).map_err(invalid)?)
        }
        RawProblem::JointSystem { mode, dim, maps, v } => {
            let mode = mode.into();
            if maps.is_empty() {
                return Err(CliError::parse("maps must not be empty"));
            }
            let maps = maps
                .iter()
                .enumerate()
                .map(|(idx, terms)| bilinear_map(dim, terms, mode).map_err(|e| context(e, format!("map {}", idx + 1))))
                .collect::<Result<Vec<_>>>()?;
            let v = vector(&v, mode).map_err(|e| context(e, "v".into()))?;
            if v.dim() != dim {
                return Err(CliError::parse(format!("v has dimension {}, expected {dim}", v.dim())));
            }
            Problem::Joint { maps, v }
        }
    };
    Ok(problem)
}

fn invalid(e: bilinear_jsr::Error) -> CliError {
    CliError::parse(e.to_string())
}

fn context(e: CliError, what: String) -> CliError {
    match e {
        CliError::Parse(msg) => CliError::parse(format!("{what}: {msg}")),
        other => other,
    }
}

fn scalar(value: &Value, mode: Mode) -> Result<Scalar> {
    match (mode, value) {
        (Mode::Exact, Value::Number(n)) if n.is_i64() || n.is_u64() => Scalar::parse_exact(&n.to_string()).map_err(invalid),
        (Mode::Exact, Value::String(s)) => Scalar::parse_exact(s).map_err(invalid),
        (Mode::Exact, other) => Err(CliError::parse(format!(
            "exact mode needs an integer or a \"p/q\" string, found {other}"
        ))),
        (Mode::Float, Value::Number(n)) => Ok(Scalar::float(n.as_f64().unwrap_or(f64::NAN))),
        (Mode::Float, Value::String(s)) => s
            .trim()
            .parse::<f64>()
            .map(Scalar::float)
            .map_err(|_| CliError::parse(format!("not a float: {s:?}"))),
        (Mode::Float, other) => Err(CliError::parse(format!("expected a number, found {other}"))),
    }
}

fn vector(values: &[Value], mode: Mode) -> Result<Vector> {
    let coords = values.iter().map(|v| scalar(v, mode)).collect::<Result<Vec<_>>>()?;
    Vector::new(coords).map_err(invalid)
}

fn matrix(rows: &[Vec<Value>], mode: Mode) -> Result<Matrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(CliError::parse(format!("row of length {} in a {n}x{n} matrix", bad.len())));
    }
    let entries = rows.iter().flatten().map(|v| scalar(v, mode)).collect::<Result<Vec<_>>>()?;
    Matrix::new(n, entries).map_err(invalid)
}

fn bilinear_map(dim: usize, raw: &[RawTerm], mode: Mode) -> Result<BilinearMap> {
    if dim == 0 {
        return Err(CliError::parse("dim must be at least 1"));
    }
    let index = |i: usize| {
        if (1..=dim).contains(&i) {
            Ok(i - 1)
        } else {
            Err(CliError::parse(format!("index {i} out of range 1..={dim}")))
        }
    };
    let terms = raw
        .iter()
        .map(|(out, i, j, c)| Ok(Term::new(index(*out)?, index(*i)?, index(*j)?, scalar(c, mode)?)))
        .collect::<Result<Vec<_>>>()?;
    BilinearMap::new(dim, terms).map_err(invalid)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

/// A `bilinear_system` problem file; `extra` fields are merged in as
/// metadata.
pub fn system_to_json(sys: &BilinearSystem, extra: Map<String, Value>) -> Value {
    let map: Vec<Value> = sys
        .map()
        .terms()
        .iter()
        .map(|t| json!([t.out + 1, t.left + 1, t.right + 1, t.coeff]))
        .collect();
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("bilinear_system"));
    obj.insert("mode".into(), json!(mode_name(sys.mode())));
    obj.insert("dim".into(), json!(sys.dim()));
    obj.insert("map".into(), Value::Array(map));
    obj.insert("v".into(), json!(sys.initial()));
    obj.extend(extra);
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let set = parse(r#"{"kind": "matrix_set", "matrices": [[[1, "1/2"], [0, 1]]]}"#).unwrap();
        let set = set.into_matrices().unwrap();
        assert_eq!(set.matrices()[0].get(0, 1), &Scalar::ratio(1, 2));

        let sys = parse(r#"{"kind": "bilinear_system", "dim": 2, "map": [[2, 1, 1, "-3/4"]], "v": [1, 0]}"#)
            .unwrap()
            .into_system()
            .unwrap();
        assert_eq!(sys.map().coefficient(1, 0, 0), Some(&Scalar::ratio(-3, 4)));

        let joint = parse(r#"{"kind": "joint_system", "dim": 1, "maps": [[[1, 1, 1, 1]], [[1, 1, 1, 2]]], "v": [1]}"#).unwrap();
        assert!(matches!(joint, Problem::Joint { ref maps, .. } if maps.len() == 2));
    }

    #[test]
    fn float_mode_accepts_decimals() {
        let sys = parse(r#"{"kind": "bilinear_system", "mode": "float", "dim": 1, "map": [[1, 1, 1, 0.5]], "v": [2.5]}"#)
            .unwrap()
            .into_system()
            .unwrap();
        assert_eq!(sys.initial().coords()[0], Scalar::float(2.5));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"kind": "matrix_set", "matrices": [[[0.5]]]}"#,
            r#"{"kind": "matrix_set", "matrices": [[[1, 2]]]}"#,
            r#"{"kind": "matrix_set", "matrices": []}"#,
            r#"{"kind": "bilinear_system", "dim": 1, "map": [[2, 1, 1, 1]], "v": [1]}"#,
            r#"{"kind": "bilinear_system", "dim": 1, "map": [[0, 1, 1, 1]], "v": [1]}"#,
            r#"{"kind": "bilinear_system", "dim": 2, "map": [], "v": [1]}"#,
            r#"{"kind": "bilinear_system", "dim": 1, "map": [], "v": ["x"]}"#,
            r#"{"kind": "tensor"}"#,
            "not json",
        ] {
            assert!(matches!(parse(text), Err(CliError::Parse(_))), "{text}");
        }
    }

    #[test]
    fn system_round_trips() {
        let text = r#"{"kind": "bilinear_system", "dim": 2, "map": [[1, 2, 1, "5/3"], [2, 1, 1, -1]], "v": ["1/2", 0]}"#;
        let sys = parse(text).unwrap().into_system().unwrap();
        let back = parse(&system_to_json(&sys, Map::new()).to_string()).unwrap().into_system().unwrap();
        assert_eq!(back, sys);
    }
}
