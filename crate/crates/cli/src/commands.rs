use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bilinear_jsr::growth::{expand_levels_with, profile_from_levels};
use bilinear_jsr::joint::{assemble_joint, validate_joint};
use bilinear_jsr::jsr::{decide_jsr_zero, jsr_bracket_with, max_product_norm};
use bilinear_jsr::oracle::{
    brute_force_levels, check_level_structure, check_simulation, finite_rho_identity_for, Clause,
};
use bilinear_jsr::reduction::jsr_via_growth_with;
use bilinear_jsr::{build_joint_reduction, build_reduction, Limits, Norm, Pruning, Report, Vector};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::problem::{self, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(e.to_string()))?;
    emit(out, &text)?;
    emit(out, "\n")
}

fn csv(out: &mut dyn Write, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut text = format!("{header}\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    emit(out, &text)
}

pub struct GrowthArgs {
    pub t_max: usize,
    pub norm: Norm,
    pub pruning: Pruning,
    pub format: Format,
    pub levels: bool,
}

pub fn growth(problem: Problem, args: &GrowthArgs, limits: &Limits, out: &mut dyn Write) -> Result<u8> {
    let sys = problem.into_system()?;
    let levels = expand_levels_with(&sys, args.t_max, args.pruning, limits)?;
    let profile = profile_from_levels(&levels, args.norm, sys.mode());
    if profile.may_overcount() {
        eprintln!("warning: float levels are deduplicated bitwise; level_size may over-count");
    }
    match args.format {
        Format::Csv => csv(
            out,
            "t,lambda_t,root,level_size",
            profile
                .rows
                .iter()
                .map(|r| format!("{},{},{:?},{}", r.t, r.lambda_t, r.root, r.level_size)),
        )?,
        Format::Json => {
            let mut value = serde_json::to_value(&profile).map_err(|e| CliError::parse(e.to_string()))?;
            if args.levels {
                // BTreeSet iteration is already lexicographic
                let sets: Vec<Vec<&Vector>> = levels.iter().map(|l| l.iter().collect()).collect();
                value["levels"] = json!(sets);
            }
            emit_json(out, &value)?;
        }
    }
    Ok(0)
}

pub fn jsr(problem: Problem, t_max: usize, tol: f64, format: Format, limits: &Limits, out: &mut dyn Write) -> Result<u8> {
    let set = problem.into_matrices()?;
    let bracket = jsr_bracket_with(&set, t_max, tol, limits)?;
    match format {
        Format::Csv => csv(
            out,
            "t,lower,upper",
            bracket.rows.iter().map(|r| format!("{},{:?},{:?}", r.t, r.lower, r.upper)),
        )?,
        Format::Json => emit_json(out, &bracket)?,
    }
    Ok(0)
}

pub fn jsr_zero(problem: Problem, out: &mut dyn Write) -> Result<u8> {
    let set = problem.into_matrices()?;
    let zero = decide_jsr_zero(&set)?;
    emit(out, &format!("{zero}\n"))?;
    Ok(if zero { 0 } else { 1 })
}

fn write_file(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn reduce(problem: Problem, dir: &Path, out: &mut dyn Write) -> Result<u8> {
    let set = problem.into_matrices()?;
    let art = build_reduction(&set);
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for i in 1..=art.n() {
        let mut meta = Map::new();
        meta.insert(
            "reduction".into(),
            json!({
                "initial_index": i,
                "m": art.m(),
                "n": art.n(),
                "k": art.k(),
                "exponent": art.exponent(),
                "s_table": art.s_table(),
                "padded_count": art.padded_sigma().len(),
            }),
        );
        let path = dir.join(format!("system_{i}.json"));
        write_file(&path, &problem::system_to_json(&art.system(i)?, meta))?;
        written.push(path);
    }
    for path in written {
        emit(out, &format!("{}\n", path.display()))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct ViaGrowthRow {
    t: usize,
    max_norm: bilinear_jsr::Scalar,
    rho_estimate: f64,
    direct_max_norm: bilinear_jsr::Scalar,
    exact_match: bool,
}

pub fn jsr_via_growth(problem: Problem, depth: usize, format: Format, limits: &Limits, out: &mut dyn Write) -> Result<u8> {
    let set = problem.into_matrices()?;
    let rows = jsr_via_growth_with(&set, depth, limits)?
        .into_iter()
        .map(|r| {
            let direct = max_product_norm(&set, r.t)?;
            Ok(ViaGrowthRow {
                t: r.t,
                exact_match: r.max_norm == direct,
                max_norm: r.max_norm,
                rho_estimate: r.rho_estimate,
                direct_max_norm: direct,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        Format::Csv => csv(
            out,
            "t,max_norm,rho_estimate,direct_max_norm,exact_match",
            rows.iter().map(|r| {
                format!("{},{},{:?},{},{}", r.t, r.max_norm, r.rho_estimate, r.direct_max_norm, r.exact_match)
            }),
        )?,
        Format::Json => emit_json(out, &rows)?,
    }
    Ok(if rows.iter().all(|r| r.exact_match) { 0 } else { 1 })
}

fn engine_vs_oracle(sys: &bilinear_jsr::BilinearSystem, t_max: usize, limits: &Limits) -> Result<Report> {
    let engine = expand_levels_with(sys, t_max, Pruning::None, limits)?;
    let oracle = brute_force_levels(sys, t_max)?;
    let mut report = Report::new("level expansion against brute-force recursion");
    for (got, expected) in engine.iter().zip(&oracle) {
        report.push(Clause::sets(format!("A_{}", got.t()), expected.vectors(), got.vectors()));
    }
    Ok(report)
}

pub fn verify(problem: Problem, r_max: usize, t_max: usize, format: ReportFormat, limits: &Limits, out: &mut dyn Write) -> Result<u8> {
    let reports = match problem {
        Problem::Matrices(set) => {
            let art = build_reduction(&set);
            let mut reports = Vec::new();
            for i in 1..=art.n() {
                reports.push(check_level_structure(&art, i)?);
                reports.push(check_simulation(&art, i, r_max)?);
            }
            for t in 1..=r_max {
                reports.push(finite_rho_identity_for(&art, t)?);
            }
            reports
        }
        Problem::System(sys) => vec![engine_vs_oracle(&sys, t_max, limits)?],
        Problem::Joint { maps, v } => {
            let joint = assemble_joint(&maps, &v)?;
            vec![validate_joint(&joint, &maps, &v, r_max)?]
        }
    };
    match format {
        ReportFormat::Text => {
            for r in &reports {
                emit(out, &r.to_string())?;
            }
        }
        ReportFormat::Json => emit_json(out, &reports)?,
    }
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    if failed == 0 {
        Ok(0)
    } else {
        Err(CliError::Verification(format!("{failed} clause(s) failed")))
    }
}

pub fn joint(problem: Problem, target: Option<&PathBuf>, out: &mut dyn Write) -> Result<u8> {
    let (maps, v) = match problem {
        Problem::Joint { maps, v } => (maps, v),
        other => return Err(CliError::parse(format!("expected a joint_system problem, found {}", other.kind()))),
    };
    let joint = build_joint_reduction(&maps, &v)?;
    let mut meta = Map::new();
    meta.insert(
        "joint".into(),
        json!({
            "map_count": joint.map_count(),
            "n": joint.n(),
            "controller_len": joint.controller_len(),
            "steps_per_application": joint.steps_per_application(),
            "simulated_offset": joint.simulated_offset() + 1,
        }),
    );
    let value = problem::system_to_json(joint.system(), meta);
    match target {
        Some(path) => {
            write_file(path, &value)?;
            emit(out, &format!("{}\n", path.display()))?;
        }
        None => emit_json(out, &value)?,
    }
    Ok(0)
}
