//! CSV, JSON and environment-stamp output.
//!
//! An experiment named `name` writes `<name>.csv`, `<name>.json` and
//! `<name>.meta.txt` into the output directory. Floating-point CSV fields use
//! 17 significant digits, so every double round-trips exactly. Nothing
//! time- or host-dependent is written, so reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::experiment::ExperimentResult;

pub const CSV_HEADER: &str = "solver,checkpoint_k,flops,mean_error,median_error,trials_contributing";

pub fn csv_string(result: &ExperimentResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for series in &result.solvers {
        for c in &series.checkpoints {
            let _ = writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{}",
                series.solver, c.checkpoint_k, c.flops, c.mean_error, c.median_error, c.trials_contributing
            );
        }
    }
    out
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn meta_string(result: &ExperimentResult) -> String {
    let env = &result.environment;
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.16e}"));
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", env.name);
    let _ = writeln!(out, "schema_version = {}", result.schema_version);
    let _ = writeln!(out, "version = {}", env.version);
    let _ = writeln!(out, "family = {}", env.family);
    let _ = writeln!(out, "m = {}", env.m);
    let _ = writeln!(out, "n = {}", env.n);
    let _ = writeln!(out, "trials = {}", env.trials);
    let _ = writeln!(out, "seed = {}", env.seed);
    let _ = writeln!(out, "epsilon = {:.16e}", env.epsilon);
    let _ = writeln!(out, "aggregation = {}", env.aggregation);
    let _ = writeln!(out, "resample = {}", env.resample);
    let _ = writeln!(out, "error_metric = {}", env.error_metric);
    let _ = writeln!(out, "representative_k = {}", opt(env.representative_k));
    let _ = writeln!(out, "representative_kappa = {}", opt(env.representative_kappa));
    let _ = writeln!(out, "failures = {}", env.failures);
    for s in &result.solvers {
        let sum = &s.summary;
        let _ = writeln!(
            out,
            "solver {} : reached = {}/{}, mean_iterations_to_eps = {}, mean_flops_to_eps = {}",
            s.solver,
            sum.trials_reached,
            sum.trials_ok + sum.trials_failed,
            opt(sum.mean_iterations_to_eps),
            opt(sum.mean_flops_to_eps),
        );
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| BenchError::io(path, e))
}

pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    write(path, &csv_string(result))
}

pub fn emit_json(result: &ExperimentResult, path: &Path) -> Result<()> {
    write(path, &json_string(result)?)
}

pub fn read_json(path: &Path) -> Result<ExperimentResult> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

/// Writes the three output files and returns their paths.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let name = &result.environment.name;
    let paths = [dir.join(format!("{name}.csv")), dir.join(format!("{name}.json")), dir.join(format!("{name}.meta.txt"))];
    emit_csv(result, &paths[0])?;
    emit_json(result, &paths[1])?;
    write(&paths[2], &meta_string(result))?;
    Ok(paths.to_vec())
}

/// Predicted costs of randomized Kaczmarz and CGLS over a grid of aspect
/// ratios `y = n/m` for Gaussian systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCurves {
    pub schema_version: u32,
    pub n: usize,
    pub epsilon: f64,
    pub crossover_ratio: f64,
    pub cgls_optimal_ratio: f64,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub y: f64,
    pub rk_flops: f64,
    pub cgls_flops: f64,
    pub rk_iterations: f64,
    pub cgls_iterations: f64,
}

pub const CURVES_CSV_HEADER: &str = "y,rk_flops,cgls_flops,rk_iterations,cgls_iterations";

pub fn curves_csv_string(curves: &ComplexityCurves) -> String {
    let mut out = String::from(CURVES_CSV_HEADER);
    out.push('\n');
    for p in &curves.points {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.y, p.rk_flops, p.cgls_flops, p.rk_iterations, p.cgls_iterations);
    }
    out
}

pub fn write_curves(curves: &ComplexityCurves, name: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let paths = [dir.join(format!("{name}.csv")), dir.join(format!("{name}.json")), dir.join(format!("{name}.meta.txt"))];
    write(&paths[0], &curves_csv_string(curves))?;
    write(&paths[1], &json_string(curves)?)?;
    let meta = format!(
        "name = {name}\nschema_version = {}\nversion = {}\nn = {}\nepsilon = {:.16e}\npoints = {}\ncrossover_ratio = {:.16e}\ncgls_optimal_ratio = {:.16e}\n",
        curves.schema_version,
        env!("CARGO_PKG_VERSION"),
        curves.n,
        curves.epsilon,
        curves.points.len(),
        curves.crossover_ratio,
        curves.cgls_optimal_ratio,
    );
    write(&paths[2], &meta)?;
    Ok(paths.to_vec())
}
