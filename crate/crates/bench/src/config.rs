//! Experiment configuration in a flat `key = value` text format.
//!
//! ```text
//! # Gaussian 300 x 100, randomized Kaczmarz against CGLS
//! name = gaussian-300x100
//! problem = gaussian
//! m = 300
//! n = 100
//! trials = 100
//! seed = 1
//! epsilon = 1e-14
//! solver = weighted
//! solver = cgls max_iterations=2000
//! solver = cgls submatrix=272
//! ```
//!
//! Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `name` | experiment name, used for output file names | required |
//! | `problem` | `gaussian`, `trig`, `tightness`, `clustered` or `file` | required |
//! | `m`, `n` | rows and columns (`gaussian`, `tightness`; `n` for `clustered`) | |
//! | `r`, `m` | polynomial degree and node count (`trig`) | |
//! | `nodes` | `uniform`, `equispaced` or `perturbed` (`trig`) | `uniform` |
//! | `jitter` | node perturbation for `nodes = perturbed` | |
//! | `kappa` | scaled condition number (`tightness`) | |
//! | `sigma_small` | smallest singular value (`clustered`) | `1e-8` |
//! | `path` | instance file (`file`) | |
//! | `trials` | Monte Carlo trials, at least 1 | `1` |
//! | `seed` | master seed | `0` |
//! | `epsilon` | target error | `1e-10` |
//! | `aggregation` | `mean_sq_error` or `median_error` | `mean_sq_error` |
//! | `resample` | draw a fresh matrix per trial | `true`, `false` for `trig` |
//! | `start` | `zero`, `e1` or `adversarial` | `zero` |
//! | `max_iterations` | default iteration budget per solver run | `1000000` |
//! | `solver` | repeatable; see below | at least one required |
//! | `out` | output directory | `results` |
//!
//! Solver lines: `cyclic`, `uniform`, `weighted`, `relaxed [lambda=L]` or
//! `cgls [submatrix=M]`, each optionally followed by `max_iterations=K`.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Uniform,
    Equispaced,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProblemSpec {
    Gaussian { m: usize, n: usize },
    Trig { r: usize, m: usize, nodes: NodeKind, jitter: f64 },
    Tightness { n: usize, m: usize, kappa: f64 },
    Clustered { n: usize, sigma_small: f64 },
    File { path: PathBuf },
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Trig { .. } => "trig",
            Self::Tightness { .. } => "tightness",
            Self::Clustered { .. } => "clustered",
            Self::File { .. } => "file",
        }
    }

    /// Whether each trial draws a fresh matrix unless configured otherwise.
    fn resamples_by_default(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::Clustered { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverKind {
    Cyclic,
    Uniform,
    Weighted,
    Relaxed { lambda: Option<f64> },
    Cgls { submatrix: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    /// Overrides the experiment-wide budget.
    pub max_iterations: Option<usize>,
}

impl SolverSpec {
    pub fn new(kind: SolverKind) -> Self {
        Self { kind, max_iterations: None }
    }

    pub fn with_budget(kind: SolverKind, max_iterations: usize) -> Self {
        Self { kind, max_iterations: Some(max_iterations) }
    }

    /// Column value used in outputs; unique within an experiment.
    pub fn label(&self) -> String {
        match self.kind {
            SolverKind::Cyclic => "cyclic".into(),
            SolverKind::Uniform => "uniform".into(),
            SolverKind::Weighted => "weighted".into(),
            SolverKind::Relaxed { lambda: None } => "relaxed".into(),
            SolverKind::Relaxed { lambda: Some(l) } => format!("relaxed_lambda_{l}"),
            SolverKind::Cgls { submatrix: None } => "cgls".into(),
            SolverKind::Cgls { submatrix: Some(s) } => format!("cgls_submatrix_{s}"),
        }
    }
}

impl FromStr for SolverSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut words = s.split_whitespace();
        let kind_word = words.next().ok_or("empty solver line")?;
        let mut options: HashMap<&str, &str> = HashMap::new();
        for word in words {
            let (k, v) = word.split_once('=').ok_or_else(|| format!("expected key=value, got `{word}`"))?;
            if options.insert(k, v).is_some() {
                return Err(format!("option `{k}` given twice"));
            }
        }
        let mut take = |key: &str| options.remove(key);
        let max_iterations = take("max_iterations").map(parse_value::<usize>).transpose()?;
        let kind = match kind_word {
            "cyclic" => SolverKind::Cyclic,
            "uniform" => SolverKind::Uniform,
            "weighted" => SolverKind::Weighted,
            "relaxed" => SolverKind::Relaxed { lambda: take("lambda").map(parse_value::<f64>).transpose()? },
            "cgls" => SolverKind::Cgls { submatrix: take("submatrix").map(parse_value::<usize>).transpose()? },
            other => return Err(format!("unknown solver `{other}`")),
        };
        if let Some(key) = options.keys().next() {
            return Err(format!("option `{key}` does not apply to `{kind_word}`"));
        }
        if let SolverKind::Relaxed { lambda: Some(l) } = kind {
            if !(l > 0.0 && l < 2.0) {
                return Err(format!("lambda must lie in (0, 2), got {l}"));
            }
        }
        if max_iterations == Some(0) {
            return Err("max_iterations must be positive".into());
        }
        Ok(Self { kind, max_iterations })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    MeanSqError,
    MedianError,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MeanSqError => "mean_sq_error",
            Self::MedianError => "median_error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPoint {
    Zero,
    /// First standard basis vector.
    E1,
    /// `x_true` plus the right singular vector of the smallest singular value.
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub aggregation: Aggregation,
    pub resample: bool,
    pub start: StartPoint,
    pub max_iterations: usize,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(name: &str, problem: ProblemSpec, solvers: Vec<SolverSpec>) -> Self {
        let resample = problem.resamples_by_default();
        Self {
            name: name.into(),
            problem,
            solvers,
            trials: 1,
            seed: 0,
            epsilon: 1e-10,
            aggregation: Aggregation::MeanSqError,
            resample,
            start: StartPoint::Zero,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            out: PathBuf::from("results"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(BenchError::Invalid(msg));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return invalid(format!("name `{}` is not usable as a file name", self.name));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive".into());
        }
        if self.solvers.is_empty() {
            return invalid("at least one solver is required".into());
        }
        let mut labels: Vec<String> = self.solvers.iter().map(SolverSpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("solver `{}` listed twice", w[0]));
        }
        match &self.problem {
            ProblemSpec::Gaussian { m, n } if *n == 0 || m < n => invalid(format!("gaussian needs m >= n >= 1, got {m} x {n}")),
            ProblemSpec::Trig { r, m, .. } if *m < 2 * r + 1 => invalid(format!("trig needs m >= 2r + 1, got r={r}, m={m}")),
            ProblemSpec::Clustered { n, sigma_small } if *n < 2 || !(*sigma_small > 0.0 && *sigma_small < 1.0) => {
                invalid(format!("clustered needs n >= 2 and 0 < sigma_small < 1, got n={n}, sigma_small={sigma_small}"))
            }
            _ => Ok(()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let mut config: Self = text.parse()?;
        // Relative instance paths are resolved against the config's directory.
        if let ProblemSpec::File { path: instance } = &mut config.problem {
            if instance.is_relative() {
                if let Some(dir) = path.parent() {
                    *instance = dir.join(&*instance);
                }
            }
        }
        Ok(config)
    }
}

fn parse_value<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}`"))
}

impl FromStr for ExperimentConfig {
    type Err = BenchError;

    fn from_str(text: &str) -> Result<Self> {
        let mut values: HashMap<String, (usize, String)> = HashMap::new();
        let mut solvers = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| BenchError::Config { line: line_no, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if key == "solver" {
                solvers.push(value.parse::<SolverSpec>().map_err(err)?);
            } else if values.insert(key.to_string(), (line_no, value.to_string())).is_some() {
                return Err(err(format!("key `{key}` given twice")));
            }
        }

        let mut fields = Fields { values };
        let name: String = fields.required("name")?;
        let family: String = fields.required("problem")?;
        let problem = match family.as_str() {
            "gaussian" => ProblemSpec::Gaussian { m: fields.required("m")?, n: fields.required("n")? },
            "trig" => {
                let nodes = match fields.optional::<String>("nodes")?.as_deref() {
                    None | Some("uniform") => NodeKind::Uniform,
                    Some("equispaced") => NodeKind::Equispaced,
                    Some("perturbed") => NodeKind::Perturbed,
                    Some(other) => return Err(fields.error("nodes", format!("unknown node layout `{other}`"))),
                };
                let jitter = if nodes == NodeKind::Perturbed { fields.required("jitter")? } else { 0.0 };
                ProblemSpec::Trig { r: fields.required("r")?, m: fields.required("m")?, nodes, jitter }
            }
            "tightness" => ProblemSpec::Tightness {
                n: fields.required("n")?,
                m: fields.required("m")?,
                kappa: fields.required("kappa")?,
            },
            "clustered" => ProblemSpec::Clustered {
                n: fields.required("n")?,
                sigma_small: fields.optional("sigma_small")?.unwrap_or(1e-8),
            },
            "file" => ProblemSpec::File { path: PathBuf::from(fields.required::<String>("path")?) },
            other => return Err(fields.error("problem", format!("unknown problem family `{other}`"))),
        };

        let mut config = Self::new(&name, problem, solvers);
        if let Some(v) = fields.optional("trials")? {
            config.trials = v;
        }
        if let Some(v) = fields.optional("seed")? {
            config.seed = v;
        }
        if let Some(v) = fields.optional("epsilon")? {
            config.epsilon = v;
        }
        if let Some(v) = fields.optional("max_iterations")? {
            config.max_iterations = v;
        }
        if let Some(v) = fields.optional("resample")? {
            config.resample = v;
        }
        if let Some(v) = fields.optional::<String>("out")? {
            config.out = PathBuf::from(v);
        }
        config.aggregation = match fields.optional::<String>("aggregation")?.as_deref() {
            None | Some("mean_sq_error") => Aggregation::MeanSqError,
            Some("median_error") => Aggregation::MedianError,
            Some(other) => return Err(fields.error("aggregation", format!("unknown aggregation `{other}`"))),
        };
        config.start = match fields.optional::<String>("start")?.as_deref() {
            None | Some("zero") => StartPoint::Zero,
            Some("e1") => StartPoint::E1,
            Some("adversarial") => StartPoint::Adversarial,
            Some(other) => return Err(fields.error("start", format!("unknown start point `{other}`"))),
        };
        if let Some(key) = fields.values.keys().min() {
            return Err(fields.error(&key.clone(), format!("key `{key}` does not apply to problem `{family}`")));
        }
        config.validate()?;
        Ok(config)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "problem",
    "m",
    "n",
    "r",
    "nodes",
    "jitter",
    "kappa",
    "sigma_small",
    "path",
    "trials",
    "seed",
    "epsilon",
    "aggregation",
    "resample",
    "start",
    "max_iterations",
    "solver",
    "out",
];

/// Parsed `key = value` pairs; each lookup consumes its key so leftovers can
/// be reported as inapplicable.
struct Fields {
    values: HashMap<String, (usize, String)>,
}

impl Fields {
    fn error(&self, key: &str, message: String) -> BenchError {
        match self.values.get(key) {
            Some((line, _)) => BenchError::Config { line: *line, message },
            None => BenchError::Invalid(message),
        }
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse()
                .map(Some)
                .map_err(|_| BenchError::Config { line, message: format!("invalid value `{raw}` for `{key}`") }),
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.optional(key)?.ok_or_else(|| BenchError::Invalid(format!("missing required key `{key}`")))
    }
}
