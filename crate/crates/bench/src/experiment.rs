//! Monte Carlo execution and aggregation.
//!
//! Trial `t` draws everything it needs from `derive_stream(seed, t)`: first
//! the instance (or just the solution vector when the matrix is fixed), then
//! one solver seed per listed solver, in order, plus a row subset for each
//! `cgls submatrix=` entry right after its seed. Trials run in parallel and
//! are reduced in trial-index order, so results do not depend on scheduling.
//!
//! Aggregation treats each trace as a right-continuous step function of the
//! flop count: at a checkpoint `f` a trial contributes the error of its last
//! record with `flops <= f`, and after termination its final error is held.
//! Checkpoints are the union of all record flop counts over every solver and
//! trial, so all solvers are tabulated on the same flop axis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kaczmarz::matcore::condition_numbers;
use kaczmarz::problems::{
    clustered_spectrum_system, equispaced_nodes, gaussian_system, perturbed_equispaced_nodes, random_trig_coefficients,
    subsample_rows, tightness_system, trig_system, uniform_sorted_nodes,
};
use kaczmarz::randsrc::{derive_stream, RngStream};
use kaczmarz::solvers::{cgls, kaczmarz_cyclic, kaczmarz_randomized, kaczmarz_relaxed, IterateTrace, TraceRecord, Weighting};
use kaczmarz::theory::adversarial_start;
use kaczmarz::{DenseMatrix, LinearSystem, Scalar, SolverOptions};

use crate::config::{Aggregation, ExperimentConfig, NodeKind, ProblemSpec, SolverKind, StartPoint};
use crate::error::Result;
use crate::instance::InstanceFile;

pub const SCHEMA_VERSION: u32 = 1;

/// Aggregated statistics at one point of the flop axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Largest iteration count in effect among contributing trials.
    pub checkpoint_k: u64,
    pub flops: u64,
    pub mean_error: f64,
    pub median_error: f64,
    pub mean_sq_error: f64,
    /// The statistic selected by the experiment's aggregation setting.
    pub aggregate: f64,
    /// Trials whose trace enters the statistics (all trials that did not fail).
    pub trials_contributing: usize,
    /// Trials that keep iterating past this flop count.
    pub trials_active: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub trials_reached: usize,
    /// Means and medians over the trials that reached the target.
    pub mean_iterations_to_eps: Option<f64>,
    pub mean_flops_to_eps: Option<f64>,
    pub median_flops_to_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSeries {
    pub solver: String,
    pub checkpoints: Vec<Checkpoint>,
    pub summary: SolverSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSolverSummary {
    pub solver: String,
    pub iterations: u64,
    pub flops: u64,
    pub reached: bool,
    pub final_error: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    /// `||x_0 - x_true||^2`, or `||b - A x_0||^2` when the solution is unknown.
    pub initial_error_sq: Option<f64>,
    pub solvers: Vec<TrialSolverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub name: String,
    pub family: String,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub aggregation: Aggregation,
    pub resample: bool,
    pub start: StartPoint,
    /// `error` (distance to the true solution) or `residual`.
    pub error_metric: String,
    /// Condition numbers of the trial-0 instance.
    pub representative_k: Option<f64>,
    pub representative_kappa: Option<f64>,
    pub failures: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub environment: Environment,
    pub solvers: Vec<SolverSeries>,
    pub trials: Vec<TrialSummary>,
}

impl ExperimentResult {
    pub fn series(&self, solver: &str) -> Option<&SolverSeries> {
        self.solvers.iter().find(|s| s.solver == solver)
    }
}

/// Matrix data shared by all trials when the experiment does not resample.
enum FixedPart {
    None,
    Matrix(DenseMatrix),
    Nodes(Vec<f64>),
    System(LinearSystem),
}

fn draw_nodes(m: usize, nodes: NodeKind, jitter: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(match nodes {
        NodeKind::Uniform => uniform_sorted_nodes(m, rng)?,
        NodeKind::Equispaced => equispaced_nodes(m),
        NodeKind::Perturbed => perturbed_equispaced_nodes(m, jitter, rng)?,
    })
}

fn fixed_part(config: &ExperimentConfig) -> Result<FixedPart> {
    // Deterministic families are shared regardless of the resample flag.
    match &config.problem {
        ProblemSpec::Tightness { n, m, kappa } => return Ok(FixedPart::System(tightness_system(*n, *m, *kappa)?.system)),
        ProblemSpec::File { path } => return Ok(FixedPart::System(InstanceFile::read(path)?.into_system()?)),
        _ if config.resample => return Ok(FixedPart::None),
        _ => {}
    }
    let mut rng = RngStream::new(config.seed);
    Ok(match &config.problem {
        ProblemSpec::Gaussian { m, n } => FixedPart::Matrix(gaussian_system(*m, *n, &mut rng)?.a),
        ProblemSpec::Clustered { n, sigma_small } => FixedPart::Matrix(clustered_spectrum_system(*n, *sigma_small, &mut rng)?.a),
        ProblemSpec::Trig { m, nodes, jitter, .. } => FixedPart::Nodes(draw_nodes(*m, *nodes, *jitter, &mut rng)?),
        ProblemSpec::Tightness { .. } | ProblemSpec::File { .. } => unreachable!("handled above"),
    })
}

fn real_normal_vector(n: usize, rng: &mut RngStream) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::new(rng.standard_normal(), 0.0)).collect()
}

fn trial_instance(config: &ExperimentConfig, fixed: &FixedPart, rng: &mut RngStream) -> Result<LinearSystem> {
    if let FixedPart::System(system) = fixed {
        return Ok(system.clone());
    }
    Ok(match (&config.problem, fixed) {
        (ProblemSpec::Gaussian { m, n }, FixedPart::None) => gaussian_system(*m, *n, rng)?,
        (ProblemSpec::Clustered { n, sigma_small }, FixedPart::None) => clustered_spectrum_system(*n, *sigma_small, rng)?,
        (ProblemSpec::Gaussian { .. } | ProblemSpec::Clustered { .. }, FixedPart::Matrix(a)) => {
            LinearSystem::from_solution(a.clone(), real_normal_vector(a.cols(), rng))?
        }
        (ProblemSpec::Trig { r, m, nodes, jitter }, part) => {
            let drawn;
            let nodes = match part {
                FixedPart::Nodes(fixed_nodes) => fixed_nodes,
                _ => {
                    drawn = draw_nodes(*m, *nodes, *jitter, rng)?;
                    &drawn
                }
            };
            trig_system(*r, nodes, &random_trig_coefficients(*r, rng))?.system
        }
        _ => unreachable!("fixed part always matches the problem family"),
    })
}

fn start_point(start: StartPoint, system: &LinearSystem) -> Result<Option<Vec<Scalar>>> {
    Ok(match start {
        StartPoint::Zero => None,
        StartPoint::E1 => {
            let mut e1 = vec![Scalar::new(0.0, 0.0); system.cols()];
            e1[0] = Scalar::new(1.0, 0.0);
            Some(e1)
        }
        StartPoint::Adversarial => Some(adversarial_start(system)?),
    })
}

fn metric(rec: &TraceRecord) -> f64 {
    rec.error.unwrap_or(rec.residual)
}

struct TrialRun {
    initial_error_sq: Option<f64>,
    /// One entry per configured solver.
    outcomes: Vec<std::result::Result<IterateTrace, String>>,
}

fn run_trial(config: &ExperimentConfig, fixed: &FixedPart, trial: usize) -> TrialRun {
    let mut rng = derive_stream(config.seed, trial as u64);
    let fail_all = |msg: String| TrialRun {
        initial_error_sq: None,
        outcomes: config.solvers.iter().map(|_| Err(msg.clone())).collect(),
    };
    let system = match trial_instance(config, fixed, &mut rng) {
        Ok(s) => s,
        Err(e) => return fail_all(format!("instance generation failed: {e}")),
    };
    let x0 = match start_point(config.start, &system) {
        Ok(x0) => x0,
        Err(e) => return fail_all(format!("start point failed: {e}")),
    };
    let outcomes = config
        .solvers
        .iter()
        .map(|spec| {
            let mut opts = SolverOptions {
                x0: x0.clone(),
                max_iterations: spec.max_iterations.unwrap_or(config.max_iterations),
                target_error: config.epsilon,
                seed: rng.next_u64(),
                ..Default::default()
            };
            let trace = match spec.kind {
                SolverKind::Cyclic => kaczmarz_cyclic(&system, &opts),
                SolverKind::Uniform => kaczmarz_randomized(&system, &opts, Weighting::Uniform),
                SolverKind::Weighted => kaczmarz_randomized(&system, &opts, Weighting::SquaredNorm),
                SolverKind::Relaxed { lambda } => {
                    opts.relaxation = lambda;
                    kaczmarz_relaxed(&system, &opts)
                }
                SolverKind::Cgls { submatrix: None } => cgls(&system, &opts),
                SolverKind::Cgls { submatrix: Some(rows) } => {
                    subsample_rows(&system, rows, &mut rng).and_then(|sub| cgls(&sub, &opts))
                }
            };
            trace.map_err(|e| e.to_string())
        })
        .collect::<Vec<_>>();
    let initial_error_sq = outcomes.iter().flatten().next().map(|t| metric(&t.records[0]).powi(2));
    TrialRun { initial_error_sq, outcomes }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn aggregate_solver(label: &str, traces: &[&IterateTrace], failed: usize, grid: &[u64], aggregation: Aggregation) -> SolverSeries {
    let checkpoints = if traces.is_empty() {
        Vec::new()
    } else {
        grid.iter()
            .map(|&flops| {
                let recs: Vec<&TraceRecord> = traces.iter().map(|t| t.record_at_flops(flops)).collect();
                let mut errors: Vec<f64> = recs.iter().map(|r| metric(r)).collect();
                let squares: Vec<f64> = errors.iter().map(|e| e * e).collect();
                let mean_error = mean(&errors);
                let mean_sq_error = mean(&squares);
                let median_error = median(&mut errors);
                Checkpoint {
                    checkpoint_k: recs.iter().map(|r| r.k).max().unwrap_or(0),
                    flops,
                    mean_error,
                    median_error,
                    mean_sq_error,
                    aggregate: match aggregation {
                        Aggregation::MeanSqError => mean_sq_error,
                        Aggregation::MedianError => median_error,
                    },
                    trials_contributing: traces.len(),
                    trials_active: traces.iter().filter(|t| t.last().flops > flops).count(),
                }
            })
            .collect()
    };
    let reached: Vec<&IterateTrace> = traces.iter().copied().filter(|t| t.reached_tolerance()).collect();
    let (mean_iterations_to_eps, mean_flops_to_eps, median_flops_to_eps) = if reached.is_empty() {
        (None, None, None)
    } else {
        let iters: Vec<f64> = reached.iter().map(|t| t.last().k as f64).collect();
        let mut flops: Vec<f64> = reached.iter().map(|t| t.last().flops as f64).collect();
        (Some(mean(&iters)), Some(mean(&flops)), Some(median(&mut flops)))
    };
    SolverSeries {
        solver: label.to_string(),
        checkpoints,
        summary: SolverSummary {
            trials_ok: traces.len(),
            trials_failed: failed,
            trials_reached: reached.len(),
            mean_iterations_to_eps,
            mean_flops_to_eps,
            median_flops_to_eps,
        },
    }
}

/// Runs every trial of `config` and aggregates the traces.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let fixed = fixed_part(config)?;
    let runs: Vec<TrialRun> = (0..config.trials).into_par_iter().map(|t| run_trial(config, &fixed, t)).collect();
    assemble(config, &fixed, runs)
}

/// Runs the trials sequentially in the given order (a permutation of
/// `0..trials`) and aggregates them exactly as [`run_experiment`] does.
pub fn run_experiment_in_order(config: &ExperimentConfig, order: &[usize]) -> Result<ExperimentResult> {
    config.validate()?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..config.trials).collect::<Vec<_>>() {
        return Err(crate::error::BenchError::Invalid("order must be a permutation of the trial indices".into()));
    }
    let fixed = fixed_part(config)?;
    let mut runs: Vec<(usize, TrialRun)> = order.iter().map(|&t| (t, run_trial(config, &fixed, t))).collect();
    runs.sort_by_key(|(t, _)| *t);
    assemble(config, &fixed, runs.into_iter().map(|(_, r)| r).collect())
}

fn assemble(config: &ExperimentConfig, fixed: &FixedPart, runs: Vec<TrialRun>) -> Result<ExperimentResult> {
    let labels: Vec<String> = config.solvers.iter().map(|s| s.label()).collect();

    let mut grid: Vec<u64> = runs
        .iter()
        .flat_map(|r| r.outcomes.iter().flatten())
        .flat_map(|t| t.records.iter().map(|rec| rec.flops))
        .collect();
    grid.sort_unstable();
    grid.dedup();

    let solvers = labels
        .iter()
        .enumerate()
        .map(|(s, label)| {
            let traces: Vec<&IterateTrace> = runs.iter().filter_map(|r| r.outcomes[s].as_ref().ok()).collect();
            aggregate_solver(label, &traces, runs.len() - traces.len(), &grid, config.aggregation)
        })
        .collect::<Vec<_>>();

    let trials = runs
        .iter()
        .enumerate()
        .map(|(trial, run)| TrialSummary {
            trial,
            initial_error_sq: run.initial_error_sq,
            solvers: labels
                .iter()
                .zip(&run.outcomes)
                .map(|(label, outcome)| match outcome {
                    Ok(t) => TrialSolverSummary {
                        solver: label.clone(),
                        iterations: t.last().k,
                        flops: t.last().flops,
                        reached: t.reached_tolerance(),
                        final_error: metric(t.last()),
                        failure: None,
                    },
                    Err(msg) => TrialSolverSummary {
                        solver: label.clone(),
                        iterations: 0,
                        flops: 0,
                        reached: false,
                        final_error: 0.0,
                        failure: Some(msg.clone()),
                    },
                })
                .collect(),
        })
        .collect::<Vec<_>>();

    let failures = runs.iter().flat_map(|r| &r.outcomes).filter(|o| o.is_err()).count();
    let representative = trial_instance(config, fixed, &mut derive_stream(config.seed, 0)).ok();
    let report = representative.as_ref().and_then(|s| condition_numbers(&s.a).ok());
    Ok(ExperimentResult {
        schema_version: SCHEMA_VERSION,
        environment: Environment {
            name: config.name.clone(),
            family: config.problem.family().to_string(),
            m: representative.as_ref().map_or(0, LinearSystem::rows),
            n: representative.as_ref().map_or(0, LinearSystem::cols),
            trials: config.trials,
            seed: config.seed,
            epsilon: config.epsilon,
            aggregation: config.aggregation,
            resample: config.resample,
            start: config.start,
            error_metric: match representative.as_ref().map(|s| s.x_true.is_some()) {
                Some(false) => "residual",
                _ => "error",
            }
            .to_string(),
            representative_k: report.as_ref().map(|r| r.k),
            representative_kappa: report.as_ref().map(|r| r.kappa),
            failures,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        solvers,
        trials,
    })
}
