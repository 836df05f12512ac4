//! Built-in experiments.
//!
//! | preset | setup |
//! |--------|-------|
//! | `fig1` | trigonometric sampling, `r = 50`, `m = 700` uniform random nodes fixed for the experiment, cyclic vs uniform vs squared-norm Kaczmarz, `eps = 1e-6`, 10 trials |
//! | `fig2` | predicted flop counts of randomized Kaczmarz and CGLS for Gaussian systems over 200 aspect ratios `y = n/m` in `[0.01, 0.99]`, `n = 100`, `eps = 1e-14` |
//! | `fig3` | Gaussian `300 x 100`, squared-norm Kaczmarz vs CGLS, `eps = 1e-14`, 100 trials |
//! | `fig4` | Gaussian `500 x 100`, squared-norm Kaczmarz vs CGLS on the full system and on a random `272 x 100` subsystem, `eps = 1e-14`, 100 trials |
//! | `relax` | Gaussian `300 x 100`, squared-norm Kaczmarz with `lambda = 1` and `lambda = 1 + n/m`, `eps = 1e-14`, 100 trials |

use kaczmarz::theory::{cgls_complexity, cgls_optimal_ratio, crossover_ratio, rk_complexity};

use crate::config::{ExperimentConfig, NodeKind, ProblemSpec, SolverKind, SolverSpec};
use crate::emit::{ComplexityCurves, CurvePoint};
use crate::error::{BenchError, Result};

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "relax"];
pub const DEFAULT_SEED: u64 = 1;

/// CG-step budget for CGLS in the Gaussian presets; far above what `eps`
/// requires, it only guards against stagnation.
const CGLS_BUDGET: usize = 10_000;

pub enum Preset {
    Experiment(ExperimentConfig),
    Curves { name: String, n: usize, epsilon: f64, points: usize },
}

fn gaussian(name: &str, m: usize, n: usize, solvers: Vec<SolverSpec>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, ProblemSpec::Gaussian { m, n }, solvers);
    c.trials = 100;
    c.epsilon = 1e-14;
    c
}

/// Looks up a preset; `seed` and `trials` override the defaults.
pub fn preset(name: &str, seed: Option<u64>, trials: Option<usize>) -> Result<Preset> {
    let cgls = |submatrix| SolverSpec::with_budget(SolverKind::Cgls { submatrix }, CGLS_BUDGET);
    let mut config = match name {
        "fig1" => {
            let mut c = ExperimentConfig::new(
                "fig1",
                ProblemSpec::Trig { r: 50, m: 700, nodes: NodeKind::Uniform, jitter: 0.0 },
                vec![SolverSpec::new(SolverKind::Cyclic), SolverSpec::new(SolverKind::Uniform), SolverSpec::new(SolverKind::Weighted)],
            );
            c.trials = 10;
            c.epsilon = 1e-6;
            c
        }
        "fig2" => return Ok(Preset::Curves { name: "fig2".into(), n: 100, epsilon: 1e-14, points: 200 }),
        "fig3" => gaussian("fig3", 300, 100, vec![SolverSpec::new(SolverKind::Weighted), cgls(None)]),
        "fig4" => gaussian("fig4", 500, 100, vec![SolverSpec::new(SolverKind::Weighted), cgls(None), cgls(Some(272))]),
        "relax" => gaussian(
            "relax",
            300,
            100,
            vec![SolverSpec::new(SolverKind::Weighted), SolverSpec::new(SolverKind::Relaxed { lambda: None })],
        ),
        other => {
            return Err(BenchError::Invalid(format!("unknown preset `{other}`; expected one of {}", PRESET_NAMES.join(", "))))
        }
    };
    config.seed = seed.unwrap_or(DEFAULT_SEED);
    if let Some(t) = trials {
        config.trials = t;
    }
    config.validate()?;
    Ok(Preset::Experiment(config))
}

/// Evaluates both complexity predictions on `points` equally spaced ratios
/// from 0.01 to 0.99.
pub fn complexity_curves(n: usize, epsilon: f64, points: usize) -> Result<ComplexityCurves> {
    if points < 2 {
        return Err(BenchError::Invalid("need at least two grid points".into()));
    }
    let points = (0..points)
        .map(|i| {
            let y = 0.01 + 0.98 * i as f64 / (points - 1) as f64;
            let rk = rk_complexity(n, y, epsilon)?;
            let cg = cgls_complexity(n, y, epsilon)?;
            Ok(CurvePoint { y, rk_flops: rk.flops, cgls_flops: cg.flops, rk_iterations: rk.iterations, cgls_iterations: cg.iterations })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexityCurves {
        schema_version: crate::experiment::SCHEMA_VERSION,
        n,
        epsilon,
        crossover_ratio: crossover_ratio(epsilon)?,
        cgls_optimal_ratio: cgls_optimal_ratio(),
        points,
    })
}
