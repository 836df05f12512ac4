//! Tolerances, sizes and runtime limits for the acceptance suite in
//! `tests/acceptance.rs`. Every number a criterion is judged against lives
//! here, so the suite itself contains no free constants.

use std::time::Duration;

/// Absolute slack on the one-step expected error bound.
pub const ONE_STEP_SLACK: f64 = 1e-10;
pub const ONE_STEP_SYSTEMS: usize = 20;
pub const ONE_STEP_SHAPE: (usize, usize) = (50, 20);

/// Monte Carlo runs for the tightness and enumeration checks.
pub const MC_RUNS: u64 = 10_000;
/// Allowed distance, in standard errors, between a Monte Carlo mean and its
/// exact or bounding value.
pub const MC_SIGMAS: f64 = 3.0;
pub const TIGHTNESS_STEPS: u64 = 20;
pub const LOWER_BOUND_STEPS: u64 = 3;

pub const ENUMERATION_SYSTEMS: usize = 5;
pub const ENUMERATION_DEPTH: u32 = 6;
/// Relative slack when comparing exact expectations with the upper bound.
pub const ENUMERATION_BOUND_SLACK: f64 = 1e-12;

/// Relative slack on `1 <= kappa / sqrt(n) <= k`.
pub const SANDWICH_SLACK: f64 = 1e-10;
pub const SANDWICH_INSTANCES: usize = 100;

pub const GAUSSIAN_SHAPE: (usize, usize) = (2000, 500);
pub const GAUSSIAN_K_RANGE: (f64, f64) = (2.7, 3.3);
pub const GAUSSIAN_KAPPA_RANGE: (f64, f64) = (1.8, 2.2);

pub const GAP_DEGREE: usize = 10;
pub const GAP_NODES: usize = 60;
/// Node offset; keeps the largest torus gap at most `1/60 + 2 * 0.004 < 1/40`.
pub const GAP_JITTER: f64 = 0.004;
pub const GAP_INSTANCES: usize = 10;
pub const GAP_K_MAX: f64 = 3.0;

pub const CLUSTER_N: usize = 100;
pub const CLUSTER_SIGMA: f64 = 1e-8;
pub const CLUSTER_STEPS: usize = 2;
pub const CLUSTER_REL_ERROR: f64 = 1e-6;
pub const CLUSTER_INSTANCES: usize = 10;

pub const CROSSOVER_EPS: f64 = 1e-14;
pub const CROSSOVER_RANGE: (f64, f64) = (0.30, 0.37);
pub const OPTIMAL_RATIO_GRID: f64 = 1e-4;
pub const OPTIMAL_RATIO_TOL: f64 = 1e-3;

pub const TRIG_DESK: (usize, usize) = (25, 350);
pub const TRIG_EPS: f64 = 1e-6;
pub const TRIG_TRIALS: usize = 10;

pub const EFFICIENCY_SHAPE: (usize, usize) = (300, 100);
pub const EFFICIENCY_EPS: f64 = 1e-10;
pub const EFFICIENCY_TRIALS: usize = 20;
/// Required ratio of mean CGLS flops to mean Kaczmarz flops.
pub const EFFICIENCY_FACTOR: f64 = 1.5;

pub const DETERMINISM_ARGS: [&str; 6] = ["preset", "fig3", "--seed", "7", "--trials", "5"];

/// Wall-clock limits per criterion, in criterion order.
pub const TIME_LIMITS: [Duration; 12] = [
    Duration::from_secs(10),
    Duration::from_secs(30),
    Duration::from_secs(30),
    Duration::from_secs(60),
    Duration::from_secs(300),
    Duration::from_secs(30),
    Duration::from_secs(10),
    Duration::from_secs(1),
    Duration::from_secs(120),
    Duration::from_secs(300),
    Duration::from_secs(30),
    Duration::from_secs(60),
];

/// Master seeds, one per criterion, fixed before the suite was first run.
pub const SEEDS: [u64; 12] = [101, 102, 103, 104, 105, 106, 107, 108, 109, 110, 111, 112];
