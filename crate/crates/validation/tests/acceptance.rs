//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. A criterion also fails when it exceeds its time limit.

use std::process::ExitCode;
use std::time::Instant;

use kaczmarz::matcore::{condition_numbers, norm, DenseMatrix, Scalar};
use kaczmarz::problems::{
    clustered_spectrum_system, gaussian_system, groechenig_bound, max_torus_gap, perturbed_equispaced_nodes,
    random_trig_coefficients, tightness_system, trig_system, uniform_sorted_nodes,
};
use kaczmarz::randsrc::{derive_stream, RngStream};
use kaczmarz::solvers::{cgls, kaczmarz_randomized, IterateTrace, LinearSystem, SolverOptions, Weighting};
use kaczmarz::theory::{
    cgls_complexity, crossover_ratio, exact_expected_error, initial_error_sq, one_step_expected_error, theorem1_bound,
    theorem2_lower_bound,
};
use kaczmarz_bench::config::{ExperimentConfig, NodeKind, ProblemSpec, SolverKind, SolverSpec};
use kaczmarz_bench::experiment::run_experiment;
use kaczmarz_validation::*;

type Verdict = Result<(bool, String), String>;

fn randomized_trace(system: &LinearSystem, x0: Option<Vec<Scalar>>, steps: u64, seed: u64) -> IterateTrace {
    let opts = SolverOptions {
        x0,
        max_iterations: steps as usize,
        target_error: f64::MIN_POSITIVE,
        trace_stride: Some(1),
        seed,
        ..Default::default()
    };
    kaczmarz_randomized(system, &opts, Weighting::SquaredNorm).expect("valid system")
}

/// Mean and standard error of `||x_k - x||^2` for `k = 0..=steps` over
/// `MC_RUNS` independent runs.
fn monte_carlo(system: &LinearSystem, x0: Option<Vec<Scalar>>, steps: u64, master: u64) -> Vec<(f64, f64)> {
    let mut sums = vec![0.0; steps as usize + 1];
    let mut squares = vec![0.0; steps as usize + 1];
    for run in 0..MC_RUNS {
        let trace = randomized_trace(system, x0.clone(), steps, derive_stream(master, run).next_u64());
        for k in 0..=steps {
            let e = trace.record_at(k).error.expect("known solution").powi(2);
            sums[k as usize] += e;
            squares[k as usize] += e * e;
        }
    }
    let n = MC_RUNS as f64;
    sums.iter()
        .zip(&squares)
        .map(|(s, q)| {
            let mean = s / n;
            let var = (q / n - mean * mean).max(0.0) * n / (n - 1.0);
            (mean, (var / n).sqrt())
        })
        .collect()
}

fn e1(n: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::new(0.0, 0.0); n];
    v[0] = Scalar::new(1.0, 0.0);
    v
}

fn one_step_bound() -> Verdict {
    let (m, n) = ONE_STEP_SHAPE;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..ONE_STEP_SYSTEMS {
        let mut rng = derive_stream(SEEDS[0], i as u64);
        let system = gaussian_system(m, n, &mut rng).map_err(|e| e.to_string())?;
        let x0: Vec<Scalar> = (0..n).map(|_| Scalar::new(rng.standard_normal(), rng.standard_normal())).collect();
        let kappa = condition_numbers(&system.a).map_err(|e| e.to_string())?.kappa;
        let e0 = initial_error_sq(&system, &x0).ok_or("missing solution")?;
        let e1 = one_step_expected_error(&system, &x0).map_err(|e| e.to_string())?;
        let bound = (1.0 - kappa.powi(-2)) * e0;
        worst_excess = worst_excess.max(e1 - bound);
        worst_ratio = worst_ratio.max(e1 / bound);
    }
    Ok((
        worst_excess <= ONE_STEP_SLACK,
        format!("max E1 - bound = {worst_excess:.3e}, max E1 / bound = {worst_ratio:.6}"),
    ))
}

fn tightness_samples(master: u64, steps: u64) -> Result<(f64, Vec<(f64, f64)>), String> {
    let inst = tightness_system(4, 8, 8f64.sqrt()).map_err(|e| e.to_string())?;
    Ok((inst.kappa, monte_carlo(&inst.system, Some(e1(4)), steps, master)))
}

fn tightness_equality() -> Verdict {
    let (kappa, stats) = tightness_samples(SEEDS[1], TIGHTNESS_STEPS)?;
    let rate = 1.0 - kappa.powi(-2);
    let mut worst: f64 = 0.0;
    for k in 1..=TIGHTNESS_STEPS as usize {
        let (mean, se) = stats[k];
        worst = worst.max((mean - rate.powi(k as i32)).abs() / se);
    }
    Ok((worst <= MC_SIGMAS, format!("rate = {rate}, max |mean - rate^k| = {worst:.2} standard errors")))
}

fn enumeration_oracle() -> Verdict {
    let mut worst_sigma: f64 = 0.0;
    let mut worst_bound = f64::NEG_INFINITY;
    for i in 0..ENUMERATION_SYSTEMS {
        let system = gaussian_system(3, 2, &mut derive_stream(SEEDS[2], i as u64)).map_err(|e| e.to_string())?;
        let x0 = vec![Scalar::new(0.0, 0.0); 2];
        let kappa = condition_numbers(&system.a).map_err(|e| e.to_string())?.kappa;
        let e0 = initial_error_sq(&system, &x0).ok_or("missing solution")?;
        let exact = exact_expected_error(&system, &x0, ENUMERATION_DEPTH).map_err(|e| e.to_string())?;
        let stats = monte_carlo(&system, None, ENUMERATION_DEPTH as u64, SEEDS[2] ^ ((i as u64 + 1) << 32));
        for k in 1..=ENUMERATION_DEPTH as usize {
            let (mean, se) = stats[k];
            worst_sigma = worst_sigma.max((mean - exact[k]).abs() / se);
            let bound = theorem1_bound(kappa, k as u64, e0).map_err(|e| e.to_string())?;
            worst_bound = worst_bound.max((exact[k] - bound) / e0);
        }
    }
    Ok((
        worst_sigma <= MC_SIGMAS && worst_bound <= ENUMERATION_BOUND_SLACK,
        format!("max |MC - exact| = {worst_sigma:.2} standard errors, max (exact - bound) / e0 = {worst_bound:.3e}"),
    ))
}

fn condition_sandwich() -> Verdict {
    let mut lowest: f64 = f64::INFINITY;
    let mut highest: f64 = 0.0;
    for i in 0..SANDWICH_INSTANCES {
        let mut rng = derive_stream(SEEDS[3], i as u64);
        let a = match i % 3 {
            0 => {
                let n = 1 + rng.below(30);
                gaussian_system(n + rng.below(2 * n + 1), n, &mut rng).map_err(|e| e.to_string())?.a
            }
            1 => {
                let n = 1 + rng.below(30);
                let m = n + rng.below(2 * n + 1);
                let data = (0..m * n).map(|_| Scalar::new(rng.standard_normal(), rng.standard_normal())).collect();
                DenseMatrix::new(m, n, data).map_err(|e| e.to_string())?
            }
            _ => {
                let r = 1 + rng.below(6);
                let m = 2 * r + 1 + rng.below(4 * r + 10);
                let nodes = uniform_sorted_nodes(m, &mut rng).map_err(|e| e.to_string())?;
                trig_system(r, &nodes, &random_trig_coefficients(r, &mut rng)).map_err(|e| e.to_string())?.system.a
            }
        };
        let report = condition_numbers(&a).map_err(|e| e.to_string())?;
        let scaled = report.kappa / (a.cols() as f64).sqrt();
        lowest = lowest.min(scaled);
        highest = highest.max(scaled / report.k);
    }
    Ok((
        lowest >= 1.0 - SANDWICH_SLACK && highest <= 1.0 + SANDWICH_SLACK,
        format!("min kappa/sqrt(n) = {lowest:.12}, max kappa/(sqrt(n) k) = {highest:.12}"),
    ))
}

fn gaussian_limits() -> Verdict {
    let (m, n) = GAUSSIAN_SHAPE;
    let system = gaussian_system(m, n, &mut RngStream::new(SEEDS[4])).map_err(|e| e.to_string())?;
    let report = condition_numbers(&system.a).map_err(|e| e.to_string())?;
    let scaled = report.kappa / (n as f64).sqrt();
    let inside = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
    Ok((
        inside(report.k, GAUSSIAN_K_RANGE) && inside(scaled, GAUSSIAN_KAPPA_RANGE),
        format!("k = {:.4}, kappa/sqrt(n) = {scaled:.4}", report.k),
    ))
}

fn gap_certificate() -> Verdict {
    let mut worst_k: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for i in 0..GAP_INSTANCES {
        let mut rng = derive_stream(SEEDS[5], i as u64);
        let nodes = perturbed_equispaced_nodes(GAP_NODES, GAP_JITTER, &mut rng).map_err(|e| e.to_string())?;
        let gap = max_torus_gap(&nodes).map_err(|e| e.to_string())?;
        let inst = trig_system(GAP_DEGREE, &nodes, &random_trig_coefficients(GAP_DEGREE, &mut rng)).map_err(|e| e.to_string())?;
        worst_k = worst_k.max(condition_numbers(&inst.system.a).map_err(|e| e.to_string())?.k);
        worst_gap = worst_gap.max(gap);
    }
    let quarter = 1.0 / (4.0 * GAP_DEGREE as f64);
    Ok((
        worst_gap <= quarter && worst_k <= GAP_K_MAX,
        format!(
            "max gap = {worst_gap:.5} (limit {quarter}), max k = {worst_k:.4}, bound at max gap = {:.4}",
            groechenig_bound(worst_gap, GAP_DEGREE).map_err(|e| e.to_string())?
        ),
    ))
}

fn clustered_two_steps() -> Verdict {
    let mut worst_rel: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut most_steps = 0;
    for i in 0..CLUSTER_INSTANCES {
        let system = clustered_spectrum_system(CLUSTER_N, CLUSTER_SIGMA, &mut derive_stream(SEEDS[6], i as u64))
            .map_err(|e| e.to_string())?;
        let x_norm = norm(system.x_true.as_ref().ok_or("missing solution")?);
        let b_norm = norm(&system.b);
        let opts = SolverOptions {
            max_iterations: 50,
            target_error: CLUSTER_REL_ERROR * x_norm,
            ..Default::default()
        };
        let trace = cgls(&system, &opts).map_err(|e| e.to_string())?;
        let at = trace.record_at(CLUSTER_STEPS as u64);
        worst_rel = worst_rel.max(at.error.ok_or("missing error")? / x_norm);
        worst_residual = worst_residual.max(at.residual / b_norm);
        most_steps = most_steps.max(trace.iterations_to_tolerance().unwrap_or(u64::MAX));
    }
    Ok((
        worst_rel <= CLUSTER_REL_ERROR,
        format!(
            "after {CLUSTER_STEPS} steps: max relative error = {worst_rel:.3e}, max relative residual = {worst_residual:.3e}; \
             steps needed for {CLUSTER_REL_ERROR:e} = {most_steps}"
        ),
    ))
}

fn complexity_crossover() -> Verdict {
    let y_star = crossover_ratio(CROSSOVER_EPS).map_err(|e| e.to_string())?;
    let steps = (1.0 / OPTIMAL_RATIO_GRID).round() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..steps {
        let y = i as f64 * OPTIMAL_RATIO_GRID;
        let flops = cgls_complexity(100, y, CROSSOVER_EPS).map_err(|e| e.to_string())?.flops;
        if flops < best.0 {
            best = (flops, y);
        }
    }
    let target = (-1.0f64).exp();
    Ok((
        (CROSSOVER_RANGE.0..=CROSSOVER_RANGE.1).contains(&y_star) && (best.1 - target).abs() <= OPTIMAL_RATIO_TOL,
        format!("crossover = {y_star:.6}, grid argmin = {:.4} (1/e = {target:.6})", best.1),
    ))
}

fn sampling_ordering() -> Verdict {
    let (r, m) = TRIG_DESK;
    let mut config = ExperimentConfig::new(
        "ordering",
        ProblemSpec::Trig { r, m, nodes: NodeKind::Uniform, jitter: 0.0 },
        vec![SolverSpec::new(SolverKind::Cyclic), SolverSpec::new(SolverKind::Uniform), SolverSpec::new(SolverKind::Weighted)],
    );
    config.trials = TRIG_TRIALS;
    config.seed = SEEDS[8];
    config.epsilon = TRIG_EPS;
    let result = run_experiment(&config).map_err(|e| e.to_string())?;
    let mut means = Vec::new();
    for s in &result.solvers {
        if s.summary.trials_reached != TRIG_TRIALS {
            return Ok((false, format!("{} reached the target in {}/{TRIG_TRIALS} trials", s.solver, s.summary.trials_reached)));
        }
        means.push(s.summary.mean_iterations_to_eps.ok_or("no mean")?);
    }
    Ok((
        means[2] < means[1] && means[1] < means[0],
        format!("mean projections: cyclic = {:.1}, uniform = {:.1}, weighted = {:.1}", means[0], means[1], means[2]),
    ))
}

fn flop_efficiency() -> Verdict {
    let (m, n) = EFFICIENCY_SHAPE;
    let mut config = ExperimentConfig::new(
        "efficiency",
        ProblemSpec::Gaussian { m, n },
        vec![SolverSpec::new(SolverKind::Weighted), SolverSpec::with_budget(SolverKind::Cgls { submatrix: None }, 10_000)],
    );
    config.trials = EFFICIENCY_TRIALS;
    config.seed = SEEDS[9];
    config.epsilon = EFFICIENCY_EPS;
    let result = run_experiment(&config).map_err(|e| e.to_string())?;
    let (mut flops, mut steps) = (Vec::new(), Vec::new());
    for s in &result.solvers {
        if s.summary.trials_reached != EFFICIENCY_TRIALS {
            return Ok((false, format!("{} reached the target in {}/{EFFICIENCY_TRIALS} trials", s.solver, s.summary.trials_reached)));
        }
        flops.push(s.summary.mean_flops_to_eps.ok_or("no mean")?);
        steps.push(s.summary.mean_iterations_to_eps.ok_or("no mean")?);
    }
    let ratio = flops[1] / flops[0];
    // For reference only: the same runs priced at n flops per projection
    // and 2mn flops per CG step.
    let coarse = steps[1] * 2.0 * (m * n) as f64 / (steps[0] * n as f64);
    Ok((
        ratio >= EFFICIENCY_FACTOR,
        format!(
            "mean flops: kaczmarz = {:.4e}, cgls = {:.4e}, cgls / kaczmarz = {ratio:.3} (need {EFFICIENCY_FACTOR}); \
             mean steps: kaczmarz = {:.0}, cgls = {:.1}, ratio at n per projection and 2mn per CG step = {coarse:.3}",
            flops[0], flops[1], steps[0], steps[1]
        ),
    ))
}

fn lower_bound_consistency() -> Verdict {
    let (kappa, stats) = tightness_samples(SEEDS[10], LOWER_BOUND_STEPS)?;
    let e0 = stats[0].0;
    let mut worst = f64::INFINITY;
    for k in 1..=LOWER_BOUND_STEPS {
        let (mean, se) = stats[k as usize];
        let bound = theorem2_lower_bound(kappa, k, e0);
        worst = worst.min((mean - bound) / se);
    }
    Ok((worst >= -MC_SIGMAS, format!("min (mean - lower bound) = {worst:.2} standard errors")))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut csvs = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        let mut args = vec!["kaczmarz-bench".to_string()];
        args.extend(DETERMINISM_ARGS.iter().map(|s| s.to_string()));
        args.extend(["--out".to_string(), out.display().to_string()]);
        let code = kaczmarz_bench::cli::cli_main_with_output(args, &mut std::io::sink());
        if code != 0 {
            return Ok((false, format!("{run} run exited with {code}")));
        }
        csvs.push(std::fs::read(out.join("fig3.csv")).map_err(|e| e.to_string())?);
    }
    Ok((csvs[0] == csvs[1], format!("{} bytes per CSV, identical = {}", csvs[0].len(), csvs[0] == csvs[1])))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("one-step expected error within the contraction bound", one_step_bound),
        ("tightness system decays exactly at the predicted rate", tightness_equality),
        ("enumeration oracle matches Monte Carlo and the upper bound", enumeration_oracle),
        ("1 <= kappa/sqrt(n) <= k on assorted instances", condition_sandwich),
        ("Gaussian 2000x500 condition numbers near their limits", gaussian_limits),
        ("gap below 1/(4r) certifies k <= 3", gap_certificate),
        ("CGLS on a clustered spectrum converges in two steps", clustered_two_steps),
        ("complexity crossover and CGLS optimal aspect ratio", complexity_crossover),
        ("weighted beats uniform beats cyclic on trig sampling", sampling_ordering),
        ("Kaczmarz needs 1.5x fewer flops than CGLS on 300x100", flop_efficiency),
        ("Monte Carlo mean respects the lower bound", lower_bound_consistency),
        ("preset fig3 output is byte-identical across runs", determinism),
    ];
    let mut failures = 0;
    for (i, ((title, check), limit)) in criteria.into_iter().zip(TIME_LIMITS).enumerate() {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match verdict {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed < limit;
        let pass = ok && in_time;
        failures += usize::from(!pass);
        let timing = format!("{:.2}s, limit {}s{}", elapsed.as_secs_f64(), limit.as_secs(), if in_time { "" } else { " EXCEEDED" });
        println!("{} [{:>2}] {title}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", TIME_LIMITS.len() - failures, TIME_LIMITS.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
