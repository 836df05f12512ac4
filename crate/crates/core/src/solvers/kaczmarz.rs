use super::trace::{TraceBuilder, TraceRecord};
use super::{check_relaxation, flop_cost, FlopKind, IterateTrace, LinearSystem, SolverOptions, Termination};
use crate::error::{Error, Result};
use crate::matcore::{norm, norm_sq, row_times, Scalar};
use crate::randsrc::{build_row_distribution, RngStream, WeightedIndexDistribution};

/// Row sampling rule for the randomized solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Row `j` with probability `||a_j||^2 / ||A||_F^2`.
    SquaredNorm,
    /// Every row equally likely.
    Uniform,
}

enum RowOrder {
    Cyclic,
    Random { dist: WeightedIndexDistribution, rng: RngStream },
}

impl RowOrder {
    #[inline]
    fn next(&mut self, k: u64, m: usize) -> usize {
        match self {
            RowOrder::Cyclic => (k % m as u64) as usize,
            RowOrder::Random { dist, rng } => dist.sample(rng),
        }
    }
}

/// Projects `x` in place onto (or, with `lambda != 1`, past) the hyperplane
/// of equation `j`: `x += lambda * (b_j - (A x)_j) / ||A_j||^2 * conj(A_j)`.
#[inline]
pub fn project_equation(system: &LinearSystem, j: usize, row_norm_sq: f64, x: &mut [Scalar], lambda: f64) {
    let row = system.a.row(j);
    let coef = (system.b[j] - row_times(row, x)) * (lambda / row_norm_sq);
    for (xi, aj) in x.iter_mut().zip(row) {
        *xi += coef * aj.conj();
    }
}

fn row_norms(system: &LinearSystem) -> Result<Vec<f64>> {
    let norms: Vec<f64> = (0..system.rows()).map(|j| norm_sq(system.a.row(j))).collect();
    match norms.iter().position(|&w| w <= 0.0) {
        Some(row) => Err(Error::DegenerateRow { row }),
        None => Ok(norms),
    }
}

fn run(system: &LinearSystem, opts: &SolverOptions, mut order: RowOrder, lambda: f64) -> Result<IterateTrace> {
    let (m, n) = (system.rows(), system.cols());
    opts.validate(n)?;
    check_relaxation(lambda)?;
    let norms = row_norms(system)?;
    let stride = opts.trace_stride.unwrap_or(m) as u64;
    let step_flops = flop_cost(FlopKind::KaczmarzStep { n });
    let b_norm = norm(&system.b);
    let eps = opts.target_error;

    let mut x = opts.start(n);
    let record = |x: &[Scalar], k: u64, error: Option<f64>| TraceRecord {
        k,
        error,
        residual: system.residual_norm(x),
        flops: k * step_flops,
    };

    let initial = record(&x, 0, system.error_norm(&x));
    let mut trace = TraceBuilder::new(initial);
    if initial_converged(&initial, system, b_norm, eps) {
        return Ok(trace.finish(Termination::ReachedTolerance, x));
    }

    let max = opts.max_iterations as u64;
    let mut k = 0u64;
    while k < max {
        let j = order.next(k, m);
        project_equation(system, j, norms[j], &mut x, lambda);
        k += 1;

        if let Some(err) = system.error_norm(&x) {
            if err <= eps {
                trace.push(record(&x, k, Some(err)));
                return Ok(trace.finish(Termination::ReachedTolerance, x));
            }
            if k % stride == 0 {
                trace.push(record(&x, k, Some(err)));
            }
        } else if k % stride == 0 {
            let rec = record(&x, k, None);
            trace.push(rec);
            if rec.residual <= eps * b_norm {
                return Ok(trace.finish(Termination::ReachedTolerance, x));
            }
        }
    }
    if trace.last_k() < k {
        let err = system.error_norm(&x);
        trace.push(record(&x, k, err));
    }
    Ok(trace.finish(Termination::BudgetExhausted, x))
}

pub(super) fn initial_converged(rec: &TraceRecord, system: &LinearSystem, b_norm: f64, eps: f64) -> bool {
    match rec.error {
        Some(e) => e <= eps,
        None => system.x_true.is_none() && rec.residual <= eps * b_norm,
    }
}

/// Classical Kaczmarz: rows visited in order `0, 1, ..., m-1, 0, ...`.
pub fn kaczmarz_cyclic(system: &LinearSystem, opts: &SolverOptions) -> Result<IterateTrace> {
    run(system, opts, RowOrder::Cyclic, 1.0)
}

/// Randomized Kaczmarz with the given row weighting. Rows are drawn from a
/// stream seeded with `opts.seed`.
pub fn kaczmarz_randomized(system: &LinearSystem, opts: &SolverOptions, weighting: Weighting) -> Result<IterateTrace> {
    let dist = match weighting {
        Weighting::SquaredNorm => build_row_distribution(&system.a)?,
        Weighting::Uniform => WeightedIndexDistribution::uniform(system.rows())?,
    };
    run(system, opts, RowOrder::Random { dist, rng: RngStream::new(opts.seed) }, 1.0)
}

/// Squared-norm randomized Kaczmarz with constant relaxation `lambda`,
/// taken from `opts.relaxation` or defaulting to `1 + n/m`.
pub fn kaczmarz_relaxed(system: &LinearSystem, opts: &SolverOptions) -> Result<IterateTrace> {
    let lambda = opts.relaxation.unwrap_or(1.0 + system.cols() as f64 / system.rows() as f64);
    check_relaxation(lambda)?;
    let dist = build_row_distribution(&system.a)?;
    run(system, opts, RowOrder::Random { dist, rng: RngStream::new(opts.seed) }, lambda)
}
