use super::kaczmarz::initial_converged;
use super::trace::{TraceBuilder, TraceRecord};
use super::{flop_cost, FlopKind, IterateTrace, LinearSystem, SolverOptions, Termination};
use crate::error::{Error, Result};
use crate::matcore::{adjoint_matvec, matvec, norm, norm_sq, Scalar};

/// Conjugate gradients on the normal equations `A* A x = A* b`, applied
/// through one product with `A` and one with `A*` per step; `A* A` is never
/// formed.
pub fn cgls(system: &LinearSystem, opts: &SolverOptions) -> Result<IterateTrace> {
    let (m, n) = (system.rows(), system.cols());
    opts.validate(n)?;
    let a = &system.a;
    let stride = opts.trace_stride.unwrap_or(1) as u64;
    let step_flops = flop_cost(FlopKind::CglsIteration { m, n });
    let b_norm = norm(&system.b);
    let eps = opts.target_error;

    let mut x = opts.start(n);
    let record = |x: &[Scalar], k: u64| TraceRecord {
        k,
        error: system.error_norm(x),
        residual: system.residual_norm(x),
        flops: k * step_flops,
    };
    let converged = |rec: &TraceRecord| match rec.error {
        Some(e) => e <= eps,
        None => rec.residual <= eps * b_norm,
    };

    let initial = record(&x, 0);
    let mut trace = TraceBuilder::new(initial);
    if initial_converged(&initial, system, b_norm, eps) {
        return Ok(trace.finish(Termination::ReachedTolerance, x));
    }

    let ax = matvec(a, &x)?;
    let mut r: Vec<Scalar> = system.b.iter().zip(&ax).map(|(b, v)| b - v).collect();
    let mut s = adjoint_matvec(a, &r)?;
    let mut p = s.clone();
    let mut gamma = norm_sq(&s);

    for k in 1..=opts.max_iterations as u64 {
        let q = matvec(a, &p)?;
        let delta = norm_sq(&q);
        if delta == 0.0 || !delta.is_finite() {
            return Err(Error::Numerical(format!(
                "CGLS breakdown at step {k}: search direction has ||A p||^2 = {delta:e}"
            )));
        }
        let alpha = gamma / delta;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += pi * alpha;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= qi * alpha;
        }
        s = adjoint_matvec(a, &r)?;
        let gamma_next = norm_sq(&s);
        let beta = gamma_next / gamma;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + *pi * beta;
        }
        gamma = gamma_next;

        let check_now = system.x_true.is_some() || k % stride == 0;
        if check_now {
            let rec = record(&x, k);
            if converged(&rec) {
                trace.push(rec);
                return Ok(trace.finish(Termination::ReachedTolerance, x));
            }
            if k % stride == 0 {
                trace.push(rec);
            }
        }
    }
    let k = opts.max_iterations as u64;
    if trace.last_k() < k {
        trace.push(record(&x, k));
    }
    Ok(trace.finish(Termination::BudgetExhausted, x))
}
