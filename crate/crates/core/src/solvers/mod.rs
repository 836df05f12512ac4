//! Kaczmarz-family solvers and the CGLS baseline.
//!
//! Every solver returns an [`IterateTrace`]: checkpoints of error, residual
//! and cumulative flops under the cost model of [`flop_cost`]. A Kaczmarz
//! iteration is a single projection; a CGLS iteration is one full CG step.

mod cgls;
mod kaczmarz;
mod trace;

pub use cgls::cgls;
pub use kaczmarz::{kaczmarz_cyclic, kaczmarz_randomized, kaczmarz_relaxed, project_equation, Weighting};
pub use trace::{IterateTrace, Termination, TraceRecord};

use crate::error::{Error, Result};
use crate::matcore::{check_finite, distance, dot_unchecked, matvec, norm, norm_sq, DenseMatrix, Scalar};

/// Tolerance for the consistency check `||A x_true - b|| <= tol * ||b||`.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// A consistent system `A x = b`, optionally with its known solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: DenseMatrix,
    pub b: Vec<Scalar>,
    pub x_true: Option<Vec<Scalar>>,
}

impl LinearSystem {
    pub fn new(a: DenseMatrix, b: Vec<Scalar>, x_true: Option<Vec<Scalar>>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!("rhs has length {}, matrix has {} rows", b.len(), a.rows())));
        }
        check_finite(&b)?;
        if let Some(x) = &x_true {
            if x.len() != a.cols() {
                return Err(Error::Dimension(format!(
                    "solution has length {}, matrix has {} columns",
                    x.len(),
                    a.cols()
                )));
            }
            check_finite(x)?;
            let ax = matvec(&a, x)?;
            let resid = distance(&ax, &b);
            if resid > CONSISTENCY_TOL * norm(&b) {
                return Err(Error::Input(format!(
                    "inconsistent system: ||A x - b|| = {resid:e}, ||b|| = {:e}",
                    norm(&b)
                )));
            }
        }
        Ok(Self { a, b, x_true })
    }

    /// Builds `b = A x_true`.
    pub fn from_solution(a: DenseMatrix, x_true: Vec<Scalar>) -> Result<Self> {
        let b = matvec(&a, &x_true)?;
        Self::new(a, b, Some(x_true))
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// `||A x - b||_2`.
    pub fn residual_norm(&self, x: &[Scalar]) -> f64 {
        (0..self.rows())
            .map(|i| {
                let ai = self.a.row(i);
                (crate::matcore::row_times(ai, x) - self.b[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn error_norm(&self, x: &[Scalar]) -> Option<f64> {
        self.x_true.as_deref().map(|xt| distance(x, xt))
    }
}

/// Options shared by all solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Starting point; zero when absent.
    pub x0: Option<Vec<Scalar>>,
    /// Projection budget for Kaczmarz variants, CG-step budget for CGLS.
    pub max_iterations: usize,
    /// Stop when `||x_k - x_true|| <= target_error`, or when the relative
    /// residual drops below it if the solution is unknown.
    pub target_error: f64,
    /// Checkpoint cadence; `m` projections or one CGLS step when absent.
    pub trace_stride: Option<usize>,
    /// Constant relaxation parameter, must lie in `(0, 2)`.
    pub relaxation: Option<f64>,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { x0: None, max_iterations: 1_000_000, target_error: 1e-10, trace_stride: None, relaxation: None, seed: 0 }
    }
}

impl SolverOptions {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.target_error > 0.0) {
            return Err(Error::Parameter(format!("target_error must be positive, got {}", self.target_error)));
        }
        if let Some(l) = self.relaxation {
            check_relaxation(l)?;
        }
        if self.trace_stride == Some(0) {
            return Err(Error::Parameter("trace_stride must be at least 1".into()));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return Err(Error::Dimension(format!("x0 has length {}, expected {n}", x0.len())));
            }
            check_finite(x0)?;
        }
        Ok(())
    }

    pub(crate) fn start(&self, n: usize) -> Vec<Scalar> {
        self.x0.clone().unwrap_or_else(|| vec![Scalar::new(0.0, 0.0); n])
    }
}

pub(crate) fn check_relaxation(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "relaxation parameter {lambda} outside (0, 2); convergence on consistent systems needs 0 < lambda < 2"
        )))
    }
}

/// `x + lambda * (beta - <a, x>) / ||a||^2 * a`.
///
/// `a` is the hyperplane normal under the conjugate-linear-first inner
/// product, so the hyperplane of equation `j` of `A x = b` has normal
/// `conj(A[j, :])`.
pub fn project_row(x: &[Scalar], a: &[Scalar], beta: Scalar, lambda: f64) -> Result<Vec<Scalar>> {
    if x.len() != a.len() {
        return Err(Error::Dimension(format!("iterate length {} vs row length {}", x.len(), a.len())));
    }
    check_relaxation(lambda)?;
    let a_sq = norm_sq(a);
    if a_sq == 0.0 {
        return Err(Error::DegenerateRow { row: 0 });
    }
    let coef = (beta - dot_unchecked(a, x)) * (lambda / a_sq);
    Ok(x.iter().zip(a).map(|(xi, ai)| xi + coef * ai).collect())
}

/// Operation whose real-flop cost is being charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlopKind {
    KaczmarzStep { n: usize },
    CglsIteration { m: usize, n: usize },
}

/// Flops charged for the scalar recurrences of one CGLS step
/// (the step length and the direction update ratio).
pub const CGLS_SCALAR_FLOPS: u64 = 2;

/// Real-flop cost model: a complex multiply is 6 flops, a complex add 2.
///
/// * Kaczmarz step on `n` unknowns: inner product `8n - 2`, residual and
///   scaling `10`, complex axpy `8n`, total `16n + 8`.
/// * CGLS step: two dense matvecs `16mn`, the `m`-length norm and update
///   `16m`, the `n`-length norm and two updates `16n`, plus
///   [`CGLS_SCALAR_FLOPS`].
///
/// Complex storage is charged even when the data happens to be real.
pub fn flop_cost(kind: FlopKind) -> u64 {
    match kind {
        FlopKind::KaczmarzStep { n } => 16 * n as u64 + 8,
        FlopKind::CglsIteration { m, n } => {
            let (m, n) = (m as u64, n as u64);
            16 * m * n + 16 * n + 16 * m + CGLS_SCALAR_FLOPS
        }
    }
}
