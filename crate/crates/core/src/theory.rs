//! Closed-form convergence and cost predictors, plus an exhaustive
//! expectation oracle for tiny systems.
//!
//! `log` is the natural logarithm throughout.

use crate::error::{Error, Result};
use crate::matcore::{distance, norm_sq, smallest_singular_pair, Scalar};
use crate::randsrc::build_row_distribution;
use crate::solvers::{project_equation, LinearSystem};

/// Largest number of row sequences [`exact_expected_error`] will enumerate.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 1.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("scaled condition number must be >= 1, got {kappa}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("accuracy must lie in (0, 1), got {eps}")))
    }
}

fn check_ratio(y: f64) -> Result<()> {
    if y > 0.0 && y < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("aspect ratio n/m must lie in (0, 1), got {y}")))
    }
}

/// Upper bound on `E ||x_k - x||^2`: `(1 - kappa^-2)^k * e0_sq`.
pub fn theorem1_bound(kappa: f64, k: u64, e0_sq: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(e0_sq >= 0.0) {
        return Err(Error::Domain(format!("initial squared error must be >= 0, got {e0_sq}")));
    }
    let rate = 1.0 - 1.0 / (kappa * kappa);
    Ok(rate.powf(k as f64) * e0_sq)
}

/// Lower bound attained from a worst-case start: `(1 - 2k/kappa^2) * e0_sq`.
///
/// Returned unclamped; it goes negative once `k > kappa^2 / 2`.
pub fn theorem2_lower_bound(kappa: f64, k: u64, e0_sq: f64) -> f64 {
    (1.0 - 2.0 * k as f64 / (kappa * kappa)) * e0_sq
}

/// Expected projection count to reach `E ||x_k - x||^2 <= eps^2 ||x_0 - x||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationEstimate {
    /// `2 log(eps) / log(1 - kappa^-2)`.
    pub exact: f64,
    /// `2 kappa^2 log(1/eps)`.
    pub approx: f64,
}

pub fn expected_iterations(kappa: f64, eps: f64) -> Result<IterationEstimate> {
    check_kappa(kappa)?;
    if kappa == 1.0 {
        return Err(Error::Domain("kappa = 1 converges in one projection; the estimate needs kappa > 1".into()));
    }
    check_eps(eps)?;
    let inv = 1.0 / (kappa * kappa);
    Ok(IterationEstimate { exact: 2.0 * eps.ln() / (-inv).ln_1p(), approx: 2.0 * kappa * kappa * (1.0 / eps).ln() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexityModel {
    RandomizedKaczmarz,
    Cgls,
}

/// Asymptotic cost of solving an `m x n` Gaussian system with `y = n/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityEstimate {
    pub flops: f64,
    pub iterations: f64,
    pub model: ComplexityModel,
}

/// Randomized Kaczmarz on a Gaussian system: `2n/(1-sqrt y)^2 log(1/eps)`
/// projections of `n` operations each.
pub fn rk_complexity(n: usize, y: f64, eps: f64) -> Result<ComplexityEstimate> {
    check_ratio(y)?;
    check_eps(eps)?;
    let n = n as f64;
    let iterations = 2.0 * n / (1.0 - y.sqrt()).powi(2) * (1.0 / eps).ln();
    Ok(ComplexityEstimate { flops: n * iterations, iterations, model: ComplexityModel::RandomizedKaczmarz })
}

/// CGLS on a Gaussian system: `2 log(2/eps) / log(1/y)` steps, each two
/// matvecs of `n^2/y` operations.
pub fn cgls_complexity(n: usize, y: f64, eps: f64) -> Result<ComplexityEstimate> {
    check_ratio(y)?;
    check_eps(eps)?;
    let n = n as f64;
    let iterations = 2.0 * (2.0 / eps).ln() / (1.0 / y).ln();
    Ok(ComplexityEstimate { flops: iterations * 2.0 * n * n / y, iterations, model: ComplexityModel::Cgls })
}

/// Ratio `y = n/m` minimizing the CGLS cost, `1/e`.
pub fn cgls_optimal_ratio() -> f64 {
    (-1.0f64).exp()
}

/// CGLS cost at the optimal ratio: `4 e n^2 log(2/eps)`.
pub fn cgls_optimal_complexity(n: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let n = n as f64;
    Ok(4.0 * std::f64::consts::E * n * n * (2.0 / eps).ln())
}

/// Aspect ratio where the two cost models agree, found by bisection on
/// `(0.01, 0.99)`.
pub fn crossover_ratio(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let gap = |y: f64| -> Result<f64> { Ok(rk_complexity(1, y, eps)?.flops - cgls_complexity(1, y, eps)?.flops) };
    let (mut lo, mut hi) = (0.01, 0.99);
    let (mut f_lo, f_hi) = (gap(lo)?, gap(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("cost models do not cross on (0.01, 0.99) for eps = {eps}")));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let f_mid = gap(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Almost-sure limits for Gaussian matrices with aspect ratio `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLimits {
    /// `(1 + sqrt y) / (1 - sqrt y)`.
    pub k_limit: f64,
    /// `1 / (1 - sqrt y)`.
    pub kappa_over_sqrt_n: f64,
}

pub fn gaussian_asymptotics(y: f64) -> Result<GaussianLimits> {
    check_ratio(y)?;
    let r = y.sqrt();
    Ok(GaussianLimits { k_limit: (1.0 + r) / (1.0 - r), kappa_over_sqrt_n: 1.0 / (1.0 - r) })
}

/// `E ||x_k - x_true||^2` for `k = 0..=k_max` under squared-norm sampling,
/// by enumerating every row sequence of length `k_max`.
///
/// Each sequence is weighted by the product of its row probabilities.
/// Sums are accumulated depth-first in index order, so the result is
/// deterministic.
pub fn exact_expected_error(system: &LinearSystem, x0: &[Scalar], k_max: u32) -> Result<Vec<f64>> {
    let x_true = system
        .x_true
        .as_deref()
        .ok_or_else(|| Error::Input("exact expectation needs a known solution".into()))?;
    if x0.len() != system.cols() {
        return Err(Error::Dimension(format!("x0 has length {}, expected {}", x0.len(), system.cols())));
    }
    let m = system.rows() as u64;
    let sequences = m.checked_pow(k_max).filter(|&s| s <= ENUMERATION_BUDGET);
    if sequences.is_none() {
        return Err(Error::Size(format!(
            "{m}^{k_max} row sequences exceed the enumeration budget of {ENUMERATION_BUDGET}"
        )));
    }
    let dist = build_row_distribution(&system.a)?;
    let probs: Vec<f64> = (0..system.rows()).map(|j| dist.probability(j)).collect();
    let norms = dist.weights().to_vec();

    let mut expected = vec![0.0; k_max as usize + 1];
    let mut scratch: Vec<Vec<Scalar>> = vec![x0.to_vec(); k_max as usize + 1];
    descend(system, x_true, &probs, &norms, &mut scratch, &mut expected, 0, 1.0);
    Ok(expected)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    system: &LinearSystem,
    x_true: &[Scalar],
    probs: &[f64],
    norms: &[f64],
    scratch: &mut [Vec<Scalar>],
    expected: &mut [f64],
    depth: usize,
    weight: f64,
) {
    let err_sq = {
        let x = &scratch[depth];
        let d = distance(x, x_true);
        d * d
    };
    expected[depth] += weight * err_sq;
    if depth + 1 == expected.len() {
        return;
    }
    for (j, &p) in probs.iter().enumerate() {
        let (head, tail) = scratch.split_at_mut(depth + 1);
        let next = &mut tail[0];
        next.copy_from_slice(&head[depth]);
        project_equation(system, j, norms[j], next, 1.0);
        descend(system, x_true, probs, norms, scratch, expected, depth + 1, weight * p);
    }
}

/// Exact one-step expectation `sum_j p_j ||P_j x0 - x||^2`.
pub fn one_step_expected_error(system: &LinearSystem, x0: &[Scalar]) -> Result<f64> {
    Ok(exact_expected_error(system, x0, 1)?[1])
}

/// Starting point `x_true + v` where `v` is a unit right singular vector of
/// the smallest singular value: the direction that realizes `kappa(A)` and
/// from which progress is slowest.
pub fn adversarial_start(system: &LinearSystem) -> Result<Vec<Scalar>> {
    let x_true = system
        .x_true
        .as_deref()
        .ok_or_else(|| Error::Input("adversarial start needs a known solution".into()))?;
    let (_, v) = smallest_singular_pair(&system.a)?;
    Ok(x_true.iter().zip(&v).map(|(x, d)| x + d).collect())
}

/// Squared distance `||x0 - x_true||^2`, a convenience for the bounds above.
pub fn initial_error_sq(system: &LinearSystem, x0: &[Scalar]) -> Option<f64> {
    system.x_true.as_deref().map(|xt| {
        let diff: Vec<Scalar> = x0.iter().zip(xt).map(|(a, b)| a - b).collect();
        norm_sq(&diff)
    })
}
