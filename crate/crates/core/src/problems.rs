//! Instance generators: Gaussian systems, row subsampling, the repeated
//! orthonormal-row system on which the expected rate is attained, systems
//! with a clustered spectrum, and trigonometric sampling systems.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matcore::{DenseMatrix, Scalar};
use crate::randsrc::RngStream;
use crate::solvers::LinearSystem;

fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// `m x n` matrix with independent `N(0, 1)` entries, Gaussian solution and
/// `b = A x`.
pub fn gaussian_system(m: usize, n: usize, rng: &mut RngStream) -> Result<LinearSystem> {
    if n == 0 || m < n {
        return Err(Error::Parameter(format!("need m >= n >= 1, got {m}x{n}")));
    }
    let data: Vec<Scalar> = (0..m * n).map(|_| real(rng.standard_normal())).collect();
    let a = DenseMatrix::new(m, n, data)?;
    let x: Vec<Scalar> = (0..n).map(|_| real(rng.standard_normal())).collect();
    LinearSystem::from_solution(a, x)
}

/// Uniformly random subset of `target_m` rows, without replacement, in the
/// order drawn. The known solution carries over.
pub fn subsample_rows(system: &LinearSystem, target_m: usize, rng: &mut RngStream) -> Result<LinearSystem> {
    let (m, n) = (system.rows(), system.cols());
    if target_m < n || target_m > m {
        return Err(Error::Parameter(format!("subsample size {target_m} outside [{n}, {m}]")));
    }
    // Partial Fisher-Yates.
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..target_m {
        let j = i + rng.below(m - i);
        idx.swap(i, j);
    }
    idx.truncate(target_m);
    let a = system.a.select_rows(&idx)?;
    let b = idx.iter().map(|&j| system.b[j]).collect();
    LinearSystem::new(a, b, system.x_true.clone())
}

/// System whose rows are standard basis vectors, with `e_1` repeated exactly
/// `m / kappa^2` times, so that the scaled condition number is `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessInstance {
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    /// Number of rows equal to `e_j`.
    pub multiplicities: Vec<usize>,
    /// `A x = 0` with `x_true = 0`.
    pub system: LinearSystem,
}

/// Rows: `m / kappa^2` copies of `e_1`, then the remaining rows assigned to
/// `e_2, ..., e_n` round-robin.
pub fn tightness_system(n: usize, m: usize, kappa: f64) -> Result<TightnessInstance> {
    if n == 0 || m < n {
        return Err(Error::Parameter(format!("need m >= n >= 1, got m={m}, n={n}")));
    }
    let kappa_sq = kappa * kappa;
    if !(kappa_sq >= n as f64 * (1.0 - 1e-12)) {
        return Err(Error::Parameter(format!("kappa^2 = {kappa_sq} must be at least n = {n}")));
    }
    let ratio = m as f64 / kappa_sq;
    let first = ratio.round();
    if first < 1.0 || (ratio - first).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Parameter(format!("m / kappa^2 = {ratio} must be a positive integer")));
    }
    let first = first as usize;
    let mut multiplicities = vec![0usize; n];
    multiplicities[0] = first;
    if n == 1 {
        if first != m {
            return Err(Error::Parameter("with n = 1 every row is e_1, so kappa^2 must be 1".into()));
        }
    } else {
        for i in 0..m - first {
            multiplicities[1 + i % (n - 1)] += 1;
        }
    }
    if multiplicities.iter().any(|&c| c < first) {
        return Err(Error::Parameter("some basis vector repeats fewer than m / kappa^2 times".into()));
    }
    let mut data = Vec::with_capacity(m * n);
    for (j, &count) in multiplicities.iter().enumerate() {
        for _ in 0..count {
            data.extend((0..n).map(|k| real(if k == j { 1.0 } else { 0.0 })));
        }
    }
    let a = DenseMatrix::new(m, n, data)?;
    let system = LinearSystem::new(a, vec![real(0.0); m], Some(vec![real(0.0); n]))?;
    Ok(TightnessInstance { n, m, kappa, multiplicities, system })
}

/// Orthogonal factor of a QR decomposition of an `n x n` Gaussian matrix,
/// by modified Gram-Schmidt with one reorthogonalization pass. Returned as
/// columns.
fn random_orthogonal(n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        for _ in 0..2 {
            for u in &q {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= d * ui);
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // A draw almost in the span of the previous columns is discarded.
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
    }
    q
}

/// Square `n x n` matrix `U diag(1, ..., 1, sigma_small) V^T` with random
/// orthogonal `U`, `V`, a Gaussian solution and `b = A x`.
pub fn clustered_spectrum_system(n: usize, sigma_small: f64, rng: &mut RngStream) -> Result<LinearSystem> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    if !(sigma_small > 0.0 && sigma_small < 1.0) {
        return Err(Error::Parameter(format!("sigma_small must lie in (0, 1), got {sigma_small}")));
    }
    let u = random_orthogonal(n, rng);
    let v = random_orthogonal(n, rng);
    let mut sigma = vec![1.0; n];
    sigma[n - 1] = sigma_small;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|l| u[l][i] * sigma[l] * v[l][j]).sum();
            data.push(real(s));
        }
    }
    let a = DenseMatrix::new(n, n, data)?;
    let x: Vec<Scalar> = (0..n).map(|_| real(rng.standard_normal())).collect();
    LinearSystem::from_solution(a, x)
}

/// `m` sorted uniform draws in `[0, 1)`; exact duplicates are redrawn.
pub fn uniform_sorted_nodes(m: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::Parameter(format!("need at least 2 nodes, got {m}")));
    }
    let mut nodes: Vec<f64> = (0..m).map(|_| rng.uniform01()).collect();
    loop {
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
        nodes.dedup();
        if nodes.len() == m {
            return Ok(nodes);
        }
        while nodes.len() < m {
            nodes.push(rng.uniform01());
        }
    }
}

/// `t_j = j / m`.
pub fn equispaced_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / m as f64).collect()
}

/// Equispaced nodes `(j + 1/2) / m`, each moved by a uniform offset in
/// `[-jitter, jitter]`. With `jitter < 1/(2m)` the order is preserved and the
/// largest torus gap is at most `1/m + 2 jitter`.
pub fn perturbed_equispaced_nodes(m: usize, jitter: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if m < 2 || !(jitter >= 0.0 && jitter < 0.5 / m as f64) {
        return Err(Error::Parameter(format!("need m >= 2 and 0 <= jitter < 1/(2m), got m={m}, jitter={jitter}")));
    }
    Ok((0..m).map(|j| (j as f64 + 0.5) / m as f64 + jitter * (2.0 * rng.uniform01() - 1.0)).collect())
}

/// Standard complex Gaussian coefficients for a degree-`r` polynomial.
pub fn random_trig_coefficients(r: usize, rng: &mut RngStream) -> Vec<Scalar> {
    let s = 0.5f64.sqrt();
    (0..2 * r + 1).map(|_| Scalar::new(s * rng.standard_normal(), s * rng.standard_normal())).collect()
}

/// `f(t) = sum_{l=-r}^{r} x_l exp(2 pi i l t)`, with `coefficients[l + r] = x_l`.
pub fn evaluate_trig_poly(coefficients: &[Scalar], t: f64) -> Result<Scalar> {
    if coefficients.len() % 2 == 0 {
        return Err(Error::Input(format!("expected 2r + 1 coefficients, got {}", coefficients.len())));
    }
    let r = (coefficients.len() / 2) as i64;
    Ok(coefficients
        .iter()
        .enumerate()
        .map(|(idx, x)| {
            let l = idx as i64 - r;
            let (s, c) = (2.0 * PI * l as f64 * t).sin_cos();
            x * Scalar::new(c, s)
        })
        .sum())
}

/// Weighted trigonometric sampling system with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigInstance {
    pub r: usize,
    pub nodes: Vec<f64>,
    /// Half the distance between each node's torus neighbours; sums to 1.
    pub weights: Vec<f64>,
    pub system: LinearSystem,
}

impl TrigInstance {
    pub fn n(&self) -> usize {
        2 * self.r + 1
    }

    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn coefficients(&self) -> &[Scalar] {
        self.system.x_true.as_deref().expect("trig instances carry their coefficients")
    }
}

fn check_nodes(nodes: &[f64]) -> Result<()> {
    if let Some(j) = nodes.iter().position(|t| !(0.0..1.0).contains(t)) {
        return Err(Error::Input(format!("node {j} = {} outside [0, 1)", nodes[j])));
    }
    if let Some(j) = nodes.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::Input(format!("nodes must be strictly increasing (position {})", j + 1)));
    }
    Ok(())
}

/// Torus weights `w_j = (t_{j+1} - t_{j-1}) / 2` with `t_0 = t_m - 1` and
/// `t_{m+1} = t_1 + 1`.
pub fn torus_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    check_nodes(nodes)?;
    let m = nodes.len();
    if m < 2 {
        return Err(Error::Input("need at least two nodes".into()));
    }
    Ok((0..m)
        .map(|j| {
            let prev = if j == 0 { nodes[m - 1] - 1.0 } else { nodes[j - 1] };
            let next = if j + 1 == m { nodes[0] + 1.0 } else { nodes[j + 1] };
            0.5 * (next - prev)
        })
        .collect())
}

/// `A[j, k] = sqrt(w_j) exp(2 pi i k t_j)` for `k = -r..=r` and
/// `b_j = sqrt(w_j) f(t_j)`, with `f` evaluated directly from the coefficients.
pub fn trig_system(r: usize, nodes: &[f64], coefficients: &[Scalar]) -> Result<TrigInstance> {
    let n = 2 * r + 1;
    let m = nodes.len();
    if m < n {
        return Err(Error::Input(format!("need at least n = 2r + 1 = {n} nodes, got {m}")));
    }
    if coefficients.len() != n {
        return Err(Error::Dimension(format!("expected {n} coefficients, got {}", coefficients.len())));
    }
    let weights = torus_weights(nodes)?;
    let ri = r as i64;
    let mut data = Vec::with_capacity(m * n);
    let mut b = Vec::with_capacity(m);
    for (&t, &w) in nodes.iter().zip(&weights) {
        let sw = w.sqrt();
        for k in -ri..=ri {
            let (s, c) = (2.0 * PI * k as f64 * t).sin_cos();
            data.push(Scalar::new(sw * c, sw * s));
        }
        b.push(evaluate_trig_poly(coefficients, t)? * sw);
    }
    let a = DenseMatrix::new(m, n, data)?;
    let system = LinearSystem::new(a, b, Some(coefficients.to_vec()))?;
    Ok(TrigInstance { r, nodes: nodes.to_vec(), weights, system })
}

/// Largest distance between torus neighbours, including the wraparound gap
/// `1 - t_m + t_1`.
pub fn max_torus_gap(nodes: &[f64]) -> Result<f64> {
    check_nodes(nodes)?;
    let wrap = 1.0 - nodes[nodes.len() - 1] + nodes[0];
    Ok(nodes.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max))
}

/// Condition number certificate `(1 + 2 delta r) / (1 - 2 delta r)` for
/// sampling sets whose neighbour distance is at most `delta < 1/(2r)`.
pub fn groechenig_bound(delta: f64, r: usize) -> Result<f64> {
    let x = 2.0 * delta * r as f64;
    if !(delta > 0.0) || x >= 1.0 {
        return Err(Error::Domain(format!("need 0 < delta < 1/(2r); got delta={delta}, r={r}")));
    }
    Ok((1.0 + x) / (1.0 - x))
}
