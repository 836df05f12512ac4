//! Dense complex linear algebra kernel.
//!
//! Everything is stored as [`Complex64`]; real instances simply carry zero
//! imaginary parts. Inner products are conjugate-linear in the first
//! argument: `<u, v> = sum_j conj(u_j) v_j`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Rows with `sigma_min <= RANK_TOL * sigma_max` are treated as rank deficient.
pub const RANK_TOL: f64 = 1e-13;

/// Maximum number of one-sided Jacobi sweeps.
pub const MAX_SWEEPS: usize = 60;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("matrix must be non-empty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Scalar::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows have differing lengths".into()));
        }
        Self::new(m, n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    /// Square matrix with the given real diagonal.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![Scalar::new(0.0, 0.0); n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = Scalar::new(d, 0.0);
        }
        Self { rows: n, cols: n, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[Scalar] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &j in indices {
            if j >= self.rows {
                return Err(Error::IndexOutOfRange { index: j, len: self.rows });
            }
            data.extend_from_slice(self.row(j));
        }
        Self::new(indices.len(), self.cols, data)
    }

    /// Product of two matrices.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![Scalar::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                for (o, &b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        DenseMatrix::new(self.rows, other.cols, data)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        DenseMatrix { rows: self.cols, cols: self.rows, data }
    }
}

pub(crate) fn check_finite(v: &[Scalar]) -> Result<()> {
    match v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(p) => Err(Error::NonFinite(p)),
        None => Ok(()),
    }
}

fn check_len(u: usize, v: usize, what: &str) -> Result<()> {
    if u != v {
        return Err(Error::Dimension(format!("{what}: lengths {u} and {v} differ")));
    }
    Ok(())
}

/// `<u, v> = sum_j conj(u_j) v_j`.
pub fn inner_product(u: &[Scalar], v: &[Scalar]) -> Result<Scalar> {
    check_len(u.len(), v.len(), "inner product")?;
    Ok(dot_unchecked(u, v))
}

#[inline]
pub(crate) fn dot_unchecked(u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(v).fold(Scalar::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}

/// Plain bilinear row-times-vector product `sum_j u_j v_j`.
#[inline]
pub(crate) fn row_times(u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(v).fold(Scalar::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
}

pub fn norm_sq(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Scalar]) -> f64 {
    norm_sq(v).sqrt()
}

/// Euclidean distance `||u - v||_2`.
pub fn distance(u: &[Scalar], v: &[Scalar]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub fn row_norm_sq(a: &DenseMatrix, j: usize) -> Result<f64> {
    if j >= a.rows {
        return Err(Error::IndexOutOfRange { index: j, len: a.rows });
    }
    Ok(norm_sq(a.row(j)))
}

pub fn frobenius_norm_sq(a: &DenseMatrix) -> f64 {
    norm_sq(&a.data)
}

/// `A x`.
pub fn matvec(a: &DenseMatrix, x: &[Scalar]) -> Result<Vec<Scalar>> {
    check_len(a.cols, x.len(), "matvec")?;
    Ok((0..a.rows).map(|i| row_times(a.row(i), x)).collect())
}

/// `A* y` with `A*` the conjugate transpose.
pub fn adjoint_matvec(a: &DenseMatrix, y: &[Scalar]) -> Result<Vec<Scalar>> {
    check_len(a.rows, y.len(), "adjoint matvec")?;
    let mut out = vec![Scalar::new(0.0, 0.0); a.cols];
    for (i, &yi) in y.iter().enumerate() {
        for (o, &aij) in out.iter_mut().zip(a.row(i)) {
            *o += aij.conj() * yi;
        }
    }
    Ok(out)
}

/// Singular values sorted descending, `min(m, n)` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum is never empty")
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }
}

/// Singular values via Householder QR (for tall matrices) followed by
/// one-sided Jacobi on the triangular factor.
///
/// The Jacobi sweeps orthogonalize column pairs until every pair satisfies
/// `|<w_i, w_j>| <= tol * ||w_i|| ||w_j||` with `tol = sqrt(rows) * eps`.
/// The relative test keeps small singular values accurate.
pub fn singular_values(a: &DenseMatrix) -> Result<SingularSpectrum> {
    // Work on the orientation with at least as many rows as columns.
    let work = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
    let (rows, cols) = (work.rows, work.cols);

    // Column-major copy.
    let mut columns: Vec<Vec<Scalar>> =
        (0..cols).map(|j| (0..rows).map(|i| work.get(i, j)).collect()).collect();

    if rows >= cols + cols / 2 && cols > 1 {
        columns = householder_r(columns, rows);
    }

    let mut values = one_sided_jacobi(&mut columns, None)?;
    values.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    Ok(SingularSpectrum { values })
}

/// Smallest singular value of a matrix with `rows >= cols`, with a unit
/// right singular vector `v` attaining it (`||A v|| = sigma_min`).
pub fn smallest_singular_pair(a: &DenseMatrix) -> Result<(f64, Vec<Scalar>)> {
    if a.rows < a.cols {
        return Err(Error::Dimension(format!(
            "need rows >= cols for a right singular vector of sigma_min, got {}x{}",
            a.rows, a.cols
        )));
    }
    let (rows, cols) = (a.rows, a.cols);
    let mut columns: Vec<Vec<Scalar>> = (0..cols).map(|j| (0..rows).map(|i| a.get(i, j)).collect()).collect();
    if rows >= cols + cols / 2 && cols > 1 {
        columns = householder_r(columns, rows);
    }
    let mut v: Vec<Vec<Scalar>> = (0..cols)
        .map(|j| (0..cols).map(|i| Scalar::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let values = one_sided_jacobi(&mut columns, Some(&mut v))?;
    let (idx, &sigma) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).expect("singular values are finite"))
        .expect("at least one column");
    Ok((sigma, v.swap_remove(idx)))
}

/// Returns the columns of the `cols x cols` upper-triangular factor of a
/// Householder QR of the column set.
fn householder_r(mut columns: Vec<Vec<Scalar>>, rows: usize) -> Vec<Vec<Scalar>> {
    let cols = columns.len();
    let zero = Scalar::new(0.0, 0.0);
    for k in 0..cols {
        let (head, tail) = columns.split_at_mut(k + 1);
        let x = &mut head[k][k..rows];
        let xnorm = norm(x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { Scalar::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, normalized.
        let mut v: Vec<Scalar> = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        x[0] = alpha;
        for z in x[1..].iter_mut() {
            *z = zero;
        }
        for col in tail.iter_mut() {
            let seg = &mut col[k..rows];
            let proj = dot_unchecked(&v, seg) * 2.0;
            for (s, vi) in seg.iter_mut().zip(&v) {
                *s -= vi * proj;
            }
        }
    }
    columns.iter_mut().for_each(|c| c.truncate(cols));
    columns
}

/// Orthogonalizes the columns in place; when `vectors` is given, the same
/// rotations are applied to it so that `W_final = W_initial * vectors`.
fn one_sided_jacobi(columns: &mut [Vec<Scalar>], mut vectors: Option<&mut Vec<Vec<Scalar>>>) -> Result<Vec<f64>> {
    let cols = columns.len();
    let rows = columns.first().map_or(0, Vec::len);
    let tol = (rows as f64).sqrt() * f64::EPSILON;

    let mut converged = cols < 2;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            let worst = worst_pair(columns);
            return Err(Error::Numerical(format!(
                "one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps \
                 ({rows}x{cols}, worst normalized off-diagonal {worst:e}, tol {tol:e})"
            )));
        }
        sweep += 1;
        converged = true;
        let mut norms: Vec<f64> = columns.iter().map(|c| norm_sq(c)).collect();
        for i in 0..cols - 1 {
            for j in i + 1..cols {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (left, right) = columns.split_at_mut(j);
                let wi = &mut left[i];
                let wj = &mut right[0];
                let gamma = dot_unchecked(wi, wj);
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (p, q) in wi.iter_mut().zip(wj.iter_mut()) {
                    let qp = *q * phase;
                    let np = *p * c - qp * s;
                    *q = *p * s + qp * c;
                    *p = np;
                }
                if let Some(v) = vectors.as_mut() {
                    let (vl, vr) = v.split_at_mut(j);
                    for (p, q) in vl[i].iter_mut().zip(vr[0].iter_mut()) {
                        let qp = *q * phase;
                        let np = *p * c - qp * s;
                        *q = *p * s + qp * c;
                        *p = np;
                    }
                }
                norms[i] = (alpha - t * g).max(0.0);
                norms[j] = beta + t * g;
            }
        }
    }
    Ok(columns.iter().map(|c| norm(c)).collect())
}

fn worst_pair(columns: &[Vec<Scalar>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            let d = (norm_sq(&columns[i]) * norm_sq(&columns[j])).sqrt();
            if d > 0.0 {
                worst = worst.max(dot_unchecked(&columns[i], &columns[j]).norm() / d);
            }
        }
    }
    worst
}

/// Usual and scaled condition numbers of a full-column-rank matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `k(A) = sigma_max / sigma_min`.
    pub k: f64,
    /// `kappa(A) = ||A||_F / sigma_min`.
    pub kappa: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub frobenius: f64,
}

pub fn condition_numbers(a: &DenseMatrix) -> Result<ConditionReport> {
    let spectrum = singular_values(a)?;
    let (sigma_max, sigma_min) = (spectrum.max(), spectrum.min());
    // Full column rank needs at least as many rows as columns.
    if a.rows < a.cols || sigma_min <= RANK_TOL * sigma_max {
        return Err(Error::Singular { sigma_min: if a.rows < a.cols { 0.0 } else { sigma_min }, sigma_max });
    }
    let frobenius = frobenius_norm_sq(a).sqrt();
    Ok(ConditionReport { k: sigma_max / sigma_min, kappa: frobenius / sigma_min, sigma_min, sigma_max, frobenius })
}
