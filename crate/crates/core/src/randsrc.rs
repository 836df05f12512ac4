//! Seeded randomness: uniform and normal variates, per-trial stream
//! derivation and the squared-row-norm index distribution.
//!
//! The generator is xoshiro256++ (period 2^256 - 1). Uniforms take the top
//! 53 bits of a draw; normals use the Box-Muller transform and cache the
//! second variate of each pair.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::matcore::{row_norm_sq, DenseMatrix};

/// Single-owner random stream. Identical seeds give bit-identical sequences.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: Xoshiro256PlusPlus,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: Xoshiro256PlusPlus::seed_from_u64(seed), spare_normal: None }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * theta.sin());
        radius * theta.cos()
    }

    /// Uniform integer in `0..bound` (Lemire's widening multiply with rejection).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let bound = bound as u64;
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let product = (self.next_u64() as u128) * (bound as u128);
            if (product as u64) >= threshold {
                return (product >> 64) as usize;
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for trial `trial_index` of an experiment seeded with `master_seed`.
///
/// The stream seed is `splitmix64(master_seed ^ splitmix64(trial_index))`,
/// which is then expanded into the full generator state by splitmix64.
pub fn derive_stream(master_seed: u64, trial_index: u64) -> RngStream {
    RngStream::new(splitmix64(master_seed ^ splitmix64(trial_index)))
}

/// Discrete distribution over `0..m` with probabilities `weights[j] / total`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIndexDistribution {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl WeightedIndexDistribution {
    /// All weights must be finite and strictly positive.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("distribution needs at least one index".into()));
        }
        if let Some(row) = weights.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::DegenerateRow { row });
        }
        let cumulative: Vec<f64> = weights
            .iter()
            .scan(0.0, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().expect("non-empty");
        Ok(Self { weights, cumulative, total })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0; m])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn probability(&self, j: usize) -> f64 {
        self.weights[j] / self.total
    }

    /// One uniform `u in [0, total)`, then the first index whose cumulative
    /// weight exceeds `u`.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let u = rng.uniform01() * self.total;
        let j = self.cumulative.partition_point(|&c| c <= u);
        // u * total can round up to total itself.
        j.min(self.weights.len() - 1)
    }
}

/// Row `j` gets weight `||a_j||^2`, so it is drawn with probability
/// `||a_j||^2 / ||A||_F^2`.
pub fn build_row_distribution(a: &DenseMatrix) -> Result<WeightedIndexDistribution> {
    let weights = (0..a.rows()).map(|j| row_norm_sq(a, j)).collect::<Result<Vec<_>>>()?;
    if let Some(row) = weights.iter().position(|&w| w <= 0.0) {
        return Err(Error::DegenerateRow { row });
    }
    WeightedIndexDistribution::new(weights)
}

pub fn sample_index(dist: &WeightedIndexDistribution, rng: &mut RngStream) -> usize {
    dist.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::Scalar;

    #[test]
    fn probabilities_from_row_norms() {
        let a = DenseMatrix::from_real(2, 2, &[1.0, 0.0, 3f64.sqrt(), 0.0]).unwrap();
        let d = build_row_distribution(&a).unwrap();
        assert!((d.probability(0) - 0.25).abs() < 1e-15);
        assert!((d.probability(1) - 0.75).abs() < 1e-15);
        assert!((d.total() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn unit_rows_give_uniform() {
        let a = DenseMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.6, 0.8]).unwrap();
        let d = build_row_distribution(&a).unwrap();
        for j in 0..3 {
            assert!((d.probability(j) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_row_is_rejected() {
        let a = DenseMatrix::new(2, 1, vec![Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0)]).unwrap();
        assert_eq!(build_row_distribution(&a), Err(Error::DegenerateRow { row: 1 }));
    }

    #[test]
    fn single_index_always_zero() {
        let d = WeightedIndexDistribution::new(vec![2.5]).unwrap();
        let mut rng = RngStream::new(3);
        assert!((0..1000).all(|_| d.sample(&mut rng) == 0));
    }

    #[test]
    fn same_seed_same_draws() {
        let d = WeightedIndexDistribution::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        let xs: Vec<usize> = (0..500).map(|_| d.sample(&mut a)).collect();
        let ys: Vec<usize> = (0..500).map(|_| d.sample(&mut b)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn weighted_frequency_within_four_sigma() {
        // p = 0.75, N = 1e6: sigma = sqrt(p(1-p)/N) ~ 4.3e-4, 4 sigma < 0.002.
        let d = WeightedIndexDistribution::new(vec![1.0, 3.0]).unwrap();
        let mut rng = RngStream::new(2024);
        let n = 1_000_000;
        let hits = (0..n).filter(|_| d.sample(&mut rng) == 1).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.75).abs() < 0.002, "frequency {freq}");
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = RngStream::new(0);
        assert!((0..100_000).map(|_| rng.uniform01()).all(|u| (0.0..1.0).contains(&u)));
    }

    #[test]
    fn derived_streams() {
        let mut a = derive_stream(7, 0);
        let mut b = derive_stream(7, 0);
        let mut c = derive_stream(7, 1);
        let xa: Vec<u64> = (0..64).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..64).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..64).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert!(xa.iter().zip(&xc).all(|(x, y)| x != y));
    }

    #[test]
    fn below_covers_range() {
        let mut rng = RngStream::new(9);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[rng.below(7)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
