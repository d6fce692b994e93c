//! Cost of evaluating a single basis function: normalized monomials in the
//! holomorphic picture versus Hermite functions in position space.

use std::hint::black_box;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::transform::hermite_functions;

/// Cached `ln sqrt(n!)` for `n <= max`.
#[derive(Clone, Debug)]
pub struct LogNormalizers {
    table: Vec<f64>,
}

impl LogNormalizers {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=max {
            acc += 0.5 * (k as f64).ln();
            table.push(acc);
        }
        LogNormalizers { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn ln_sqrt_factorial(&self, n: usize) -> f64 {
        self.table[n]
    }
}

/// `z^n / sqrt(n!)` in constant time.
pub fn monomial_value(n: usize, z: Complex64, cache: &LogNormalizers) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    (z.ln() * n as f64 - cache.ln_sqrt_factorial(n)).exp()
}

/// `psi_n(x)`, which needs the whole recurrence up to `n`.
pub fn hermite_value(n: usize, x: f64) -> f64 {
    hermite_functions(n, x)[n]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Timed repetitions per degree (each a batch of `inner` calls).
    pub reps: usize,
    pub inner: usize,
    /// Repetitions are averaged in groups of this size; the median group is kept.
    pub group: usize,
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { reps: 1000, inner: 32, group: 50, warmup: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub degrees: Vec<usize>,
    pub reps: usize,
    pub inner: usize,
    /// Nanoseconds per call.
    pub monomial_ns: Vec<f64>,
    pub hermite_ns: Vec<f64>,
    /// Variance of the per-repetition times, ns^2.
    pub monomial_var: Vec<f64>,
    pub hermite_var: Vec<f64>,
    /// Hermite time over monomial time at each degree.
    pub ratios: Vec<f64>,
    /// Largest over smallest monomial time.
    pub monomial_ratio: f64,
    /// Least-squares slope of Hermite time against degree, ns per degree.
    pub hermite_slope: f64,
}

/// The default degree ladder `1, 2, 4, ..., 512`.
pub fn default_degrees() -> Vec<usize> {
    (0..10).map(|k| 1usize << k).collect()
}

/// Timing summary of one evaluation path at one degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    /// Median of group means, ns per call.
    pub ns: f64,
    /// Variance of the per-repetition times, ns^2.
    pub variance: f64,
}

/// Median-of-means time per call of `f`.
pub fn time_per_call(config: &BenchConfig, mut f: impl FnMut() -> f64) -> Timing {
    for _ in 0..config.warmup {
        for _ in 0..config.inner {
            black_box(f());
        }
    }
    let mut samples = Vec::with_capacity(config.reps);
    for _ in 0..config.reps {
        let start = Instant::now();
        for _ in 0..config.inner {
            black_box(f());
        }
        samples.push(start.elapsed().as_nanos() as f64 / config.inner as f64);
    }
    let group = config.group.clamp(1, samples.len().max(1));
    let mut means: Vec<f64> = samples.chunks(group).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    means.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let variance = samples.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (samples.len().max(2) - 1) as f64;
    Timing { ns: means[means.len() / 2], variance }
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Degrees `1, 2, 4, ...` below `n_max`, followed by `n_max` itself.
pub fn degrees_up_to(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..usize::BITS).map(|k| 1usize << k).take_while(|&n| n < n_max).collect();
    out.push(n_max.max(1));
    out
}

pub fn run_eval_benchmark(degrees: &[usize], config: &BenchConfig) -> BenchReport {
    let max = degrees.iter().copied().max().unwrap_or(0);
    let cache = LogNormalizers::new(max);
    let z = Complex64::new(0.8, 0.6);
    let x = 0.37;
    let monomial: Vec<Timing> = degrees
        .iter()
        .map(|&n| time_per_call(config, || monomial_value(black_box(n), black_box(z), &cache).re))
        .collect();
    let hermite: Vec<Timing> =
        degrees.iter().map(|&n| time_per_call(config, || hermite_value(black_box(n), black_box(x)))).collect();
    let monomial_ns: Vec<f64> = monomial.iter().map(|t| t.ns).collect();
    let hermite_ns: Vec<f64> = hermite.iter().map(|t| t.ns).collect();
    let lo = monomial_ns.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = monomial_ns.iter().copied().fold(0.0, f64::max);
    let xs: Vec<f64> = degrees.iter().map(|&n| n as f64).collect();
    BenchReport {
        degrees: degrees.to_vec(),
        reps: config.reps,
        inner: config.inner,
        ratios: hermite_ns.iter().zip(&monomial_ns).map(|(h, m)| h / m).collect(),
        monomial_var: monomial.iter().map(|t| t.variance).collect(),
        hermite_var: hermite.iter().map(|t| t.variance).collect(),
        hermite_slope: fitted_slope(&xs, &hermite_ns),
        monomial_ratio: hi / lo,
        monomial_ns,
        hermite_ns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::sqrt_factorial;
    use approx::assert_relative_eq;

    #[test]
    fn monomial_matches_direct_product() {
        let cache = LogNormalizers::new(600);
        let z = Complex64::new(0.9, -0.4);
        for n in [1, 7, 40, 150] {
            let direct = z.powu(n as u32) / sqrt_factorial(n);
            assert_relative_eq!(monomial_value(n, z, &cache).re, direct.re, max_relative = 1e-10);
        }
        assert!(monomial_value(512, Complex64::new(3.0, 0.0), &cache).is_finite());
    }

    #[test]
    fn degree_ladder() {
        assert_eq!(degrees_up_to(512), default_degrees());
        assert_eq!(degrees_up_to(100), vec![1, 2, 4, 8, 16, 32, 64, 100]);
        assert_eq!(degrees_up_to(1), vec![1]);
    }

    #[test]
    fn slope_of_line() {
        assert_relative_eq!(fitted_slope(&[1.0, 2.0, 3.0], &[2.0, 4.5, 7.0]), 2.5, max_relative = 1e-14);
    }
}
