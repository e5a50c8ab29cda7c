use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Sample sizes of the default sweep.
pub const DEFAULT_SIZES: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
pub const DEFAULT_SEEDS: usize = 20;
/// Evenly spaced points at which the empirical CDF is compared.
pub const DEFAULT_PROBES: usize = 1000;
/// Replicates for the pointwise variance at the median.
pub const DEFAULT_REPLICATES: usize = 2000;
pub const VARIANCE_N: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub seeds: usize,
    /// Mean over seeds and probes of `|N·F(x) − N·F̂_N(x)|`.
    pub mean_abs_error: f64,
    /// `mean_abs_error / sqrt(N)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceCheck {
    pub n: usize,
    pub replicates: usize,
    /// Sample variance of `F̂_N(0.5)` over the replicates.
    pub empirical: f64,
    /// `F(x)(1 − F(x)) / N` at the median.
    pub expected: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln(mean_abs_error)` against `ln(N)`, over
    /// the sizes with `N >= 2`.
    pub slope: f64,
    pub variance: VarianceCheck,
}

fn rng_for(seed: u64, n: usize, replicate: usize) -> ChaCha8Rng {
    let mut s = seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    s ^= (replicate as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    ChaCha8Rng::seed_from_u64(s)
}

/// Mean `|N x_j − #{samples <= x_j}|` over probes `x_j = (j + ½)/P` for `N`
/// uniform samples. Samples are tallied into half-probe bins, so no sort.
pub fn mean_abs_position_error(n: usize, probes: usize, rng: &mut ChaCha8Rng) -> f64 {
    let bins = 2 * probes;
    let mut hist = vec![0u32; bins];
    for _ in 0..n {
        let x: f64 = rng.random();
        hist[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let mut below = 0u64;
    let mut total = 0.0;
    for j in 0..probes {
        // samples under (2j + 1) / (2P)
        below += u64::from(hist[2 * j]);
        let x = (j as f64 + 0.5) / probes as f64;
        total += (n as f64 * x - below as f64).abs();
        below += u64::from(hist[2 * j + 1]);
    }
    total / probes as f64
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Variance of the empirical CDF at the median of a uniform distribution.
pub fn median_variance(n: usize, replicates: usize, seed: u64) -> VarianceCheck {
    let vals: Vec<f64> = (0..replicates)
        .map(|r| {
            let mut rng = rng_for(seed ^ 0xa11ce, n, r);
            (0..n).filter(|_| rng.random::<f64>() <= 0.5).count() as f64 / n as f64
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / replicates as f64;
    let empirical = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (replicates - 1).max(1) as f64;
    let expected = 0.25 / n as f64;
    VarianceCheck {
        n,
        replicates,
        empirical,
        expected,
        relative_deviation: (empirical - expected).abs() / expected,
    }
}

pub fn scaling_check(sizes: &[usize], seeds: usize, probes: usize, replicates: usize, seed: u64) -> ScalingReport {
    let rows: Vec<ScalingRow> = sizes
        .iter()
        .map(|&n| {
            let mean_abs_error = (0..seeds)
                .map(|s| mean_abs_position_error(n, probes, &mut rng_for(seed, n, s)))
                .sum::<f64>()
                / seeds.max(1) as f64;
            ScalingRow {
                n,
                seeds,
                mean_abs_error,
                normalized: mean_abs_error / (n as f64).sqrt(),
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 2 && r.mean_abs_error > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_abs_error.ln()))
        .collect();
    let slope = if points.len() >= 2 { fit_slope(&points) } else { f64::NAN };
    ScalingReport {
        rows,
        slope,
        variance: median_variance(VARIANCE_N, replicates, seed),
    }
}
