use serde::{Deserialize, Serialize};

/// `position ≈ slope * key + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearModel {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    #[inline]
    pub fn predict(&self, x: f64) -> f64 {
        self.slope.mul_add(x, self.intercept)
    }

    /// Least-squares fit over `(x, y)` pairs, computed in one pass with
    /// centered running sums. If every `x` is equal the slope is 0 and the
    /// intercept is the mean of `y`. An empty input yields the zero model.
    pub fn fit<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut n = 0.0f64;
        let (mut mean_x, mut mean_y) = (0.0f64, 0.0f64);
        let (mut sxx, mut sxy) = (0.0f64, 0.0f64);
        for (x, y) in pairs {
            n += 1.0;
            let dx = x - mean_x;
            mean_x += dx / n;
            mean_y += (y - mean_y) / n;
            sxx += dx * (x - mean_x);
            sxy += dx * (y - mean_y);
        }
        if n == 0.0 {
            return Self::new(0.0, 0.0);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let slope = if slope.is_finite() { slope } else { 0.0 };
        Self::new(slope, mean_y - slope * mean_x)
    }

    pub const fn size_bytes(&self) -> usize {
        16
    }
}

/// Closed-form least squares over `(key, position)` pairs.
pub fn train_linear_closed_form(pairs: &[(f64, f64)]) -> LinearModel {
    LinearModel::fit(pairs.iter().copied())
}
