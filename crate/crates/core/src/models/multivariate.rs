use serde::{Deserialize, Serialize};

/// Ridge term added to the diagonal of the (standardized) normal equations.
pub const RIDGE_LAMBDA: f64 = 1e-9;

/// Largest feature subset considered during selection.
pub const MAX_SELECTED_FEATURES: usize = 3;

/// Derived scalar features of a key. `log` and `sqrt` of non-positive keys
/// are defined as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Key,
    LogKey,
    KeySquared,
    KeyCubed,
    SqrtKey,
}

impl Feature {
    pub const ALL: [Feature; 5] = [
        Feature::Key,
        Feature::LogKey,
        Feature::KeySquared,
        Feature::KeyCubed,
        Feature::SqrtKey,
    ];

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Feature::Key => x,
            Feature::LogKey => {
                if x > 0.0 {
                    x.ln()
                } else {
                    0.0
                }
            }
            Feature::KeySquared => x * x,
            Feature::KeyCubed => x * x * x,
            Feature::SqrtKey => {
                if x > 0.0 {
                    x.sqrt()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Linear regression over derived key features.
///
/// Features are standardized at fit time; the model keeps the per-feature
/// mean and scale so predictions are `bias + Σ w_j (φ_j(x) − μ_j) / s_j`.
/// [`raw_weights`](Self::raw_weights) maps back to unstandardized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivariateLinearModel {
    features: Vec<Feature>,
    weights: Vec<f64>,
    bias: f64,
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl MultivariateLinearModel {
    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    #[inline]
    pub fn predict(&self, x: f64) -> f64 {
        let mut acc = self.bias;
        for j in 0..self.features.len() {
            acc += self.weights[j] * (self.features[j].eval(x) - self.means[j]) / self.scales[j];
        }
        acc
    }

    /// `(weights, bias)` such that `prediction = bias + Σ weights[j] · φ_j(x)`.
    pub fn raw_weights(&self) -> (Vec<f64>, f64) {
        let w: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.scales)
            .map(|(w, s)| w / s)
            .collect();
        let bias = self.bias - w.iter().zip(&self.means).map(|(w, m)| w * m).sum::<f64>();
        (w, bias)
    }

    /// Weights, bias and standardization parameters, 8 bytes each.
    pub fn size_bytes(&self) -> usize {
        8 * (1 + 3 * self.features.len())
    }

    pub fn rmse(&self, pairs: &[(f64, f64)]) -> f64 {
        if pairs.is_empty() {
            return 0.0;
        }
        let sse: f64 = pairs.iter().map(|&(x, y)| (self.predict(x) - y).powi(2)).sum();
        (sse / pairs.len() as f64).sqrt()
    }

    /// Least-squares fit of a fixed feature subset.
    pub fn fit(pairs: &[(f64, f64)], features: &[Feature]) -> Self {
        assert!(!features.is_empty(), "feature list must be non-empty");
        let d = features.len();
        let n = pairs.len().max(1) as f64;

        let mut means = vec![0.0; d];
        let mut mean_y = 0.0;
        for &(x, y) in pairs {
            for (m, f) in means.iter_mut().zip(features) {
                *m += f.eval(x);
            }
            mean_y += y;
        }
        means.iter_mut().for_each(|m| *m /= n);
        mean_y /= n;

        let mut scales = vec![0.0; d];
        for &(x, _) in pairs {
            for j in 0..d {
                scales[j] += (features[j].eval(x) - means[j]).powi(2);
            }
        }
        for s in &mut scales {
            *s = (*s / n).sqrt();
            if !(*s > 0.0) || !s.is_finite() {
                *s = 1.0;
            }
        }

        // normal equations in standardized coordinates
        let mut gram = vec![0.0; d * d];
        let mut rhs = vec![0.0; d];
        let mut z = vec![0.0; d];
        for &(x, y) in pairs {
            for j in 0..d {
                z[j] = (features[j].eval(x) - means[j]) / scales[j];
            }
            let dy = y - mean_y;
            for a in 0..d {
                rhs[a] += z[a] * dy;
                for b in 0..=a {
                    gram[a * d + b] += z[a] * z[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                gram[b * d + a] = gram[a * d + b];
            }
            gram[a * d + a] += RIDGE_LAMBDA;
        }
        let weights = solve_spd(&mut gram, &mut rhs, d).unwrap_or_else(|| vec![0.0; d]);

        Self {
            features: features.to_vec(),
            weights,
            bias: mean_y,
            means,
            scales,
        }
    }
}

/// Cholesky solve of `A w = b` for symmetric positive-definite `A` (row-major,
/// `d × d`). Returns `None` if `A` is not numerically positive definite.
fn solve_spd(a: &mut [f64], b: &mut [f64], d: usize) -> Option<Vec<f64>> {
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= a[j * d + k] * a[j * d + k];
        }
        if !(diag > 0.0) {
            return None;
        }
        let diag = diag.sqrt();
        a[j * d + j] = diag;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = v / diag;
        }
    }
    // forward: L y = b
    for i in 0..d {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * d + k] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    // backward: Lᵀ w = y
    for i in (0..d).rev() {
        let mut v = b[i];
        for k in i + 1..d {
            v -= a[k * d + i] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    b.iter().all(|w| w.is_finite()).then(|| b.to_vec())
}

/// All non-empty subsets of `candidates` with at most `max_size` members, by
/// size and then lexicographically by candidate index.
pub fn feature_subsets(candidates: &[Feature], max_size: usize) -> Vec<Vec<Feature>> {
    fn rec(c: &[Feature], start: usize, size: usize, cur: &mut Vec<Feature>, out: &mut Vec<Vec<Feature>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..c.len() {
            cur.push(c[i]);
            rec(c, i + 1, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max_size.min(candidates.len()) {
        rec(candidates, 0, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Fits every candidate subset of size ≤ 3 and keeps the one with the lowest
/// training RMSE (earliest subset wins ties).
pub fn train_multivariate(pairs: &[(f64, f64)], candidates: &[Feature]) -> MultivariateLinearModel {
    let mut cands = candidates.to_vec();
    cands.dedup();
    assert!(!cands.is_empty(), "need at least one candidate feature");
    let mut best: Option<(f64, MultivariateLinearModel)> = None;
    for subset in feature_subsets(&cands, MAX_SELECTED_FEATURES) {
        let model = MultivariateLinearModel::fit(pairs, &subset);
        let rmse = model.rmse(pairs);
        let better = match &best {
            None => true,
            Some((b, _)) => rmse < *b || (b.is_nan() && !rmse.is_nan()),
        };
        if better {
            best = Some((rmse, model));
        }
    }
    best.expect("at least one subset").1
}
