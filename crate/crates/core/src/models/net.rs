//! Small fully-connected ReLU networks trained with mini-batch SGD.
//!
//! Inputs and targets are min/max normalized to `[0, 1]` before they reach
//! the network; the normalization is part of the model so `predict` works in
//! raw key and position units.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_HIDDEN_LAYERS: usize = 2;
pub const MAX_WIDTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Half-width of the uniform init range; `None` means `1/sqrt(fan_in)`.
    pub init_scale: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 20,
            batch_size: 16,
            seed: 0,
            init_scale: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // a zero learning rate is accepted: it makes training a no-op
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig("epochs and batch_size must be >= 1".into()));
        }
        if let Some(s) = self.init_scale {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::InvalidConfig(format!("init_scale must be finite, got {s}")));
            }
        }
        Ok(())
    }
}

/// Network shape: input width plus 0–2 hidden layers of width 1–32.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetArch {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
}

impl NetArch {
    pub fn new(input_dim: usize, hidden: Vec<usize>) -> Result<Self> {
        let arch = Self { input_dim, hidden };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::InvalidConfig("input_dim must be >= 1".into()));
        }
        if self.hidden.len() > MAX_HIDDEN_LAYERS {
            return Err(Error::InvalidConfig(format!(
                "at most {MAX_HIDDEN_LAYERS} hidden layers, got {}",
                self.hidden.len()
            )));
        }
        if let Some(w) = self.hidden.iter().find(|&&w| w == 0 || w > MAX_WIDTH) {
            return Err(Error::InvalidConfig(format!("hidden width {w} outside 1..={MAX_WIDTH}")));
        }
        Ok(())
    }
}

/// Fully-connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    #[inline]
    fn forward(&self, x: &[f64], out: &mut [f64], relu: bool) {
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let mut acc = self.bias[o];
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            out[o] = if relu && acc < 0.0 { 0.0 } else { acc };
        }
    }
}

/// Affine maps between raw units and the network's `[0, 1]` working range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub input_offset: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub output_offset: f64,
    pub output_scale: f64,
}

impl Normalization {
    pub fn identity(input_dim: usize) -> Self {
        Self {
            input_offset: vec![0.0; input_dim],
            input_scale: vec![1.0; input_dim],
            output_offset: 0.0,
            output_scale: 1.0,
        }
    }

    /// Per-dimension min/max of `inputs` (flat, `dim` wide) and of `targets`.
    pub fn fit(inputs: &[f64], dim: usize, targets: &[f64]) -> Self {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for row in inputs.chunks_exact(dim) {
            for j in 0..dim {
                lo[j] = lo[j].min(row[j]);
                hi[j] = hi[j].max(row[j]);
            }
        }
        let span = |lo: f64, hi: f64| {
            let s = hi - lo;
            if s > 0.0 && s.is_finite() {
                s
            } else {
                1.0
            }
        };
        let input_scale = lo.iter().zip(&hi).map(|(&l, &h)| span(l, h)).collect();
        let input_offset = lo.iter().map(|&l| if l.is_finite() { l } else { 0.0 }).collect();
        let (tlo, thi) = targets
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
        Self {
            input_offset,
            input_scale,
            output_offset: if tlo.is_finite() { tlo } else { 0.0 },
            output_scale: span(tlo, thi),
        }
    }

    #[inline]
    pub fn input(&self, j: usize, x: f64) -> f64 {
        (x - self.input_offset[j]) / self.input_scale[j]
    }

    #[inline]
    pub fn target(&self, y: f64) -> f64 {
        (y - self.output_offset) / self.output_scale
    }

    #[inline]
    pub fn output(&self, z: f64) -> f64 {
        z.mul_add(self.output_scale, self.output_offset)
    }
}

/// Feed-forward ReLU network with a single linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardNet {
    input_dim: usize,
    layers: Vec<Dense>,
    norm: Normalization,
}

/// Per-layer activations retained for back-propagation.
#[derive(Debug, Default, Clone)]
pub struct Activations {
    /// `values[0]` is the normalized input; `values[i+1]` the output of layer `i`.
    values: Vec<Vec<f64>>,
}

impl FeedForwardNet {
    /// All parameters zero, identity normalization.
    pub fn zeros(arch: &NetArch) -> Self {
        let mut layers = Vec::with_capacity(arch.hidden.len() + 1);
        let mut prev = arch.input_dim;
        for &w in &arch.hidden {
            layers.push(Dense::zeros(prev, w));
            prev = w;
        }
        layers.push(Dense::zeros(prev, 1));
        Self {
            input_dim: arch.input_dim,
            layers,
            norm: Normalization::identity(arch.input_dim),
        }
    }

    /// Uniform init in `[-s, s]` per layer, `s = init_scale` or `1/sqrt(fan_in)`.
    pub fn random(arch: &NetArch, init_scale: Option<f64>, seed: u64) -> Self {
        let mut net = Self::zeros(arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut net.layers {
            let s = init_scale.unwrap_or(1.0 / (layer.inputs as f64).sqrt());
            if s == 0.0 {
                continue;
            }
            for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *w = rng.random_range(-s..=s);
            }
        }
        net
    }

    pub fn with_normalization(mut self, norm: Normalization) -> Self {
        assert_eq!(norm.input_offset.len(), self.input_dim);
        self.norm = norm;
        self
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn normalization(&self) -> &Normalization {
        &self.norm
    }

    pub fn arch(&self) -> NetArch {
        NetArch {
            input_dim: self.input_dim,
            hidden: self.layers[..self.layers.len() - 1].iter().map(|l| l.outputs).collect(),
        }
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Dense::num_params).sum()
    }

    /// Parameters plus normalization constants, 8 bytes each.
    pub fn size_bytes(&self) -> usize {
        8 * (self.num_params() + 2 * self.input_dim + 2)
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.num_params());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    /// Network output for an already-normalized input.
    pub fn forward_normalized(&self, x: &[f64]) -> f64 {
        let mut a = [0.0f64; MAX_WIDTH];
        let mut b = [0.0f64; MAX_WIDTH];
        let last = self.layers.len() - 1;
        if last == 0 {
            let mut out = [0.0];
            self.layers[0].forward(x, &mut out, false);
            return out[0];
        }
        self.layers[0].forward(x, &mut a[..self.layers[0].outputs], true);
        let mut cur_is_a = true;
        for i in 1..=last {
            let l = &self.layers[i];
            let relu = i < last;
            if cur_is_a {
                l.forward(&a[..l.inputs], &mut b[..l.outputs], relu);
            } else {
                l.forward(&b[..l.inputs], &mut a[..l.outputs], relu);
            }
            cur_is_a = !cur_is_a;
        }
        if cur_is_a {
            a[0]
        } else {
            b[0]
        }
    }

    /// Forward pass keeping activations for [`backward`](Self::backward).
    pub fn forward_cached(&self, x: &[f64], cache: &mut Activations) -> f64 {
        cache.values.resize(self.layers.len() + 1, Vec::new());
        cache.values[0].clear();
        cache.values[0].extend_from_slice(x);
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let (before, after) = cache.values.split_at_mut(i + 1);
            let out = &mut after[0];
            out.resize(l.outputs, 0.0);
            l.forward(&before[i], out, i < last);
        }
        cache.values[last + 1][0]
    }

    /// Adds `d_out · ∂output/∂θ` to `grads` (flat parameter order).
    pub fn backward(&self, cache: &Activations, d_out: f64, grads: &mut [f64]) {
        debug_assert_eq!(grads.len(), self.num_params());
        let mut delta = vec![d_out];
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for l in &self.layers {
            offsets.push(at);
            at += l.num_params();
        }
        for i in (0..self.layers.len()).rev() {
            let l = &self.layers[i];
            let input = &cache.values[i];
            let base = offsets[i];
            for o in 0..l.outputs {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = base + o * l.inputs;
                for j in 0..l.inputs {
                    grads[row + j] += d * input[j];
                }
                grads[base + l.weights.len() + o] += d;
            }
            if i > 0 {
                let mut prev = vec![0.0; l.inputs];
                for o in 0..l.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    for j in 0..l.inputs {
                        prev[j] += l.weights[o * l.inputs + j] * d;
                    }
                }
                // ReLU gate: the layer below emitted zero where it was inactive
                for (p, &a) in prev.iter_mut().zip(input) {
                    if a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }

    pub fn normalize_input(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().enumerate().map(|(j, &v)| self.norm.input(j, v)));
    }

    /// Prediction in raw units for a raw input vector.
    pub fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        if self.input_dim == 1 {
            return self.predict_scalar(x[0]);
        }
        let mut buf = Vec::with_capacity(self.input_dim);
        self.normalize_input(x, &mut buf);
        self.norm.output(self.forward_normalized(&buf))
    }

    #[inline]
    pub fn predict_scalar(&self, x: f64) -> f64 {
        let z = [self.norm.input(0, x)];
        self.norm.output(self.forward_normalized(&z))
    }

    /// Mean squared error in normalized units over raw `(inputs, targets)`.
    pub fn normalized_loss(&self, inputs: &[f64], targets: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(self.input_dim);
        let mut sum = 0.0;
        for (row, &y) in inputs.chunks_exact(self.input_dim).zip(targets) {
            self.normalize_input(row, &mut buf);
            let e = self.forward_normalized(&buf) - self.norm.target(y);
            sum += e * e;
        }
        sum / targets.len().max(1) as f64
    }

    /// Gradient of [`normalized_loss`](Self::normalized_loss).
    pub fn loss_gradient(&self, inputs: &[f64], targets: &[f64]) -> Vec<f64> {
        let mut grads = vec![0.0; self.num_params()];
        let mut cache = Activations::default();
        let mut buf = Vec::with_capacity(self.input_dim);
        let scale = 2.0 / targets.len().max(1) as f64;
        for (row, &y) in inputs.chunks_exact(self.input_dim).zip(targets) {
            self.normalize_input(row, &mut buf);
            let out = self.forward_cached(&buf, &mut cache);
            self.backward(&cache, scale * (out - self.norm.target(y)), &mut grads);
        }
        grads
    }

    /// Root-mean-squared error in raw units.
    pub fn rmse(&self, inputs: &[f64], targets: &[f64]) -> f64 {
        let sse: f64 = inputs
            .chunks_exact(self.input_dim)
            .zip(targets)
            .map(|(row, &y)| (self.predict(row) - y).powi(2))
            .sum();
        (sse / targets.len().max(1) as f64).sqrt()
    }
}

/// Loss after initialization and after every epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

impl TrainReport {
    pub fn initial_loss(&self) -> f64 {
        self.epoch_losses[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self.epoch_losses.last().expect("non-empty")
    }
}

/// Mini-batch SGD on mean squared error.
///
/// `inputs` is flat, `arch.input_dim` values per sample. Normalization is fit
/// on the training data. Deterministic for a fixed `cfg.seed`.
pub fn train_net_sgd(
    inputs: &[f64],
    targets: &[f64],
    arch: &NetArch,
    cfg: &TrainConfig,
) -> Result<(FeedForwardNet, TrainReport)> {
    arch.validate()?;
    cfg.validate()?;
    let dim = arch.input_dim;
    if inputs.len() != targets.len() * dim {
        return Err(Error::InvalidArgument(format!(
            "{} inputs do not match {} targets of width {dim}",
            inputs.len(),
            targets.len()
        )));
    }
    if targets.is_empty() {
        return Err(Error::EmptyInput);
    }

    let norm = Normalization::fit(inputs, dim, targets);
    let x_norm: Vec<f64> = inputs
        .chunks_exact(dim)
        .flat_map(|row| row.iter().enumerate().map(|(j, &v)| norm.input(j, v)).collect::<Vec<_>>())
        .collect();
    let y_norm: Vec<f64> = targets.iter().map(|&y| norm.target(y)).collect();

    let mut net = FeedForwardNet::random(arch, cfg.init_scale, cfg.seed).with_normalization(norm);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);
    let mut order: Vec<usize> = (0..targets.len()).collect();
    let mut grads = vec![0.0; net.num_params()];
    let mut params = net.params();
    let mut cache = Activations::default();

    let loss = |net: &FeedForwardNet| -> f64 {
        x_norm
            .chunks_exact(dim)
            .zip(&y_norm)
            .map(|(x, &y)| (net.forward_normalized(x) - y).powi(2))
            .sum::<f64>()
            / y_norm.len() as f64
    };
    let mut losses = vec![loss(&net)];

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grads.iter_mut().for_each(|g| *g = 0.0);
            let scale = 2.0 / batch.len() as f64;
            for &i in batch {
                let x = &x_norm[i * dim..(i + 1) * dim];
                let out = net.forward_cached(x, &mut cache);
                net.backward(&cache, scale * (out - y_norm[i]), &mut grads);
            }
            for (p, g) in params.iter_mut().zip(&grads) {
                *p -= cfg.learning_rate * g;
            }
            net.set_params(&params);
        }
        let l = loss(&net);
        if !l.is_finite() || !net.is_finite() {
            return Err(Error::TrainingDiverged { epoch, loss: l });
        }
        losses.push(l);
    }
    Ok((net, TrainReport { epoch_losses: losses }))
}

/// Convenience wrapper for scalar `(key, position)` pairs.
pub fn train_net_sgd_scalar(
    pairs: &[(f64, f64)],
    hidden: &[usize],
    cfg: &TrainConfig,
) -> Result<(FeedForwardNet, TrainReport)> {
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    train_net_sgd(&xs, &ys, &NetArch::new(1, hidden.to_vec())?, cfg)
}

/// Compares the analytic gradient of the normalized squared loss against
/// central differences. Returns `max_p |analytic − numeric| / max(1, |numeric|)`.
pub fn gradient_check(net: &FeedForwardNet, inputs: &[f64], targets: &[f64], eps: f64) -> f64 {
    assert!(eps > 0.0);
    let analytic = net.loss_gradient(inputs, targets);
    let base = net.params();
    let mut probe = net.clone();
    let mut worst = 0.0f64;
    for p in 0..base.len() {
        let mut theta = base.clone();
        theta[p] = base[p] + eps;
        probe.set_params(&theta);
        let up = probe.normalized_loss(inputs, targets);
        theta[p] = base[p] - eps;
        probe.set_params(&theta);
        let down = probe.normalized_loss(inputs, targets);
        let numeric = (up - down) / (2.0 * eps);
        worst = worst.max((analytic[p] - numeric).abs() / numeric.abs().max(1.0));
    }
    worst
}

/// Trains every architecture in `candidates` and keeps the lowest-RMSE one.
pub fn select_net(
    inputs: &[f64],
    targets: &[f64],
    candidates: &[NetArch],
    cfg: &TrainConfig,
) -> Result<FeedForwardNet> {
    let mut best: Option<(f64, FeedForwardNet)> = None;
    for arch in candidates {
        let (net, _) = train_net_sgd(inputs, targets, arch, cfg)?;
        let rmse = net.rmse(inputs, targets);
        if best.as_ref().map_or(true, |(b, _)| rmse < *b) {
            best = Some((rmse, net));
        }
    }
    best.map(|b| b.1)
        .ok_or_else(|| Error::InvalidArgument("no candidate architectures".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_pairs(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x / 10.0).sin() * 50.0 + x).collect();
        (xs, ys)
    }

    #[test]
    fn arch_limits() {
        assert!(NetArch::new(1, vec![]).is_ok());
        assert!(NetArch::new(1, vec![32, 32]).is_ok());
        assert!(NetArch::new(1, vec![33]).is_err());
        assert!(NetArch::new(1, vec![4, 4, 4]).is_err());
        assert!(NetArch::new(1, vec![0]).is_err());
        assert!(NetArch::new(0, vec![]).is_err());
    }

    #[test]
    fn zero_net_outputs_bias() {
        let arch = NetArch::new(1, vec![4]).unwrap();
        let mut net = FeedForwardNet::zeros(&arch);
        assert_eq!(net.predict_scalar(123.0), 0.0);
        let mut p = net.params();
        *p.last_mut().unwrap() = 2.5;
        net.set_params(&p);
        assert_eq!(net.predict_scalar(123.0), 2.5);
        assert_eq!(net.predict_scalar(-9.0), 2.5);
    }

    #[test]
    fn dense_one_hidden_layer_fits() {
        let pairs: Vec<(f64, f64)> = (0..100).map(|k| (k as f64, k as f64)).collect();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            epochs: 50,
            batch_size: 1,
            seed: 3,
            init_scale: None,
        };
        let (net, report) = train_net_sgd_scalar(&pairs, &[4], &cfg).unwrap();
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let rmse = net.rmse(&xs, &xs);
        assert!(rmse < 1.0, "rmse {rmse}");
        assert!(report.final_loss() <= report.initial_loss());
    }

    #[test]
    fn linear_arch_recovers_line() {
        let pairs: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        let cfg = TrainConfig {
            learning_rate: 0.2,
            epochs: 300,
            batch_size: 5,
            seed: 11,
            init_scale: None,
        };
        let (net, _) = train_net_sgd_scalar(&pairs, &[], &cfg).unwrap();
        // slope and intercept in raw units from two evaluations
        let b = net.predict_scalar(0.0);
        let a = net.predict_scalar(1.0) - b;
        assert!((a - 2.0).abs() < 1e-2, "slope {a}");
        assert!((b - 1.0).abs() < 1e-2, "intercept {b}");
    }

    #[test]
    fn zero_learning_rate_is_noop() {
        let (xs, ys) = random_pairs(20, 1);
        for hidden in [vec![], vec![8], vec![4, 4]] {
            let arch = NetArch::new(1, hidden).unwrap();
            let cfg = TrainConfig {
                learning_rate: 0.0,
                epochs: 1,
                batch_size: 4,
                seed: 9,
                init_scale: None,
            };
            let (net, _) = train_net_sgd(&xs, &ys, &arch, &cfg).unwrap();
            assert_eq!(net.params(), FeedForwardNet::random(&arch, None, 9).params());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (xs, ys) = random_pairs(64, 2);
        let arch = NetArch::new(1, vec![8]).unwrap();
        let cfg = TrainConfig::default();
        let (a, _) = train_net_sgd(&xs, &ys, &arch, &cfg).unwrap();
        let (b, _) = train_net_sgd(&xs, &ys, &arch, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_reported() {
        let (xs, ys) = random_pairs(64, 4);
        let arch = NetArch::new(1, vec![16, 16]).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e6,
            epochs: 20,
            batch_size: 1,
            seed: 0,
            init_scale: Some(3.0),
        };
        assert!(matches!(
            train_net_sgd(&xs, &ys, &arch, &cfg),
            Err(Error::TrainingDiverged { .. })
        ));
    }

    #[test]
    fn gradient_checks() {
        let (xs, ys) = random_pairs(10, 5);
        let arch = NetArch::new(1, vec![6]).unwrap();
        let net = FeedForwardNet::random(&arch, None, 12)
            .with_normalization(Normalization::fit(&xs, 1, &ys));
        assert!(gradient_check(&net, &xs, &ys, 1e-5) < 1e-4);

        let wide = NetArch::new(1, vec![32, 32]).unwrap();
        let net = FeedForwardNet::random(&wide, None, 13)
            .with_normalization(Normalization::fit(&xs, 1, &ys));
        assert!(gradient_check(&net, &xs, &ys, 1e-5) < 1e-4);

        let zero = FeedForwardNet::zeros(&arch).with_normalization(Normalization::fit(&xs, 1, &ys));
        assert!(gradient_check(&zero, &xs, &ys, 1e-5) < 1e-9);
    }

    #[test]
    fn multi_dim_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<f64> = (0..30).map(|_| rng.random_range(0.0..128.0)).collect();
        let ys: Vec<f64> = xs.chunks(3).map(|r| r[0] * 2.0 + r[1] - r[2]).collect();
        let arch = NetArch::new(3, vec![5, 3]).unwrap();
        let net = FeedForwardNet::random(&arch, None, 1).with_normalization(Normalization::fit(&xs, 3, &ys));
        assert!(gradient_check(&net, &xs, &ys, 1e-5) < 1e-4);
        let direct = net.predict(&xs[..3]);
        assert!(direct.is_finite());
    }
}
