use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FilterKey;
use crate::error::{Error, Result};
use crate::models::{Activations, FeedForwardNet, NetArch};

/// Hash buckets for character 2-grams.
pub const DEFAULT_BUCKETS: usize = 1024;

const GRAM_SEED: u64 = 0x6772_616d;
const EPS: f64 = 1e-12;

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// A probabilistic key/non-key classifier trained on log loss.
pub trait KeyClassifier<K> {
    /// Probability in `[0, 1]` that `key` is a key.
    fn score(&self, key: &K) -> f64;
    fn size_bytes(&self) -> usize;
    fn kind(&self) -> &'static str;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]);
    /// Gradient of [`log_loss`](Self::log_loss) with respect to `params`.
    fn log_loss_gradient(&self, samples: &[K], labels: &[bool]) -> Vec<f64>;

    /// Mean negative log-likelihood.
    fn log_loss(&self, samples: &[K], labels: &[bool]) -> f64 {
        let sum: f64 = samples
            .iter()
            .zip(labels)
            .map(|(x, &y)| {
                let f = self.score(x).clamp(EPS, 1.0 - EPS);
                if y {
                    -f.ln()
                } else {
                    -(1.0 - f).ln()
                }
            })
            .sum();
        sum / samples.len().max(1) as f64
    }
}

/// Largest `|analytic − numeric| / max(1, |numeric|)` over all parameters,
/// with central differences of step `eps`.
pub fn classifier_gradient_check<K, C: KeyClassifier<K> + Clone>(
    clf: &C,
    samples: &[K],
    labels: &[bool],
    eps: f64,
) -> f64 {
    let analytic = clf.log_loss_gradient(samples, labels);
    let base = clf.params();
    let mut probe = clf.clone();
    let mut worst = 0.0f64;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + eps;
        probe.set_params(&p);
        let up = probe.log_loss(samples, labels);
        p[i] = base[i] - eps;
        probe.set_params(&p);
        let down = probe.log_loss(samples, labels);
        let numeric = (up - down) / (2.0 * eps);
        worst = worst.max((analytic[i] - numeric).abs() / numeric.abs().max(1.0));
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Hidden width of the integer classifier.
    pub hidden: usize,
    /// Hash buckets of the string classifier.
    pub buckets: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 8,
            batch_size: 32,
            seed: 0,
            hidden: 16,
            buckets: DEFAULT_BUCKETS,
        }
    }
}

impl ClassifierConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(format!("bad classifier training config {self:?}")));
        }
        if self.buckets == 0 || self.hidden == 0 || self.hidden > crate::models::MAX_WIDTH {
            return Err(Error::InvalidConfig(format!("bad classifier shape {self:?}")));
        }
        Ok(())
    }
}

/// Labelled training samples in a seeded random order, in mini-batches.
fn batches<'a, K>(keys: &'a [K], non_keys: &'a [K], epoch_seed: u64, batch: usize) -> Vec<Vec<(&'a K, bool)>> {
    let mut all: Vec<(&K, bool)> = keys.iter().map(|k| (k, true)).chain(non_keys.iter().map(|k| (k, false))).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(epoch_seed));
    all.chunks(batch).map(<[_]>::to_vec).collect()
}

/// Logistic regression over hashed character 2-gram counts.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLogistic {
    weights: Vec<f64>,
    bias: f64,
}

impl NgramLogistic {
    pub fn zeros(buckets: usize) -> Self {
        assert!(buckets > 0, "need at least one bucket");
        Self {
            weights: vec![0.0; buckets],
            bias: 0.0,
        }
    }

    /// Sparse features: bucket counts of the 2-grams of `^key$`, scaled by
    /// `1/sqrt(#grams)`.
    pub fn features(&self, key: &[u8], out: &mut Vec<(usize, f64)>) {
        out.clear();
        let b = self.weights.len();
        let grams = key.len() + 1;
        let scale = 1.0 / (grams as f64).sqrt();
        let byte = |i: usize| -> u16 {
            if i == 0 {
                256
            } else if i > key.len() {
                257
            } else {
                key[i - 1] as u16
            }
        };
        for i in 0..grams {
            let g = (u64::from(byte(i)) << 16) | u64::from(byte(i + 1));
            let bucket = (g.filter_hash(GRAM_SEED) % b as u64) as usize;
            match out.iter_mut().find(|(j, _)| *j == bucket) {
                Some(e) => e.1 += scale,
                None => out.push((bucket, scale)),
            }
        }
    }

    fn logit(&self, feats: &[(usize, f64)]) -> f64 {
        self.bias + feats.iter().map(|&(j, v)| self.weights[j] * v).sum::<f64>()
    }

    /// Mini-batch SGD on log loss; keys are label 1, non-keys label 0.
    pub fn train(keys: &[Vec<u8>], non_keys: &[Vec<u8>], cfg: &ClassifierConfig) -> Result<Self> {
        cfg.validate()?;
        if keys.is_empty() || non_keys.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut m = Self::zeros(cfg.buckets);
        let mut feats = Vec::new();
        let mut grad = vec![0.0; cfg.buckets];
        for epoch in 0..cfg.epochs {
            for batch in batches(keys, non_keys, cfg.seed ^ epoch as u64, cfg.batch_size) {
                let mut gb = 0.0;
                let mut touched = Vec::new();
                for (x, y) in &batch {
                    m.features(x, &mut feats);
                    let d = sigmoid(m.logit(&feats)) - f64::from(u8::from(*y));
                    gb += d;
                    for &(j, v) in &feats {
                        grad[j] += d * v;
                        touched.push(j);
                    }
                }
                let step = cfg.learning_rate / batch.len() as f64;
                touched.sort_unstable();
                touched.dedup();
                for j in touched {
                    m.weights[j] -= step * grad[j];
                    grad[j] = 0.0;
                }
                m.bias -= step * gb;
            }
            if !m.bias.is_finite() {
                return Err(Error::TrainingDiverged {
                    epoch,
                    loss: f64::NAN,
                });
            }
        }
        Ok(m)
    }
}

impl KeyClassifier<Vec<u8>> for NgramLogistic {
    fn score(&self, key: &Vec<u8>) -> f64 {
        let mut feats = Vec::with_capacity(key.len() + 1);
        self.features(key, &mut feats);
        sigmoid(self.logit(&feats))
    }

    fn size_bytes(&self) -> usize {
        8 * (self.weights.len() + 1)
    }

    fn kind(&self) -> &'static str {
        "ngram-logistic"
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.weights.len() + 1);
        self.weights.copy_from_slice(&params[..params.len() - 1]);
        self.bias = params[params.len() - 1];
    }

    fn log_loss_gradient(&self, samples: &[Vec<u8>], labels: &[bool]) -> Vec<f64> {
        let mut g = vec![0.0; self.weights.len() + 1];
        let mut feats = Vec::new();
        let scale = 1.0 / samples.len().max(1) as f64;
        for (x, &y) in samples.iter().zip(labels) {
            self.features(x, &mut feats);
            let d = (sigmoid(self.logit(&feats)) - f64::from(u8::from(y))) * scale;
            for &(j, v) in &feats {
                g[j] += d * v;
            }
            g[self.weights.len()] += d;
        }
        g
    }
}

/// One-hidden-layer ReLU net with a sigmoid output over the key scaled to
/// `[0, 1]` by the training range.
#[derive(Debug, Clone, PartialEq)]
pub struct IntNetClassifier {
    net: FeedForwardNet,
    lo: f64,
    span: f64,
}

impl IntNetClassifier {
    pub fn random(hidden: usize, lo: u64, hi: u64, seed: u64) -> Result<Self> {
        let arch = NetArch::new(1, vec![hidden])?;
        let span = (hi as f64 - lo as f64).max(1.0);
        Ok(Self {
            net: FeedForwardNet::random(&arch, None, seed),
            lo: lo as f64,
            span,
        })
    }

    #[inline]
    fn input(&self, key: u64) -> f64 {
        (key as f64 - self.lo) / self.span
    }

    pub fn train(keys: &[u64], non_keys: &[u64], cfg: &ClassifierConfig) -> Result<Self> {
        cfg.validate()?;
        let (Some(lo), Some(hi)) = (
            keys.iter().chain(non_keys).min().copied(),
            keys.iter().chain(non_keys).max().copied(),
        ) else {
            return Err(Error::EmptyInput);
        };
        if keys.is_empty() || non_keys.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut c = Self::random(cfg.hidden, lo, hi, cfg.seed)?;
        let mut cache = Activations::default();
        let mut grad = vec![0.0; c.net.num_params()];
        for epoch in 0..cfg.epochs {
            for batch in batches(keys, non_keys, cfg.seed ^ epoch as u64, cfg.batch_size) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                for (x, y) in &batch {
                    let z = c.net.forward_cached(&[c.input(**x)], &mut cache);
                    let d = sigmoid(z) - f64::from(u8::from(*y));
                    c.net.backward(&cache, d, &mut grad);
                }
                let step = cfg.learning_rate / batch.len() as f64;
                let mut p = c.net.params();
                p.iter_mut().zip(&grad).for_each(|(w, g)| *w -= step * g);
                c.net.set_params(&p);
            }
            if !c.net.is_finite() {
                return Err(Error::TrainingDiverged {
                    epoch,
                    loss: f64::NAN,
                });
            }
        }
        Ok(c)
    }
}

impl KeyClassifier<u64> for IntNetClassifier {
    fn score(&self, key: &u64) -> f64 {
        sigmoid(self.net.forward_normalized(&[self.input(*key)]))
    }

    fn size_bytes(&self) -> usize {
        8 * (self.net.num_params() + 2)
    }

    fn kind(&self) -> &'static str {
        "int-net"
    }

    fn params(&self) -> Vec<f64> {
        self.net.params()
    }

    fn set_params(&mut self, params: &[f64]) {
        self.net.set_params(params);
    }

    fn log_loss_gradient(&self, samples: &[u64], labels: &[bool]) -> Vec<f64> {
        let mut g = vec![0.0; self.net.num_params()];
        let mut cache = Activations::default();
        let scale = 1.0 / samples.len().max(1) as f64;
        for (x, &y) in samples.iter().zip(labels) {
            let z = self.net.forward_cached(&[self.input(*x)], &mut cache);
            self.net.backward(&cache, (sigmoid(z) - f64::from(u8::from(y))) * scale, &mut g);
        }
        g
    }
}
