//! Trainable key → position predictors.

mod featurize;
mod linear;
mod multivariate;
mod net;

pub use featurize::StringFeaturizer;
pub use linear::{train_linear_closed_form, LinearModel};
pub use multivariate::{
    feature_subsets, train_multivariate, Feature, MultivariateLinearModel, MAX_SELECTED_FEATURES,
    RIDGE_LAMBDA,
};
pub use net::{
    gradient_check, select_net, train_net_sgd, train_net_sgd_scalar, Activations, Dense, FeedForwardNet,
    NetArch, Normalization, TrainConfig, TrainReport, MAX_HIDDEN_LAYERS, MAX_WIDTH,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::key::IndexKey;

/// Any trained predictor from key to (unclamped) position estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CdfModel {
    Linear(LinearModel),
    Multivariate(MultivariateLinearModel),
    Net(FeedForwardNet),
}

impl CdfModel {
    #[inline]
    pub fn predict<K: IndexKey>(&self, key: &K) -> f64 {
        match self {
            CdfModel::Linear(m) => m.predict(key.to_f64()),
            CdfModel::Multivariate(m) => m.predict(key.to_f64()),
            CdfModel::Net(n) if n.input_dim() == 1 => n.predict_scalar(key.to_f64()),
            CdfModel::Net(n) => {
                let mut x = Vec::with_capacity(n.input_dim());
                key.write_features(n.input_dim(), &mut x);
                n.predict(&x)
            }
        }
    }

    pub fn size_bytes(&self) -> usize {
        match self {
            CdfModel::Linear(m) => m.size_bytes(),
            CdfModel::Multivariate(m) => m.size_bytes(),
            CdfModel::Net(n) => n.size_bytes(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CdfModel::Linear(_) => "linear",
            CdfModel::Multivariate(_) => "multivariate",
            CdfModel::Net(_) => "net",
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// How to train one model: the architecture choice for an RMI stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Linear,
    /// Feature subset chosen from `candidates` by lowest training RMSE.
    Multivariate { candidates: Vec<Feature> },
    /// ReLU net; `input_dim` 1 for scalar keys or the token count for strings.
    Net {
        input_dim: usize,
        hidden: Vec<usize>,
        train: TrainConfig,
    },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Linear => Ok(()),
            ModelSpec::Multivariate { candidates } if candidates.is_empty() => Err(
                crate::Error::InvalidConfig("multivariate model needs candidate features".into()),
            ),
            ModelSpec::Multivariate { .. } => Ok(()),
            ModelSpec::Net {
                input_dim,
                hidden,
                train,
            } => {
                NetArch::new(*input_dim, hidden.clone())?;
                train.validate()
            }
        }
    }

    /// Trains on the keys at `positions` of the sorted array `keys`; each
    /// key's target is its own position. `salt` perturbs the net seed so
    /// sibling models get distinct initializations.
    pub fn fit<K: IndexKey>(&self, keys: &[K], positions: &[usize], salt: u64) -> Result<CdfModel> {
        match self {
            ModelSpec::Linear => Ok(CdfModel::Linear(LinearModel::fit(
                positions.iter().map(|&p| (keys[p].to_f64(), p as f64)),
            ))),
            ModelSpec::Multivariate { candidates } => {
                let pairs: Vec<(f64, f64)> =
                    positions.iter().map(|&p| (keys[p].to_f64(), p as f64)).collect();
                Ok(CdfModel::Multivariate(train_multivariate(&pairs, candidates)))
            }
            ModelSpec::Net {
                input_dim,
                hidden,
                train,
            } => {
                let arch = NetArch::new(*input_dim, hidden.clone())?;
                let mut inputs = Vec::with_capacity(positions.len() * input_dim);
                let mut buf = Vec::with_capacity(*input_dim);
                for &p in positions {
                    if *input_dim == 1 {
                        inputs.push(keys[p].to_f64());
                    } else {
                        keys[p].write_features(*input_dim, &mut buf);
                        inputs.extend_from_slice(&buf);
                    }
                }
                let targets: Vec<f64> = positions.iter().map(|&p| p as f64).collect();
                let cfg = TrainConfig {
                    seed: train.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15),
                    ..train.clone()
                };
                let (net, _) = train_net_sgd(&inputs, &targets, &arch, &cfg)?;
                Ok(CdfModel::Net(net))
            }
        }
    }
}
