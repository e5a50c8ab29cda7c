//! Recursive model index: a hierarchy of models in which each stage's
//! prediction picks the model of the next stage, and the last stage predicts
//! a position together with recorded error bounds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::baselines::{BTreeIndex, NodeSearch, REFERENCE_PAGE_SIZE};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::key::IndexKey;
use crate::models::{CdfModel, LinearModel, ModelSpec};
use crate::search::{exponential_search, search_with_widening, ProbeCounter, SearchWindow, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmiConfig {
    /// Models per stage; the first entry must be 1.
    pub stage_sizes: Vec<usize>,
    /// Model family for each stage, one entry per stage.
    pub stage_models: Vec<ModelSpec>,
    /// Leaves whose largest absolute error exceeds this become B-trees.
    pub hybrid_threshold: Option<u32>,
    pub btree_page_size: usize,
}

impl RmiConfig {
    /// Same model family on every stage, no hybrid replacement.
    pub fn uniform(stage_sizes: Vec<usize>, spec: ModelSpec) -> Self {
        let stage_models = vec![spec; stage_sizes.len()];
        Self {
            stage_sizes,
            stage_models,
            hybrid_threshold: None,
            btree_page_size: REFERENCE_PAGE_SIZE,
        }
    }

    pub fn linear(stage_sizes: Vec<usize>) -> Self {
        Self::uniform(stage_sizes, ModelSpec::Linear)
    }

    pub fn with_hybrid_threshold(mut self, t: u32) -> Self {
        self.hybrid_threshold = Some(t);
        self
    }

    pub fn with_root(mut self, spec: ModelSpec) -> Self {
        if let Some(first) = self.stage_models.first_mut() {
            *first = spec;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.stage_sizes.first() != Some(&1) {
            return bad(format!("first stage must have exactly one model, got {:?}", self.stage_sizes));
        }
        if self.stage_sizes.contains(&0) {
            return bad("every stage needs at least one model".into());
        }
        if self.stage_models.len() != self.stage_sizes.len() {
            return bad(format!(
                "{} stage model specs for {} stages",
                self.stage_models.len(),
                self.stage_sizes.len()
            ));
        }
        if self.btree_page_size < 2 {
            return bad(format!("B-tree page size must be >= 2, got {}", self.btree_page_size));
        }
        self.stage_models.iter().try_for_each(ModelSpec::validate)
    }
}

/// A last-stage entry.
#[derive(Debug, Clone)]
pub enum Leaf<K> {
    Model {
        model: CdfModel,
        /// Most negative `true_pos - predicted_pos` over the routed keys.
        min_err: i32,
        /// Most positive `true_pos - predicted_pos` over the routed keys.
        max_err: i32,
        /// Root-mean-squared error over the routed keys.
        sigma: f64,
        /// Number of build keys routed here.
        keys: usize,
    },
    /// Replaces a model whose error exceeded the hybrid threshold. Covers the
    /// contiguous position range spanned by the keys routed to it.
    BTree { tree: BTreeIndex<K> },
}

impl<K> Leaf<K> {
    pub fn is_btree(&self) -> bool {
        matches!(self, Leaf::BTree { .. })
    }

    pub fn max_abs_err(&self) -> Option<u32> {
        match self {
            Leaf::Model { min_err, max_err, .. } => Some(min_err.unsigned_abs().max(max_err.unsigned_abs())),
            Leaf::BTree { .. } => None,
        }
    }
}

/// Model prediction for a key, clamped into the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub pos: usize,
    pub lo: usize,
    pub hi: usize,
    pub sigma: f64,
    pub leaf: usize,
    /// The leaf is a B-tree and `pos` is its answer.
    pub exact: bool,
}

/// Rounds half up and clamps into `0..n`.
#[inline]
pub fn clamp_position(pred: f64, n: usize) -> usize {
    let r = (pred + 0.5).floor();
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= (n - 1) as f64 {
        n - 1
    } else {
        r as usize
    }
}

/// `clamp(⌊m · pred / n⌋, 0, m − 1)`.
#[inline]
pub fn route_index(pred: f64, m: usize, n: usize) -> usize {
    let k = (m as f64 * pred / n as f64).floor();
    if k.is_nan() || k <= 0.0 {
        0
    } else if k >= (m - 1) as f64 {
        m - 1
    } else {
        k as usize
    }
}

fn fallback_model<K: IndexKey>(keys: &[K]) -> CdfModel {
    let n = keys.len() as f64;
    let lo = keys[0].to_f64();
    let range = keys[keys.len() - 1].to_f64() - lo;
    let slope = if range > 0.0 { n / range } else { 0.0 };
    CdfModel::Linear(LinearModel::new(slope, -slope * lo))
}

#[derive(Debug, Clone)]
pub struct RmiIndex<K> {
    config: RmiConfig,
    data: Arc<[K]>,
    /// All stages but the last.
    inner: Vec<Vec<CdfModel>>,
    leaves: Vec<Leaf<K>>,
}

impl<K: IndexKey> RmiIndex<K> {
    pub fn build(dataset: &Dataset<K>, config: RmiConfig) -> Result<Self> {
        Self::build_from_keys(dataset.shared_keys(), config)
    }

    /// `keys` must be strictly ascending and non-empty.
    pub fn build_from_keys(data: Arc<[K]>, config: RmiConfig) -> Result<Self> {
        config.validate()?;
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = data.len();
        let stages = config.stage_sizes.len();
        let mut records: Vec<Vec<usize>> = vec![(0..n).collect()];
        let mut inner = Vec::with_capacity(stages - 1);
        let mut leaves = Vec::new();

        for stage in 0..stages {
            let spec = &config.stage_models[stage];
            let last = stage + 1 == stages;
            let next_m = config.stage_sizes.get(stage + 1).copied().unwrap_or(0);
            let mut next: Vec<Vec<usize>> = vec![Vec::new(); next_m];
            let mut models = Vec::with_capacity(records.len());
            for (j, positions) in records.iter().enumerate() {
                let model = if positions.is_empty() {
                    fallback_model(&data)
                } else {
                    spec.fit(&data, positions, ((stage as u64) << 32) | j as u64)?
                };
                if last {
                    leaves.push(Self::make_leaf(&data, model, positions, &config)?);
                } else {
                    for &p in positions {
                        next[route_index(model.predict(&data[p]), next_m, n)].push(p);
                    }
                    models.push(model);
                }
            }
            if !last {
                inner.push(models);
                records = next;
            }
        }
        Ok(Self {
            config,
            data,
            inner,
            leaves,
        })
    }

    fn make_leaf(data: &Arc<[K]>, model: CdfModel, positions: &[usize], config: &RmiConfig) -> Result<Leaf<K>> {
        let n = data.len();
        let (mut min_err, mut max_err, mut sq) = (i64::MAX, i64::MIN, 0.0);
        for &p in positions {
            let e = p as i64 - clamp_position(model.predict(&data[p]), n) as i64;
            min_err = min_err.min(e);
            max_err = max_err.max(e);
            sq += (e * e) as f64;
        }
        let (min_err, max_err, sigma) = if positions.is_empty() {
            (-(n as i64), n as i64, 0.0)
        } else {
            (min_err, max_err, (sq / positions.len() as f64).sqrt())
        };
        let to_i32 = |e: i64| i32::try_from(e).map_err(|_| Error::InvalidArgument(format!("error {e} exceeds i32")));
        let (min_err, max_err) = (to_i32(min_err)?, to_i32(max_err)?);
        let max_abs = min_err.unsigned_abs().max(max_err.unsigned_abs());
        match config.hybrid_threshold {
            Some(t) if max_abs > t => {
                let (base, len) = match (positions.iter().min(), positions.iter().max()) {
                    (Some(&lo), Some(&hi)) => (lo, hi - lo + 1),
                    _ => (0, 0),
                };
                let tree = BTreeIndex::build_range(data.clone(), base, len, config.btree_page_size, NodeSearch::Binary)?;
                Ok(Leaf::BTree { tree })
            }
            _ => Ok(Leaf::Model {
                model,
                min_err,
                max_err,
                sigma,
                keys: positions.len(),
            }),
        }
    }

    pub fn config(&self) -> &RmiConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &Arc<[K]> {
        &self.data
    }

    pub fn leaves(&self) -> &[Leaf<K>] {
        &self.leaves
    }

    pub fn num_btree_leaves(&self) -> usize {
        self.leaves.iter().filter(|l| l.is_btree()).count()
    }

    /// Model index at 0-based `stage` for `key`; stage 0 is always 0.
    pub fn route(&self, key: &K, stage: usize) -> usize {
        assert!(stage < self.config.stage_sizes.len(), "stage {stage} out of range");
        let n = self.data.len();
        let mut j = 0;
        for s in 0..stage {
            j = route_index(self.inner[s][j].predict(key), self.config.stage_sizes[s + 1], n);
        }
        j
    }

    fn leaf_of(&self, key: &K) -> usize {
        self.route(key, self.config.stage_sizes.len() - 1)
    }

    /// Unclamped last-stage prediction. B-tree leaves return their answer.
    pub fn predict_raw(&self, key: &K) -> f64 {
        match &self.leaves[self.leaf_of(key)] {
            Leaf::Model { model, .. } => model.predict(key),
            Leaf::BTree { tree } => tree.upper_bound(key, &mut ()) as f64,
        }
    }

    pub fn predict_position(&self, key: &K) -> PositionEstimate {
        self.estimate(key, &mut ())
    }

    fn estimate<C: ProbeCounter>(&self, key: &K, counter: &mut C) -> PositionEstimate {
        let n = self.data.len();
        let leaf = self.leaf_of(key);
        match &self.leaves[leaf] {
            Leaf::Model {
                model,
                min_err,
                max_err,
                sigma,
                ..
            } => {
                let pos = clamp_position(model.predict(key), n);
                let shift = |e: i32| (pos as i64 + e as i64).clamp(0, n as i64 - 1) as usize;
                PositionEstimate {
                    pos,
                    lo: shift(*min_err),
                    hi: shift(*max_err),
                    sigma: *sigma,
                    leaf,
                    exact: false,
                }
            }
            Leaf::BTree { tree } => {
                let p = tree.upper_bound(key, counter).min(n - 1);
                PositionEstimate {
                    pos: p,
                    lo: p,
                    hi: p,
                    sigma: 0.0,
                    leaf,
                    exact: true,
                }
            }
        }
    }

    /// First position whose key is `>= key`, or `n`.
    pub fn lookup<C: ProbeCounter>(&self, key: &K, strategy: Strategy, counter: &mut C) -> usize {
        let data = &self.data[..];
        let n = data.len();
        let leaf = self.leaf_of(key);
        match &self.leaves[leaf] {
            Leaf::BTree { tree } if tree.span().1 == 0 => {
                let start = clamp_position(fallback_model(data).predict(key), n);
                exponential_search(data, key, start, counter)
            }
            Leaf::BTree { tree } => {
                let p = tree.upper_bound(key, counter);
                let (base, len) = tree.span();
                // inside the span the tree is exact; only its edges need checking
                let low_ok = p > base || p == 0 || {
                    counter.probe();
                    data[p - 1] < *key
                };
                let high_ok = p < base + len || p == n || {
                    counter.probe();
                    data[p] >= *key
                };
                if low_ok && high_ok {
                    p
                } else {
                    exponential_search(data, key, p.min(n - 1), counter)
                }
            }
            Leaf::Model { .. } => {
                let e = self.estimate(key, counter);
                let window = SearchWindow::new(e.pos.clamp(e.lo, e.hi), e.lo, e.hi, e.sigma);
                search_with_widening(data, key, &window, strategy, counter)
            }
        }
    }

    /// Model parameters, 8 bytes of error bounds per model leaf, and the
    /// B-tree leaves. Excludes the data and the per-leaf σ.
    pub fn index_size_bytes(&self) -> usize {
        let inner: usize = self.inner.iter().flatten().map(CdfModel::size_bytes).sum();
        let leaves: usize = self
            .leaves
            .iter()
            .map(|l| match l {
                Leaf::Model { model, .. } => model.size_bytes() + 8,
                Leaf::BTree { tree } => tree.size_bytes(),
            })
            .sum();
        inner + leaves
    }

    /// Bytes for the per-leaf σ that quaternary search uses on top of
    /// [`index_size_bytes`](Self::index_size_bytes).
    pub fn quaternary_aux_bytes(&self) -> usize {
        8 * self.leaves.iter().filter(|l| !l.is_btree()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let leaves = self
            .leaves
            .iter()
            .map(|l| match l {
                Leaf::Model {
                    model,
                    min_err,
                    max_err,
                    sigma,
                    keys,
                } => SerializedLeaf::Model {
                    model: model.clone(),
                    min_err: *min_err,
                    max_err: *max_err,
                    sigma: *sigma,
                    keys: *keys,
                },
                Leaf::BTree { tree } => {
                    let (start, len) = tree.span();
                    SerializedLeaf::Btree { start, len }
                }
            })
            .collect();
        let s = SerializedRmi {
            config: self.config.clone(),
            n: self.data.len(),
            stages: self.inner.clone(),
            leaves,
        };
        Ok(serde_json::to_string(&s)?)
    }

    /// Restores an index serialized by [`to_json`](Self::to_json) over the
    /// same keys.
    pub fn from_json(json: &str, data: Arc<[K]>) -> Result<Self> {
        let s: SerializedRmi = serde_json::from_str(json)?;
        s.config.validate()?;
        if s.n != data.len() {
            return Err(Error::InvalidArgument(format!(
                "index was built over {} keys, got {}",
                s.n,
                data.len()
            )));
        }
        let sizes = &s.config.stage_sizes;
        let shape_ok = s.stages.len() + 1 == sizes.len()
            && s.stages.iter().zip(sizes).all(|(st, &m)| st.len() == m)
            && s.leaves.len() == sizes[sizes.len() - 1];
        if !shape_ok {
            return Err(Error::InvalidArgument("stage shapes do not match the config".into()));
        }
        let leaves = s
            .leaves
            .into_iter()
            .map(|l| match l {
                SerializedLeaf::Model {
                    model,
                    min_err,
                    max_err,
                    sigma,
                    keys,
                } => Ok(Leaf::Model {
                    model,
                    min_err,
                    max_err,
                    sigma,
                    keys,
                }),
                SerializedLeaf::Btree { start, len } => Ok(Leaf::BTree {
                    tree: BTreeIndex::build_range(data.clone(), start, len, s.config.btree_page_size, NodeSearch::Binary)?,
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: s.config,
            data,
            inner: s.stages,
            leaves,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SerializedRmi {
    config: RmiConfig,
    n: usize,
    stages: Vec<Vec<CdfModel>>,
    leaves: Vec<SerializedLeaf>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SerializedLeaf {
    Model {
        model: CdfModel,
        min_err: i32,
        max_err: i32,
        sigma: f64,
        keys: usize,
    },
    Btree {
        start: usize,
        len: usize,
    },
}
