//! CART random forest for binary labels.
//!
//! Each tree is grown on a bootstrap sample drawn from a stream keyed by
//! `(seed, tree index)`, with Gini splits searched over a random subset of
//! features at every node. A forest's probability for class 1 is the fraction
//! of trees whose leaf majority is 1.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::{self, TAG_TREE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    #[default]
    Sqrt,
    Log2,
    All,
}

impl MaxFeatures {
    pub fn count(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().floor() as usize,
            MaxFeatures::Log2 => (n_features as f64).log2().floor() as usize,
            MaxFeatures::All => n_features,
        };
        k.clamp(1, n_features.max(1))
    }
}

fn default_min_samples_split() -> usize {
    2
}

/// One forest configuration; fitness averages over several of these.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperParamGroup {
    pub n_trees: usize,
    /// `None` grows until purity or `min_samples_split`.
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default = "default_min_samples_split")]
    pub min_samples_split: usize,
    #[serde(default)]
    pub features_per_split: MaxFeatures,
    #[serde(default)]
    pub seed_offset: u64,
}

impl HyperParamGroup {
    pub fn new(n_trees: usize, max_depth: Option<usize>) -> Self {
        Self {
            n_trees,
            max_depth,
            min_samples_split: 2,
            features_per_split: MaxFeatures::Sqrt,
            seed_offset: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("n_trees must be positive".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidConfig("max_depth must be positive".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig("min_samples_split must be at least 2".into()));
        }
        Ok(())
    }
}

/// Three capacity levels used when a config names no groups.
pub fn default_param_groups() -> Vec<HyperParamGroup> {
    vec![
        HyperParamGroup::new(50, Some(12)),
        HyperParamGroup::new(100, Some(16)),
        HyperParamGroup::new(100, None),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<T> {
    Leaf {
        /// Bootstrap sample counts of class 0 and class 1.
        counts: [u32; 2],
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<T> {
    /// Root is `nodes[0]`.
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> DecisionTree<T> {
    pub fn vote(&self, row: &[T]) -> u8 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return u8::from(counts[1] >= counts[0]),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[inline]
fn weighted_gini(c0: u32, c1: u32) -> f64 {
    // n * gini(n) = n - (c0² + c1²) / n
    let (a, b) = (f64::from(c0), f64::from(c1));
    let n = a + b;
    if n == 0.0 {
        0.0
    } else {
        n - (a * a + b * b) / n
    }
}

struct Split<T> {
    feature: usize,
    threshold: T,
    impurity: f64,
}

struct TreeBuilder<'a, T> {
    columns: &'a [Vec<T>],
    y: &'a [u8],
    params: &'a HyperParamGroup,
    max_features: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node<T>>,
    pairs: Vec<(T, u8)>,
    feature_order: Vec<usize>,
}

impl<'a, T: Scalar> TreeBuilder<'a, T> {
    fn counts(&self, idx: &[usize]) -> [u32; 2] {
        let ones = idx.iter().filter(|&&i| self.y[i] == 1).count() as u32;
        [idx.len() as u32 - ones, ones]
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<Split<T>> {
        self.feature_order.shuffle(&mut self.rng);
        let [total0, total1] = self.counts(idx);
        let mut best: Option<Split<T>> = None;
        let mut visited = 0;
        for fi in 0..self.feature_order.len() {
            if visited >= self.max_features {
                break;
            }
            let f = self.feature_order[fi];
            let col = &self.columns[f];
            self.pairs.clear();
            self.pairs.extend(idx.iter().map(|&i| (col[i], self.y[i])));
            self.pairs
                .sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            let (first, last) = (self.pairs[0].0, self.pairs[self.pairs.len() - 1].0);
            if first >= last {
                // constant within this node; does not use up the feature budget
                continue;
            }
            visited += 1;

            let (mut l0, mut l1) = (0u32, 0u32);
            for w in 1..self.pairs.len() {
                if self.pairs[w - 1].1 == 1 {
                    l1 += 1;
                } else {
                    l0 += 1;
                }
                let (lo, hi) = (self.pairs[w - 1].0, self.pairs[w].0);
                if lo >= hi {
                    continue;
                }
                let impurity = weighted_gini(l0, l1) + weighted_gini(total0 - l0, total1 - l1);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = (lo + hi) / T::of(2.0);
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(Split {
                        feature: f,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn build(mut self, sample: Vec<usize>) -> DecisionTree<T> {
        let max_depth = self.params.max_depth.unwrap_or(usize::MAX);
        self.nodes.push(Node::Leaf { counts: [0, 0] });
        let mut stack = vec![(0usize, sample, 0usize)];
        while let Some((node, idx, depth)) = stack.pop() {
            let counts = self.counts(&idx);
            let pure = counts[0] == 0 || counts[1] == 0;
            if pure || depth >= max_depth || idx.len() < self.params.min_samples_split {
                self.nodes[node] = Node::Leaf { counts };
                continue;
            }
            let Some(split) = self.best_split(&idx) else {
                self.nodes[node] = Node::Leaf { counts };
                continue;
            };
            let col = &self.columns[split.feature];
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| col[i] <= split.threshold);
            let left = self.nodes.len();
            let right = left + 1;
            self.nodes.push(Node::Leaf { counts: [0, 0] });
            self.nodes.push(Node::Leaf { counts: [0, 0] });
            self.nodes[node] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push((right, right_idx, depth + 1));
            stack.push((left, left_idx, depth + 1));
        }
        DecisionTree { nodes: self.nodes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest<T> {
    pub trees: Vec<DecisionTree<T>>,
    pub params: HyperParamGroup,
    pub seed: u64,
    pub n_features: usize,
}

impl<T: Scalar> RandomForest<T> {
    pub fn fit(x: ArrayView2<'_, T>, y: &[u8], params: &HyperParamGroup, seed: u64) -> Result<Self> {
        params.validate()?;
        let (n, k) = x.dim();
        if n == 0 || k == 0 {
            return Err(Error::EmptyDataset);
        }
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("forest input"));
        }
        let columns: Vec<Vec<T>> = x.columns().into_iter().map(|c| c.to_vec()).collect();
        let max_features = params.features_per_split.count(k);

        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::stream(seed, &[TAG_TREE, t as u64]);
                let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                TreeBuilder {
                    columns: &columns,
                    y,
                    params,
                    max_features,
                    rng,
                    nodes: Vec::new(),
                    pairs: Vec::with_capacity(n),
                    feature_order: (0..k).collect(),
                }
                .build(sample)
            })
            .collect();

        Ok(Self {
            trees,
            params: params.clone(),
            seed,
            n_features: k,
        })
    }

    /// Fraction of trees voting class 1 for each row.
    pub fn predict_proba(&self, x: ArrayView2<'_, T>) -> Result<Vec<T>> {
        if x.ncols() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.ncols(),
            });
        }
        let n_trees = T::of_usize(self.trees.len());
        let rows: Vec<Vec<T>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
        Ok(rows
            .par_iter()
            .map(|row| {
                let votes = self.trees.iter().filter(|t| t.vote(row) == 1).count();
                T::of_usize(votes) / n_trees
            })
            .collect())
    }

    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| u8::from(p >= T::of(0.5)))
            .collect())
    }
}
