//! Two-phase feature selection via normalized selection frequencies.
//!
//! Phase I turns mutual-information scores into inclusion probabilities
//! (WV1), samples `L` random subsets from them and evaluates each. Phase II
//! counts how often each feature appears among the `M` best and `N` worst
//! subsets, takes the difference of the unit-normalized counts (WV2), and
//! evaluates the `O` nested prefixes of the WV2 ranking. The best prefix is
//! the result.

use std::cmp::Ordering;

use log::{info, warn};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{default_param_groups, HyperParamGroup};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::metrics::fitness;
use crate::mi::{score_all, MiScores, DEFAULT_MI_BINS};
use crate::scalar::Scalar;
use crate::seed::{self, TAG_AFS1};

/// Base inclusion weight every feature holds in phase I.
pub const WV1_BASE: f64 = 0.5;
/// Largest increase above the base weight, reached at the maximum MI score.
pub const WV1_SPAN: f64 = 0.4;

fn default_pca_ratio() -> f64 {
    0.93
}

fn default_base_seed() -> u64 {
    7
}

fn default_mi_bins() -> usize {
    DEFAULT_MI_BINS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NffsConfig {
    /// L: number of probabilistic subsets in phase I.
    #[serde(alias = "L")]
    pub afs1_size: usize,
    /// M: best phase-I subsets counted into the top frequencies.
    #[serde(alias = "M")]
    pub top_count: usize,
    /// N: worst phase-I subsets counted into the bottom frequencies.
    #[serde(alias = "N")]
    pub bottom_count: usize,
    /// O: nested subsets evaluated in phase II.
    #[serde(alias = "O")]
    pub afs2_size: usize,
    /// MI threshold below which a feature keeps the base weight.
    pub threshold: f64,
    #[serde(default = "default_mi_bins")]
    pub mi_bins: usize,
    #[serde(default = "default_param_groups")]
    pub param_groups: Vec<HyperParamGroup>,
    #[serde(default = "default_pca_ratio")]
    pub pca_ratio: f64,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
}

impl NffsConfig {
    pub fn new(afs1_size: usize, top_count: usize, bottom_count: usize, afs2_size: usize, threshold: f64) -> Self {
        Self {
            afs1_size,
            top_count,
            bottom_count,
            afs2_size,
            threshold,
            mi_bins: DEFAULT_MI_BINS,
            param_groups: default_param_groups(),
            pca_ratio: default_pca_ratio(),
            base_seed: default_base_seed(),
        }
    }

    /// Parameters used for NSL-KDD: L=180, M=N=45, O=70, threshold 0.05.
    pub fn nsl_kdd() -> Self {
        Self::new(180, 45, 45, 70, 0.05)
    }

    /// Checks the invariants against the encoded width `d`.
    pub fn validate(&self, width: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.afs1_size == 0 || self.top_count == 0 || self.bottom_count == 0 || self.afs2_size == 0 {
            return bad("L, M, N and O must all be at least 1".into());
        }
        if self.top_count + self.bottom_count >= self.afs1_size {
            return bad(format!(
                "M + N must be less than L (got {} + {} >= {})",
                self.top_count, self.bottom_count, self.afs1_size
            ));
        }
        if self.afs2_size >= width {
            return bad(format!(
                "O must be less than the number of features (got {} >= {width})",
                self.afs2_size
            ));
        }
        if !(self.pca_ratio > 0.0 && self.pca_ratio <= 1.0) {
            return bad(format!("pca_ratio must be in (0, 1], got {}", self.pca_ratio));
        }
        if self.mi_bins < 2 {
            return bad("mi_bins must be at least 2".into());
        }
        if !self.threshold.is_finite() {
            return bad("threshold must be finite".into());
        }
        if self.param_groups.is_empty() {
            return bad("at least one parameter group is required".into());
        }
        self.param_groups.iter().try_for_each(HyperParamGroup::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector<T> {
    pub weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Phase-I weights: 0.5 at or below the threshold, rising linearly to 0.9 at the maximum score.
pub fn compute_wv1<T: Scalar>(scores: &MiScores<T>, threshold: T) -> WeightVector<T> {
    let base = T::of(WV1_BASE);
    let span = T::of(WV1_SPAN);
    let v_max = scores.max();
    if v_max <= threshold {
        warn!("MI threshold {threshold} is not below the maximum score {v_max}; all weights are {WV1_BASE}");
    }
    let weights = scores
        .values
        .iter()
        .map(|&v| {
            if v <= threshold {
                base
            } else {
                ((v - threshold) * span / (v_max - threshold) + base).min(base + span)
            }
        })
        .collect();
    WeightVector { weights }
}

/// Inclusion rule for one coordinate: selected iff `weight - rand > 0`.
#[inline]
pub fn afs1_bit<T: Scalar>(weight: T, rand: T) -> bool {
    weight - rand > T::zero()
}

/// Draws `count` masks; bit `i` of each is set with probability `wv1[i]`.
///
/// Mask `l` uses its own stream keyed by `(base_seed, l)`; an all-zero draw is
/// redrawn from the same stream.
pub fn generate_afs1<T: Scalar>(wv1: &WeightVector<T>, count: usize, base_seed: u64) -> Result<Vec<FeatureMask>> {
    if wv1.is_empty() {
        return Err(Error::EmptySubset);
    }
    if wv1.weights.iter().all(|&w| w <= T::zero()) {
        return Err(Error::InvalidConfig("all weights are non-positive; no subset can be drawn".into()));
    }
    let masks = (0..count)
        .map(|l| {
            let mut rng = seed::stream(base_seed, &[TAG_AFS1, l as u64]);
            loop {
                let bits: Vec<bool> = wv1
                    .weights
                    .iter()
                    .map(|&w| afs1_bit(w, T::of(rng.random::<f64>())))
                    .collect();
                if bits.iter().any(|&b| b) {
                    break FeatureMask::new(bits);
                }
            }
        })
        .collect();
    Ok(masks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedSubset<T> {
    pub mask: FeatureMask,
    pub fitness: T,
}

/// Scores every mask with [`fitness`]; output order follows input order.
pub fn evaluate_subsets<T: Scalar>(
    masks: &[FeatureMask],
    train: &EncodedDataset<T>,
    test: &EncodedDataset<T>,
    config: &NffsConfig,
) -> Result<Vec<EvaluatedSubset<T>>> {
    if masks.is_empty() {
        return Err(Error::InvalidConfig("no subsets to evaluate".into()));
    }
    let pca_ratio = T::of(config.pca_ratio);
    masks
        .par_iter()
        .map(|mask| {
            let f = fitness(mask, train, test, &config.param_groups, pca_ratio, config.base_seed)?;
            Ok(EvaluatedSubset {
                mask: mask.clone(),
                fitness: f,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyVectors {
    pub top: Vec<u32>,
    pub bottom: Vec<u32>,
}

/// Indices sorted by fitness descending; ties put fewer features first, then earlier index.
pub fn fitness_order<T: Scalar>(evaluated: &[EvaluatedSubset<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..evaluated.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&evaluated[a], &evaluated[b]);
        eb.fitness
            .partial_cmp(&ea.fitness)
            .unwrap_or(Ordering::Equal)
            .then(ea.mask.count().cmp(&eb.mask.count()))
            .then(a.cmp(&b))
    });
    order
}

/// Per-feature selection counts over the `top` best and `bottom` worst subsets.
pub fn count_frequencies<T: Scalar>(
    evaluated: &[EvaluatedSubset<T>],
    top: usize,
    bottom: usize,
) -> Result<FrequencyVectors> {
    if top + bottom > evaluated.len() {
        return Err(Error::InvalidConfig(format!(
            "M + N = {} exceeds the {} evaluated subsets",
            top + bottom,
            evaluated.len()
        )));
    }
    let width = evaluated.first().map_or(0, |e| e.mask.len());
    let order = fitness_order(evaluated);
    let tally = |idx: &[usize]| {
        let mut counts = vec![0u32; width];
        for &i in idx {
            for f in evaluated[i].mask.selected() {
                counts[f] += 1;
            }
        }
        counts
    };
    Ok(FrequencyVectors {
        top: tally(&order[..top]),
        bottom: tally(&order[order.len() - bottom..]),
    })
}

fn unit<T: Scalar>(counts: &[u32]) -> Vec<T> {
    let norm = counts.iter().map(|&c| T::of(f64::from(c)).powi(2)).sum::<T>().sqrt();
    if norm == T::zero() {
        return vec![T::zero(); counts.len()];
    }
    counts.iter().map(|&c| T::of(f64::from(c)) / norm).collect()
}

/// Phase-II weights: unit-normalized top counts minus unit-normalized bottom counts.
pub fn compute_wv2<T: Scalar>(freqs: &FrequencyVectors) -> WeightVector<T> {
    let top = unit::<T>(&freqs.top);
    let bottom = unit::<T>(&freqs.bottom);
    WeightVector {
        weights: top
            .into_iter()
            .zip(bottom)
            .map(|(a, b)| (a - b).max(-T::one()).min(T::one()))
            .collect(),
    }
}

/// Feature indices by WV2 descending; ties prefer higher MI, then lower index.
pub fn rank_features<T: Scalar>(wv2: &WeightVector<T>, scores: &MiScores<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..wv2.len()).collect();
    let mi = |i: usize| scores.values.get(i).copied().unwrap_or(T::zero());
    order.sort_by(|&a, &b| {
        wv2.weights[b]
            .partial_cmp(&wv2.weights[a])
            .unwrap_or(Ordering::Equal)
            .then(mi(b).partial_cmp(&mi(a)).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    order
}

/// Mask `j` (1-based) holds the `j` highest-ranked features.
pub fn generate_afs2<T: Scalar>(wv2: &WeightVector<T>, scores: &MiScores<T>, count: usize) -> Result<Vec<FeatureMask>> {
    let d = wv2.len();
    if count == 0 || count >= d {
        return Err(Error::InvalidConfig(format!(
            "O must satisfy 1 <= O < {d}, got {count}"
        )));
    }
    let ranking = rank_features(wv2, scores);
    let mut mask = FeatureMask::zeros(d);
    Ok(ranking
        .iter()
        .take(count)
        .map(|&f| {
            mask.set(f, true);
            mask.clone()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecord<T> {
    pub mask: Vec<u8>,
    pub features: Vec<String>,
    pub fitness: T,
}

impl<T: Scalar> SubsetRecord<T> {
    fn new(e: &EvaluatedSubset<T>, names: &[String]) -> Self {
        Self {
            mask: e.mask.to_u8(),
            features: e.mask.selected().map(|i| names[i].clone()).collect(),
            fitness: e.fitness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSubset<T> {
    /// Position within AFS2 (0-based); the subset holds `afs2_index + 1` features.
    pub afs2_index: usize,
    pub feature_names: Vec<String>,
    pub mask: Vec<u8>,
    pub fitness: T,
}

/// Everything a run produced, in serialization order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NffsReport<T> {
    pub config: NffsConfig,
    pub feature_names: Vec<String>,
    pub mi_scores: MiScores<T>,
    pub wv1: WeightVector<T>,
    pub afs1: Vec<SubsetRecord<T>>,
    pub f_top: Vec<u32>,
    pub f_bottom: Vec<u32>,
    pub wv2: WeightVector<T>,
    pub wv2_ranking: Vec<usize>,
    pub afs2: Vec<SubsetRecord<T>>,
    pub best: BestSubset<T>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NffsRun<T> {
    pub best: EvaluatedSubset<T>,
    pub afs1: Vec<EvaluatedSubset<T>>,
    pub afs2: Vec<EvaluatedSubset<T>>,
    pub report: NffsReport<T>,
}

/// Index of the fittest subset; ties go to fewer features, then earlier index.
fn best_index<T: Scalar>(evaluated: &[EvaluatedSubset<T>]) -> usize {
    fitness_order(evaluated)[0]
}

pub fn run_nffs<T: Scalar>(train: &EncodedDataset<T>, test: &EncodedDataset<T>, config: &NffsConfig) -> Result<NffsRun<T>> {
    let d = train.width();
    if test.width() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: test.width(),
        });
    }
    if train.names != test.names {
        return Err(Error::SchemaMismatch("train and test encoded columns differ".into()));
    }
    config.validate(d)?;

    info!("scoring {d} features by mutual information");
    let scores = score_all(train, config.mi_bins)?;
    let wv1 = compute_wv1(&scores, T::of(config.threshold));
    let afs1_masks = generate_afs1(&wv1, config.afs1_size, config.base_seed)?;
    info!("phase I: evaluating {} subsets", afs1_masks.len());
    let afs1 = evaluate_subsets(&afs1_masks, train, test, config)?;

    let freqs = count_frequencies(&afs1, config.top_count, config.bottom_count)?;
    let wv2 = compute_wv2::<T>(&freqs);
    let ranking = rank_features(&wv2, &scores);
    let afs2_masks = generate_afs2(&wv2, &scores, config.afs2_size)?;
    info!("phase II: evaluating {} nested subsets", afs2_masks.len());
    let afs2 = evaluate_subsets(&afs2_masks, train, test, config)?;

    let bi = best_index(&afs2);
    let best = afs2[bi].clone();
    info!(
        "best subset: {} features, fitness {}",
        best.mask.count(),
        best.fitness
    );

    let names = &train.names;
    let report = NffsReport {
        config: config.clone(),
        feature_names: names.clone(),
        mi_scores: scores,
        wv1,
        afs1: afs1.iter().map(|e| SubsetRecord::new(e, names)).collect(),
        f_top: freqs.top,
        f_bottom: freqs.bottom,
        wv2,
        wv2_ranking: ranking,
        afs2: afs2.iter().map(|e| SubsetRecord::new(e, names)).collect(),
        best: BestSubset {
            afs2_index: bi,
            feature_names: best.mask.selected().map(|i| names[i].clone()).collect(),
            mask: best.mask.to_u8(),
            fitness: best.fitness,
        },
        evaluations: afs1.len() + afs2.len(),
    };
    Ok(NffsRun {
        best,
        afs1,
        afs2,
        report,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn ev(bits: &[u8], fitness: f64) -> EvaluatedSubset<f64> {
        EvaluatedSubset {
            mask: FeatureMask::new(bits.iter().map(|&b| b == 1).collect()),
            fitness,
        }
    }

    #[test]
    fn wv1_endpoints_and_interpolation() {
        let scores = MiScores::new(vec![0.90, 0.02, 0.05, 0.475]);
        let w = compute_wv1(&scores, 0.05);
        assert_abs_diff_eq!(w.weights[0], 0.9, epsilon = 1e-12);
        assert_eq!(w.weights[1], 0.5);
        assert_eq!(w.weights[2], 0.5);
        assert_abs_diff_eq!(w.weights[3], 0.70, epsilon = 1e-12);
    }

    #[test]
    fn wv1_collapses_when_threshold_too_high() {
        let scores = MiScores::new(vec![0.1f32, 0.2, 0.3]);
        let w = compute_wv1(&scores, 0.3);
        assert!(w.weights.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn afs1_strict_inequality() {
        assert!(!afs1_bit(0.5, 0.5));
        assert!(afs1_bit(0.5, 0.4999));
        assert!(!afs1_bit(0.5f32, 0.7));
    }

    #[test]
    fn afs1_is_seeded_and_non_empty() {
        let w = WeightVector {
            weights: vec![0.5; 3],
        };
        let a = generate_afs1(&w, 200, 7).unwrap();
        assert_eq!(a.len(), 200);
        assert!(a.iter().all(|m| m.count() >= 1 && m.len() == 3));
        assert_eq!(a, generate_afs1(&w, 200, 7).unwrap());
        assert_ne!(a, generate_afs1(&w, 200, 8).unwrap());
        // prefixes agree: stream l does not depend on L
        assert_eq!(a[..50], generate_afs1(&w, 50, 7).unwrap()[..]);
    }

    #[test]
    fn afs1_marginal_frequency() {
        let w = WeightVector {
            weights: vec![0.9; 10_000],
        };
        let m = generate_afs1(&w, 1, 7).unwrap();
        let freq = m[0].count() as f64 / 10_000.0;
        assert!((freq - 0.9).abs() <= 0.02, "{freq}");
    }

    #[test]
    fn frequency_counts() {
        let evaluated = vec![
            ev(&[0, 0, 1], 0.1),
            ev(&[1, 1, 0], 0.9),
            ev(&[1, 0, 0], 0.8),
            ev(&[0, 1, 1], 0.5),
            ev(&[0, 1, 0], 0.2),
        ];
        let f = count_frequencies(&evaluated, 2, 2).unwrap();
        assert_eq!(f.top, vec![2, 1, 0]);
        assert_eq!(f.bottom, vec![0, 1, 1]);
        assert!(count_frequencies(&evaluated, 3, 3).is_err());
    }

    #[test]
    fn fitness_ties_prefer_smaller_then_earlier() {
        let evaluated = vec![ev(&[1, 1, 0], 0.5), ev(&[0, 0, 1], 0.5), ev(&[1, 0, 0], 0.5), ev(&[1, 1, 1], 0.7)];
        assert_eq!(fitness_order(&evaluated), vec![3, 1, 2, 0]);
    }

    #[test]
    fn identical_masks_scale_counts() {
        let evaluated: Vec<_> = (0..6).map(|i| ev(&[1, 0, 1, 1], i as f64)).collect();
        let f = count_frequencies(&evaluated, 4, 1).unwrap();
        assert_eq!(f.top, vec![4, 0, 4, 4]);
    }

    #[test]
    fn wv2_worked_example() {
        let w = compute_wv2::<f64>(&FrequencyVectors {
            top: vec![3, 4],
            bottom: vec![4, 3],
        });
        assert_abs_diff_eq!(w.weights[0], -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(w.weights[1], 0.2, epsilon = 1e-12);

        let same = compute_wv2::<f32>(&FrequencyVectors {
            top: vec![2, 5, 1],
            bottom: vec![2, 5, 1],
        });
        assert!(same.weights.iter().all(|&v| v == 0.0));

        let empty = compute_wv2::<f64>(&FrequencyVectors {
            top: vec![0, 0],
            bottom: vec![1, 0],
        });
        assert_eq!(empty.weights, vec![-1.0, 0.0]);
    }

    #[test]
    fn wv2_rewards_top_heavy_features() {
        let w = compute_wv2::<f64>(&FrequencyVectors {
            top: vec![10, 5, 5],
            bottom: vec![1, 5, 5],
        });
        let ranking = rank_features(&w, &MiScores::new(vec![0.0; 3]));
        assert_eq!(ranking[0], 0);
        assert!(w.weights[0] > 0.5);
    }

    #[test]
    fn afs2_nested_prefixes() {
        let w = WeightVector {
            weights: vec![0.1, 0.3, -0.2, 0.0, 0.0, 0.5, 0.2, 0.0, 0.0, 0.4],
        };
        let mi = MiScores::new(vec![0.0, 0.0, 0.0, 0.1, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let masks = generate_afs2(&w, &mi, 3).unwrap();
        assert_eq!(masks[0].selected().collect::<Vec<_>>(), vec![5]);
        assert_eq!(masks[1].selected().collect::<Vec<_>>(), vec![5, 9]);
        assert_eq!(masks[2].selected().collect::<Vec<_>>(), vec![1, 5, 9]);
        // zero-weight ties broken by MI, then index
        assert_eq!(rank_features(&w, &mi)[5..8], [4, 3, 7]);
        assert!(generate_afs2(&w, &mi, 10).is_err());
        assert!(generate_afs2(&w, &mi, 0).is_err());
    }

    #[test]
    fn config_invariants() {
        let c = NffsConfig::nsl_kdd();
        assert!(c.validate(122).is_ok());
        assert!(c.validate(70).is_err());
        assert!(NffsConfig::new(90, 45, 45, 70, 0.05).validate(122).is_err());
        let mut c = NffsConfig::new(10, 2, 2, 3, 0.0);
        c.pca_ratio = 0.0;
        assert!(c.validate(10).is_err());
        let json = r#"{"L": 60, "M": 15, "N": 15, "O": 25, "threshold": 0.01}"#;
        let c: NffsConfig = serde_json::from_str(json).unwrap();
        assert_eq!((c.afs1_size, c.top_count, c.afs2_size), (60, 15, 25));
        assert_eq!(c.pca_ratio, 0.93);
        assert_eq!(c.base_seed, 7);
        assert_eq!(c.param_groups, default_param_groups());
    }

    proptest! {
        #[test]
        fn wv1_range_and_monotone(mut v in proptest::collection::vec(0.0f64..2.0, 2..40), t in 0.0f64..1.0) {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let w = compute_wv1(&MiScores::new(v), t);
            prop_assert!(w.weights.iter().all(|&x| (0.5..=0.9).contains(&x)));
            prop_assert!(w.weights.windows(2).all(|p| p[0] <= p[1]));
        }

        #[test]
        fn wv2_bounded_and_scale_invariant(
            top in proptest::collection::vec(0u32..50, 1..30),
            c in 1u32..5,
        ) {
            let bottom: Vec<u32> = top.iter().rev().copied().collect();
            let f = FrequencyVectors { top: top.clone(), bottom: bottom.clone() };
            let w = compute_wv2::<f64>(&f);
            prop_assert!(w.weights.iter().all(|&x| (-1.0..=1.0).contains(&x)));
            let scaled = compute_wv2::<f64>(&FrequencyVectors { top: top.iter().map(|x| x * c).collect(), bottom });
            for (a, b) in w.weights.iter().zip(&scaled.weights) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn afs2_is_nested(weights in proptest::collection::vec(-1.0f64..1.0, 3..40)) {
            let d = weights.len();
            let w = WeightVector { weights };
            let masks = generate_afs2(&w, &MiScores::new(vec![0.0; d]), d - 1).unwrap();
            for (j, m) in masks.iter().enumerate() {
                prop_assert_eq!(m.count(), j + 1);
                if j + 1 < masks.len() {
                    prop_assert!(m.is_subset_of(&masks[j + 1]));
                }
            }
        }
    }
}
