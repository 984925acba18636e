//! Binary confusion-matrix indicators, rank-based AUC and the subset fitness function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{HyperParamGroup, TrainedPipeline};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::scalar::Scalar;

/// Positive = attack (label 1), negative = normal (label 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// A ratio that is reported as 0 with `degenerate` set when its denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric<T> {
    pub value: T,
    pub degenerate: bool,
}

impl<T: Scalar> Metric<T> {
    fn ratio(num: T, den: T) -> Self {
        if den == T::zero() {
            Self {
                value: T::zero(),
                degenerate: true,
            }
        } else {
            Self {
                value: num / den,
                degenerate: false,
            }
        }
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t != 0, p != 0) {
            (true, true) => cm.tp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    fn c<T: Scalar>(v: u64) -> T {
        T::of(v as f64)
    }

    pub fn accuracy<T: Scalar>(&self) -> Metric<T> {
        Metric::ratio(Self::c(self.tp + self.tn), Self::c(self.total()))
    }

    pub fn recall<T: Scalar>(&self) -> Metric<T> {
        Metric::ratio(Self::c(self.tp), Self::c(self.tp + self.fn_))
    }

    pub fn precision<T: Scalar>(&self) -> Metric<T> {
        Metric::ratio(Self::c(self.tp), Self::c(self.tp + self.fp))
    }

    /// Harmonic mean of precision and recall.
    pub fn f_score<T: Scalar>(&self) -> Metric<T> {
        let p = self.precision::<T>();
        let r = self.recall::<T>();
        let two = T::of(2.0);
        let m = Metric::ratio(two * p.value * r.value, p.value + r.value);
        Metric {
            value: m.value,
            degenerate: m.degenerate || p.degenerate || r.degenerate,
        }
    }
}

/// Probability that a random positive outscores a random negative, ties counted ½.
///
/// Computed exactly from tie groups in sorted order, so all-equal scores give
/// exactly 0.5.
pub fn auc<T: Scalar>(y_true: &[u8], scores: &[T]) -> Result<T> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("AUC scores"));
    }
    let n_pos = y_true.iter().filter(|&&v| v != 0).count() as u64;
    let n_neg = y_true.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::AucUndefined);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());

    // twice the Mann-Whitney U statistic, kept integral
    let mut u2: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u64, 0u64);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if y_true[order[j]] != 0 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        u2 += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        i = j;
    }
    Ok(T::of(u2 as f64) / T::of(2.0 * n_pos as f64 * n_neg as f64))
}

/// Indicators of one fitted pipeline on one test set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicators<T> {
    pub confusion: ConfusionMatrix,
    pub accuracy: Metric<T>,
    pub precision: Metric<T>,
    pub recall: Metric<T>,
    pub f_score: Metric<T>,
    /// `None` when the test labels hold a single class.
    pub auc: Option<T>,
}

impl<T: Scalar> Indicators<T> {
    pub fn compute(y_true: &[u8], y_pred: &[u8], scores: &[T]) -> Result<Self> {
        let cm = confusion(y_true, y_pred)?;
        let auc = match auc(y_true, scores) {
            Ok(a) => Some(a),
            Err(Error::AucUndefined) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            confusion: cm,
            accuracy: cm.accuracy(),
            precision: cm.precision(),
            recall: cm.recall(),
            f_score: cm.f_score(),
            auc,
        })
    }
}

/// Fits one pipeline and scores it on `test`.
pub fn evaluate_pipeline<T: Scalar>(
    mask: &FeatureMask,
    train: &EncodedDataset<T>,
    test: &EncodedDataset<T>,
    params: &HyperParamGroup,
    pca_ratio: T,
    seed: u64,
) -> Result<Indicators<T>> {
    let pipeline = TrainedPipeline::fit(train, mask, params, pca_ratio, seed)?;
    let pred = pipeline.predict(test)?;
    Indicators::compute(&test.y, &pred.labels, &pred.scores)
}

/// Mean test F-score over the parameter groups; group `g` uses seed
/// `base_seed + g.seed_offset`. Degenerate F-scores count as 0.
pub fn fitness<T: Scalar>(
    mask: &FeatureMask,
    train: &EncodedDataset<T>,
    test: &EncodedDataset<T>,
    groups: &[HyperParamGroup],
    pca_ratio: T,
    base_seed: u64,
) -> Result<T> {
    if groups.is_empty() {
        return Err(Error::InvalidConfig("at least one parameter group is required".into()));
    }
    if mask.count() == 0 {
        return Err(Error::EmptySubset);
    }
    let scores = groups
        .par_iter()
        .map(|g| {
            let seed = base_seed.wrapping_add(g.seed_offset);
            evaluate_pipeline(mask, train, test, g, pca_ratio, seed).map(|ind| ind.f_score.value)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(scores.iter().copied().sum::<T>() / T::of_usize(scores.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd<T> {
    pub mean: T,
    /// Sample standard deviation; 0 for a single run.
    pub std: T,
}

impl<T: Scalar> MeanStd<T> {
    pub fn of(values: &[T]) -> Self {
        if values.is_empty() {
            return Self {
                mean: T::zero(),
                std: T::zero(),
            };
        }
        let n = T::of_usize(values.len());
        let mean = values.iter().copied().sum::<T>() / n;
        let std = if values.len() > 1 {
            let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
            (ss / (n - T::one())).sqrt()
        } else {
            T::zero()
        };
        Self { mean, std }
    }
}

/// Indicators aggregated over repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport<T> {
    pub runs: usize,
    pub accuracy: MeanStd<T>,
    pub precision: MeanStd<T>,
    pub recall: MeanStd<T>,
    pub f_score: MeanStd<T>,
    /// Over runs where AUC was defined.
    pub auc: Option<MeanStd<T>>,
    /// Runs in which any indicator hit a zero denominator.
    pub degenerate_runs: usize,
}

impl<T: Scalar> IndicatorReport<T> {
    pub fn aggregate(runs: &[Indicators<T>]) -> Self {
        let pick = |f: fn(&Indicators<T>) -> T| -> MeanStd<T> {
            MeanStd::of(&runs.iter().map(f).collect::<Vec<_>>())
        };
        let aucs: Vec<T> = runs.iter().filter_map(|r| r.auc).collect();
        Self {
            runs: runs.len(),
            accuracy: pick(|r| r.accuracy.value),
            precision: pick(|r| r.precision.value),
            recall: pick(|r| r.recall.value),
            f_score: pick(|r| r.f_score.value),
            auc: (!aucs.is_empty()).then(|| MeanStd::of(&aucs)),
            degenerate_runs: runs
                .iter()
                .filter(|r| {
                    r.accuracy.degenerate || r.precision.degenerate || r.recall.degenerate || r.f_score.degenerate
                })
                .count(),
        }
    }
}
