//! Plug-in mutual information between encoded features and the binary label.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_MI_BINS: usize = 10;

/// One MI score per encoded feature, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MiScores<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> MiScores<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }
}

/// Maps a real column to dense integer codes.
///
/// Columns with at most `n_bins` distinct values get one code per value (in
/// value order); otherwise values are cut into equal-frequency bins.
pub fn discretize<T: Scalar>(column: &[T], n_bins: usize) -> Vec<usize> {
    let n_bins = n_bins.max(2);
    let mut sorted: Vec<T> = column.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut distinct = sorted.clone();
    distinct.dedup();

    let cuts: Vec<T> = if distinct.len() <= n_bins {
        distinct.into_iter().skip(1).collect()
    } else {
        let n = sorted.len();
        let mut cuts: Vec<T> = (1..n_bins).map(|j| sorted[j * n / n_bins]).collect();
        cuts.dedup();
        cuts
    };

    // code = number of cut points <= value; then compact to drop empty bins
    let raw: Vec<usize> = column
        .iter()
        .map(|v| cuts.partition_point(|c| c <= v))
        .collect();
    let mut used = vec![false; cuts.len() + 1];
    for &c in &raw {
        used[c] = true;
    }
    let mut remap = vec![0; used.len()];
    let mut next = 0;
    for (slot, &u) in remap.iter_mut().zip(&used) {
        *slot = next;
        if u {
            next += 1;
        }
    }
    raw.into_iter().map(|c| remap[c]).collect()
}

/// I(X;Y) = Σ p(x,y) ln(p(x,y) / (p(x) p(y))) over empirical frequencies, clamped at 0.
pub fn mutual_information<T: Scalar>(x: &[usize], y: &[usize]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = x.len();
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut px: HashMap<usize, usize> = HashMap::new();
    let mut py: HashMap<usize, usize> = HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_default() += 1;
        *px.entry(a).or_default() += 1;
        *py.entry(b).or_default() += 1;
    }

    let nf = T::of_usize(n);
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    let mi = cells
        .into_iter()
        .map(|((a, b), c)| {
            let c = T::of_usize(c);
            let p_xy = c / nf;
            // p(x,y) / (p(x) p(y)) = c n / (c_x c_y)
            let ratio = c * nf / (T::of_usize(px[&a]) * T::of_usize(py[&b]));
            p_xy * ratio.ln()
        })
        .fold(T::zero(), |acc, t| acc + t);
    Ok(mi.max(T::zero()))
}

/// Scores every encoded column against the label.
pub fn score_all<T: Scalar>(data: &EncodedDataset<T>, n_bins: usize) -> Result<MiScores<T>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let y: Vec<usize> = data.y.iter().map(|&v| usize::from(v)).collect();
    let values = (0..data.width())
        .into_par_iter()
        .map(|j| {
            let column = data.x.column(j).to_vec();
            mutual_information(&discretize(&column, n_bins), &y)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(MiScores::new(values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiHistogram<T> {
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
    pub threshold: Option<T>,
}

/// Equal-width histogram of scores over `[0, max]`.
pub fn mi_histogram<T: Scalar>(scores: &MiScores<T>, n_bins: usize, threshold: Option<T>) -> MiHistogram<T> {
    let n_bins = n_bins.max(1);
    let max = scores.max();
    let span = if max > T::zero() { max } else { T::one() };
    let nb = T::of_usize(n_bins);
    let edges: Vec<T> = (0..=n_bins).map(|i| span * T::of_usize(i) / nb).collect();
    let mut counts = vec![0; n_bins];
    for &v in &scores.values {
        let b = (v / span * nb).floor().to_usize().unwrap_or(0).min(n_bins - 1);
        counts[b] += 1;
    }
    MiHistogram {
        edges,
        counts,
        threshold,
    }
}

impl<T: Scalar> MiHistogram<T> {
    /// Two columns: bin lower edge, count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        out
    }
}
