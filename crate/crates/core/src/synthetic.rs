//! Planted-signal datasets for demos and end-to-end checks.
//!
//! Informative numeric columns are independent standard normals and the
//! informative categorical column is uniform over its categories. The label is
//! the sign of a noisy weighted sum of the numeric columns plus a per-category
//! effect, so every informative column carries its own share of the label and
//! none is redundant given the others. Noise columns (Gaussian, every fourth an
//! integer in 0..5) are independent of everything. Column order is shuffled so
//! position carries no hint.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::RawDataset;
use crate::error::Result;
use crate::seed;

pub const POSITIVE_LABEL: &str = "attack";
pub const NEGATIVE_LABEL: &str = "normal";

#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub n_train: usize,
    pub n_test: usize,
    /// Score weight of each informative numeric column.
    pub signal_weights: Vec<f64>,
    /// Categories of the informative categorical column.
    pub n_categories: usize,
    pub n_noise: usize,
    /// Largest per-category score effect; effects are evenly spaced in `[-s, s]`.
    pub category_effect: f64,
    /// Standard deviation of the score noise added before thresholding.
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            n_train: 5000,
            n_test: 2000,
            signal_weights: vec![2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            n_categories: 6,
            n_noise: 40,
            category_effect: 1.0,
            label_noise: 0.3,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedData {
    pub train: RawDataset,
    pub test: RawDataset,
    /// Raw names of the informative columns (the categorical one included).
    pub informative: Vec<String>,
    pub categorical: String,
}

#[derive(Clone, Copy)]
enum Column {
    Signal(f64),
    Categorical,
    Noise(usize),
}

fn category_effects(n: usize, strength: f64) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let mid = (n - 1) as f64 / 2.0;
    (0..n).map(|c| strength * (c as f64 - mid) / mid).collect()
}

pub fn planted(spec: &PlantedSpec) -> Result<PlantedData> {
    let mut rng = seed::stream(spec.seed, &[0]);
    let mut columns: Vec<Column> = Vec::new();
    columns.extend(spec.signal_weights.iter().map(|&w| Column::Signal(w)));
    columns.push(Column::Categorical);
    columns.extend((0..spec.n_noise).map(Column::Noise));
    columns.shuffle(&mut rng);

    let names: Vec<String> = (0..columns.len()).map(|i| format!("x{i:02}")).collect();
    let informative = columns
        .iter()
        .zip(&names)
        .filter(|(c, _)| !matches!(c, Column::Noise(_)))
        .map(|(_, n)| n.clone())
        .collect();
    let categorical = columns
        .iter()
        .zip(&names)
        .find(|(c, _)| matches!(c, Column::Categorical))
        .map(|(_, n)| n.clone())
        .unwrap_or_default();
    let effects = category_effects(spec.n_categories, spec.category_effect);

    let split = |n: usize, tag: u64| -> Result<RawDataset> {
        let mut rng = seed::stream(spec.seed, &[1, tag]);
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut score = 0.0;
            let row = columns
                .iter()
                .map(|c| match *c {
                    Column::Signal(w) => {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        score += w * z;
                        format!("{z:.6}")
                    }
                    Column::Categorical => {
                        let cat = rng.random_range(0..spec.n_categories.max(1));
                        score += effects.get(cat).copied().unwrap_or(0.0);
                        format!("c{cat}")
                    }
                    Column::Noise(j) if j % 4 == 3 => format!("{}", rng.random_range(0..5)),
                    Column::Noise(_) => {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        format!("{z:.6}")
                    }
                })
                .collect();
            let eps: f64 = StandardNormal.sample(&mut rng);
            let positive = score + spec.label_noise * eps > 0.0;
            rows.push(row);
            labels.push(if positive { POSITIVE_LABEL } else { NEGATIVE_LABEL }.to_owned());
        }
        RawDataset::new(names.clone(), rows, labels)
    };

    Ok(PlantedData {
        train: split(spec.n_train, 0)?,
        test: split(spec.n_test, 1)?,
        informative,
        categorical,
    })
}
