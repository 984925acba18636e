//! Feature selection via normalized selection frequencies.
//!
//! The crate covers the full path from raw CSV to a selected feature subset:
//!
//! - [`data`]: CSV loading, feature-kind schema, one-hot encoding.
//! - [`mi`]: plug-in mutual information of each encoded feature with the label.
//! - [`classifier`]: standardize → PCA → CART random forest pipeline.
//! - [`metrics`]: confusion-matrix indicators, AUC and subset fitness.
//! - [`nffs`]: the two-phase subset search.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the element type for the common cases.

pub mod classifier;
pub mod data;
pub mod error;
pub mod mask;
pub mod metrics;
pub mod mi;
pub mod nffs;
pub mod scalar;
pub mod seed;
pub mod synthetic;

pub use classifier::{default_param_groups, HyperParamGroup, MaxFeatures, PcaModel, RandomForest, Standardizer, TrainedPipeline};
pub use data::{encode, fit_schema, load_csv, EncodedDataset, FeatureKind, FeatureSchema, LabelRule, LoadOptions, RawDataset};
pub use error::{Error, Result};
pub use mask::FeatureMask;
pub use metrics::{auc, confusion, fitness, ConfusionMatrix, IndicatorReport, Indicators, MeanStd};
pub use mi::{discretize, mi_histogram, mutual_information, score_all, MiHistogram, MiScores};
pub use nffs::{
    compute_wv1, compute_wv2, count_frequencies, evaluate_subsets, generate_afs1, generate_afs2, run_nffs, EvaluatedSubset,
    FrequencyVectors, NffsConfig, NffsReport, NffsRun, WeightVector,
};
pub use scalar::Scalar;

pub type EncodedDatasetF64 = EncodedDataset<f64>;
pub type EncodedDatasetF32 = EncodedDataset<f32>;
pub type TrainedPipelineF64 = TrainedPipeline<f64>;
pub type TrainedPipelineF32 = TrainedPipeline<f32>;
pub type RandomForestF64 = RandomForest<f64>;
pub type PcaModelF64 = PcaModel<f64>;
pub type MiScoresF64 = MiScores<f64>;
pub type WeightVectorF64 = WeightVector<f64>;
pub type EvaluatedSubsetF64 = EvaluatedSubset<f64>;
pub type NffsRunF64 = NffsRun<f64>;
pub type NffsRunF32 = NffsRun<f32>;
pub type NffsReportF64 = NffsReport<f64>;
pub type IndicatorReportF64 = IndicatorReport<f64>;
