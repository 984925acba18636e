//! The fitness classifier: standardization, PCA and a CART random forest,
//! treated as one pipeline.

pub mod forest;
pub mod pca;
pub mod pipeline;
pub mod standardize;

pub use forest::{default_param_groups, DecisionTree, HyperParamGroup, MaxFeatures, Node, RandomForest};
pub use pca::{components_for_ratio, PcaModel};
pub use pipeline::{Prediction, TrainedPipeline};
pub use standardize::Standardizer;
