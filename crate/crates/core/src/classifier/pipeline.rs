use crate::classifier::forest::{HyperParamGroup, RandomForest};
use crate::classifier::pca::PcaModel;
use crate::classifier::standardize::Standardizer;
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::scalar::Scalar;

/// mask → standardize → PCA → random forest, fit on one feature subset.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline<T> {
    pub mask: FeatureMask,
    pub standardizer: Standardizer<T>,
    pub pca: PcaModel<T>,
    pub forest: RandomForest<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub labels: Vec<u8>,
    pub scores: Vec<T>,
}

impl<T: Scalar> TrainedPipeline<T> {
    pub fn fit(
        train: &EncodedDataset<T>,
        mask: &FeatureMask,
        params: &HyperParamGroup,
        pca_ratio: T,
        seed: u64,
    ) -> Result<Self> {
        let view = train.apply_mask(mask)?;
        let standardizer = Standardizer::fit(view.x.view())?;
        let z = standardizer.transform(view.x.view())?;
        let pca = PcaModel::fit(z.view(), pca_ratio)?;
        let scores = pca.transform(z.view())?;
        let forest = RandomForest::fit(scores.view(), &view.y, params, seed)?;
        Ok(Self {
            mask: mask.clone(),
            standardizer,
            pca,
            forest,
        })
    }

    /// Forest input width after PCA.
    pub fn n_components(&self) -> usize {
        self.pca.n_components()
    }

    /// `test` must have the full encoded width; the mask is applied here.
    pub fn predict(&self, test: &EncodedDataset<T>) -> Result<Prediction<T>> {
        if test.width() != self.mask.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mask.len(),
                found: test.width(),
            });
        }
        let view = test.apply_mask(&self.mask)?;
        let z = self.standardizer.transform(view.x.view())?;
        let scores = self.forest.predict_proba(self.pca.transform(z.view())?.view())?;
        let half = T::of(0.5);
        let labels = scores.iter().map(|&p| u8::from(p >= half)).collect();
        Ok(Prediction { labels, scores })
    }
}
