use serde::{Deserialize, Serialize};

/// Binary inclusion vector over the encoded feature space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn ones(width: usize) -> Self {
        Self::new(vec![true; width])
    }

    pub fn zeros(width: usize) -> Self {
        Self::new(vec![false; width])
    }

    /// Mask of `width` bits with exactly the listed indices set.
    ///
    /// Panics if an index is out of range.
    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![false; width];
        for i in indices {
            bits[i] = true;
        }
        Self::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_subset_of(&self, other: &FeatureMask) -> bool {
        self.len() == other.len() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Bits as 0/1 integers, the form used in run reports.
    pub fn to_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| u8::from(b)).collect()
    }
}
