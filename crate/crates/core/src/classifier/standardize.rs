use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column-wise z-score transform with population statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub means: Array1<T>,
    /// Constant columns carry std 1 so they map to zero.
    pub stds: Array1<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(x: ArrayView2<'_, T>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::EmptyDataset);
        }
        let means = x.mean_axis(Axis(0)).ok_or(Error::EmptyDataset)?;
        let stds = x.std_axis(Axis(0), T::zero()).mapv(|s| {
            if s > T::epsilon() * T::of(16.0) {
                s
            } else {
                T::one()
            }
        });
        Ok(Self { means, stds })
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if x.ncols() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                found: x.ncols(),
            });
        }
        Ok((&x - &self.means) / &self.stds)
    }

    pub fn inverse_transform(&self, z: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if z.ncols() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                found: z.ncols(),
            });
        }
        Ok(&z * &self.stds + &self.means)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    use super::*;

    #[test]
    fn population_zscore() {
        let x = array![[2.0], [4.0], [6.0]];
        let s = Standardizer::fit(x.view()).unwrap();
        assert_abs_diff_eq!(s.means[0], 4.0);
        // sqrt(8/3)
        assert_abs_diff_eq!(s.stds[0], 1.632_993_161_855_452, epsilon = 1e-12);
        let z = s.transform(x.view()).unwrap();
        let expected = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        for (a, b) in z.column(0).iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn idempotent_on_standardized_data() {
        let x = array![[-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [1.0, 1.0]];
        let s = Standardizer::fit(x.view()).unwrap();
        let z = s.transform(x.view()).unwrap();
        for (a, b) in z.iter().zip(x.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let x = array![[5.0f32, 1.0], [5.0, 2.0], [5.0, 3.0]];
        let s = Standardizer::fit(x.view()).unwrap();
        assert_eq!(s.stds[0], 1.0);
        let z = s.transform(x.view()).unwrap();
        assert!(z.column(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_and_mismatch() {
        let empty = Array2::<f64>::zeros((0, 3));
        assert!(Standardizer::fit(empty.view()).is_err());
        let s = Standardizer::fit(array![[1.0, 2.0], [3.0, 5.0]].view()).unwrap();
        assert!(matches!(
            s.transform(array![[1.0]].view()),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }
}
