use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Principal axes retained to reach a target explained-variance ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    pub means: Array1<T>,
    /// k × m, rows orthonormal, sorted by descending variance.
    pub components: Array2<T>,
    /// One ratio per input dimension (length m), descending, summing to 1.
    pub explained_variance_ratio: Array1<T>,
    pub target_ratio: T,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues and eigenvectors (as columns), unsorted.
pub(crate) fn symmetric_eigen(mut a: Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let m = a.nrows();
    let mut v = Array2::<f64>::eye(m);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[[p, q]];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..m).map(|i| a[[i, i]]).collect(), v)
}

/// Smallest k whose cumulative ratio reaches `target`; at most `ratios.len()`.
pub fn components_for_ratio<T: Scalar>(ratios: &[T], target: T) -> usize {
    let mut cum = T::zero();
    for (i, &r) in ratios.iter().enumerate() {
        cum += r;
        if cum >= target {
            return i + 1;
        }
    }
    ratios.len()
}

impl<T: Scalar> PcaModel<T> {
    pub fn fit(x: ArrayView2<'_, T>, target_ratio: T) -> Result<Self> {
        let (n, m) = x.dim();
        if m == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if n < 2 {
            return Err(Error::EmptyDataset);
        }
        if !(target_ratio > T::zero() && target_ratio <= T::one()) {
            return Err(Error::InvalidConfig(format!(
                "PCA ratio must be in (0, 1], got {target_ratio}"
            )));
        }

        let xf = x.mapv(T::as_f64);
        let means_f = xf.mean_axis(Axis(0)).ok_or(Error::EmptyDataset)?;
        let centered = &xf - &means_f;
        let cov = centered.t().dot(&centered) / (n as f64 - 1.0);
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("PCA input"));
        }

        let (values, vectors) = symmetric_eigen(cov);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
        let total: f64 = sorted.iter().sum();
        let ratios: Vec<f64> = if total > 0.0 {
            sorted.iter().map(|v| v / total).collect()
        } else {
            (0..m).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
        };
        let ratios_t: Vec<T> = ratios.iter().map(|&r| T::of(r)).collect();
        let k = components_for_ratio(&ratios_t, target_ratio).max(1);

        let mut components = Array2::<T>::zeros((k, m));
        for (row, &idx) in order.iter().take(k).enumerate() {
            let col = vectors.column(idx);
            // sign: largest-magnitude loading positive
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            for (j, &val) in col.iter().enumerate() {
                components[[row, j]] = T::of(sign * val);
            }
        }

        Ok(Self {
            means: means_f.mapv(T::of),
            components,
            explained_variance_ratio: Array1::from(ratios_t),
            target_ratio,
        })
    }

    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn input_width(&self) -> usize {
        self.components.ncols()
    }

    pub fn transform(&self, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if x.ncols() != self.input_width() {
            return Err(Error::DimensionMismatch {
                expected: self.input_width(),
                found: x.ncols(),
            });
        }
        Ok((&x - &self.means).dot(&self.components.t()))
    }

    pub fn inverse_transform(&self, scores: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if scores.ncols() != self.n_components() {
            return Err(Error::DimensionMismatch {
                expected: self.n_components(),
                found: scores.ncols(),
            });
        }
        Ok(scores.dot(&self.components) + &self.means)
    }
}
