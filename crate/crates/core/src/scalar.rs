use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point element type of every numeric matrix in the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + ScalarOperand
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from `f64`; panics only for types that cannot hold a float.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("scalar from f64")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("scalar from usize")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
