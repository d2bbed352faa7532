use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::num::ParseFloatError;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the numerical kernels are generic over.
///
/// Implemented for `f32` and `f64`. The bounds cover arithmetic, casts for
/// literal constants and filter tables, text round trips for CSV files, and
/// `Send + Sync` so swarm evaluations can fan out across threads.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + for<'a> Sum<&'a Self>
    + FromStr<Err = ParseFloatError>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Casts a finite `f64` constant into `T`.
pub fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant converts to scalar")
}
