use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Number type the bound formulas are evaluated in.
///
/// Implemented for `f32`, `f64` and the exact rationals of `num-rational`.
/// Only field operations and ordering are needed; every ceiling or floor in
/// the formulas is taken over plain integers before conversion.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync
{
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar")
    }

    fn of_i64(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::of_i64(num) / Self::of_i64(den)
    }

    /// `max(self, 0)`.
    fn positive_part(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else {
            self
        }
    }

    fn max_with(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_with(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + Clone
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
{
}
