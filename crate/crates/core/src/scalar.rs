//! Coefficient scalars for the exact kernel.
//!
//! The algebra code is generic over the coefficient field. The canonical
//! instantiation is [`Rat`] (arbitrary-precision rationals); every identity
//! in this crate is checked with exact equality, so the shipped tools only
//! ever use `Rat`. Floating-point scalars satisfy [`Scalar`] and can be used
//! for quick experiments, but they do not satisfy [`ExactScalar`] and are
//! rejected by the equality-sensitive layers.

use num_traits::{FromPrimitive, One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational, the canonical coefficient type.
pub type Rat = num_rational::BigRational;

/// Minimal field interface needed by the kernel.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer out of range for scalar type")
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_int(p) / Self::from_int(q)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Zero
        + One
        + FromPrimitive
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// Scalars with decidable equality and a total order, required wherever the
/// engine decides identities exactly (operator equality, canonical text).
pub trait ExactScalar: Scalar + Eq + Ord {}

impl<T> ExactScalar for T where T: Scalar + Eq + Ord {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_construction() {
        let h: Rat = Scalar::half();
        assert_eq!(h + Rat::from_ratio(1, 2), Rat::one());
        assert_eq!(Rat::from_ratio(-4, 2), Rat::from_int(-2));
    }

    #[test]
    fn float_instantiation_compiles() {
        let x: f64 = Scalar::from_ratio(3, 4);
        assert_eq!(x, 0.75);
    }
}
