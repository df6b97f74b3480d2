//! Scalar abstraction and the extended reals used for distances.

use std::cmp::Ordering;
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Add;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the whole crate is generic over (`f32` or `f64`).
///
/// The tolerances used throughout are tuned for `f64`; `f32` works for
/// exploratory use but will not meet the `1e-12` style checks.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// A nonnegative extended real: either a finite value or `+∞`.
///
/// Addition saturates at `Infinite`; every finite value compares below
/// `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> ExtReal<T> {
    /// Wraps `x`, mapping `+∞` to [`ExtReal::Infinite`].
    pub fn new(x: T) -> Self {
        if x.is_infinite() && x > T::zero() {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinite => None,
        }
    }

    /// Value as a float, `+∞` for [`ExtReal::Infinite`].
    pub fn to_float(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl<T: Scalar> Add for ExtReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(x: T) -> Self {
        ExtReal::new(x)
    }
}

impl<T: Scalar> Display for ExtReal<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(x) => Display::fmt(x, f),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_addition() {
        let a = ExtReal::Finite(1.0_f64);
        assert_eq!(a + ExtReal::Finite(2.0), ExtReal::Finite(3.0));
        assert_eq!(a + ExtReal::Infinite, ExtReal::Infinite);
        assert_eq!(ExtReal::<f64>::Infinite + ExtReal::Infinite, ExtReal::Infinite);
    }

    #[test]
    fn infinity_dominates() {
        assert!(ExtReal::Finite(1e300_f64) < ExtReal::Infinite);
        assert_eq!(ExtReal::new(f64::INFINITY), ExtReal::Infinite);
        assert_eq!(ExtReal::Finite(2.0_f64).max(ExtReal::Infinite), ExtReal::Infinite);
        assert_eq!(ExtReal::<f32>::Infinite.to_float(), f32::INFINITY);
    }
}
