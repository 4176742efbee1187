//! Scalar bound shared by every cost-carrying structure.
//!
//! Star counts are plain `u64`. Generalization-hierarchy costs, hypergraph
//! edge weights and L-reduction scores may be any type satisfying [`Scalar`]:
//! unsigned integers, floats, or exact rationals such as [`Rational`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};

/// Number-like value that can be added, compared and built from a count.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Display + Sum + FromPrimitive + Send + Sync + 'static {
    /// `count × self`, used for "every member of the group pays this cost".
    fn times(self, count: usize) -> Self {
        Self::from_usize(count).expect("group size representable in scalar") * self
    }

    /// `true` when the value is strictly below zero.
    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + Debug + Display + Sum + FromPrimitive + Send + Sync + 'static {}

/// Exact rational used for ratio-valued scores.
pub type Rational = Ratio<i64>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_scales_by_count() {
        assert_eq!(7u64.times(3), 21);
        assert_eq!(0.5f64.times(4), 2.0);
        assert_eq!(Rational::new(1, 3).times(6), Rational::from_integer(2));
    }

    #[test]
    fn negativity() {
        assert!((-1.0f64).is_negative_value());
        assert!(!0u64.is_negative_value());
        assert!(Rational::new(-1, 2).is_negative_value());
    }
}
