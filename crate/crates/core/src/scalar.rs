//! Scalar abstraction for all exact computations.
//!
//! Every quantity the toolkit manipulates lives in an ordered field with
//! exact arithmetic: comparisons decide semistability, so there is no room
//! for rounding. The [`Scalar`] trait collects the `num-traits` bounds that
//! the calculus needs; any rational type (`Ratio<BigInt>`, `Ratio<i64>`,
//! ...) satisfies them via the blanket impl. Floating point types do not
//! implement `Ord` and are excluded by construction.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed};
use std::fmt::{Debug, Display};

/// An exactly ordered field scalar. Division must be exact (field semantics).
pub trait Scalar: Num + Signed + Ord + Clone + FromPrimitive + Debug + Display {
    /// Embeds a machine integer.
    fn from_int(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("i64 embeds into the scalar type")
    }

    /// The exact quotient `p/q`.
    fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_int(p) / Self::from_int(q)
    }
}

impl<T> Scalar for T where T: Num + Signed + Ord + Clone + FromPrimitive + Debug + Display {}

/// Scalars with an explicit numerator/denominator representation.
///
/// Needed only where the calculus leaves pure field arithmetic, namely for
/// rational upper bounds of square roots in the constants pipeline.
pub trait Rational: Scalar {
    fn to_big(&self) -> BigRational;
    fn from_big(value: &BigRational) -> Self;
}

impl Rational for BigRational {
    fn to_big(&self) -> BigRational {
        self.clone()
    }

    fn from_big(value: &BigRational) -> Self {
        value.clone()
    }
}

macro_rules! impl_rational_for_machine {
    ($t:ty) => {
        impl Rational for Ratio<$t> {
            fn to_big(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big(value: &BigRational) -> Self {
                let numer: $t = value
                    .numer()
                    .try_into()
                    .expect("numerator exceeds the machine rational range");
                let denom: $t = value
                    .denom()
                    .try_into()
                    .expect("denominator exceeds the machine rational range");
                Ratio::new(numer, denom)
            }
        }
    };
}

impl_rational_for_machine!(i64);
impl_rational_for_machine!(i128);

/// Granularity of [`sqrt_upper`]: results are multiples of `1/(denom * 2^32)`.
const SQRT_SCALE_BITS: usize = 32;

/// A rational upper bound for `sqrt(x)`, exact to within `2^-32/denom(x)`.
///
/// Panics on negative input; the constants pipeline only takes square roots
/// of norms.
pub fn sqrt_upper<S: Rational>(x: &S) -> S {
    assert!(!x.is_negative(), "sqrt of a negative scalar");
    if x.is_zero() {
        return S::zero();
    }
    let big = x.to_big();
    let p = big.numer().clone();
    let q = big.denom().clone();
    let scale = BigInt::one() << SQRT_SCALE_BITS;
    // sqrt(p/q) = sqrt(p*q*scale^2) / (q*scale); round the integer root up.
    let radicand = &p * &q * (&scale * &scale);
    let mut root = radicand.sqrt();
    if &root * &root < radicand {
        root += 1;
    }
    S::from_big(&BigRational::new(root, q * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn embeds_integers_and_ratios() {
        assert_eq!(Q::from_int(-3), -Q::from_int(3));
        assert_eq!(Q::ratio(1, 2) + Q::ratio(1, 2), Q::one());
        let half: Ratio<i64> = Scalar::ratio(1, 2);
        assert_eq!(half * Ratio::from_integer(2), Ratio::one());
    }

    #[test]
    fn sqrt_upper_bounds_from_above() {
        for (p, q) in [(2, 1), (1, 2), (9, 4), (121, 1), (7, 3), (0, 1)] {
            let x = Q::ratio(p, q);
            let s = sqrt_upper(&x);
            assert!(&s * &s >= x, "not an upper bound for {p}/{q}");
            // Tight within the documented granularity.
            if p > 0 {
                let slack = Q::ratio(1, q) / Q::from_int(1i64 << 32);
                let lower = &s - &slack;
                assert!(&lower * &lower < Q::ratio(p, q));
            }
        }
    }

    #[test]
    fn sqrt_upper_exact_on_squares() {
        assert_eq!(sqrt_upper(&Q::from_int(49)), Q::from_int(7));
        assert_eq!(sqrt_upper(&Q::ratio(9, 16)), Q::ratio(3, 4));
    }

    #[test]
    fn sqrt_upper_over_machine_rationals() {
        let two: Ratio<i64> = Scalar::from_int(2);
        let s = sqrt_upper(&two);
        assert!(s.clone() * s >= two);
        let quarter: Ratio<i64> = Scalar::ratio(1, 4);
        assert_eq!(sqrt_upper(&quarter), Scalar::ratio(1, 2));
    }
}
