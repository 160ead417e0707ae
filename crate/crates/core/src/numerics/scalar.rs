use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{ExtFloat, Rational};

/// Field element used for Runge-Kutta coefficients.
///
/// Exact types (`Rational`) compare exactly. Inexact types compare within a
/// working tolerance tied to their precision: `2^(-3p/4)` relative to
/// `max(1, |a|, |b|)` for a `p`-bit significand.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// The constant `q` in the same representation (and precision) as `self`.
    fn lift(&self, q: &Rational) -> Self;

    fn abs(&self) -> Self;

    /// Approximation to `f64`.
    fn to_f64(&self) -> f64;

    /// Whether values of this type are exact.
    fn is_exact(&self) -> bool;

    /// Relative tolerance used by [`Scalar::near`]; zero for exact types.
    fn tolerance(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(&Rational::zero())
    }

    fn one_like(&self) -> Self {
        self.lift(&Rational::one())
    }

    fn is_negligible(&self) -> bool {
        self.near(&self.zero_like())
    }

    fn near(&self, other: &Self) -> bool;
}

impl Scalar for Rational {
    fn lift(&self, q: &Rational) -> Self {
        q.clone()
    }

    fn abs(&self) -> Self {
        Rational::abs(self)
    }

    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for ExtFloat {
    fn lift(&self, q: &Rational) -> Self {
        ExtFloat::from_rational(q, self.precision())
    }

    fn abs(&self) -> Self {
        ExtFloat::abs(self)
    }

    fn to_f64(&self) -> f64 {
        ExtFloat::to_f64(self)
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn tolerance(&self) -> f64 {
        2f64.powi(-(3 * self.precision() as i32 / 4))
    }

    fn near(&self, other: &Self) -> bool {
        let p = self.precision().max(other.precision());
        let diff = (self - other).abs();
        if diff.is_zero() {
            return true;
        }
        let scale = [self.abs(), other.abs(), self.one_like()]
            .into_iter()
            .fold(None::<ExtFloat>, |m, x| match m {
                Some(m) if m >= x => Some(m),
                _ => Some(x),
            })
            .expect("non-empty");
        // |diff| <= 2^(-3p/4) * scale, compared on binary exponents.
        let bound = scale.log2_floor().unwrap_or(0) - (3 * p as i64 / 4);
        diff.log2_floor().expect("nonzero") < bound
    }
}

impl Scalar for f64 {
    fn lift(&self, q: &Rational) -> Self {
        q.to_f64()
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn tolerance(&self) -> f64 {
        2f64.powi(-40)
    }

    fn near(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= self.tolerance() * scale
    }
}

/// Sum of a sequence, seeded with the zero of `like`.
pub fn sum_like<T: Scalar>(like: &T, items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(like.zero_like(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn extfloat_near_uses_precision() {
        let a = ExtFloat::from_rational(&q(1, 3), 128);
        let b = a.clone() + ExtFloat::from_rational(&q(1, 1), 128) * ExtFloat::parse("1e-27", 128).unwrap();
        assert!(!a.near(&b));
        let c = a.clone() + ExtFloat::parse("1e-35", 128).unwrap();
        assert!(a.near(&c));
        assert!(ExtFloat::zero(128).is_negligible());
    }

    #[test]
    fn rational_near_is_exact() {
        assert!(q(1, 3).near(&q(2, 6)));
        assert!(!q(1, 3).near(&(q(1, 3) + Rational::new(1, 10i64.pow(18)))));
    }
}
