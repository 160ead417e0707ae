//! Exact rationals with unbounded numerator and denominator.
//!
//! `Rational` is a thin newtype over `num_rational::BigRational`, which keeps
//! every value in lowest terms with a positive denominator after each
//! operation.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumericsError;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    /// Nearest `f64` (correctly rounded by `num-rational`).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Out of range of f64: saturate with the proper sign.
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    /// Exact square root when both numerator and denominator are perfect
    /// squares, `None` otherwise.
    pub fn sqrt(&self) -> Result<Option<Rational>, NumericsError> {
        if self.is_negative() {
            return Err(NumericsError::Domain(format!(
                "square root of negative rational {self}"
            )));
        }
        let n = exact_isqrt(self.numer());
        let d = exact_isqrt(self.denom());
        Ok(match (n, d) {
            (Some(n), Some(d)) => Some(Rational::new(n, d)),
            _ => None,
        })
    }
}

fn exact_isqrt(x: &BigInt) -> Option<BigInt> {
    let r = x.sqrt();
    if &(&r * &r) == x {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a non-negative rational.
pub fn rational_sqrt(x: &Rational) -> Result<Option<Rational>, NumericsError> {
    x.sqrt()
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_integer(v)
    }
}

impl From<(i64, i64)> for Rational {
    fn from((n, d): (i64, i64)) -> Self {
        Rational::new(n, d)
    }
}

/// Shorthand for small literals in code and tests.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumericsError;

    /// Accepts `p/q` or `p` with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || NumericsError::Parse(format!("invalid rational `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let parse_int = |t: &str| -> Result<BigInt, NumericsError> {
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            BigInt::from_str(t.strip_prefix('+').unwrap_or(t)).map_err(|_| bad())
        };
        let n = parse_int(num)?;
        let d = match den {
            Some(d) => {
                if d.starts_with(['-', '+']) {
                    return Err(bad());
                }
                parse_int(d)?
            }
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(NumericsError::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(Rational::new(n, d))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational((&self.0).$m(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Sign of a rational as an `Ordering` against zero.
pub fn signum(x: &Rational) -> Ordering {
    match x.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_prints_text_form() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("-846/625".parse::<Rational>().unwrap(), q(-846, 625));
        assert_eq!("7".parse::<Rational>().unwrap(), q(7, 1));
        assert_eq!(q(-4, 6).to_string(), "-2/3");
        assert_eq!(q(8, 4).to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("0.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn canonical_after_arithmetic() {
        let x = q(1, 6) + q(1, 3);
        assert_eq!(x.numer(), &BigInt::from(1));
        assert_eq!(x.denom(), &BigInt::from(2));
        let y = q(3, 4) / q(-3, 8);
        assert_eq!(y, q(-2, 1));
        assert!(y.denom() > &BigInt::zero());
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(rational_sqrt(&q(9, 4)).unwrap(), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&q(2, 1)).unwrap(), None);
        // 13/60 squared is 169/3600.
        assert_eq!(q(13, 60) * q(13, 60), q(169, 3600));
        assert_eq!(rational_sqrt(&q(169, 3600)).unwrap(), Some(q(13, 60)));
        assert_eq!(rational_sqrt(&Rational::zero()).unwrap(), Some(Rational::zero()));
        assert!(matches!(
            rational_sqrt(&q(-1, 4)),
            Err(NumericsError::Domain(_))
        ));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-500i64..500, 1i64..200).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_stays_canonical(x in small_rational(), y in small_rational()) {
            for r in [&x + &y, &x - &y, &x * &y] {
                prop_assert!(r.denom() > &BigInt::zero());
                prop_assert!(num_integer::Integer::gcd(r.numer(), r.denom()).is_one());
            }
        }

        #[test]
        fn sqrt_of_square_product(a in 0i64..300, b in 1i64..300, c in 0i64..300, d in 1i64..300) {
            let qv = q(a, b);
            let sv = q(c, d);
            let x = &qv * &qv * &sv * &sv;
            prop_assert_eq!(rational_sqrt(&x).unwrap(), Some(&qv * &sv));
        }
    }
}
