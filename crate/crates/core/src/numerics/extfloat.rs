//! Binary floating point with a configurable significand width.
//!
//! A value is `mant * 2^exp` where `mant` carries exactly `prec` significant
//! bits (or is zero). Every operation is correctly rounded (round half to
//! even) at the larger precision of its operands. Conversions to and from
//! [`Rational`] are exact in the rational direction, so decimal text can be
//! parsed without double rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use super::{NumericsError, Rational};

/// Smallest supported significand width.
pub const MIN_PRECISION: u32 = 64;
/// Working precision used when nothing else is specified.
pub const DEFAULT_PRECISION: u32 = 256;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

#[derive(Clone)]
pub struct ExtFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl ExtFloat {
    pub fn zero(prec: u32) -> Self {
        ExtFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec: checked_prec(prec),
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let prec = checked_prec(prec);
        if q.is_zero() {
            return ExtFloat::zero(prec);
        }
        divide_ints(q.numer(), 0, q.denom(), 0, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from_integer(v), prec)
    }

    /// Exact conversion of a finite `f64`, then rounding to `prec` bits.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64 has no ExtFloat value");
        let big = num_rational::BigRational::from_float(v).expect("finite");
        Self::from_rational(&Rational::from(big), prec)
    }

    /// Parse decimal scientific notation (`-1.25e-3`, `0.27`, `42`) or the
    /// rational text form `p/q`, rounding once to `prec` bits.
    pub fn parse(s: &str, prec: u32) -> Result<Self, NumericsError> {
        let q = parse_decimal_exact(s)?;
        Ok(Self::from_rational(&q, prec))
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Round to a different precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        round(self.mant.clone(), self.exp, checked_prec(prec), false)
    }

    /// Re-read the shortest decimal text of `self` at a new precision.
    ///
    /// For values that originated from decimal text with fewer digits than
    /// `self.precision()` can hold, this recovers the original decimal
    /// exactly and rounds it once at `prec`.
    pub fn reparse(&self, prec: u32) -> Self {
        ExtFloat::parse(&self.to_sci_string(), prec).expect("own text form parses")
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExtFloat {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Bitwise identity including precision.
    pub fn identical(&self, other: &ExtFloat) -> bool {
        self.prec == other.prec && self.mant == other.mant && self.exp == other.exp
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << (self.exp as usize))
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.to_rational().to_f64()
    }

    /// Binary exponent of the leading bit plus one: `2^(top-1) <= |x| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.prec as i64
    }

    /// log2 of |x| rounded down, `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.top() - 1)
        }
    }

    pub fn sqrt(&self) -> Result<Self, NumericsError> {
        if self.is_negative() {
            return Err(NumericsError::Domain(format!(
                "square root of negative value {self}"
            )));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.prec;
        let mut m = self.mant.magnitude().clone();
        let mut e = self.exp;
        let want = 2 * (p as u64 + 2) + 1;
        let have = m.bits();
        let mut k = want.saturating_sub(have) as i64;
        if (e - k).rem_euclid(2) != 0 {
            k += 1;
        }
        m <<= k as usize;
        e -= k;
        let s = m.sqrt();
        let sticky = &s * &s != m;
        Ok(round(BigInt::from(s), e / 2, p, sticky))
    }

    /// Shortest decimal scientific text that reads back to exactly this
    /// value at this precision.
    pub fn to_sci_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let q = self.to_rational().abs();
        let mut e10 = ((self.top() - 1) as f64 * LOG10_2).floor() as i64;
        // Fix the estimate so that 10^e10 <= q < 10^(e10+1).
        while q < pow10(e10) {
            e10 -= 1;
        }
        while q >= pow10(e10 + 1) {
            e10 += 1;
        }
        let max_digits = (self.prec as f64 * LOG10_2).ceil() as usize + 3;
        let mut last = String::new();
        for n in 1..=max_digits {
            let scale = pow10(e10 - n as i64 + 1);
            let scaled = &q / &scale;
            let mut digits = round_half_even(&scaled);
            let mut exp10 = e10;
            if digits == BigInt::from(10u32).pow(n as u32) {
                digits /= 10u32;
                exp10 += 1;
            }
            let mut candidate = Rational::from_integer(digits.clone()) * pow10(exp10 - n as i64 + 1);
            if neg {
                candidate = -candidate;
            }
            let text = format_sci(neg, &digits.to_string(), exp10);
            if ExtFloat::from_rational(&candidate, self.prec).identical(self) {
                return text;
            }
            last = text;
        }
        last
    }
}

impl ExtFloat {
    /// Scientific text rounded to `n` significant digits.
    pub fn to_sci_digits(&self, n: usize) -> String {
        assert!(n >= 1, "at least one digit");
        if self.is_zero() {
            return format_sci(false, &"0".repeat(n), 0);
        }
        let neg = self.is_negative();
        let q = self.to_rational().abs();
        let mut e10 = ((self.top() - 1) as f64 * LOG10_2).floor() as i64;
        while q < pow10(e10) {
            e10 -= 1;
        }
        while q >= pow10(e10 + 1) {
            e10 += 1;
        }
        let mut digits = round_half_even(&(&q / &pow10(e10 - n as i64 + 1)));
        if digits == BigInt::from(10u32).pow(n as u32) {
            digits /= 10u32;
            e10 += 1;
        }
        format_sci(neg, &digits.to_string(), e10)
    }
}

fn checked_prec(prec: u32) -> u32 {
    assert!(
        prec >= MIN_PRECISION,
        "ExtFloat precision {prec} below minimum {MIN_PRECISION}"
    );
    prec
}

fn pow10(e: i64) -> Rational {
    let p = BigInt::from(10u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let twice = &r * 2u32;
    match twice.cmp(x.denom()) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

fn format_sci(neg: bool, digits: &str, exp10: i64) -> String {
    let sign = if neg { "-" } else { "" };
    let (head, tail) = digits.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp10:+03}")
    } else {
        format!("{sign}{head}.{tail}e{exp10:+03}")
    }
}

/// Parse decimal scientific notation or `p/q` into an exact rational.
pub fn parse_decimal_exact(s: &str) -> Result<Rational, NumericsError> {
    let t = s.trim();
    if t.contains('/') {
        return Rational::from_str(t);
    }
    let bad = || NumericsError::Parse(format!("invalid decimal number `{s}`"));
    let (body, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mant = BigInt::from_str(&digits).map_err(|_| bad())?;
    let mut v = Rational::from_integer(mant) * pow10(exp - frac_part.len() as i64);
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Round `mant * 2^exp` to `prec` bits. `sticky` marks a nonzero remainder
/// below the least significant bit of `mant`; callers pass it only with at
/// least `prec + 2` bits in `mant`.
fn round(mant: BigInt, exp: i64, prec: u32, sticky: bool) -> ExtFloat {
    if mant.is_zero() {
        return ExtFloat::zero(prec);
    }
    let (sign, mut m) = mant.into_parts();
    let mut exp = exp;
    let n = m.bits();
    let p = prec as u64;
    if n > p {
        let shift = n - p;
        let mut qv: BigUint = &m >> shift as usize;
        let rem = &m - (&qv << shift as usize);
        let half = BigUint::one() << (shift - 1) as usize;
        let up = match rem.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => sticky || qv.is_odd(),
        };
        if up {
            qv += 1u32;
        }
        exp += shift as i64;
        if qv.bits() > p {
            qv >>= 1;
            exp += 1;
        }
        m = qv;
    } else if n < p {
        m <<= (p - n) as usize;
        exp -= (p - n) as i64;
    }
    ExtFloat {
        mant: BigInt::from_biguint(sign, m),
        exp,
        prec,
    }
}

fn divide_ints(na: &BigInt, ea: i64, nb: &BigInt, eb: i64, prec: u32) -> ExtFloat {
    assert!(!nb.is_zero(), "ExtFloat division by zero");
    if na.is_zero() {
        return ExtFloat::zero(prec);
    }
    let sign = if na.sign() == nb.sign() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let a = na.magnitude();
    let b = nb.magnitude();
    let shift = (prec as i64 + 3 + b.bits() as i64 - a.bits() as i64).max(0) as usize;
    let (qv, r) = (a << shift).div_rem(b);
    let sticky = !r.is_zero();
    round(
        BigInt::from_biguint(sign, qv),
        ea - eb - shift as i64,
        prec,
        sticky,
    )
}

fn add_impl(a: &ExtFloat, b: &ExtFloat, negate_b: bool) -> ExtFloat {
    let p = a.prec.max(b.prec);
    let b_mant = if negate_b { -&b.mant } else { b.mant.clone() };
    if b.is_zero() {
        return a.with_precision(p);
    }
    if a.is_zero() {
        return round(b_mant, b.exp, p, false);
    }
    let (hi, hi_mant, lo, lo_mant) = if a.top() >= b.top() {
        (a, a.mant.clone(), b, b_mant)
    } else {
        (b, b_mant, a, a.mant.clone())
    };
    // A tiny operand only decides rounding; replace it by a single bit far
    // below the rounding position to keep the exact sum small.
    let floor = hi.top() - p as i64 - 5;
    let (lo_mant, lo_exp) = if lo.top() < floor {
        let s = if lo_mant.is_negative() { -1 } else { 1 };
        (BigInt::from(s), floor - 1)
    } else {
        (lo_mant, lo.exp)
    };
    let e = hi.exp.min(lo_exp);
    let m = (hi_mant << (hi.exp - e) as usize) + (lo_mant << (lo_exp - e) as usize);
    round(m, e, p, false)
}

impl Add for ExtFloat {
    type Output = ExtFloat;
    fn add(self, rhs: ExtFloat) -> ExtFloat {
        add_impl(&self, &rhs, false)
    }
}

impl<'a> Add<&'a ExtFloat> for &'a ExtFloat {
    type Output = ExtFloat;
    fn add(self, rhs: &'a ExtFloat) -> ExtFloat {
        add_impl(self, rhs, false)
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        add_impl(&self, &rhs, true)
    }
}

impl<'a> Sub<&'a ExtFloat> for &'a ExtFloat {
    type Output = ExtFloat;
    fn sub(self, rhs: &'a ExtFloat) -> ExtFloat {
        add_impl(self, rhs, true)
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        &self * &rhs
    }
}

impl<'a> Mul<&'a ExtFloat> for &'a ExtFloat {
    type Output = ExtFloat;
    fn mul(self, rhs: &'a ExtFloat) -> ExtFloat {
        let p = self.prec.max(rhs.prec);
        round(&self.mant * &rhs.mant, self.exp + rhs.exp, p, false)
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        &self / &rhs
    }
}

impl<'a> Div<&'a ExtFloat> for &'a ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: &'a ExtFloat) -> ExtFloat {
        let p = self.prec.max(rhs.prec);
        divide_ints(&self.mant, self.exp, &rhs.mant, rhs.exp, p)
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    fn neg(self) -> ExtFloat {
        ExtFloat {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl PartialEq for ExtFloat {
    /// Value equality, ignoring precision.
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl ExtFloat {
    fn cmp_value(&self, other: &Self) -> Ordering {
        let sa = self.mant.sign();
        let sb = other.mant.sign();
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = if self.top() != other.top() {
            self.top().cmp(&other.top())
        } else {
            let e = self.exp.min(other.exp);
            let ma = self.mant.magnitude() << (self.exp - e) as usize;
            let mb = other.mant.magnitude() << (other.exp - e) as usize;
            ma.cmp(&mb)
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string())
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}b]", self.to_sci_string(), self.prec)
    }
}
