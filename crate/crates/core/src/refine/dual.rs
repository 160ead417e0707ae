//! Forward-mode dual numbers over `ExtFloat`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::numerics::{ExtFloat, Rational, Scalar};

/// Value with a gradient; an empty gradient means a constant.
#[derive(Clone, Debug)]
pub struct Dual {
    pub v: ExtFloat,
    pub d: Vec<ExtFloat>,
}

impl Dual {
    pub fn constant(v: ExtFloat) -> Self {
        Dual { v, d: Vec::new() }
    }

    /// Independent variable number `k` out of `n`.
    pub fn variable(v: ExtFloat, k: usize, n: usize) -> Self {
        let p = v.precision();
        let d = (0..n)
            .map(|i| if i == k { ExtFloat::from_i64(1, p) } else { ExtFloat::zero(p) })
            .collect();
        Dual { v, d }
    }

    /// Derivative with respect to variable `k`.
    pub fn grad(&self, k: usize) -> ExtFloat {
        self.d.get(k).cloned().unwrap_or_else(|| ExtFloat::zero(self.v.precision()))
    }

    fn combine(a: &[ExtFloat], b: &[ExtFloat], f: impl Fn(Option<&ExtFloat>, Option<&ExtFloat>) -> ExtFloat) -> Vec<ExtFloat> {
        let n = a.len().max(b.len());
        (0..n).map(|i| f(a.get(i), b.get(i))).collect()
    }

    fn scaled(d: &[ExtFloat], s: &ExtFloat) -> Vec<ExtFloat> {
        d.iter().map(|x| x * s).collect()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let d = Dual::combine(&self.d, &o.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v: self.v + o.v, d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + (-o)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: self.d.into_iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let a = Dual::scaled(&self.d, &o.v);
        let b = Dual::scaled(&o.d, &self.v);
        let d = Dual::combine(&a, &b, |x, y| match (x, y) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        // (u/v)' = (u' - (u/v) v') / v
        let q = &self.v / &o.v;
        let b = Dual::scaled(&o.d, &q);
        let d = Dual::combine(&self.d, &b, |x, y| match (x, y) {
            (Some(x), Some(y)) => &(x - y) / &o.v,
            (Some(x), None) => x / &o.v,
            (None, Some(y)) => &(-y.clone()) / &o.v,
            (None, None) => unreachable!(),
        });
        Dual { v: q, d }
    }
}

impl PartialEq for Dual {
    fn eq(&self, o: &Dual) -> bool {
        self.v == o.v
    }
}

impl PartialOrd for Dual {
    fn partial_cmp(&self, o: &Dual) -> Option<Ordering> {
        self.v.partial_cmp(&o.v)
    }
}

impl fmt::Display for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.v, f)
    }
}

impl Scalar for Dual {
    fn lift(&self, q: &Rational) -> Self {
        Dual::constant(self.v.lift(q))
    }

    fn abs(&self) -> Self {
        if self.v.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn to_f64(&self) -> f64 {
        self.v.to_f64()
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn tolerance(&self) -> f64 {
        self.v.tolerance()
    }

    fn near(&self, other: &Self) -> bool {
        self.v.near(&other.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn e(x: i64, y: i64) -> ExtFloat {
        ExtFloat::from_rational(&q(x, y), 128)
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::variable(e(3, 1), 0, 2);
        let y = Dual::variable(e(2, 1), 1, 2);
        let f = x.clone() * x.clone() / y.clone() - x.clone() + x.lift(&q(5, 1));
        // f = x^2/y - x + 5, df/dx = 2x/y - 1 = 2, df/dy = -x^2/y^2 = -9/4
        assert_eq!(f.v, e(13, 2));
        assert_eq!(f.grad(0), e(2, 1));
        assert_eq!(f.grad(1), e(-9, 4));
        let g = x.lift(&q(1, 1)) / y;
        assert_eq!(g.grad(1), e(-1, 4));
        assert_eq!(g.grad(0), e(0, 1));
    }
}
