use std::cmp::Ordering;

use super::{rational::signum, ExtFloat, Rational};

/// Default precision for irrational roots.
pub const ROOT_PRECISION: u32 = 128;

/// A real root: exact when rational, rounded otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact(Rational),
    Approx(ExtFloat),
}

impl Root {
    pub fn to_f64(&self) -> f64 {
        match self {
            Root::Exact(r) => r.to_f64(),
            Root::Approx(x) => x.to_f64(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Root::Exact(r) => Some(r),
            Root::Approx(_) => None,
        }
    }
}

/// Classified solutions of `a2 x^2 + a1 x + a0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum QuadraticRoots {
    /// Distinct rational roots, ascending.
    TwoRational(Rational, Rational),
    /// A rational double root.
    OneRational(Rational),
    /// Distinct irrational real roots, ascending.
    TwoIrrational(ExtFloat, ExtFloat),
    /// Negative discriminant: `re ± i*im`.
    ComplexPair { re: ExtFloat, im: ExtFloat },
    /// `a2 = 0`, `a1 != 0`.
    DegenerateLinear(Rational),
    /// `a2 = a1 = 0`; every `x` solves it when `a0 = 0`, none otherwise.
    DegenerateConstant { identically_zero: bool },
}

impl QuadraticRoots {
    /// Real roots in ascending order. An identically-zero constant equation
    /// has no isolated roots and yields an empty list.
    pub fn real_roots(&self) -> Vec<Root> {
        match self {
            QuadraticRoots::TwoRational(a, b) => vec![Root::Exact(a.clone()), Root::Exact(b.clone())],
            QuadraticRoots::OneRational(a) | QuadraticRoots::DegenerateLinear(a) => {
                vec![Root::Exact(a.clone())]
            }
            QuadraticRoots::TwoIrrational(a, b) => {
                vec![Root::Approx(a.clone()), Root::Approx(b.clone())]
            }
            QuadraticRoots::ComplexPair { .. } | QuadraticRoots::DegenerateConstant { .. } => vec![],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            QuadraticRoots::TwoRational(..) => "two-rational",
            QuadraticRoots::OneRational(_) => "one-rational",
            QuadraticRoots::TwoIrrational(..) => "two-real-irrational",
            QuadraticRoots::ComplexPair { .. } => "complex-pair",
            QuadraticRoots::DegenerateLinear(_) => "degenerate-linear",
            QuadraticRoots::DegenerateConstant { .. } => "degenerate-constant",
        }
    }
}

/// Solve with irrational roots delivered at [`ROOT_PRECISION`] bits.
pub fn solve_quadratic(a2: &Rational, a1: &Rational, a0: &Rational) -> QuadraticRoots {
    solve_quadratic_with_precision(a2, a1, a0, ROOT_PRECISION)
}

pub fn solve_quadratic_with_precision(
    a2: &Rational,
    a1: &Rational,
    a0: &Rational,
    prec: u32,
) -> QuadraticRoots {
    if a2.is_zero() {
        if a1.is_zero() {
            return QuadraticRoots::DegenerateConstant {
                identically_zero: a0.is_zero(),
            };
        }
        return QuadraticRoots::DegenerateLinear(-a0 / a1);
    }
    let disc = a1 * a1 - Rational::from(4) * a2 * a0;
    let two_a2 = Rational::from(2) * a2;
    match signum(&disc) {
        Ordering::Less => {
            let re = -a1 / &two_a2;
            let im = ExtFloat::from_rational(&(-disc), prec)
                .sqrt()
                .expect("positive")
                / ExtFloat::from_rational(&two_a2.abs(), prec);
            QuadraticRoots::ComplexPair {
                re: ExtFloat::from_rational(&re, prec),
                im,
            }
        }
        Ordering::Equal => QuadraticRoots::OneRational(-a1 / &two_a2),
        Ordering::Greater => match disc.sqrt().expect("non-negative") {
            Some(root) => {
                let x1 = (-a1 - &root) / &two_a2;
                let x2 = (-a1 + &root) / &two_a2;
                if x1 < x2 {
                    QuadraticRoots::TwoRational(x1, x2)
                } else {
                    QuadraticRoots::TwoRational(x2, x1)
                }
            }
            None => {
                // Cancellation-free pair: q = -(a1 + sign(a1) sqrt(disc)) / 2,
                // roots q/a2 and a0/q.
                let sd = ExtFloat::from_rational(&disc, prec).sqrt().expect("positive");
                let fa1 = ExtFloat::from_rational(a1, prec);
                let half = ExtFloat::from_rational(&Rational::new(1, 2), prec);
                let qv = if a1.is_negative() {
                    -((&fa1 - &sd) * half)
                } else {
                    -((&fa1 + &sd) * half)
                };
                let r1 = &qv / &ExtFloat::from_rational(a2, prec);
                let r2 = &ExtFloat::from_rational(a0, prec) / &qv;
                if r1 < r2 {
                    QuadraticRoots::TwoIrrational(r1, r2)
                } else {
                    QuadraticRoots::TwoIrrational(r2, r1)
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use proptest::prelude::*;

    fn eval(a2: &Rational, a1: &Rational, a0: &Rational, x: &Rational) -> Rational {
        a2 * x * x + a1 * x + a0
    }

    #[test]
    fn factored_pair() {
        // (x - 1/2)(x - 1/3) = x^2 - 5/6 x + 1/6
        let r = solve_quadratic(&q(1, 1), &q(-5, 6), &q(1, 6));
        assert_eq!(r, QuadraticRoots::TwoRational(q(1, 3), q(1, 2)));
    }

    #[test]
    fn linear_and_constant() {
        assert_eq!(
            solve_quadratic(&q(0, 1), &q(2, 1), &q(-1, 1)),
            QuadraticRoots::DegenerateLinear(q(1, 2))
        );
        assert_eq!(
            solve_quadratic(&q(0, 1), &q(0, 1), &q(3, 1)),
            QuadraticRoots::DegenerateConstant { identically_zero: false }
        );
        assert!(solve_quadratic(&q(0, 1), &q(0, 1), &q(0, 1)).real_roots().is_empty());
    }

    #[test]
    fn complex_and_double() {
        let r = solve_quadratic(&q(1, 1), &q(0, 1), &q(1, 1));
        assert_eq!(r.kind(), "complex-pair");
        assert!(r.real_roots().is_empty());
        assert_eq!(
            solve_quadratic(&q(1, 1), &q(-1, 1), &q(1, 4)),
            QuadraticRoots::OneRational(q(1, 2))
        );
    }

    #[test]
    fn irrational_roots_at_requested_precision() {
        // x^2 - 2 = 0
        let r = solve_quadratic_with_precision(&q(1, 1), &q(0, 1), &q(-2, 1), 200);
        let QuadraticRoots::TwoIrrational(lo, hi) = r else {
            panic!("expected irrational pair")
        };
        assert_eq!(hi.precision(), 200);
        let two = ExtFloat::from_i64(2, 200);
        let err = (&(&hi * &hi) - &two).abs();
        assert!(err.log2_floor().map_or(true, |e| e < -195));
        assert_eq!(lo, -hi);
    }

    proptest! {
        #[test]
        fn rational_roots_are_exact(r1n in -40i64..40, r1d in 1i64..20, r2n in -40i64..40, r2d in 1i64..20, k in 1i64..9) {
            let (r1, r2) = (q(r1n, r1d), q(r2n, r2d));
            let a2 = q(k, 3);
            let a1 = -(&a2 * (&r1 + &r2));
            let a0 = &a2 * &r1 * &r2;
            let roots = solve_quadratic(&a2, &a1, &a0);
            let real = roots.real_roots();
            prop_assert!(!real.is_empty());
            for root in real {
                let x = root.as_rational().expect("rational").clone();
                prop_assert!(eval(&a2, &a1, &a0, &x).is_zero());
            }
        }
    }
}
