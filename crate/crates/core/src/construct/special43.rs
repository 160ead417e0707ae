//! The four (4,3) special cases outside the general solution.

use std::fmt;
use std::str::FromStr;

use super::{param_tag, require, validate_third_order, ConstructError};
use crate::numerics::{q, Rational};
use crate::schemes::{ButcherTableau, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Special43 {
    /// `b2 = 0`, free `(c2, c3)`.
    B2Zero,
    /// `b3 = 0`, free `(c2, c4)`.
    B3Zero,
    /// `c2 = c3`, free `(c2, c4)`.
    C2EqC3,
    /// `c3 = c4`, free `(c2, c3)`.
    C3EqC4,
}

impl Special43 {
    pub fn as_str(self) -> &'static str {
        match self {
            Special43::B2Zero => "b2zero",
            Special43::B3Zero => "b3zero",
            Special43::C2EqC3 => "c2eqc3",
            Special43::C3EqC4 => "c3eqc4",
        }
    }
}

impl fmt::Display for Special43 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Special43 {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "b2zero" => Ok(Special43::B2Zero),
            "b3zero" => Ok(Special43::B3Zero),
            "c2eqc3" => Ok(Special43::C2EqC3),
            "c3eqc4" => Ok(Special43::C3EqC4),
            _ => Err(ConstructError::Inadmissible(format!(
                "unknown case '{s}' (expected b2zero, b3zero, c2eqc3 or c3eqc4)"
            ))),
        }
    }
}

struct Parts {
    c: [Rational; 3],
    b: [Rational; 4],
    a32: Rational,
    a42: Rational,
    a43: Rational,
}

fn b2_zero(c2: &Rational, c3: &Rational) -> Result<Parts, ConstructError> {
    let one = Rational::one();
    let d = q(1, 2) - (&one - c2) * c3;
    require(!d.is_zero(), "1/2 - (1 - c2) c3 must be nonzero")?;
    let c4 = (q(1, 3) - q(1, 2) * c3) / d;
    require(c3 != &c4, "c3 must differ from c4")?;
    require(!c4.is_zero(), "c4 must be nonzero")?;
    let b4 = (q(1, 3) - q(1, 2) * c3) / (&c4 * (&c4 - c3));
    let b3 = &one - c2 - &b4;
    let d43 = &b3 - c3 + c2;
    require(!d43.is_zero(), "b3 - c3 + c2 must be nonzero")?;
    let a43 = &b3 / d43 * (&c4 - c3);
    require(!c2.is_zero(), "c2 must be nonzero")?;
    let d32 = q(1, 2) - c2 * (&one - c2) - &b4 * &a43;
    require(!d32.is_zero(), "1/2 - c2 (1 - c2) - b4 a43 must be nonzero")?;
    let a32 = (c3 - c2) / c2 * (q(1, 6) - &b4 * &a43 * c3) / d32;
    require(c2 != c3, "c2 must differ from c3")?;
    let a42 = (&c4 - c2 - &a43) / (c3 - c2) * &a32;
    Ok(Parts {
        c: [c2.clone(), c3.clone(), c4],
        b: [c2.clone(), Rational::zero(), b3, b4],
        a32,
        a42,
        a43,
    })
}

fn b3_zero(c2: &Rational, c4: &Rational) -> Result<Parts, ConstructError> {
    require(c2 != c4, "c2 must differ from c4")?;
    require(!c2.is_zero() && !c4.is_zero(), "c2 and c4 must be nonzero")?;
    let b2 = (q(1, 2) * c4 - q(1, 3)) / (c2 * (c4 - c2));
    let b4 = (q(1, 3) - q(1, 2) * c2) / (c4 * (c4 - c2));
    require(!b4.is_zero(), "b4 must be nonzero")?;
    let c3 = Rational::one() - &b4;
    let b1 = &c3 - &b2;
    let d43 = (&c3 - c2) * &c3 - &b2 * c2;
    require(!d43.is_zero(), "(c3 - c2) c3 - b2 c2 must be nonzero")?;
    let a43 = ((&c3 - c2) / (Rational::from(6) * &b4) - &b2 * c2 * (c4 - c2)) / d43;
    require(c2 != &c3, "c2 must differ from c3")?;
    let a42 = &b2 / (&c3 - c2) * (c4 - c2 - &a43);
    Ok(Parts {
        c: [c2.clone(), c3, c4.clone()],
        b: [b1, b2.clone(), Rational::zero(), b4],
        a32: b2,
        a42,
        a43,
    })
}

fn c2_eq_c3(c2: &Rational, c4: &Rational) -> Result<Parts, ConstructError> {
    require(c2 != c4, "c2 must differ from c4")?;
    require(!c2.is_zero() && !c4.is_zero(), "c2 and c4 must be nonzero")?;
    let b4 = (q(1, 3) - q(1, 2) * c2) / (c4 * (c4 - c2));
    let b3 = Rational::one() - c2 - &b4;
    let b2 = (q(1, 2) * c4 - q(1, 3)) / (c2 * (c4 - c2)) - &b3;
    let b1 = c2 - &b2;
    let a43 = c4 - c2;
    let d32 = &b4 * &a43 - &b3 * (Rational::one() - c2);
    require(!d32.is_zero(), "b4 a43 - b3 (1 - c2) must be nonzero")?;
    let a32 = (&b4 * (&b2 + &b3) * &a43 - &b3 / (Rational::from(6) * c2)) / d32;
    require(!b3.is_zero(), "b3 must be nonzero")?;
    let a42 = (&b2 * &a43 - (&a43 - &b3) * &a32) / &b3;
    Ok(Parts {
        c: [c2.clone(), c2.clone(), c4.clone()],
        b: [b1, b2, b3, b4],
        a32,
        a42,
        a43,
    })
}

fn c3_eq_c4(c2: &Rational, c3: &Rational) -> Result<Parts, ConstructError> {
    require(c2 != c3, "c2 must differ from c3")?;
    require(!c2.is_zero() && !c3.is_zero(), "c2 and c3 must be nonzero")?;
    let b2 = (q(1, 2) * c3 - q(1, 3)) / (c2 * (c3 - c2));
    let b4 = Rational::one() - c3;
    let b3 = (q(1, 3) - q(1, 2) * c2) / (c3 * (c3 - c2)) - &b4;
    let b1 = c3 - &b2 - &b3;
    let s2 = &b1 + &b2 - c2;
    require(!s2.is_zero(), "b1 + b2 - c2 must be nonzero")?;
    let a32 = &b2 / &s2 * (c3 - c2);
    let d43 = &b4 * (&s2 * c3 - &b2 * c2);
    require(!d43.is_zero(), "b4 [(b1 + b2 - c2) c3 - b2 c2] must be nonzero")?;
    let a43 = ((q(1, 6) - &b3 * &a32 * c2) * &s2 - &b4 * &b2 * c2 * (c3 - c2)) / d43;
    let a42 = &b2 / &s2 * (c3 - c2 - &a43);
    Ok(Parts {
        c: [c2.clone(), c3.clone(), c3.clone()],
        b: [b1, b2, b3, b4],
        a32,
        a42,
        a43,
    })
}

/// Solve one special case with its two free parameters, following the
/// published evaluation order.
pub fn solve_43_special(case: Special43, p1: &Rational, p2: &Rational) -> Result<Scheme, ConstructError> {
    let parts = match case {
        Special43::B2Zero => b2_zero(p1, p2)?,
        Special43::B3Zero => b3_zero(p1, p2)?,
        Special43::C2EqC3 => c2_eq_c3(p1, p2)?,
        Special43::C3EqC4 => c3_eq_c4(p1, p2)?,
    };
    let Parts { c: [c2, c3, c4], b, a32, a42, a43 } = parts;
    let rows = vec![
        vec![c2.clone()],
        vec![&c3 - &a32, a32],
        vec![&c4 - &a42 - &a43, a42, a43],
    ];
    let t = ButcherTableau::new(vec![Rational::zero(), c2, c3, c4], rows, b.to_vec())
        .map_err(|e| ConstructError::Internal(e.to_string()))?;
    let ls = validate_third_order(&t)?;
    let name = format!("43-{case}-{}", param_tag(&[p1, p2]));
    let provenance = format!("solve43-special {case} p1={p1} p2={p2}");
    Scheme::rational(name, 3, provenance, t, Some(ls)).map_err(|e| ConstructError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::registry_get;

    #[test]
    fn b3zero_gives_the_table() {
        let s = solve_43_special(Special43::B3Zero, &q(1, 2), &q(3, 4)).unwrap();
        let want = registry_get("43-b3zero").unwrap();
        assert_eq!(s.rational_tableau(), want.rational_tableau());
        assert_eq!(s.as_rational().unwrap().low_storage, want.as_rational().unwrap().low_storage);
    }

    #[test]
    fn b2zero_weights() {
        let s = solve_43_special(Special43::B2Zero, &q(1, 8), &q(1, 2)).unwrap();
        let t = s.rational_tableau();
        assert_eq!(*t.b(1), q(1, 8));
        assert_eq!(t.weights()[2..], [q(4, 5), q(3, 40)]);
        assert!(t.b(2).is_zero());
        assert_eq!(t.weights().iter().sum::<Rational>(), q(1, 1));
    }

    #[test]
    fn c3eqc4_last_weight() {
        let s = solve_43_special(Special43::C3EqC4, &q(1, 4), &q(1, 2)).unwrap();
        let t = s.rational_tableau();
        assert_eq!(*t.b(4), q(1, 2));
        assert_eq!(t.c(3), t.c(4));
    }

    #[test]
    fn c2eqc3_solution() {
        let s = solve_43_special(Special43::C2EqC3, &q(1, 8), &q(1, 2)).unwrap();
        assert_eq!(s.rational_tableau().c(2), s.rational_tableau().c(3));
        assert_eq!(*s.rational_tableau().b(4), q(13, 9));
        // a32 = 0 here, so no 2N form exists
        assert!(solve_43_special(Special43::C2EqC3, &q(1, 3), &q(3, 4)).is_err());
    }

    #[test]
    fn named_conditions() {
        // 1/2 - (1 - c2) c3 = 0 at c2 = 0, c3 = 1/2
        let e = solve_43_special(Special43::B2Zero, &q(0, 1), &q(1, 2)).unwrap_err();
        assert_eq!(e, ConstructError::Denominator("1/2 - (1 - c2) c3 must be nonzero".into()));
        let e = solve_43_special(Special43::B3Zero, &q(1, 2), &q(1, 2)).unwrap_err();
        assert!(e.to_string().contains("c2 must differ from c4"));
        assert!("b4zero".parse::<Special43>().is_err());
    }
}
