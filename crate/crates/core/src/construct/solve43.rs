//! General (4,3) solution: a quadratic in `x = b2 c2`.

use super::{build_scheme, param_tag, root_suffix, ConstructError, Solutions};
use crate::numerics::{q, solve_quadratic, ExtFloat, QuadraticRoots, Rational, Root};
use crate::schemes::CoefficientType;

#[derive(Clone, Debug, PartialEq)]
pub struct Solve43Input {
    pub c2: Rational,
    pub c3: Rational,
    pub c4: Rational,
}

impl Solve43Input {
    pub fn new(c2: Rational, c3: Rational, c4: Rational) -> Self {
        Solve43Input { c2, c3, c4 }
    }

    fn check(&self) -> Result<(), ConstructError> {
        let Solve43Input { c2, c3, c4 } = self;
        let bad = |m: &str| Err(ConstructError::Inadmissible(m.to_string()));
        if c2.is_zero() || c3.is_zero() || c4.is_zero() {
            return bad("c2, c3 and c4 must be nonzero");
        }
        if c2 == c3 {
            return bad("c2 = c3 is a special case (use solve43-special c2eqc3)");
        }
        if c3 == c4 {
            return bad("c3 = c4 is a special case (use solve43-special c3eqc4)");
        }
        if c2 == c4 {
            return bad("c2 = c4 is not admissible");
        }
        Ok(())
    }
}

/// Coefficients `(a2, a1, a0)` of the quadratic in `x = b2 c2`.
pub fn solve_43_quadratic(input: &Solve43Input) -> (Rational, Rational, Rational) {
    let Solve43Input { c2, c3, c4 } = input;
    let one = Rational::one();
    let (half, third, sixth) = (q(1, 2), q(1, 3), q(1, 6));
    let z1 = c3 * c4 * (&one - c2) - &half * (c3 + c4) + &third;
    let z2 = c3 + c4 - q(3, 2) * c3 * c4 - q(2, 3);
    let z3 = c4 * (c4 - c3) * (&one - c3) + &half * c3 - &third;
    let z4 = c3 * c4 - &half * c2 * (c3 + c4) - &third * (c3 + c4 - Rational::from(2) * c2);
    let z5 = &half * (c3 * c4 - c2 * c3 - c2 * c4) + &half * c2 - &sixth * (c3 + c4);
    let a0 = &sixth * &z1 * (&z2 - &z3);
    let a1 = &z1 * &z4 + &z3 * &z5 + &sixth * (&z2 + &z1) * (c3 - c2);
    let a2 = (c3 - c2) * (&z4 - &z5 - (c4 - c2) * (&z1 + &z3));
    (a2, a1, a0)
}

fn finish<T: CoefficientType>(input: &Solve43Input, x: T, name: String, provenance: String) -> Result<crate::schemes::Scheme, ConstructError> {
    let l = |r: &Rational| x.lift(r);
    let Solve43Input { c2, c3, c4 } = input;
    let b2 = x.clone() / l(c2);
    let den3 = c3 * (c4 - c3);
    let den4 = c4 * (c4 - c3);
    let b3 = l(&((q(1, 2) * c4 - q(1, 3)) / &den3)) - l(&(c2 * (c4 - c2) / &den3)) * b2.clone();
    let b4 = l(&((q(1, 3) - q(1, 2) * c3) / &den4)) + l(&(c2 * (c3 - c2) / &den4)) * b2.clone();
    let b1 = x.one_like() - b2.clone() - b3.clone() - b4.clone();
    let c = [x.zero_like(), l(c2), l(c3), l(c4)];
    build_scheme(name, provenance, &[b1, b2, b3, b4], &c)
}

/// All (4,3) 2N-storage methods with nodes `(0, c2, c3, c4)`; one per real
/// root, rational roots giving exact schemes and irrational ones 128-bit
/// decimal schemes.
pub fn solve_43(input: &Solve43Input) -> Result<Solutions, ConstructError> {
    input.check()?;
    let (a2, a1, a0) = solve_43_quadratic(input);
    let roots = solve_quadratic(&a2, &a1, &a0);
    let real = roots.real_roots();
    let tag = param_tag(&[&input.c2, &input.c3, &input.c4]);
    let mut schemes = Vec::new();
    let mut diagnostics = Vec::new();
    let mut special = None;
    match &roots {
        QuadraticRoots::ComplexPair { .. } => diagnostics.push("quadratic for b2*c2 has complex roots; no real scheme".into()),
        QuadraticRoots::DegenerateConstant { identically_zero } => diagnostics.push(if *identically_zero {
            "quadratic for b2*c2 vanishes identically; b2 is undetermined".into()
        } else {
            "quadratic for b2*c2 has no solution".into()
        }),
        _ => {}
    }
    for (k, root) in real.iter().enumerate() {
        let name = format!("43-{tag}{}", root_suffix(&real, k));
        let provenance = format!("solve43 c2={} c3={} c4={}; root {k} ({})", input.c2, input.c3, input.c4, roots.kind());
        let built = match root {
            Root::Exact(x) => finish(input, x.clone(), name, provenance),
            Root::Approx(x) => finish::<ExtFloat>(input, x.clone(), name, provenance),
        };
        match built {
            Ok(s) => schemes.push(s),
            Err(e @ ConstructError::SpecialCase { .. }) => {
                diagnostics.push(format!("root {k}: {e}; see solve43-special"));
                special = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    if schemes.is_empty() {
        if let Some(e) = special {
            return Err(e);
        }
    }
    Ok(Solutions {
        schemes,
        roots,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::registry_get;

    fn run(c2: (i64, i64), c3: (i64, i64), c4: (i64, i64)) -> Solutions {
        solve_43(&Solve43Input::new(q(c2.0, c2.1), q(c3.0, c3.1), q(c4.0, c4.1))).unwrap()
    }

    #[test]
    fn reproduces_rational_tables() {
        for (name, c) in [
            ("43-1", [(1, 4), (7, 12), (4, 5)]),
            ("43-2", [(1, 5), (3, 5), (13, 15)]),
            ("43-3", [(2, 15), (2, 5), (4, 5)]),
            ("43-4", [(13, 28), (4, 7), (37, 42)]),
        ] {
            let sol = run(c[0], c[1], c[2]);
            let want = registry_get(name).unwrap();
            let hit = sol
                .schemes
                .iter()
                .find(|s| s.as_rational().map(|f| f.tableau == *want.rational_tableau()).unwrap_or(false));
            let hit = hit.unwrap_or_else(|| panic!("{name} not among {:?}", sol.schemes.iter().map(|s| &s.name).collect::<Vec<_>>()));
            assert_eq!(hit.as_rational().unwrap().low_storage, want.as_rational().unwrap().low_storage);
        }
        let sol = run((1, 4), (7, 12), (4, 5));
        assert!(sol.schemes.iter().any(|s| *s.rational_tableau().b(2) == q(1, 6)));
    }

    #[test]
    fn rejects_equal_nodes() {
        let e = solve_43(&Solve43Input::new(q(1, 2), q(1, 2), q(3, 4))).unwrap_err();
        assert!(e.to_string().contains("c2eqc3"));
        assert!(solve_43(&Solve43Input::new(q(0, 1), q(1, 2), q(3, 4))).is_err());
    }

    #[test]
    fn irrational_roots_give_decimal_schemes() {
        // scan a few points until an irrational pair shows up
        let mut seen = false;
        'outer: for n in 1..8 {
            for m in n + 1..9 {
                let input = Solve43Input::new(q(n, 9), q(m, 9), q(1, 1));
                if let Ok(sol) = solve_43(&input) {
                    if let QuadraticRoots::TwoIrrational(..) = sol.roots {
                        for s in &sol.schemes {
                            let f = s.as_decimal().unwrap();
                            assert_eq!(f.tableau.b(1).precision(), 128);
                            assert!(s.name.contains("-root"));
                        }
                        seen = !sol.schemes.is_empty();
                        if seen {
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert!(seen);
    }
}
