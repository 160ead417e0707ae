//! General (5,3) solution: the omega/rho chain and a cubic in `b2` whose
//! leading coefficient vanishes.

use super::{build_scheme, param_tag, require, root_suffix, ConstructError, Solutions};
use crate::numerics::{q, solve_quadratic, ExtFloat, QuadraticRoots, Rational, Root};
use crate::schemes::{CoefficientType, Scheme};

#[derive(Clone, Debug, PartialEq)]
pub struct Solve53Input {
    pub c2: Rational,
    pub c3: Rational,
    pub c4: Rational,
    pub c5: Rational,
    pub b5: Rational,
}

impl Solve53Input {
    pub fn new(c2: Rational, c3: Rational, c4: Rational, c5: Rational, b5: Rational) -> Self {
        Solve53Input { c2, c3, c4, c5, b5 }
    }
}

/// Cubic coefficients `C_0..C_3` plus the linear maps `b3 = w1 + r1 b2`,
/// `b4 = w2 + r2 b2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solve53Coefficients {
    pub cubic: [Rational; 4],
    pub omega1: Rational,
    pub rho1: Rational,
    pub omega2: Rational,
    pub rho2: Rational,
}

/// `(w0 + r0 x)(w1 + r1 x)(w2 + r2 x)` expanded, coefficients of `x^0..x^3`.
fn triple(w: [&Rational; 3], r: [&Rational; 3]) -> [Rational; 4] {
    [
        w[0] * w[1] * w[2],
        w[0] * w[1] * r[2] + w[0] * r[1] * w[2] + r[0] * w[1] * w[2],
        w[0] * r[1] * r[2] + r[0] * w[1] * r[2] + r[0] * r[1] * w[2],
        r[0] * r[1] * r[2],
    ]
}

pub fn solve_53_coefficients(input: &Solve53Input) -> Result<Solve53Coefficients, ConstructError> {
    let Solve53Input { c2, c3, c4, c5, b5 } = input;
    let cs = [c2, c3, c4, c5];
    for (i, x) in cs.iter().enumerate() {
        if x.is_zero() {
            return Err(ConstructError::Inadmissible(format!("c{} must be nonzero", i + 2)));
        }
        for (j, y) in cs.iter().enumerate().skip(i + 1) {
            if x == y {
                return Err(ConstructError::Inadmissible(format!("c{} = c{} is a special case", i + 2, j + 2)));
            }
        }
    }
    let one = Rational::one();
    let (half, third, sixth) = (q(1, 2), q(1, 3), q(1, 6));
    let d34 = c3 * (c4 - c3);
    let d44 = c4 * (c4 - c3);
    let w1 = (c4 * (&half - b5 * c5) - (&third - b5 * c5 * c5)) / &d34;
    let r1 = -(c2 * (c4 - c2)) / &d34;
    let w2 = (&third - b5 * c5 * c5 - c3 * (&half - b5 * c5)) / &d44;
    let r2 = c2 * (c3 - c2) / &d44;
    let d3 = &one - b5 - c4;
    require(!d3.is_zero(), "1 - b5 - c4 must be nonzero")?;
    let w3 = (c5 - c4) * &w2 / &d3;
    let r3 = (c5 - c4) * &r2 / &d3;
    let w4 = b5 * c4 * &w3 - &sixth;
    let r4 = b5 * c4 * &r3;
    let w5 = b5 * c3 * (c5 - c3 - &w3);
    let r5 = -(b5 * c3 * &r3);
    let w6 = &one - b5 - c3 - &w2;
    let r6 = -r2.clone();
    let w7 = b5 * c2 * ((c5 - &w3) * (&w6 - &w1) - c2 * &w6 + c3 * &w1);
    let z7 = b5 * c2 * &r3 * (&r1 - &r6);
    let r7 = b5 * c2 * (&r3 * (&w1 - &w6) + (c5 - &w3) * (&r6 - &r1) - c2 * &r6 + c3 * &r1);
    let w8 = c2 * ((c4 - c2) * &w6 - (c4 - c3) * &w1);
    let r8 = c2 * ((c4 - c2) * &r6 - (c4 - c3) * &r1);
    let w9 = &one - b5 - c2 - &w1 - &w2;
    let r9 = -(&r1 + &r2);

    let zero = Rational::zero();
    let chi1 = triple([&w4, &w6, &w9], [&r4, &r6, &r9]);
    let chi2 = triple([&w1, &w5, &w9], [&r1, &r5, &r9]);
    let chi3 = [zero.clone(), w7, r7, z7];
    let chi4 = triple([&w1, &w2, &w9], [&r1, &r2, &r9]).map(|x| &d34 * x);
    let chi5 = [zero.clone(), &w2 * &w8, &w2 * &r8 + &r2 * &w8, &r2 * &r8];
    let k6 = c2 * (c3 - c2);
    let chi6 = [zero, &k6 * &w1 * &w6, &k6 * (&w1 * &r6 + &r1 * &w6), &k6 * &r1 * &r6];
    let cubic = std::array::from_fn(|k| &chi1[k] + &chi2[k] + &chi3[k] + &chi4[k] + &chi5[k] + &chi6[k]);
    Ok(Solve53Coefficients {
        cubic,
        omega1: w1,
        rho1: r1,
        omega2: w2,
        rho2: r2,
    })
}

fn finish<T: CoefficientType>(input: &Solve53Input, k: &Solve53Coefficients, b2: T, name: String, provenance: String) -> Result<Scheme, ConstructError> {
    let l = |r: &Rational| b2.lift(r);
    let b3 = l(&k.omega1) + l(&k.rho1) * b2.clone();
    let b4 = l(&k.omega2) + l(&k.rho2) * b2.clone();
    let b5 = l(&input.b5);
    let b1 = b2.one_like() - b2.clone() - b3.clone() - b4.clone() - b5.clone();
    let c = [b2.zero_like(), l(&input.c2), l(&input.c3), l(&input.c4), l(&input.c5)];
    build_scheme(name, provenance, &[b1, b2, b3, b4, b5], &c)
}

/// All (5,3) 2N-storage methods with nodes `(0, c2, .., c5)` and last weight `b5`.
pub fn solve_53(input: &Solve53Input) -> Result<Solutions, ConstructError> {
    let k = solve_53_coefficients(input)?;
    if !k.cubic[3].is_zero() {
        return Err(ConstructError::Internal(format!("cubic coefficient C3 = {} is not zero", k.cubic[3])));
    }
    let roots = solve_quadratic(&k.cubic[2], &k.cubic[1], &k.cubic[0]);
    let real = roots.real_roots();
    let tag = param_tag(&[&input.c2, &input.c3, &input.c4, &input.c5, &input.b5]);
    let mut schemes = Vec::new();
    let mut diagnostics = Vec::new();
    let mut special = None;
    match &roots {
        QuadraticRoots::ComplexPair { .. } => diagnostics.push("quadratic for b2 has complex roots; no real scheme".into()),
        QuadraticRoots::DegenerateConstant { .. } => diagnostics.push("quadratic for b2 is degenerate; no isolated root".into()),
        _ => {}
    }
    for (n, root) in real.iter().enumerate() {
        let name = format!("53-{tag}{}", root_suffix(&real, n));
        let provenance = format!(
            "solve53 c2={} c3={} c4={} c5={} b5={}; root {n} ({})",
            input.c2,
            input.c3,
            input.c4,
            input.c5,
            input.b5,
            roots.kind()
        );
        let built = match root {
            Root::Exact(x) => finish(input, &k, x.clone(), name, provenance),
            Root::Approx(x) => finish::<ExtFloat>(input, &k, x.clone(), name, provenance),
        };
        match built {
            Ok(s) => schemes.push(s),
            Err(e @ ConstructError::SpecialCase { .. }) => {
                diagnostics.push(format!("root {n}: {e}"));
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
