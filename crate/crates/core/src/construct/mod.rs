//! Building methods from nodes and weights, and the closed-form (4,3) and
//! (5,3) solvers.

mod solve43;
mod solve53;
mod special43;

use thiserror::Error;

use crate::conditions::{is_two_n_storage, order_residuals, two_n_residuals};
use crate::numerics::{QuadraticRoots, Rational, Root, Scalar};
use crate::schemes::{ButcherTableau, CoefficientType, LowStorageForm, Scheme};

pub use solve43::{solve_43, solve_43_quadratic, Solve43Input};
pub use solve53::{solve_53, solve_53_coefficients, Solve53Coefficients, Solve53Input};
pub use special43::{solve_43_special, Special43};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("inadmissible input: {0}")]
    Inadmissible(String),
    #[error("special case at j = {index}: {message}")]
    SpecialCase { index: usize, message: String },
    #[error("vanishing denominator: {0}")]
    Denominator(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Solutions of a closed-form solver plus notes on roots that were skipped.
#[derive(Clone, Debug)]
pub struct Solutions {
    pub schemes: Vec<Scheme>,
    pub roots: QuadraticRoots,
    pub diagnostics: Vec<String>,
}

fn partial_sums<T: Scalar>(b: &[T]) -> Vec<T> {
    let mut acc = b[0].zero_like();
    b.iter()
        .map(|x| {
            acc = acc.clone() + x.clone();
            acc.clone()
        })
        .collect()
}

fn check_lengths<T>(b: &[T], c: &[T]) -> Result<(), ConstructError> {
    if b.is_empty() || b.len() != c.len() {
        return Err(ConstructError::Inadmissible(format!(
            "b and c must have the same nonzero length ({} vs {})",
            b.len(),
            c.len()
        )));
    }
    Ok(())
}

/// `D_j = sum_{k<=j} b_k - c_j` for `j = 1..s-1`, all required nonzero.
fn denominators<T: Scalar>(b: &[T], c: &[T]) -> Result<Vec<T>, ConstructError> {
    let sums = partial_sums(b);
    let s = b.len();
    let d: Vec<T> = (0..s).map(|j| sums[j].clone() - c[j].clone()).collect();
    for (j, dj) in d.iter().enumerate().take(s.saturating_sub(1)) {
        if dj.is_negligible() {
            return Err(ConstructError::SpecialCase {
                index: j + 1,
                message: format!("b_1 + ... + b_{} - c_{} vanishes", j + 1, j + 1),
            });
        }
    }
    Ok(d)
}

fn recursive_rows<T: Scalar>(b: &[T], c: &[T], d: &[T]) -> Vec<Vec<T>> {
    let s = b.len();
    (2..=s)
        .map(|i| {
            let mut row = vec![b[0].zero_like(); i - 1];
            let mut tail = b[0].zero_like();
            for j in (1..i).rev() {
                let v = b[j - 1].clone() / d[j - 1].clone() * (c[i - 1].clone() - c[j - 1].clone() - tail.clone());
                tail = tail + v.clone();
                row[j - 1] = v;
            }
            row
        })
        .collect()
}

fn direct_rows<T: Scalar>(b: &[T], c: &[T], d: &[T]) -> Vec<Vec<T>> {
    let s = b.len();
    let sums = partial_sums(b);
    let one = b[0].one_like();
    let entry = |i: usize, j: usize| {
        let mut total = b[0].zero_like();
        for k in 1..=i - j {
            let num = (1..k).fold(one.clone(), |p, l| p * (sums[j + l - 2].clone() - c[j + l - 1].clone()));
            let den = (0..k).fold(one.clone(), |p, m| p * d[j + m - 1].clone());
            total = total + num / den * (c[j + k - 1].clone() - c[j + k - 2].clone());
        }
        b[j - 1].clone() * total
    };
    (2..=s).map(|i| (1..i).map(|j| entry(i, j)).collect()).collect()
}

/// Tableau of the 2N-storage method with weights `b` and nodes `c`,
/// `a_ij = b_j / (sum_{k<=j} b_k - c_j) [c_i - c_j - sum_{k=j+1..i-1} a_ik]`.
/// The non-recursive product form is evaluated as well and must agree.
pub fn derive_a_from_bc<T: Scalar>(b: &[T], c: &[T]) -> Result<ButcherTableau<T>, ConstructError> {
    check_lengths(b, c)?;
    let d = denominators(b, c)?;
    let rows = recursive_rows(b, c, &d);
    let direct = direct_rows(b, c, &d);
    for (k, (r, o)) in rows.iter().zip(&direct).enumerate() {
        for (j, (x, y)) in r.iter().zip(o).enumerate() {
            if !x.near(y) {
                return Err(ConstructError::Internal(format!(
                    "recursive and direct a[{}][{}] differ: {x} vs {y}",
                    k + 2,
                    j + 1
                )));
            }
        }
    }
    ButcherTableau::new(c.to_vec(), rows, b.to_vec()).map_err(|e| ConstructError::Inadmissible(e.to_string()))
}

/// Only the non-recursive product form.
pub fn derive_a_from_bc_direct<T: Scalar>(b: &[T], c: &[T]) -> Result<ButcherTableau<T>, ConstructError> {
    check_lengths(b, c)?;
    let d = denominators(b, c)?;
    Ok(ButcherTableau::new_unchecked(c.to_vec(), direct_rows(b, c, &d), b.to_vec()))
}

/// A, B straight from `b` and `c` (with `b_0 = 0`, `c_{s+1} = 1`):
/// `A_i = (b_{i-1}/b_i) (S_{i-1} - c_i) / (S_{i-1} - c_{i-1})`,
/// `B_i = b_i (c_{i+1} - c_i) / (S_i - c_i)`, `B_s = b_s`.
#[allow(non_snake_case)]
pub fn derive_AB_from_bc<T: Scalar>(b: &[T], c: &[T]) -> Result<LowStorageForm<T>, ConstructError> {
    check_lengths(b, c)?;
    let s = b.len();
    let sums = partial_sums(b);
    let zero = b[0].zero_like();
    let mut a = vec![zero];
    for i in 2..=s {
        let den = b[i - 1].clone() * (sums[i - 2].clone() - c[i - 2].clone());
        if den.is_negligible() {
            let index = if b[i - 1].is_negligible() { i } else { i - 1 };
            return Err(ConstructError::SpecialCase {
                index,
                message: format!("denominator of A_{i} vanishes"),
            });
        }
        a.push(b[i - 2].clone() * (sums[i - 2].clone() - c[i - 1].clone()) / den);
    }
    let mut bb = Vec::with_capacity(s);
    for i in 1..s {
        let den = sums[i - 1].clone() - c[i - 1].clone();
        if den.is_negligible() {
            return Err(ConstructError::SpecialCase {
                index: i,
                message: format!("denominator of B_{i} vanishes"),
            });
        }
        bb.push(b[i - 1].clone() * (c[i].clone() - c[i - 1].clone()) / den);
    }
    // B_s = a_{s+1,s} = b_s
    bb.push(b[s - 1].clone());
    LowStorageForm::new(a, bb).map_err(|e| ConstructError::SpecialCase {
        index: 0,
        message: e.to_string(),
    })
}

/// Tableau with every `A_i = -1` (`i >= 2`): `a_ij = b_j + (-1)^{i-j+1} b_i`.
pub fn family_a_minus_one<T: Scalar>(b: &[T]) -> Result<ButcherTableau<T>, ConstructError> {
    if b.len() < 2 {
        return Err(ConstructError::Inadmissible("at least two weights are needed".into()));
    }
    let s = b.len();
    let rows = (2..=s)
        .map(|i| {
            (1..i)
                .map(|j| {
                    if (i - j) % 2 == 1 {
                        b[j - 1].clone() + b[i - 1].clone()
                    } else {
                        b[j - 1].clone() - b[i - 1].clone()
                    }
                })
                .collect()
        })
        .collect();
    ButcherTableau::from_rows(rows, b.to_vec()).map_err(|e| ConstructError::Inadmissible(e.to_string()))
}

/// Third-order and 2N checks required of every solver output.
pub fn validate_third_order<T: Scalar>(t: &ButcherTableau<T>) -> Result<LowStorageForm<T>, ConstructError> {
    let r = order_residuals(t, 3).expect("order in range");
    if !r.all_zero() {
        return Err(ConstructError::Internal(format!("order conditions violated:\n{r}")));
    }
    let r = two_n_residuals(t);
    if !r.all_zero() {
        return Err(ConstructError::Internal(format!("2N conditions violated:\n{r}")));
    }
    match is_two_n_storage(t) {
        (true, Some(ls)) => Ok(ls),
        _ => Err(ConstructError::SpecialCase {
            index: 0,
            message: "solution has a vanishing alpha or beta; not a 2N-storage method".into(),
        }),
    }
}

pub(crate) fn build_scheme<T: CoefficientType>(
    name: String,
    provenance: String,
    b: &[T],
    c: &[T],
) -> Result<Scheme, ConstructError> {
    let t = derive_a_from_bc(b, c)?;
    let ls = validate_third_order(&t)?;
    Scheme::from_forms(name, 3, provenance, t, Some(ls)).map_err(|e| ConstructError::Internal(e.to_string()))
}

pub(crate) fn param_tag(v: &[&Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("_")
}

/// Name suffix for root `k` when the quadratic has two real roots.
pub(crate) fn root_suffix(roots: &[Root], k: usize) -> String {
    if roots.len() > 1 {
        format!("-root{k}")
    } else {
        String::new()
    }
}

pub(crate) fn require(cond: bool, what: &str) -> Result<(), ConstructError> {
    if cond {
        Ok(())
    } else {
        Err(ConstructError::Denominator(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::a_to_lowstorage;
    use crate::numerics::q;
    use crate::schemes::registry_get;

    fn bc(name: &str) -> (Vec<Rational>, Vec<Rational>) {
        let s = registry_get(name).unwrap();
        let t = s.rational_tableau();
        (t.weights().to_vec(), t.nodes().to_vec())
    }

    #[test]
    fn rebuild_registry_tableaux() {
        for name in ["43-1", "43-2", "43-3", "43-4", "53-1", "53-2", "53-3", "53-4"] {
            let (b, c) = bc(name);
            let t = derive_a_from_bc(&b, &c).unwrap();
            assert_eq!(&t, registry_get(name).unwrap().rational_tableau(), "{name}");
            let ls = derive_AB_from_bc(&b, &c).unwrap();
            assert_eq!(Some(&ls), registry_get(name).unwrap().as_rational().unwrap().low_storage.as_ref(), "{name}");
        }
    }

    #[test]
    fn forward_euler_from_bc() {
        let t = derive_a_from_bc(&[q(1, 1)], &[q(0, 1)]).unwrap();
        assert!(t.lower_rows().is_empty());
        let ls = derive_AB_from_bc(&[q(1, 1)], &[q(0, 1)]).unwrap();
        assert_eq!(ls.a_coeffs(), &[q(0, 1)]);
        assert_eq!(ls.b_coeffs(), &[q(1, 1)]);
    }

    #[test]
    fn special_case_is_named() {
        // b1 + b2 = c2 makes D_2 vanish
        let err = derive_a_from_bc(&[q(1, 4), q(1, 4), q(1, 2)], &[q(0, 1), q(1, 2), q(3, 4)]).unwrap_err();
        assert_eq!(
            err,
            ConstructError::SpecialCase {
                index: 2,
                message: "b_1 + ... + b_2 - c_2 vanishes".into()
            }
        );
    }

    #[test]
    fn heun_is_the_two_stage_member() {
        let t = family_a_minus_one(&[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(t.a(2, 1), q(1, 1));
        assert_eq!(t.c(2), q(1, 1));
        assert_eq!(*a_to_lowstorage(&t).unwrap().coeff_a(2), q(-1, 1));
    }

    #[test]
    fn three_stage_family_pattern() {
        let (b1, b2, b3) = (q(1, 5), q(1, 3), q(2, 7));
        let t = family_a_minus_one(&[b1.clone(), b2.clone(), b3.clone()]).unwrap();
        assert_eq!(t.a(3, 1), &b1 - &b3);
        assert_eq!(t.a(3, 2), &b2 + &b3);
        assert_eq!(t.c(2), &b1 + &b2);
        assert_eq!(t.c(3), &b1 + &b2);
        let ls = a_to_lowstorage(&t).unwrap();
        assert_eq!(ls.a_coeffs()[1..], [q(-1, 1), q(-1, 1)]);
    }

    #[test]
    fn even_family_ends_at_one() {
        let b = [q(1, 10), q(1, 5), q(3, 10), q(2, 5)];
        let t = family_a_minus_one(&b).unwrap();
        assert_eq!(t.c(4), q(1, 1));
        assert_eq!(t.c(3), q(3, 10));
    }
}
