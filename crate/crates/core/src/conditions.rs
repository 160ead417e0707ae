//! Order conditions through order 4, the 2N-storage constraints and the
//! stability-polynomial coefficients.

use std::fmt;

use thiserror::Error;

use crate::convert::{a_to_alpha, a_to_lowstorage};
use crate::numerics::{q, Rational, Scalar};
use crate::schemes::{ButcherTableau, LowStorageForm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionsError {
    #[error("order must be between 1 and 4, got {0}")]
    Order(u32),
}

/// Named residuals `lhs - rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport<T> {
    pub entries: Vec<(String, T)>,
}

impl<T: Scalar> ResidualReport<T> {
    /// Largest `|residual|`, or `None` for an empty report.
    pub fn max_abs(&self) -> Option<T> {
        self.entries.iter().map(|(_, r)| r.abs()).fold(None, |m, x| match m {
            Some(m) if m >= x => Some(m),
            _ => Some(x),
        })
    }

    /// Whether every residual vanishes (exactly for rationals).
    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|(_, r)| r.is_negligible())
    }

    pub fn get(&self, id: &str) -> Option<&T> {
        self.entries.iter().find(|(k, _)| k == id).map(|(_, v)| v)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn extend(&mut self, other: ResidualReport<T>) {
        self.entries.extend(other.entries);
    }
}

impl<T: fmt::Display> fmt::Display for ResidualReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, r) in &self.entries {
            writeln!(f, "{id} {r}")?;
        }
        Ok(())
    }
}

/// Order condition ids in evaluation order, with their order and right-hand side.
pub const ORDER_CONDITIONS: [(&str, u32, i64, i64); 8] = [
    ("order1:b", 1, 1, 1),
    ("order2:bc", 2, 1, 2),
    ("order3:bc2", 3, 1, 3),
    ("order3:bac", 3, 1, 6),
    ("order4:bc3", 4, 1, 4),
    ("order4:bcac", 4, 1, 8),
    ("order4:bac2", 4, 1, 12),
    ("order4:baac", 4, 1, 24),
];

/// Number of order conditions through order `p`.
pub fn condition_count(p: u32) -> usize {
    ORDER_CONDITIONS.iter().filter(|c| c.1 <= p).count()
}

/// `(A c)_i = sum_j a_ij c_j` over stages 1..s.
fn apply<T: Scalar>(t: &ButcherTableau<T>, v: &[T]) -> Vec<T> {
    let s = t.stages();
    (1..=s)
        .map(|i| (1..i).fold(v[0].zero_like(), |acc, j| acc + t.a(i, j) * v[j - 1].clone()))
        .collect()
}

fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(x[0].zero_like(), |acc, (a, b)| acc + a.clone() * b.clone())
}

fn hadamard<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.clone() * b.clone()).collect()
}

pub fn order_residuals<T: Scalar>(t: &ButcherTableau<T>, p: u32) -> Result<ResidualReport<T>, ConditionsError> {
    if !(1..=4).contains(&p) {
        return Err(ConditionsError::Order(p));
    }
    let b = t.weights();
    let c = t.nodes();
    let ones: Vec<T> = c.iter().map(|x| x.one_like()).collect();
    let c2 = hadamard(c, c);
    let ac = apply(t, c);
    let lhs = |id: &str| -> T {
        match id {
            "order1:b" => dot(b, &ones),
            "order2:bc" => dot(b, c),
            "order3:bc2" => dot(b, &c2),
            "order3:bac" => dot(b, &ac),
            "order4:bc3" => dot(b, &hadamard(&c2, c)),
            "order4:bcac" => dot(&hadamard(b, c), &ac),
            "order4:bac2" => dot(b, &apply(t, &c2)),
            "order4:baac" => dot(b, &apply(t, &ac)),
            _ => unreachable!(),
        }
    };
    let entries = ORDER_CONDITIONS
        .iter()
        .filter(|e| e.1 <= p)
        .map(|&(id, _, n, d)| {
            let l = lhs(id);
            let rhs = l.lift(&q(n, d));
            (id.to_string(), l - rhs)
        })
        .collect();
    Ok(ResidualReport { entries })
}

/// Residuals of `a_ij (b_{j-1} - a_{j,j-1}) - (a_{i,j-1} - a_{j,j-1}) b_j`
/// for `i = 3..s`, `j = 2..i-1`.
pub fn two_n_residuals<T: Scalar>(t: &ButcherTableau<T>) -> ResidualReport<T> {
    let s = t.stages();
    let mut entries = Vec::new();
    for i in 3..=s {
        for j in 2..i {
            let r = t.a(i, j) * (t.b(j - 1).clone() - t.a(j, j - 1))
                - (t.a(i, j - 1) - t.a(j, j - 1)) * t.b(j).clone();
            entries.push((format!("2n:i{i}j{j}"), r));
        }
    }
    ResidualReport { entries }
}

/// Classify a tableau; on success also return its A, B.
///
/// Requires vanishing 2N residuals, nonzero alpha and beta, and the ratio
/// identities `alpha_ij beta_{j+1} = alpha_{i,j+1} beta_j`.
pub fn is_two_n_storage<T: Scalar>(t: &ButcherTableau<T>) -> (bool, Option<LowStorageForm<T>>) {
    if !two_n_residuals(t).all_zero() {
        return (false, None);
    }
    let f = a_to_alpha(t);
    if !f.all_nonzero() {
        return (false, None);
    }
    let s = t.stages();
    for j in 1..s {
        for i in j + 2..=s + 1 {
            let lhs = f.alpha(i, j) * f.beta(j + 1).clone();
            let rhs = f.alpha(i, j + 1) * f.beta(j).clone();
            if !lhs.near(&rhs) {
                return (false, None);
            }
        }
    }
    match a_to_lowstorage(t) {
        Ok(ls) => (true, Some(ls)),
        Err(_) => (false, None),
    }
}

/// Stability-polynomial coefficients `gamma_k = b . a^(k-1) . 1`, `k = 1..s`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCoeffs<T> {
    pub gamma: Vec<T>,
}

pub fn linear_coeffs<T: Scalar>(t: &ButcherTableau<T>) -> LinearCoeffs<T> {
    let b = t.weights();
    let mut v: Vec<T> = b.iter().map(|x| x.one_like()).collect();
    let mut gamma = Vec::with_capacity(b.len());
    for _ in 0..b.len() {
        gamma.push(dot(b, &v));
        v = apply(t, &v);
    }
    LinearCoeffs { gamma }
}

impl LinearCoeffs<Rational> {
    /// Whether `gamma_k = 1/k!` for `k = 1..=upto` (all present terms if shorter).
    pub fn matches_exponential(&self, upto: usize) -> bool {
        let mut fact = Rational::one();
        for (k, g) in self.gamma.iter().enumerate().take(upto) {
            fact = fact * Rational::from((k + 1) as i64);
            if *g != fact.recip() {
                return false;
            }
        }
        true
    }
}
