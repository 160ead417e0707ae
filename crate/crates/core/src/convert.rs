//! Conversions between the a-, alpha- and A-forms.

use thiserror::Error;

use crate::numerics::Scalar;
use crate::schemes::{AlphaForm, ButcherTableau, LowStorageForm, SchemeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("not a 2N-storage method (index {index}): {reason}")]
    NotTwoN { index: usize, reason: String },
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}

impl From<SchemeError> for ConvertError {
    fn from(e: SchemeError) -> Self {
        ConvertError::Inconsistent(e.to_string())
    }
}

/// `alpha_ij = a_ij - a_{i-1,j}`, `beta_i = b_i - a_{s,i}`.
pub fn a_to_alpha<T: Scalar>(t: &ButcherTableau<T>) -> AlphaForm<T> {
    let s = t.stages();
    let rows = (2..=s)
        .map(|i| (1..i).map(|j| t.a(i, j) - t.a(i - 1, j)).collect())
        .collect();
    let beta = (1..=s).map(|i| t.b(i).clone() - t.a(s, i)).collect();
    AlphaForm::new(t.nodes().to_vec(), rows, beta).expect("shapes follow the tableau")
}

/// Column partial sums: `a_ij = sum_{k=j+1..i} alpha_kj`, `b_i = beta_i + sum_{k>i} alpha_ki`.
pub fn alpha_to_a<T: Scalar>(f: &AlphaForm<T>) -> Result<ButcherTableau<T>, ConvertError> {
    let s = f.stages();
    let zero = f.beta(1).zero_like();
    let col_sum = |i: usize, j: usize| (j + 1..=i).fold(zero.clone(), |acc, k| acc + f.alpha(k, j));
    let rows: Vec<Vec<T>> = (2..=s).map(|i| (1..i).map(|j| col_sum(i, j)).collect()).collect();
    let b = (1..=s).map(|i| f.beta(i).clone() + col_sum(s, i)).collect();
    let t = ButcherTableau::from_rows(rows, b)?;
    for (i, (x, y)) in t.nodes().iter().zip(f.nodes()).enumerate() {
        if !x.near(y) {
            return Err(ConvertError::Inconsistent(format!(
                "row {} of the reconstructed tableau sums to {x}, node is {y}",
                i + 1
            )));
        }
    }
    Ok(t)
}

fn not_2n(index: usize, reason: impl Into<String>) -> ConvertError {
    ConvertError::NotTwoN {
        index,
        reason: reason.into(),
    }
}

/// Correct mapping to A, B.
///
/// `B_i = a_{i+1,i}` (with `a_{s+1,i} = b_i`), `A_i = beta_{i-1} / beta_i`.
/// Every alternative ratio `(a_{k,i-1} - a_{k-1,i-1}) / (a_{ki} - a_{k-1,i})`,
/// `k = i+1..s+1`, must agree, and the result must map back to `t`.
pub fn a_to_lowstorage<T: Scalar>(t: &ButcherTableau<T>) -> Result<LowStorageForm<T>, ConvertError> {
    let s = t.stages();
    let alpha = a_to_alpha(t);
    let zero = t.b(1).zero_like();
    let mut a = vec![zero];
    for i in 2..=s {
        let (num, den) = (alpha.beta(i - 1).clone(), alpha.beta(i).clone());
        if den.is_negligible() {
            return Err(not_2n(i, format!("b[{i}] - a[{s}][{i}] vanishes")));
        }
        if num.is_negligible() {
            return Err(not_2n(i, format!("A[{i}] would vanish")));
        }
        let ai = num / den;
        for k in i + 1..=s + 1 {
            let (n, d) = (alpha.alpha(k, i - 1), alpha.alpha(k, i));
            if d.is_negligible() {
                return Err(not_2n(i, format!("a[{k}][{i}] - a[{}][{i}] vanishes", k - 1)));
            }
            let alt = n / d;
            if !alt.near(&ai) {
                return Err(not_2n(i, format!("A[{i}] = {ai} but the ratio from row {k} gives {alt}")));
            }
        }
        a.push(ai);
    }
    let b: Vec<T> = (1..=s).map(|i| t.a(i + 1, i)).collect();
    if let Some(i) = b.iter().position(|x| x.is_negligible()) {
        return Err(not_2n(i + 1, format!("B[{}] vanishes", i + 1)));
    }
    let ls = LowStorageForm::new(a, b).map_err(|e| not_2n(0, e.to_string()))?;
    if let Some(diff) = lowstorage_to_a(&ls).first_difference(t) {
        return Err(not_2n(0, format!("A, B do not reproduce the tableau ({diff})")));
    }
    Ok(ls)
}

/// Recursive inverse: `a_{i,i-1} = B_{i-1}`, `a_ij = A_{j+1} a_{i,j+1} + B_j`,
/// with row `s+1` giving `b`.
pub fn lowstorage_to_a<T: Scalar>(f: &LowStorageForm<T>) -> ButcherTableau<T> {
    let (rows, b) = recursive_rows(f.a_coeffs(), f.b_coeffs());
    ButcherTableau::from_rows(rows, b).expect("shapes follow A, B")
}

fn recursive_rows<T: Scalar>(a: &[T], b: &[T]) -> (Vec<Vec<T>>, Vec<T>) {
    let s = b.len();
    let row = |i: usize| {
        // stage i in 2..=s+1, columns 1..i-1
        let mut r = vec![b[0].zero_like(); i - 1];
        r[i - 2] = b[i - 2].clone();
        for j in (1..i - 1).rev() {
            r[j - 1] = a[j].clone() * r[j].clone() + b[j - 1].clone();
        }
        r
    };
    let rows = (2..=s).map(row).collect();
    let weights = row(s + 1);
    (rows, weights)
}

/// Product-sum inverse: `a_ij = sum_{k=j..i-1} B_k prod_{l=j+1..k} A_l`.
pub fn lowstorage_to_a_direct<T: Scalar>(f: &LowStorageForm<T>) -> ButcherTableau<T> {
    let (a, b) = (f.a_coeffs(), f.b_coeffs());
    let s = b.len();
    let entry = |i: usize, j: usize| {
        let mut sum = b[0].zero_like();
        for k in j..i {
            let prod = (j + 1..=k).fold(b[0].one_like(), |p, l| p * a[l - 1].clone());
            sum = sum + b[k - 1].clone() * prod;
        }
        sum
    };
    let rows = (2..=s).map(|i| (1..i).map(|j| entry(i, j)).collect()).collect();
    let weights = (1..=s).map(|j| entry(s + 1, j)).collect();
    ButcherTableau::from_rows(rows, weights).expect("shapes follow A, B")
}

/// Nodes implied by A, B (row sums of the reconstructed tableau).
pub(crate) fn nodes_from_lowstorage<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let (rows, _) = recursive_rows(a, b);
    let zero = b[0].zero_like();
    std::iter::once(zero.clone())
        .chain(rows.into_iter().map(|r| r.into_iter().fold(zero.clone(), |acc, x| acc + x)))
        .collect()
}

/// Williamson's original mapping, reproduced as published:
/// `B_i = a_{i+1,i}`, `A_i = (b_{i-1} - B_{i-1}) / b_i` when `b_i != 0`,
/// otherwise `A_i = (a_{i+1,i-1} - c_i) / B_i`. The second branch is only
/// right for `i = 2`.
pub fn legacy_williamson<T: Scalar>(t: &ButcherTableau<T>) -> Result<LowStorageForm<T>, ConvertError> {
    let s = t.stages();
    let b: Vec<T> = (1..=s).map(|i| t.a(i + 1, i)).collect();
    if let Some(i) = b.iter().position(|x| x.is_negligible()) {
        return Err(not_2n(i + 1, format!("B[{}] vanishes", i + 1)));
    }
    let mut a = vec![t.b(1).zero_like()];
    for i in 2..=s {
        let ai = if t.b(i).is_negligible() {
            (t.a(i + 1, i - 1) - t.c(i)) / b[i - 1].clone()
        } else {
            (t.b(i - 1).clone() - b[i - 2].clone()) / t.b(i).clone()
        };
        a.push(ai);
    }
    LowStorageForm::new(a, b).map_err(|e| not_2n(0, e.to_string()))
}
