//! The three representations of an explicit method.
//!
//! Indices in method names and error messages are 1-based stage numbers.
//! Storage is 0-based: the strict lower triangle is kept as one row per stage
//! after the first, so `rows[i - 2][j - 1]` holds `a_{ij}`.

use crate::convert;
use crate::numerics::{Rational, Scalar};

use super::SchemeError;

/// Standard Butcher tableau of an explicit method (the a-form).
#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau<T> {
    c: Vec<T>,
    rows: Vec<Vec<T>>,
    b: Vec<T>,
}

fn check_shape<T>(c: &[T], rows: &[Vec<T>], b: &[T]) -> Result<(), SchemeError> {
    let s = b.len();
    if s == 0 {
        return Err(SchemeError::Shape {
            field: "b".into(),
            message: "a method needs at least one stage".into(),
        });
    }
    if c.len() != s {
        return Err(SchemeError::Shape {
            field: "c".into(),
            message: format!("expected {s} nodes, found {}", c.len()),
        });
    }
    if rows.len() != s - 1 {
        return Err(SchemeError::Shape {
            field: "a".into(),
            message: format!("expected {} rows (stages 2..{s}), found {}", s - 1, rows.len()),
        });
    }
    for (k, row) in rows.iter().enumerate() {
        let stage = k + 2;
        if row.len() != stage - 1 {
            return Err(SchemeError::NonTriangular {
                row: stage,
                expected: stage - 1,
                found: row.len(),
            });
        }
    }
    Ok(())
}

impl<T: Scalar> ButcherTableau<T> {
    /// Build and validate: shapes, `c_1 = 0`, and `c_i = sum_j a_ij`.
    pub fn new(c: Vec<T>, rows: Vec<Vec<T>>, b: Vec<T>) -> Result<Self, SchemeError> {
        check_shape(&c, &rows, &b)?;
        let t = ButcherTableau { c, rows, b };
        t.check_consistency()?;
        Ok(t)
    }

    /// Build with `c` taken from the row sums.
    pub fn from_rows(rows: Vec<Vec<T>>, b: Vec<T>) -> Result<Self, SchemeError> {
        let zero = b
            .first()
            .map(|x| x.zero_like())
            .ok_or_else(|| SchemeError::Shape {
                field: "b".into(),
                message: "a method needs at least one stage".into(),
            })?;
        let mut c = vec![zero.clone()];
        c.extend(rows.iter().map(|row| row.iter().cloned().fold(zero.clone(), |acc, x| acc + x)));
        check_shape(&c, &rows, &b)?;
        Ok(ButcherTableau { c, rows, b })
    }

    /// No validation at all. Only for negative tests and demonstrations.
    pub fn new_unchecked(c: Vec<T>, rows: Vec<Vec<T>>, b: Vec<T>) -> Self {
        ButcherTableau { c, rows, b }
    }

    fn check_consistency(&self) -> Result<(), SchemeError> {
        if !self.c[0].is_negligible() {
            return Err(SchemeError::NotExplicit {
                c1: self.c[0].to_string(),
            });
        }
        for (k, row) in self.rows.iter().enumerate() {
            let sum = row.iter().cloned().fold(self.c[0].zero_like(), |acc, x| acc + x);
            if !sum.near(&self.c[k + 1]) {
                return Err(SchemeError::Inconsistent {
                    row: k + 2,
                    node: self.c[k + 1].to_string(),
                    row_sum: sum.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `a_{ij}` with 1-based indices; zero on and above the diagonal, and
    /// the virtual row `a_{s+1,j} = b_j`.
    pub fn a(&self, i: usize, j: usize) -> T {
        let s = self.stages();
        assert!((1..=s + 1).contains(&i) && (1..=s).contains(&j), "a({i},{j}) out of range");
        if i == s + 1 {
            self.b[j - 1].clone()
        } else if j >= i {
            self.b[0].zero_like()
        } else {
            self.rows[i - 2][j - 1].clone()
        }
    }

    pub fn b(&self, i: usize) -> &T {
        &self.b[i - 1]
    }

    /// `c_i` with 1-based index; `c_{s+1} = 1`.
    pub fn c(&self, i: usize) -> T {
        if i == self.stages() + 1 {
            self.b[0].one_like()
        } else {
            self.c[i - 1].clone()
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.c
    }

    pub fn weights(&self) -> &[T] {
        &self.b
    }

    /// Rows of the strict lower triangle for stages `2..=s`.
    pub fn lower_rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> ButcherTableau<U> {
        ButcherTableau {
            c: self.c.iter().map(&f).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            b: self.b.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> ButcherTableau<f64> {
        self.map(|x| x.to_f64())
    }

    /// Whether every entry of `self` is `near` the matching entry of `other`.
    pub fn near(&self, other: &ButcherTableau<T>) -> bool {
        self.stages() == other.stages()
            && self.c.iter().zip(&other.c).all(|(x, y)| x.near(y))
            && self.b.iter().zip(&other.b).all(|(x, y)| x.near(y))
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(r, o)| r.iter().zip(o).all(|(x, y)| x.near(y)))
    }

    /// First entry (by stage, then column) where `self` and `other` differ.
    pub fn first_difference(&self, other: &ButcherTableau<T>) -> Option<String> {
        if self.stages() != other.stages() {
            return Some(format!("stage count {} vs {}", self.stages(), other.stages()));
        }
        for (k, (r, o)) in self.rows.iter().zip(&other.rows).enumerate() {
            for (j, (x, y)) in r.iter().zip(o).enumerate() {
                if !x.near(y) {
                    return Some(format!("a[{}][{}]: {x} vs {y}", k + 2, j + 1));
                }
            }
        }
        for (i, (x, y)) in self.b.iter().zip(&other.b).enumerate() {
            if !x.near(y) {
                return Some(format!("b[{}]: {x} vs {y}", i + 1));
            }
        }
        for (i, (x, y)) in self.c.iter().zip(&other.c).enumerate() {
            if !x.near(y) {
                return Some(format!("c[{}]: {x} vs {y}", i + 1));
            }
        }
        None
    }
}

impl ButcherTableau<Rational> {
    /// Parse from rational text entries; rows for stages `2..=s`.
    pub fn parse(c: &[&str], rows: &[&[&str]], b: &[&str]) -> Result<Self, SchemeError> {
        let p = |field: String, s: &str| {
            s.parse::<Rational>().map_err(|e| SchemeError::Parse {
                field,
                message: e.to_string(),
            })
        };
        let c = c
            .iter()
            .enumerate()
            .map(|(i, s)| p(format!("c[{}]", i + 1), s))
            .collect::<Result<Vec<_>, _>>()?;
        let b = b
            .iter()
            .enumerate()
            .map(|(i, s)| p(format!("b[{}]", i + 1), s))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(k, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| p(format!("a[{}][{}]", k + 2, j + 1), s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        ButcherTableau::new(c, rows, b)
    }
}

/// Stage-to-stage increments: `y_i = y_{i-1} + h sum_j alpha_ij k_j`, with
/// the last update weighted by `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaForm<T> {
    rows: Vec<Vec<T>>,
    beta: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> AlphaForm<T> {
    pub fn new(c: Vec<T>, rows: Vec<Vec<T>>, beta: Vec<T>) -> Result<Self, SchemeError> {
        check_shape(&c, &rows, &beta)?;
        Ok(AlphaForm { rows, beta, c })
    }

    pub fn stages(&self) -> usize {
        self.beta.len()
    }

    /// `alpha_{ij}` with 1-based indices, zero for `j >= i`, and
    /// `alpha_{s+1,j} = beta_j`.
    pub fn alpha(&self, i: usize, j: usize) -> T {
        let s = self.stages();
        if i == s + 1 {
            self.beta[j - 1].clone()
        } else if j >= i {
            self.beta[0].zero_like()
        } else {
            self.rows[i - 2][j - 1].clone()
        }
    }

    pub fn beta(&self, i: usize) -> &T {
        &self.beta[i - 1]
    }

    pub fn betas(&self) -> &[T] {
        &self.beta
    }

    pub fn lower_rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn nodes(&self) -> &[T] {
        &self.c
    }

    /// Whether every `alpha_ij` and `beta_i` is nonzero.
    pub fn all_nonzero(&self) -> bool {
        self.rows.iter().flatten().chain(&self.beta).all(|x| !x.is_negligible())
    }
}

/// Williamson two-register coefficients (the A-form).
///
/// Stage `i` updates `dy <- A_i dy + h f(t + c_i h, y)` then `y <- y + B_i dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowStorageForm<T> {
    a: Vec<T>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> LowStorageForm<T> {
    /// Validate `A_1 = 0`, all `B_i != 0`, and derive `c` from the
    /// reconstructed tableau.
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self, SchemeError> {
        let s = b.len();
        if s == 0 || a.len() != s {
            return Err(SchemeError::Shape {
                field: "A".into(),
                message: format!("A and B must have the same nonzero length ({} vs {s})", a.len()),
            });
        }
        if !a[0].is_negligible() {
            return Err(SchemeError::InvalidForm(format!(
                "A[1] must be 0 for a self-starting method, found {}",
                a[0]
            )));
        }
        if let Some(i) = b.iter().position(|x| x.is_negligible()) {
            return Err(SchemeError::InvalidForm(format!("B[{}] must be nonzero", i + 1)));
        }
        let c = convert::nodes_from_lowstorage(&a, &b);
        Ok(LowStorageForm { a, b, c })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `A_i`, 1-based.
    pub fn coeff_a(&self, i: usize) -> &T {
        &self.a[i - 1]
    }

    /// `B_i`, 1-based.
    pub fn coeff_b(&self, i: usize) -> &T {
        &self.b[i - 1]
    }

    pub fn a_coeffs(&self) -> &[T] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[T] {
        &self.b
    }

    pub fn nodes(&self) -> &[T] {
        &self.c
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LowStorageForm<U> {
        LowStorageForm {
            a: self.a.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
            c: self.c.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> LowStorageForm<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn near(&self, other: &LowStorageForm<T>) -> bool {
        self.stages() == other.stages()
            && self.a.iter().zip(&other.a).all(|(x, y)| x.near(y))
            && self.b.iter().zip(&other.b).all(|(x, y)| x.near(y))
    }
}

impl LowStorageForm<Rational> {
    pub fn parse(a: &[&str], b: &[&str]) -> Result<Self, SchemeError> {
        let p = |name: &str, v: &[&str]| {
            v.iter()
                .enumerate()
                .map(|(i, s)| {
                    s.parse::<Rational>().map_err(|e| SchemeError::Parse {
                        field: format!("{name}[{}]", i + 1),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        LowStorageForm::new(p("A", a)?, p("B", b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn heun() -> ButcherTableau<Rational> {
        ButcherTableau::parse(&["0", "1"], &[&["1"]], &["1/2", "1/2"]).unwrap()
    }

    #[test]
    fn virtual_row_and_node() {
        let t = heun();
        assert_eq!(t.a(3, 1), q(1, 2));
        assert_eq!(t.a(3, 2), q(1, 2));
        assert_eq!(t.c(3), q(1, 1));
        assert_eq!(t.a(1, 1), q(0, 1));
        assert_eq!(t.a(2, 1), q(1, 1));
    }

    #[test]
    fn rejects_inconsistent_nodes() {
        let err = ButcherTableau::parse(&["0", "1/2"], &[&["1/3"]], &["1/2", "1/2"]).unwrap_err();
        assert!(matches!(err, SchemeError::Inconsistent { row: 2, .. }), "{err}");
        assert!(err.to_string().contains("self-consistency"));
    }

    #[test]
    fn rejects_bad_shapes() {
        let err = ButcherTableau::parse(&["0", "1"], &[&["1", "0"]], &["1/2", "1/2"]).unwrap_err();
        assert!(matches!(err, SchemeError::NonTriangular { row: 2, expected: 1, found: 2 }));
        let err = ButcherTableau::parse(&["0"], &[&["1"]], &["1/2", "1/2"]).unwrap_err();
        assert!(matches!(err, SchemeError::Shape { .. }));
        let err = ButcherTableau::parse(&["1/2", "1"], &[&["1/2"]], &["1/2", "1/2"]).unwrap_err();
        assert!(matches!(err, SchemeError::NotExplicit { .. }));
    }

    #[test]
    fn unchecked_keeps_bad_data() {
        let t = ButcherTableau::new_unchecked(vec![q(0, 1), q(1, 2)], vec![vec![q(1, 3)]], vec![q(1, 2), q(1, 2)]);
        assert_eq!(t.c(2), q(1, 2));
        assert_eq!(t.a(2, 1), q(1, 3));
    }

    #[test]
    fn lowstorage_validation() {
        assert!(LowStorageForm::parse(&["1/2"], &["1"]).is_err());
        assert!(LowStorageForm::parse(&["0", "-1"], &["1", "0"]).is_err());
        let euler = LowStorageForm::parse(&["0"], &["1"]).unwrap();
        assert_eq!(euler.nodes(), &[q(0, 1)]);
    }
}
