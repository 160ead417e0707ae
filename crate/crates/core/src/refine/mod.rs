//! Extended-precision residuals and a pinned Newton solver for the order
//! conditions of two-register methods.

mod dual;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::conditions::{condition_count, order_residuals, ResidualReport};
use crate::convert::lowstorage_to_a;
use crate::numerics::{ExtFloat, Scalar, MIN_PRECISION};
use crate::schemes::{ButcherTableau, Coefficients, LowStorageForm, Scheme};

pub use dual::Dual;

/// Smallest precision accepted for extended residuals.
pub const MIN_BITS: u32 = 128;
pub const MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefineError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("system is not square: {} unknowns ({}) for {equations} equations", unknowns.len(), unknowns.join(", "))]
    Dimension { unknowns: Vec<String>, equations: usize },
    #[error("singular Jacobian: {0}")]
    Singular(String),
    #[error("no convergence after {} iterations; max residual history: {}", history.len() - 1, history.join(", "))]
    Convergence { history: Vec<String> },
    #[error("{0}")]
    Scheme(String),
}

fn check_bits(bits: u32) -> Result<(), RefineError> {
    if bits < MIN_BITS {
        return Err(RefineError::Argument(format!("precision {bits} bits is below the minimum of {MIN_BITS}")));
    }
    Ok(())
}

/// The scheme's coefficients as `bits`-bit floats. Decimal coefficients are
/// re-read from their shortest decimal text so that printed digits are not
/// limited by the precision they were stored at.
pub fn tableau_at(scheme: &Scheme, bits: u32) -> Result<ButcherTableau<ExtFloat>, RefineError> {
    check_bits(bits)?;
    Ok(match &scheme.coefficients {
        Coefficients::Rational(f) => match &f.low_storage {
            Some(ls) => lowstorage_to_a(&ls.map(|x| ExtFloat::from_rational(x, bits))),
            None => f.tableau.map(|x| ExtFloat::from_rational(x, bits)),
        },
        Coefficients::Decimal(f) => match &f.low_storage {
            Some(ls) => lowstorage_to_a(&ls.map(|x| x.reparse(bits))),
            None => f.tableau.map(|x| x.reparse(bits)),
        },
    })
}

/// Order conditions through `order` evaluated with `bits`-bit arithmetic.
pub fn residuals_extended(scheme: &Scheme, order: u32, bits: u32) -> Result<ResidualReport<ExtFloat>, RefineError> {
    let t = tableau_at(scheme, bits)?;
    order_residuals(&t, order).map_err(|e| RefineError::Argument(e.to_string()))
}

/// Six significant digits plus the number of bits to which the residual
/// vanishes (`-log2 |r|`).
pub fn format_report(r: &ResidualReport<ExtFloat>) -> String {
    let mut s = String::new();
    for (id, v) in &r.entries {
        let bits = match v.log2_floor() {
            None => "exact zero".to_string(),
            Some(e) => format!("~{} bits", -e),
        };
        s.push_str(&format!("{id} {} [{bits}]\n", v.to_sci_digits(6)));
    }
    s
}

/// Parameter names of an `s`-stage two-register method: `A2..As, B1..Bs`.
pub fn parameter_names(s: usize) -> Vec<String> {
    (2..=s).map(|i| format!("A{i}")).chain((1..=s).map(|i| format!("B{i}"))).collect()
}

pub fn parameter_values<T: Scalar>(f: &LowStorageForm<T>) -> Vec<T> {
    f.a_coeffs()[1..].iter().chain(f.b_coeffs()).cloned().collect()
}

/// Residual vector with the unknowns as independent dual variables.
fn residual_duals(all: &[ExtFloat], unknown_idx: &[usize], order: u32) -> Result<Vec<Dual>, RefineError> {
    let n = unknown_idx.len();
    let s = (all.len() + 1) / 2;
    let vars: Vec<Dual> = all
        .iter()
        .enumerate()
        .map(|(k, v)| match unknown_idx.iter().position(|&u| u == k) {
            Some(pos) => Dual::variable(v.clone(), pos, n),
            None => Dual::constant(v.clone()),
        })
        .collect();
    let zero = vars[0].zero_like();
    let a: Vec<Dual> = std::iter::once(zero).chain(vars[..s - 1].iter().cloned()).collect();
    let b = vars[s - 1..].to_vec();
    let ls = LowStorageForm::new(a, b).map_err(|e| RefineError::Scheme(e.to_string()))?;
    let r = order_residuals(&lowstorage_to_a(&ls), order).map_err(|e| RefineError::Argument(e.to_string()))?;
    Ok(r.entries.into_iter().map(|(_, v)| v).collect())
}

fn max_abs(v: &[ExtFloat]) -> ExtFloat {
    v.iter().map(|x| x.abs()).fold(ExtFloat::zero(v[0].precision()), |m, x| if x > m { x } else { m })
}

/// Solve `m x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut m: Vec<Vec<ExtFloat>>, mut rhs: Vec<ExtFloat>, bits: u32) -> Result<Vec<ExtFloat>, RefineError> {
    let n = rhs.len();
    let scale = m.iter().flat_map(|r| r.iter()).map(|x| x.abs()).fold(ExtFloat::zero(bits), |a, x| if x > a { x } else { a });
    let Some(top) = scale.log2_floor() else {
        return Err(RefineError::Singular("zero matrix".into()));
    };
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).expect("ordered"))
            .expect("nonempty");
        match m[piv][col].log2_floor() {
            Some(e) if e > top - (bits as i64 - 20) => {}
            _ => return Err(RefineError::Singular(format!("pivot {col} vanishes relative to the matrix scale"))),
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = &m[r][c] - &(&f * &m[col][c]);
                m[r][c] = v;
            }
            let v = &rhs[r] - &(&f * &rhs[col]);
            rhs[r] = v;
        }
    }
    let mut x = vec![ExtFloat::zero(bits); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc = &acc - &(&m[r][c] * &x[c]);
        }
        x[r] = &acc / &m[r][r];
    }
    Ok(x)
}

/// Pinned square system: unknown names, equation count and the fixed values.
#[derive(Clone, Debug)]
pub struct PinnedSystem {
    pub names: Vec<String>,
    pub unknowns: Vec<String>,
    unknown_idx: Vec<usize>,
    pub order: u32,
    pub bits: u32,
}

impl PinnedSystem {
    pub fn new(stages: usize, pins: &BTreeMap<String, ExtFloat>, order: u32, bits: u32) -> Result<Self, RefineError> {
        check_bits(bits)?;
        if !(1..=4).contains(&order) {
            return Err(RefineError::Argument(format!("order must be between 1 and 4, got {order}")));
        }
        let names = parameter_names(stages);
        for k in pins.keys() {
            if !names.contains(k) {
                return Err(RefineError::Argument(format!("unknown parameter '{k}' (expected one of {})", names.join(", "))));
            }
        }
        let unknown_idx: Vec<usize> = (0..names.len()).filter(|&k| !pins.contains_key(&names[k])).collect();
        let unknowns: Vec<String> = unknown_idx.iter().map(|&k| names[k].clone()).collect();
        let equations = condition_count(order);
        if unknowns.len() != equations {
            return Err(RefineError::Dimension { unknowns, equations });
        }
        Ok(PinnedSystem {
            names,
            unknowns,
            unknown_idx,
            order,
            bits,
        })
    }

    /// Full parameter vector (`A2..As, B1..Bs`) with pins applied.
    pub fn start(&self, f: &LowStorageForm<ExtFloat>, pins: &BTreeMap<String, ExtFloat>) -> Vec<ExtFloat> {
        parameter_values(f)
            .into_iter()
            .zip(&self.names)
            .map(|(v, n)| pins.get(n).cloned().unwrap_or(v).with_precision(self.bits))
            .collect()
    }

    /// Residuals and the Jacobian with respect to the unknowns.
    pub fn evaluate(&self, all: &[ExtFloat]) -> Result<(Vec<ExtFloat>, Vec<Vec<ExtFloat>>), RefineError> {
        let r = residual_duals(all, &self.unknown_idx, self.order)?;
        let n = self.unknown_idx.len();
        let jac = r.iter().map(|x| (0..n).map(|k| x.grad(k)).collect()).collect();
        Ok((r.into_iter().map(|x| x.v).collect(), jac))
    }

    pub fn residuals(&self, all: &[ExtFloat]) -> Result<Vec<ExtFloat>, RefineError> {
        let r = residual_duals(all, &[], self.order)?;
        Ok(r.into_iter().map(|x| x.v).collect())
    }

    pub fn form(&self, all: &[ExtFloat]) -> Result<LowStorageForm<ExtFloat>, RefineError> {
        let s = (all.len() + 1) / 2;
        let a = std::iter::once(ExtFloat::zero(self.bits)).chain(all[..s - 1].iter().cloned()).collect();
        LowStorageForm::new(a, all[s - 1..].to_vec()).map_err(|e| RefineError::Scheme(e.to_string()))
    }

    /// Convergence threshold `2^-(bits-20)`.
    pub fn tolerance(&self) -> ExtFloat {
        let mut t = ExtFloat::from_i64(1, self.bits);
        let half = ExtFloat::parse("0.5", self.bits).expect("literal");
        for _ in 0..self.bits - 20 {
            t = &t * &half;
        }
        t
    }
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub form: LowStorageForm<ExtFloat>,
    pub iterations: usize,
    /// Max |residual| at the start and after every iteration.
    pub history: Vec<ExtFloat>,
}

/// Damped Newton on the order conditions with the named parameters pinned.
pub fn newton_refine(
    initial: &LowStorageForm<ExtFloat>,
    pins: &BTreeMap<String, ExtFloat>,
    order: u32,
    bits: u32,
) -> Result<NewtonResult, RefineError> {
    if bits < MIN_PRECISION {
        return Err(RefineError::Argument(format!("precision {bits} too small")));
    }
    let sys = PinnedSystem::new(initial.stages(), pins, order, bits)?;
    let tol = sys.tolerance();
    let mut x = sys.start(initial, pins);
    let (mut r, mut jac) = sys.evaluate(&x)?;
    let mut norm = max_abs(&r);
    let mut history = vec![norm.clone()];
    for it in 0..=MAX_ITERATIONS {
        if norm < tol {
            return Ok(NewtonResult {
                form: sys.form(&x)?,
                iterations: it,
                history,
            });
        }
        if it == MAX_ITERATIONS {
            break;
        }
        let rhs: Vec<ExtFloat> = r.iter().map(|v| -v.clone()).collect();
        let step = solve_linear(jac, rhs, bits)?;
        // backtracking: halve until the max residual decreases
        let mut lambda = ExtFloat::from_i64(1, bits);
        let half = ExtFloat::parse("0.5", bits).expect("literal");
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial = x.clone();
            for (k, &u) in sys.unknown_idx.iter().enumerate() {
                trial[u] = &trial[u] + &(&lambda * &step[k]);
            }
            if let Ok(rt) = sys.residuals(&trial) {
                if max_abs(&rt) < norm {
                    accepted = Some(trial);
                    break;
                }
            }
            lambda = &lambda * &half;
        }
        let Some(next) = accepted else {
            break;
        };
        x = next;
        (r, jac) = sys.evaluate(&x)?;
        norm = max_abs(&r);
        history.push(norm.clone());
    }
    Err(RefineError::Convergence {
        history: history.iter().map(|h| h.to_sci_digits(6)).collect(),
    })
}
