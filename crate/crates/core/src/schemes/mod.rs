//! Method representations, the scheme container, the JSON file format and
//! the built-in registry.

mod file;
mod forms;
mod registry;

use thiserror::Error;

use crate::numerics::{ExtFloat, Rational, Scalar};

pub use file::{from_json, load_scheme, save_scheme, to_json};
pub use forms::{AlphaForm, ButcherTableau, LowStorageForm};
pub use registry::{registry_get, registry_names, BERLAND_C, LEGACY_43_TABLEAU, LEGACY_53_TABLEAU};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("shape error in {field}: {message}")]
    Shape { field: String, message: String },
    #[error("a is not strictly lower triangular: row {row} must hold {expected} entries, found {found}")]
    NonTriangular { row: usize, expected: usize, found: usize },
    #[error("not an explicit method: c[1] = {c1}, expected 0")]
    NotExplicit { c1: String },
    #[error("self-consistency violated at row {row}: c[{row}] = {node} but the row of a sums to {row_sum}")]
    Inconsistent { row: usize, node: String, row_sum: String },
    #[error("cannot parse {field}: {message}")]
    Parse { field: String, message: String },
    #[error("invalid low-storage form: {0}")]
    InvalidForm(String),
    #[error("forms disagree: {0}")]
    Mismatch(String),
    #[error("malformed scheme file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("unknown scheme '{0}'")]
    Unknown(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberKind {
    Rational,
    Decimal,
}

impl NumberKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NumberKind::Rational => "rational",
            NumberKind::Decimal => "decimal",
        }
    }
}

/// Tableau plus optional two-register coefficients over one number type.
#[derive(Clone, Debug, PartialEq)]
pub struct Forms<T> {
    pub tableau: ButcherTableau<T>,
    pub low_storage: Option<LowStorageForm<T>>,
}

impl<T: Scalar> Forms<T> {
    pub fn new(tableau: ButcherTableau<T>, low_storage: Option<LowStorageForm<T>>) -> Result<Self, SchemeError> {
        if let Some(ls) = &low_storage {
            if ls.stages() != tableau.stages() {
                return Err(SchemeError::Mismatch(format!(
                    "tableau has {} stages, A/B have {}",
                    tableau.stages(),
                    ls.stages()
                )));
            }
            for (i, (x, y)) in ls.nodes().iter().zip(tableau.nodes()).enumerate() {
                if !x.near(y) {
                    return Err(SchemeError::Mismatch(format!(
                        "c[{}] is {y} in the tableau but {x} from A/B",
                        i + 1
                    )));
                }
            }
        }
        Ok(Forms { tableau, low_storage })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Rational(Forms<Rational>),
    Decimal(Forms<ExtFloat>),
}

/// Number types a scheme can carry.
pub trait CoefficientType: Scalar {
    fn wrap(forms: Forms<Self>) -> Coefficients;
}

impl CoefficientType for Rational {
    fn wrap(forms: Forms<Self>) -> Coefficients {
        Coefficients::Rational(forms)
    }
}

impl CoefficientType for ExtFloat {
    fn wrap(forms: Forms<Self>) -> Coefficients {
        Coefficients::Decimal(forms)
    }
}

/// A named method with its coefficients and a free-text origin note.
#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    pub name: String,
    pub order: u32,
    pub provenance: String,
    pub coefficients: Coefficients,
}

impl Scheme {
    pub fn from_forms<T: CoefficientType>(
        name: impl Into<String>,
        order: u32,
        provenance: impl Into<String>,
        tableau: ButcherTableau<T>,
        low_storage: Option<LowStorageForm<T>>,
    ) -> Result<Self, SchemeError> {
        Ok(Scheme {
            name: name.into(),
            order,
            provenance: provenance.into(),
            coefficients: T::wrap(Forms::new(tableau, low_storage)?),
        })
    }

    pub fn rational(
        name: impl Into<String>,
        order: u32,
        provenance: impl Into<String>,
        tableau: ButcherTableau<Rational>,
        low_storage: Option<LowStorageForm<Rational>>,
    ) -> Result<Self, SchemeError> {
        Ok(Scheme {
            name: name.into(),
            order,
            provenance: provenance.into(),
            coefficients: Coefficients::Rational(Forms::new(tableau, low_storage)?),
        })
    }

    pub fn decimal(
        name: impl Into<String>,
        order: u32,
        provenance: impl Into<String>,
        tableau: ButcherTableau<ExtFloat>,
        low_storage: Option<LowStorageForm<ExtFloat>>,
    ) -> Result<Self, SchemeError> {
        Ok(Scheme {
            name: name.into(),
            order,
            provenance: provenance.into(),
            coefficients: Coefficients::Decimal(Forms::new(tableau, low_storage)?),
        })
    }

    pub fn number_kind(&self) -> NumberKind {
        match self.coefficients {
            Coefficients::Rational(_) => NumberKind::Rational,
            Coefficients::Decimal(_) => NumberKind::Decimal,
        }
    }

    pub fn stages(&self) -> usize {
        match &self.coefficients {
            Coefficients::Rational(f) => f.tableau.stages(),
            Coefficients::Decimal(f) => f.tableau.stages(),
        }
    }

    pub fn as_rational(&self) -> Option<&Forms<Rational>> {
        match &self.coefficients {
            Coefficients::Rational(f) => Some(f),
            Coefficients::Decimal(_) => None,
        }
    }

    pub fn as_decimal(&self) -> Option<&Forms<ExtFloat>> {
        match &self.coefficients {
            Coefficients::Decimal(f) => Some(f),
            Coefficients::Rational(_) => None,
        }
    }

    /// Rational tableau, panicking on decimal schemes.
    pub fn rational_tableau(&self) -> &ButcherTableau<Rational> {
        &self.as_rational().expect("rational scheme").tableau
    }

    pub fn tableau_f64(&self) -> ButcherTableau<f64> {
        match &self.coefficients {
            Coefficients::Rational(f) => f.tableau.to_f64(),
            Coefficients::Decimal(f) => f.tableau.to_f64(),
        }
    }

    pub fn low_storage_f64(&self) -> Option<LowStorageForm<f64>> {
        match &self.coefficients {
            Coefficients::Rational(f) => f.low_storage.as_ref().map(|l| l.to_f64()),
            Coefficients::Decimal(f) => f.low_storage.as_ref().map(|l| l.to_f64()),
        }
    }
}
