//! JSON scheme files.
//!
//! ```json
//! { "name": "43-1", "order": 3, "number_kind": "rational",
//!   "c": ["0", "1/4", ...], "b": [...], "a": [["1/4"], ["-1/12", "2/3"], ...],
//!   "A": ["0", "-1/2", ...], "B": [...] }
//! ```
//!
//! `a` holds rows for stages 2..s. `A`/`B` are optional but must appear
//! together. `provenance` is an optional free-text field; anything else is
//! rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ButcherTableau, Coefficients, Forms, LowStorageForm, Scheme, SchemeError};
use crate::numerics::{ExtFloat, Rational, DEFAULT_PRECISION};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    name: String,
    order: u32,
    number_kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
    c: Vec<String>,
    b: Vec<String>,
    a: Vec<Vec<String>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    big_a: Option<Vec<String>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    big_b: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Rational,
    Decimal,
}

fn texts<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn encode<T: ToString + crate::numerics::Scalar>(forms: &Forms<T>) -> (Vec<String>, Vec<String>, Vec<Vec<String>>, Option<Vec<String>>, Option<Vec<String>>) {
    let t = &forms.tableau;
    let rows = t.lower_rows().iter().map(|r| texts(r)).collect();
    let (a, b) = match &forms.low_storage {
        Some(ls) => (Some(texts(ls.a_coeffs())), Some(texts(ls.b_coeffs()))),
        None => (None, None),
    };
    (texts(t.nodes()), texts(t.weights()), rows, a, b)
}

pub fn to_json(scheme: &Scheme) -> String {
    let (kind, (c, b, a, big_a, big_b)) = match &scheme.coefficients {
        Coefficients::Rational(f) => (Kind::Rational, encode(f)),
        Coefficients::Decimal(f) => (Kind::Decimal, encode(f)),
    };
    let file = SchemeFile {
        name: scheme.name.clone(),
        order: scheme.order,
        number_kind: kind,
        provenance: (!scheme.provenance.is_empty()).then(|| scheme.provenance.clone()),
        c,
        b,
        a,
        big_a,
        big_b,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plain data serializes");
    text.push('\n');
    text
}

fn parse_vec<T>(field: &str, v: &[String], p: &impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, SchemeError> {
    v.iter()
        .enumerate()
        .map(|(i, s)| {
            p(s).map_err(|message| SchemeError::Parse {
                field: format!("{field}[{}]", i + 1),
                message,
            })
        })
        .collect()
}

fn decode<T: crate::numerics::Scalar>(
    f: &SchemeFile,
    p: impl Fn(&str) -> Result<T, String>,
) -> Result<Forms<T>, SchemeError> {
    let c = parse_vec("c", &f.c, &p)?;
    let b = parse_vec("b", &f.b, &p)?;
    let rows = f
        .a
        .iter()
        .enumerate()
        .map(|(k, row)| parse_vec(&format!("a[{}]", k + 2), row, &p))
        .collect::<Result<Vec<_>, _>>()?;
    let tableau = ButcherTableau::new(c, rows, b)?;
    let low_storage = match (&f.big_a, &f.big_b) {
        (Some(a), Some(b)) => Some(LowStorageForm::new(parse_vec("A", a, &p)?, parse_vec("B", b, &p)?)?),
        (None, None) => None,
        _ => return Err(SchemeError::Format("fields A and B must appear together".into())),
    };
    Forms::new(tableau, low_storage)
}

pub fn from_json(text: &str) -> Result<Scheme, SchemeError> {
    let f: SchemeFile = serde_json::from_str(text).map_err(|e| SchemeError::Format(e.to_string()))?;
    let coefficients = match f.number_kind {
        Kind::Rational => Coefficients::Rational(decode(&f, |s| s.parse::<Rational>().map_err(|e| e.to_string()))?),
        Kind::Decimal => {
            Coefficients::Decimal(decode(&f, |s| ExtFloat::parse(s, DEFAULT_PRECISION).map_err(|e| e.to_string()))?)
        }
    };
    Ok(Scheme {
        name: f.name,
        order: f.order,
        provenance: f.provenance.unwrap_or_default(),
        coefficients,
    })
}

pub fn save_scheme(scheme: &Scheme, path: impl AsRef<Path>) -> Result<(), SchemeError> {
    fs::write(path.as_ref(), to_json(scheme)).map_err(|e| SchemeError::Io(format!("{}: {e}", path.as_ref().display())))
}

pub fn load_scheme(path: impl AsRef<Path>) -> Result<Scheme, SchemeError> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| SchemeError::Io(format!("{}: {e}", path.as_ref().display())))?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::registry_get;

    #[test]
    fn rational_round_trip() {
        let s = registry_get("43-1").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("43-1.json");
        save_scheme(&s, &path).unwrap();
        assert_eq!(load_scheme(&path).unwrap(), s);
    }

    #[test]
    fn decimal_round_trip_is_bit_exact() {
        let s = registry_get("64-berland").unwrap();
        let back = from_json(&to_json(&s)).unwrap();
        let (x, y) = (s.as_decimal().unwrap(), back.as_decimal().unwrap());
        let (lx, ly) = (x.low_storage.as_ref().unwrap(), y.low_storage.as_ref().unwrap());
        for (p, q) in lx.a_coeffs().iter().chain(lx.b_coeffs()).zip(ly.a_coeffs().iter().chain(ly.b_coeffs())) {
            assert!(p.identical(q));
        }
        for (p, q) in x.tableau.nodes().iter().zip(y.tableau.nodes()) {
            assert!(p.identical(q));
        }
        assert_eq!(back, s);
    }

    #[test]
    fn decimal_file_keeps_printed_digits() {
        let text = to_json(&registry_get("64-berland").unwrap());
        assert!(text.contains("\"-7.371013927959100015085736294563710861301655e-01\""));
        assert!(text.contains("\"1.718581042714403494253985915871400632540402e+00\""));
        assert!(text.contains("\"2.7e-01\""));
    }

    #[test]
    fn inconsistent_row_is_reported() {
        let text = r#"{"name":"x","order":1,"number_kind":"rational",
            "c":["0","1/2"],"b":["1/2","1/2"],"a":[["1/3"]]}"#;
        let err = from_json(text).unwrap_err();
        assert!(err.to_string().contains("self-consistency"), "{err}");
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn field_locations_in_errors() {
        let text = r#"{"name":"x","order":1,"number_kind":"rational",
            "c":["0","1"],"b":["1/2","x"],"a":[["1"]]}"#;
        assert!(from_json(text).unwrap_err().to_string().contains("b[2]"));
        let text = r#"{"name":"x","order":1,"number_kind":"rational",
            "c":["0","1"],"b":["1/2","1/2"],"a":[["1","0"]]}"#;
        assert!(matches!(from_json(text).unwrap_err(), SchemeError::NonTriangular { row: 2, .. }));
        let text = r#"{"name":"x","order":1,"number_kind":"rational","extra":1,
            "c":["0"],"b":["1"],"a":[]}"#;
        assert!(from_json(text).unwrap_err().to_string().contains("extra"));
        let text = r#"{"name":"x","order":1,"number_kind":"rational",
            "c":["0"],"b":["1"],"a":[],"A":["0"]}"#;
        assert!(matches!(from_json(text).unwrap_err(), SchemeError::Format(_)));
    }
}
