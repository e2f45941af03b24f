//! Verification records and JSON helpers (complex numbers as `{"re", "im"}`).

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub identity: String,
    pub inputs: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    pub fn new(identity: &str, inputs: Value, residual: f64, tolerance: f64, details: Value) -> Self {
        Report {
            identity: identity.to_string(),
            inputs,
            residual,
            tolerance,
            pass: residual.is_finite() && residual < tolerance,
            details,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report is serializable")
    }
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn complex_vec_json(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex_json(z)).collect())
}

/// For `#[serde(with = "crate::report::complex_serde")]`.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &z.re)?;
        st.serialize_field("im", &z.im)?;
        st.end()
    }
}
