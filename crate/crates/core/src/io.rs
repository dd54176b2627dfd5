//! JSON formats for density matrices, Bloch tensors, fingerprints, verdicts
//! and reconstructions. Floats are written with 17 significant digits.

use std::io;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::{json, Value};

use crate::canonical::{CanonicalForm, EquivalenceReport};
use crate::error::{Error, Result};
use crate::invariants::Fingerprint;
use crate::pauli_bloch::{reconstruct, BlochTensor, Component, DensityMatrix, Matrix8, Tensor3};
use crate::reconstruction::{Recovery, SignStatus};

#[derive(Debug, Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BlochJson {
    alpha: [f64; 3],
    beta: [f64; 3],
    gamma: [f64; 3],
    #[serde(rename = "R")]
    r: [[f64; 3]; 3],
    #[serde(rename = "S")]
    s: [[f64; 3]; 3],
    #[serde(rename = "T")]
    t: [[f64; 3]; 3],
    #[serde(rename = "Q")]
    q: [[[f64; 3]; 3]; 3],
}

/// A parsed state file.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    Density(DensityMatrix<f64>),
    Bloch(BlochTensor<f64>),
}

impl StateInput {
    pub fn density(&self) -> DensityMatrix<f64> {
        match self {
            StateInput::Density(rho) => rho.clone(),
            StateInput::Bloch(b) => reconstruct(b),
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Reads either format, chosen by the presence of `"matrix"` or `"alpha"`.
pub fn parse_state(text: &str) -> Result<StateInput> {
    let value: Value = serde_json::from_str(text).map_err(parse_err)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    if obj.contains_key("matrix") {
        let d: DensityJson = serde_json::from_value(value).map_err(parse_err)?;
        Ok(StateInput::Density(density_from_json(&d)?))
    } else if obj.contains_key("alpha") {
        let b: BlochJson = serde_json::from_value(value).map_err(parse_err)?;
        Ok(StateInput::Bloch(bloch_from_json(&b)))
    } else {
        Err(Error::Parse("expected a \"matrix\" or an \"alpha\" key".into()))
    }
}

fn density_from_json(d: &DensityJson) -> Result<DensityMatrix<f64>> {
    if d.dim != 8 {
        return Err(Error::Parse(format!("dim must be 8, got {}", d.dim)));
    }
    if d.matrix.len() != 8 || d.matrix.iter().any(|row| row.len() != 8) {
        return Err(Error::Parse("matrix must be 8 rows of 8 entries".into()));
    }
    DensityMatrix::new(Matrix8::from_fn(|i, j| {
        let [re, im] = d.matrix[i][j];
        Complex::new(re, im)
    }))
}

fn bloch_from_json(b: &BlochJson) -> BlochTensor<f64> {
    use nalgebra::{Matrix3, Vector3};
    let m = |a: &[[f64; 3]; 3]| Matrix3::from_fn(|i, j| a[i][j]);
    BlochTensor {
        alpha: Vector3::from(b.alpha),
        beta: Vector3::from(b.beta),
        gamma: Vector3::from(b.gamma),
        r: m(&b.r),
        s: m(&b.s),
        t: m(&b.t),
        q: Tensor3(b.q),
    }
}

pub fn density_to_json(rho: &DensityMatrix<f64>) -> Value {
    let m = rho.matrix();
    let rows: Vec<Vec<[f64; 2]>> = (0..8)
        .map(|i| (0..8).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!({ "dim": 8, "matrix": rows })
}

pub fn bloch_to_json(b: &BlochTensor<f64>) -> Value {
    let m = |a: &nalgebra::Matrix3<f64>| -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| a[(i, j)]))
    };
    let v = BlochJson {
        alpha: b.alpha.into(),
        beta: b.beta.into(),
        gamma: b.gamma.into(),
        r: m(&b.r),
        s: m(&b.s),
        t: m(&b.t),
        q: b.q.0,
    };
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn fingerprint_to_json(fp: &Fingerprint<f64>) -> Value {
    let entries: Vec<Value> = fp.entries.iter().map(|(n, v)| json!([n, v])).collect();
    json!({ "class": fp.class.to_string(), "entries": entries })
}

pub fn report_to_json(report: &EquivalenceReport) -> Value {
    let mut out = json!({
        "verdict": report.verdict.tag(),
        "witness": report.verdict.witness(),
        "classes": report.classes,
    });
    if let crate::canonical::Verdict::Inconclusive { reason } = &report.verdict {
        out["reason"] = json!(reason);
    }
    out
}

/// Recovered components as Bloch-format fragments: every recovered entry is
/// a number, everything else `null`.
pub fn recovery_to_json(rec: &Recovery<f64>, cf: &CanonicalForm<f64>) -> Value {
    let mut r = [[None::<f64>; 3]; 3];
    let mut s = r;
    let mut t = r;
    let mut q = [[[None::<f64>; 3]; 3]; 3];
    for (c, v) in rec.components() {
        match c {
            Component::R(i, j) => r[i][j] = Some(v),
            Component::S(i, j) => s[i][j] = Some(v),
            Component::T(i, j) => t[i][j] = Some(v),
            Component::Q(i, j, k) => q[i][j][k] = Some(v),
            _ => {}
        }
    }
    let ambiguity: Vec<Value> = rec
        .ambiguities()
        .map(|b| {
            json!({
                "block": b.label,
                "status": match b.sign {
                    SignStatus::Resolved => "Resolved",
                    SignStatus::GlobalSign => "GlobalSign",
                    SignStatus::Ambiguous => "Ambiguous",
                },
                "components": b.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut filled = cf.tensor;
    rec.apply(&mut filled);
    json!({
        "class": rec.kind.to_string(),
        "recovered": { "R": r, "S": s, "T": t, "Q": q },
        "ambiguity": ambiguity,
        "canonical": bloch_to_json(&filled),
    })
}

/// Compact output with every float in `{:.16e}` form.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("serializing a JSON value into memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
