//! JSON encodings shared by the CLI and the Python bindings.
//!
//! Matrices: `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order; purely real entries may be bare numbers. Blocks of `S` are written as
//! `{"n": n, "P": <matrix>, "Q": <matrix>}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matcore::{c, CMat, C64};
use crate::sympgroup::{SpReal, SuBlocks};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Value>,
}

fn entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(x) => Ok(c(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(c(re, im)),
                _ => Err(Error::Parse(format!("bad complex entry {v}"))),
            }
        }
        _ => Err(Error::Parse(format!("bad matrix entry {v}"))),
    }
}

pub fn matrix_from_value(v: &Value) -> Result<CMat> {
    let raw: RawMatrix =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let data = raw.data.iter().map(entry).collect::<Result<Vec<_>>>()?;
    let m = CMat::from_rows(raw.rows, raw.cols, &data)?;
    if !m.is_finite() {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    Ok(m)
}

pub fn matrix_from_str(s: &str) -> Result<CMat> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    matrix_from_value(&v)
}

pub fn matrix_to_value(m: &CMat) -> Value {
    let data: Vec<Value> = m
        .to_row_major()
        .into_iter()
        .map(|z| {
            if z.im == 0.0 {
                Value::from(z.re)
            } else {
                Value::from(vec![z.re, z.im])
            }
        })
        .collect();
    serde_json::json!({ "rows": m.rows(), "cols": m.cols(), "data": data })
}

pub fn complex_to_value(z: C64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

/// Reads an element of `S` from either its blocks or the full matrix.
pub fn su_from_value(v: &Value) -> Result<SuBlocks> {
    if let (Some(p), Some(q)) = (v.get("P"), v.get("Q")) {
        return SuBlocks::new(matrix_from_value(p)?, matrix_from_value(q)?);
    }
    let m = matrix_from_value(v)?;
    let (p, q, qq, pp) = m.blocks()?;
    let k = SuBlocks::new(p, q)?;
    let residual = (&qq - &k.q().conj()).norm() + (&pp - &k.p().conj()).norm();
    if residual > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::NotInS { residual });
    }
    Ok(k)
}

pub fn su_to_value(k: &SuBlocks) -> Value {
    serde_json::json!({ "n": k.n(), "P": matrix_to_value(k.p()), "Q": matrix_to_value(k.q()) })
}

pub fn sp_from_value(v: &Value) -> Result<SpReal> {
    let m = matrix_from_value(v)?;
    if m.max_imag() > 0.0 {
        return Err(Error::Parse("symplectic matrix must be real".into()));
    }
    SpReal::new(m)
}
