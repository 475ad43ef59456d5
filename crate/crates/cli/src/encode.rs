//! JSON encodings. A scalar is an integer, a string `"a"` or `"a/b"`, or a pair `[x, y]`
//! meaning `x + y·√δ`. Matrices are lists of rows, and lattice bases hold generators as columns.

use std::io::Read;

use padic_transfer_core::lattices::HermitianLattice;
use padic_transfer_core::linalg::{Mat, Vector};
use padic_transfer_core::padic::{Ctx, PadicScalar};
use serde_json::{json, Value};

use crate::{CliError, CliResult};

fn bad(what: &str, v: &Value) -> CliError {
    CliError::Input(format!("expected {what}, got {v}"))
}

fn parse_rational(ctx: Ctx, s: &str) -> CliResult<PadicScalar> {
    let int = |t: &str| -> CliResult<PadicScalar> {
        let n: i64 = t.trim().parse().map_err(|_| CliError::Input(format!("not an integer: {t:?}")))?;
        Ok(ctx.int(n))
    };
    match s.split_once('/') {
        Some((a, b)) => Ok(int(a)?.div(&int(b)?)?),
        None => int(s),
    }
}

pub fn parse_scalar(ctx: Ctx, v: &Value) -> CliResult<PadicScalar> {
    match v {
        Value::Number(n) => Ok(ctx.int(n.as_i64().ok_or_else(|| bad("an i64", v))?)),
        Value::String(s) => parse_rational(ctx, s),
        Value::Array(parts) if parts.len() == 2 => {
            let x = parse_scalar(ctx, &parts[0])?;
            let y = parse_scalar(ctx, &parts[1])?;
            Ok(x.add(&(y * ctx.sqrt_delta()))?)
        }
        _ => Err(bad("a scalar", v)),
    }
}

pub fn parse_vector(ctx: Ctx, v: &Value) -> CliResult<Vector> {
    v.as_array().ok_or_else(|| bad("a vector", v))?.iter().map(|x| parse_scalar(ctx, x)).collect()
}

pub fn parse_matrix(ctx: Ctx, v: &Value) -> CliResult<Mat> {
    let rows = v.as_array().ok_or_else(|| bad("a matrix", v))?;
    let rows: Vec<Vector> = rows.iter().map(|r| parse_vector(ctx, r)).collect::<CliResult<_>>()?;
    Ok(Mat::from_rows(rows)?)
}

/// Integers print as numbers; everything else uses the `p^v*(a0+a1r)` digit form, `r = √δ`.
pub fn scalar_json(x: &PadicScalar) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

pub fn vector_json(v: &[PadicScalar]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn matrix_json(m: &Mat) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_json(r)).collect())
}

pub fn lattice_json(l: &HermitianLattice) -> Value {
    json!({ "basis": matrix_json(l.basis()) })
}

pub fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| CliError::Input(format!("missing field {key:?}")))
}

/// A literal JSON object, `-` for standard input, or a file path.
pub fn load_input(arg: &str) -> CliResult<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}
