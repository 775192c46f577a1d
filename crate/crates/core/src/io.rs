//! JSON input and output. Indices are one-based in every JSON document.
//!
//! Input: `{"n": 3, "B": [[0,1],[-1,0]], "D": [1,1], "name": "..."}` with `D`
//! optional. Integers are written as JSON numbers when they fit in `i64` and
//! as decimal strings otherwise; both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, Seed, SkewMatrix};
use crate::words::Word;

/// A named exchange matrix read from JSON.
#[derive(Clone, Debug)]
pub struct MatrixInput {
    pub name: String,
    pub matrix: SkewMatrix,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| bad(format!("{n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| bad(format!("{s:?} is not an integer"))),
        other => Err(bad(format!("expected an integer, found {other}"))),
    }
}

fn parse_int_vec(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array"))?
        .iter()
        .map(parse_int)
        .collect()
}

pub fn parse_matrix_input(text: &str) -> Result<MatrixInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    let rows = v.get("B").ok_or_else(|| bad("missing field \"B\""))?;
    let rows: Vec<Vec<BigInt>> = rows
        .as_array()
        .ok_or_else(|| bad("\"B\" must be an array of rows"))?
        .iter()
        .map(parse_int_vec)
        .collect::<Result<_>>()?;
    let b = IntMatrix::from_row_vecs(rows)?;
    if !b.is_square() {
        return Err(bad("\"B\" must be square"));
    }
    if let Some(n) = v.get("n") {
        let n = n
            .as_u64()
            .ok_or_else(|| bad("\"n\" must be a positive integer"))?;
        if n as usize != b.nrows() {
            return Err(bad(format!(
                "\"n\" is {n} but \"B\" has {} rows",
                b.nrows()
            )));
        }
    }
    let matrix = match v.get("D") {
        Some(Value::Null) | None => SkewMatrix::new(b)?,
        Some(d) => SkewMatrix::with_symmetrizer(b, parse_int_vec(d)?)?,
    };
    let name = v
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();
    Ok(MatrixInput { name, matrix })
}

pub fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => json!(x.to_string()),
    }
}

pub fn vec_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| vec_json(m.row(i))).collect())
}

pub fn one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|k| k + 1).collect()
}

/// `{"w": [...], "Bw": [[...]], "Cw": [[...]]}`.
pub fn seed_json(seed: &Seed) -> Value {
    json!({
        "w": one_based(&seed.w),
        "Bw": matrix_json(&seed.bw),
        "Cw": matrix_json(&seed.cw),
    })
}

pub fn word_json(w: &Word) -> Value {
    json!(w.to_string())
}

/// Parses a one-based comma-separated mutation sequence.
pub fn parse_sequence(s: &str, n: usize) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            let k: usize = p
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad index {p:?}")))?;
            if k == 0 || k > n {
                return Err(Error::IndexOutOfRange { index: k, rank: n });
            }
            Ok(k - 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_vec;

    #[test]
    fn reads_matrix_with_and_without_symmetrizer() {
        let m =
            parse_matrix_input(r#"{"n":3,"B":[[0,3,-3],[-2,0,2],[2,-2,0]],"name":"x"}"#).unwrap();
        assert_eq!(m.name, "x");
        assert_eq!(m.matrix.d(), &int_vec(&[3, 2, 2])[..]);
        let m = parse_matrix_input(r#"{"B":[[0,"1"],[-1,0]],"D":[1,1]}"#).unwrap();
        assert_eq!(m.matrix.rank(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_matrix_input("{").is_err());
        assert!(parse_matrix_input(r#"{"n":2}"#).is_err());
        assert!(parse_matrix_input(r#"{"n":3,"B":[[0,1],[-1,0]]}"#).is_err());
        assert!(parse_matrix_input(r#"{"B":[[0,1.5],[-1,0]]}"#).is_err());
        assert!(parse_matrix_input(r#"{"B":[[0,1],[1,0]]}"#).is_err());
        assert!(parse_matrix_input(r#"{"B":[[0,1],[-1,0]],"D":[1,2]}"#).is_err());
    }

    #[test]
    fn big_integers_become_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(int_json(&big), json!("123456789012345678901234567890"));
        assert_eq!(int_json(&BigInt::from(-7)), json!(-7));
    }

    #[test]
    fn sequences() {
        assert_eq!(parse_sequence("2,3, 2", 3).unwrap(), vec![1, 2, 1]);
        assert!(parse_sequence("", 3).unwrap().is_empty());
        assert!(parse_sequence("0", 3).is_err());
        assert!(parse_sequence("4", 3).is_err());
        assert!(parse_sequence("a", 3).is_err());
    }
}
