//! JSON parameter files: `{"A": M, "B": M, "C": [M, ...], "D": [M, ...]}` with
//! each matrix a list of rows and each entry a `[re, im]` pair (a bare number
//! is read as a real entry).

use std::path::Path;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::matcore::CMatrix;
use crate::series::ParameterSet;

/// Why a parameter file was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamsError {
    Io(String),
    Parse(String),
}

impl std::fmt::Display for ParamsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Io(m) | Self::Parse(m) => f.write_str(m),
        }
    }
}

fn entry(v: &Value, at: &str) -> Result<C64, String> {
    let num = |x: &Value, part: &str| -> Result<f64, String> {
        let f = x
            .as_f64()
            .ok_or_else(|| format!("{at}: {part} part is not a number"))?;
        if !f.is_finite() {
            return Err(format!("{at}: non-finite {part} part"));
        }
        Ok(f)
    };
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(C64::new(
            num(&pair[0], "real")?,
            num(&pair[1], "imaginary")?,
        )),
        Value::Number(_) => Ok(C64::new(num(v, "real")?, 0.0)),
        _ => Err(format!("{at}: expected a [re, im] pair")),
    }
}

fn matrix(v: &Value, name: &str) -> Result<CMatrix, String> {
    let rows = v
        .as_array()
        .ok_or_else(|| format!("{name}: expected a list of rows"))?;
    if rows.is_empty() {
        return Err(format!("{name}: matrix has no rows"));
    }
    let mut width = None;
    let mut data = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| format!("{name}: row {i} is not a list"))?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(format!(
                    "{name}: row {i} has {} entries, expected {w} (ragged rows)",
                    row.len()
                ))
            }
            _ => {}
        }
        for (j, e) in row.iter().enumerate() {
            data.push(entry(e, &format!("{name}[{i}][{j}]"))?);
        }
    }
    let cols = width.unwrap_or(0);
    if cols != rows.len() {
        return Err(format!(
            "{name}: matrix is {}x{cols}, expected square",
            rows.len()
        ));
    }
    Ok(CMatrix::from_row_slice(rows.len(), cols, &data))
}

fn matrix_list(v: Option<&Value>, name: &str) -> Result<Vec<CMatrix>, String> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(k, m)| matrix(m, &format!("{name}[{k}]")))
            .collect(),
        Some(_) => Err(format!("{name}: expected a list of matrices")),
    }
}

/// Parses the JSON text of a parameter file.
pub fn parse_params_str(text: &str) -> Result<ParameterSet, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| "top level must be an object".to_string())?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "A" | "B" | "C" | "D") {
            return Err(format!("unknown key '{key}' (expected A, B, C, D)"));
        }
    }
    let a = matrix(obj.get("A").ok_or("missing key 'A'")?, "A")?;
    let b = matrix(obj.get("B").ok_or("missing key 'B'")?, "B")?;
    let c = matrix_list(obj.get("C"), "C")?;
    let d = matrix_list(obj.get("D"), "D")?;
    ParameterSet::new(a, b, c, d).map_err(|e| e.to_string())
}

/// Reads and parses a parameter file.
pub fn parse_params(path: &Path) -> Result<ParameterSet, ParamsError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParamsError::Io(format!("{}: {e}", path.display())))?;
    parse_params_str(&text).map_err(|m| ParamsError::Parse(format!("{}: {m}", path.display())))
}

pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// JSON form read back by [`parse_params_str`] to identical entries.
pub fn params_to_json(p: &ParameterSet) -> String {
    let doc = json!({
        "A": matrix_json(&p.a),
        "B": matrix_json(&p.b),
        "C": p.c.iter().map(matrix_json).collect::<Vec<_>>(),
        "D": p.d.iter().map(matrix_json).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).expect("serializing plain values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_file() {
        let p = parse_params_str(r#"{"A": [[[1,0]]], "B": [[[1,0]]], "C": [], "D": []}"#).unwrap();
        assert_eq!((p.dim(), p.p(), p.q()), (1, 0, 0));
    }

    #[test]
    fn diagonal_file() {
        let p = parse_params_str(
            r#"{"A": [[[1,0],[0,0]],[[0,0],[2,0]]], "B": [[1,0],[0,1]],
                "C": [[[[0.5,0],[0,0]],[[0,0],[1.5,0]]]]}"#,
        )
        .unwrap();
        assert_eq!((p.dim(), p.p(), p.q()), (2, 1, 0));
        assert_eq!(p.a[(1, 1)], C64::new(2.0, 0.0));
    }

    #[test]
    fn rejections_name_the_location() {
        let e = parse_params_str(r#"{"A": [[[1,0],[0,0]],[[0,0]]], "B": [[[1,0]]]}"#).unwrap_err();
        assert!(e.contains("row 1"), "{e}");
        let e = parse_params_str(r#"{"A": [[[1,0]]], "B": [[[1,0],[2,0]],[[0,0],[1,0]]]}"#)
            .unwrap_err();
        assert!(e.contains("dimension"), "{e}");
        let e = parse_params_str(r#"{"A": [[[1,0]]], "B": [[["x",0]]]}"#).unwrap_err();
        assert!(e.contains("B[0][0]"), "{e}");
        let e = parse_params_str(r#"{"A": [[[1,0]]], "B": [[[1,0]]], "E": []}"#).unwrap_err();
        assert!(e.contains("'E'"), "{e}");
        let e = parse_params_str(r#"{"A": [[[1,0]]], "B": [[[1,0]]"#).unwrap_err();
        assert!(e.contains("line"), "{e}");
        let e = parse_params_str(r#"{"A": [[[1e999,0]]], "B": [[[1,0]]]}"#).unwrap_err();
        assert!(e.contains("JSON") || e.contains("finite"), "{e}");
    }

    #[test]
    fn round_trip_is_bitwise() {
        let p = ParameterSet::new(
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(0.1, -0.0),
                    C64::new(1.0 / 3.0, 2e-300),
                    C64::new(-7.25e12, 0.3),
                    C64::new(std::f64::consts::PI, -1.0),
                ],
            ),
            crate::matcore::identity(2),
            vec![crate::matcore::diag(&[0.5, 1.0 / 7.0])],
            vec![],
        )
        .unwrap();
        let back = parse_params_str(&params_to_json(&p)).unwrap();
        for (x, y) in p.a.iter().zip(back.a.iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        assert_eq!(p, back);
    }
}
