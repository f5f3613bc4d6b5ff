//! JSON ring descriptions.
//!
//! ```json
//! {"kind": "zmod", "n": 6}
//! {"kind": "product", "factors": [{"kind": "zmod", "n": 2}, {"kind": "zmod", "n": 3}]}
//! {"kind": "tables", "size": 2, "add": [[0,1],[1,0]], "mul": [[0,0],[0,1]], "zero": 0, "one": 1}
//! ```

use finsch_core::ring::{product_ring, validate_ring, zmod, RawRing};
use finsch_core::{FiniteRing, Guards};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingSpec {
    Zmod {
        n: usize,
    },
    Product {
        factors: Vec<RingSpec>,
    },
    Tables {
        size: usize,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
        zero: usize,
        one: usize,
    },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("unknown ring kind `{kind}` at `{field}`")]
    UnknownKind { field: String, kind: String },
    #[error("bad tables at `{field}`: {message}")]
    BadTables { field: String, message: String },
}

fn parse_err(field: &str, message: impl Into<String>) -> SpecError {
    SpecError::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

fn tables_err(field: &str, message: impl Into<String>) -> SpecError {
    SpecError::BadTables {
        field: field.to_string(),
        message: message.into(),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn get_usize(obj: &Map<String, Value>, path: &str, key: &str) -> Result<usize, SpecError> {
    let field = join(path, key);
    let v = obj.get(key).ok_or_else(|| parse_err(&field, "missing"))?;
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| parse_err(&field, format!("expected a non-negative integer, got {v}")))
}

fn get_table(obj: &Map<String, Value>, path: &str, key: &str, size: usize) -> Result<Vec<Vec<usize>>, SpecError> {
    let field = join(path, key);
    let rows = obj
        .get(key)
        .ok_or_else(|| parse_err(&field, "missing"))?
        .as_array()
        .ok_or_else(|| tables_err(&field, "expected an array of rows"))?;
    if rows.len() != size {
        return Err(tables_err(&field, format!("{} rows, expected {size}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row_field = format!("{field}[{i}]");
            let row = row.as_array().ok_or_else(|| tables_err(&row_field, "expected an array"))?;
            if row.len() != size {
                return Err(tables_err(&row_field, format!("{} entries, expected {size}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_u64()
                        .and_then(|x| usize::try_from(x).ok())
                        .filter(|&x| x < size)
                        .ok_or_else(|| tables_err(&format!("{row_field}[{j}]"), format!("{x} is not an element index below {size}")))
                })
                .collect()
        })
        .collect()
}

fn parse_value(v: &Value, path: &str) -> Result<RingSpec, SpecError> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err(if path.is_empty() { "<root>" } else { path }, "expected an object"))?;
    let kind_field = join(path, "kind");
    let kind = obj
        .get("kind")
        .ok_or_else(|| parse_err(&kind_field, "missing"))?
        .as_str()
        .ok_or_else(|| parse_err(&kind_field, "expected a string"))?;
    match kind {
        "zmod" => {
            let n = get_usize(obj, path, "n")?;
            if n == 0 {
                return Err(parse_err(&join(path, "n"), "modulus must be positive"));
            }
            Ok(RingSpec::Zmod { n })
        }
        "product" => {
            let field = join(path, "factors");
            let factors = obj
                .get("factors")
                .ok_or_else(|| parse_err(&field, "missing"))?
                .as_array()
                .ok_or_else(|| parse_err(&field, "expected an array"))?;
            if factors.is_empty() {
                return Err(parse_err(&field, "needs at least one factor"));
            }
            let factors = factors
                .iter()
                .enumerate()
                .map(|(i, f)| parse_value(f, &format!("{field}[{i}]")))
                .collect::<Result<_, _>>()?;
            Ok(RingSpec::Product { factors })
        }
        "tables" => {
            let size = get_usize(obj, path, "size")?;
            if size == 0 {
                return Err(tables_err(&join(path, "size"), "a ring has at least one element"));
            }
            let add = get_table(obj, path, "add", size)?;
            let mul = get_table(obj, path, "mul", size)?;
            let zero = get_usize(obj, path, "zero")?;
            let one = get_usize(obj, path, "one")?;
            for (key, x) in [("zero", zero), ("one", one)] {
                if x >= size {
                    return Err(tables_err(&join(path, key), format!("{x} is not an element index below {size}")));
                }
            }
            Ok(RingSpec::Tables { size, add, mul, zero, one })
        }
        other => Err(SpecError::UnknownKind {
            field: kind_field,
            kind: other.to_string(),
        }),
    }
}

/// Parses and shape-checks a ring description. Ring axioms are checked
/// later, by [`RingSpec::build`].
pub fn parse_ring_spec(text: &str) -> Result<RingSpec, SpecError> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err("<root>", e.to_string()))?;
    parse_value(&v, "")
}

impl RingSpec {
    pub fn build(&self, guards: &Guards) -> finsch_core::Result<FiniteRing> {
        match self {
            RingSpec::Zmod { n } => zmod(*n),
            RingSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it.next().expect("parser rejects empty products").build(guards)?;
                it.try_fold(first, |acc, f| product_ring(&acc, &f.build(guards)?, guards))
            }
            RingSpec::Tables { size, add, mul, zero, one } => validate_ring(
                &RawRing {
                    size: *size,
                    add: add.clone(),
                    mul: mul.clone(),
                    zero: *zero,
                    one: *one,
                },
                false,
            ),
        }
    }
}
