//! Deterministic report emission: JSON with sorted keys and floats at 17
//! significant digits, and flat CSV.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

/// Serde adapter writing big unsigned integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub mod decimal_vec {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| BigUint::from_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?} (json|csv)"))),
        }
    }
}

/// `{:.16e}`, i.e. 17 significant digits; non-finite values have no JSON form.
pub fn format_float(v: f64) -> Option<String> {
    if v.is_finite() {
        Some(format!("{v:.16e}"))
    } else {
        None
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64().and_then(format_float) {
                    Some(s) => out.push_str(&s),
                    None => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, item, indent + 2);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 2);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Canonical JSON text of any serializable report.
pub fn to_json<T: Serialize + ?Sized>(report: &T) -> Result<String> {
    let v = serde_json::to_value(report)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => n.as_f64().and_then(format_float).unwrap_or_default(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let s = other.to_string();
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

/// Flat CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Key/value table of the scalar leaves of a JSON object, keys joined by `.`.
    pub fn flatten<T: Serialize + ?Sized>(report: &T) -> Result<Table> {
        fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
            match v {
                Value::Object(map) => {
                    let mut keys: Vec<&String> = map.keys().collect();
                    keys.sort();
                    for k in keys {
                        let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                        walk(&p, &map[k], out);
                    }
                }
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        walk(&format!("{prefix}.{i}"), item, out);
                    }
                }
                leaf => out.push((prefix.to_string(), leaf.clone())),
            }
        }
        let mut pairs = Vec::new();
        walk("", &serde_json::to_value(report)?, &mut pairs);
        let mut t = Table::new(&["key", "value"]);
        for (k, v) in pairs {
            t.push(vec![Value::String(k), v]);
        }
        Ok(t)
    }
}

/// Reports that have a natural tabular form beyond the flattened key/value view.
pub trait Tabular {
    fn table(&self) -> Table;
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_floats() {
        let a = to_json(&json!({"b": 0.1, "a": 1, "c": [1.5, null], "d": {"z": true, "y": "s"}})).unwrap();
        assert_eq!(
            a,
            "{\n  \"a\": 1,\n  \"b\": 1.0000000000000001e-1,\n  \"c\": [\n    1.5000000000000000e0,\n    null\n  ],\n  \"d\": {\n    \"y\": \"s\",\n    \"z\": true\n  }\n}\n"
        );
        // 17 significant digits read back to the same double
        for v in [0.1, 1.0 / 3.0, 2.5e-17, 6.02e23] {
            let s = format_float(v).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        #[derive(Serialize)]
        struct R {
            v: f64,
        }
        assert!(to_json(&R { v: f64::NAN }).unwrap().contains("null"));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "re", "im"]);
        t.push(vec![json!(0), json!(0.0), json!(-0.5)]);
        assert_eq!(t.to_csv(), "n,re,im\n0,0.0000000000000000e0,-5.0000000000000000e-1\n");
        let f = Table::flatten(&json!({"a": {"b": 2}, "c": [1, "x,y"]})).unwrap();
        assert_eq!(f.to_csv(), "key,value\na.b,2\nc.0,1\nc.1,\"x,y\"\n");
    }
}
