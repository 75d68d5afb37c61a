//! JSON and CSV rendering.
//!
//! Integers above `2^53 - 1` and exact rationals are written as decimal
//! strings; object outputs list the paths of such fields in `string_encoded`.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const OUT_DIR_ENV: &str = "CFEXP_OUT_DIR";

const MAX_SAFE: u64 = (1 << 53) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// A rendered result: the JSON document and its CSV table.
pub struct Output {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    /// CSV from the given columns of each element of `items`.
    pub fn table(json: Value, header: &[&str], items: &[Value]) -> Self {
        let rows = items.iter().map(|it| header.iter().map(|h| cell(&it[*h])).collect()).collect();
        Output { json, header: header.iter().map(|h| h.to_string()).collect(), rows }
    }

    /// CSV of `field,value` pairs from the flattened JSON document.
    pub fn report(json: Value) -> Self {
        let mut rows = Vec::new();
        flatten("", &json, &mut rows);
        Output { json, header: vec!["field".into(), "value".into()], rows }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(&self.json).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
                w.write_record(&self.header).map_err(|e| e.to_string())?;
                for r in &self.rows {
                    w.write_record(r).map_err(|e| e.to_string())?;
                }
                w.into_inner().map_err(|e| e.to_string())
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push(vec![prefix.to_string(), cell(other)]),
    }
}

pub fn int(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) if v <= MAX_SAFE => json!(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_u64(x: u64) -> Value {
    if x <= MAX_SAFE {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Adds `string_encoded` to an object.
pub fn mark(mut v: Value, fields: &[&str]) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("string_encoded".into(), json!(fields));
    }
    v
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

/// Object holding the fields of `base` plus `extra`.
pub fn merge(extra: Vec<(&str, Value)>, base: Value) -> Value {
    let mut v = object(extra);
    if let (Value::Object(m), Value::Object(b)) = (&mut v, base) {
        m.extend(b);
    }
    v
}

/// Where to write: `--output` (`-` for stdout), relative paths resolved under
/// the output directory from the environment when set, else
/// `<dir>/<command>.<ext>` when only the directory is set, else stdout.
pub fn destination(output: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from);
    match (output, dir) {
        (Some(p), _) if p == Path::new("-") => None,
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{command}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub fn write(bytes: &[u8], dest: Option<&Path>) -> std::io::Result<()> {
    match dest {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, bytes)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_integers_become_strings() {
        assert_eq!(int_u64(MAX_SAFE), json!(MAX_SAFE));
        assert_eq!(int_u64(MAX_SAFE + 1), json!("9007199254740992"));
        assert_eq!(int(&BigUint::from(6u32)), json!(6));
    }

    #[test]
    fn flattening() {
        let o = Output::report(json!({"a": {"b": 1, "c": [1, 2]}, "d": [{"e": true}]}));
        assert_eq!(o.rows, vec![vec!["a.b", "1"], vec!["a.c", "1 2"], vec!["d[0].e", "true"]]);
    }

    #[test]
    fn csv_is_crlf_and_quoted() {
        let o = Output::table(json!(null), &["x", "y"], &[json!({"x": "a,b", "y": 1})]);
        let s = String::from_utf8(o.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(s, "x,y\r\n\"a,b\",1\r\n");
    }
}
