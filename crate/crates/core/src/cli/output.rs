use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// One line of JSON output.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub op: &'static str,
    pub inputs: Value,
    pub value: Value,
    pub diagnostics: Value,
}

impl Record {
    pub fn new(op: &'static str, inputs: Value, value: Value, diagnostics: Value) -> Self {
        Self {
            op,
            inputs,
            value,
            diagnostics,
        }
    }

    /// `{"op":…,"inputs":…,"value":…,"diagnostics":…}` on one line, floats
    /// with 17 significant digits.
    pub fn to_json_line(&self) -> String {
        let mut s = String::from("{\"op\":");
        write_value(&mut s, &Value::String(self.op.to_string()));
        s.push_str(",\"inputs\":");
        write_value(&mut s, &self.inputs);
        s.push_str(",\"value\":");
        write_value(&mut s, &self.value);
        s.push_str(",\"diagnostics\":");
        write_value(&mut s, &self.diagnostics);
        s.push('}');
        s
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(format!("serialization failed: {e}")))
}

pub fn complex(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, x)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:", Value::String(k.clone()));
                write_value(out, x);
            }
            out.push('}');
        }
        other => {
            let _ = write!(out, "{other}");
        }
    }
}

/// CSV table with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}
