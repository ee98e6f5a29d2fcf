use std::io::{self, Write};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use super::Format;
use crate::cycle::Verdict;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub schema_version: String,
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub verdicts: Vec<VerdictEntry>,
    pub elapsed_ms: u64,
}

impl Envelope {
    pub(super) fn failed(command: String, params: Value, elapsed: Duration) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION.into(),
            command,
            params,
            result: Value::Null,
            verdicts: Vec::new(),
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }
}

/// One checked property or identity. Only `required` entries affect the
/// exit code.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub verdict: Verdict,
    pub required: bool,
    pub detail: String,
}

impl VerdictEntry {
    pub(super) fn required(name: String, verdict: Verdict, detail: String) -> Self {
        VerdictEntry {
            name,
            verdict,
            required: true,
            detail,
        }
    }

    pub(super) fn informational(name: String, verdict: Verdict, detail: String) -> Self {
        VerdictEntry {
            name,
            verdict,
            required: false,
            detail,
        }
    }
}

pub(super) fn render(env: &Envelope, format: Format, out: &mut dyn Write) -> io::Result<()> {
    let value = serde_json::to_value(env).expect("envelope serializes");
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)
        }
        Format::Csv => {
            writeln!(out, "path,value")?;
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            for (path, v) in rows {
                writeln!(out, "{},{}", csv_field(&path), csv_field(&v))?;
            }
            Ok(())
        }
        Format::Text => write_text(out, &value, 0),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, rows);
            }
        }
        Value::Array(items) if items.is_empty() => rows.push((prefix.to_string(), String::new())),
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn is_flat_array(items: &[Value]) -> bool {
    items.iter().all(|v| !v.is_object() && !v.is_array())
        || items
            .iter()
            .all(|v| matches!(v, Value::Array(inner) if inner.iter().all(|x| !x.is_object() && !x.is_array())))
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        other => scalar(other),
    }
}

fn write_text(out: &mut dyn Write, v: &Value, depth: usize) -> io::Result<()> {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        writeln!(out, "{pad}{k}:")?;
                        write_text(out, v, depth + 1)?;
                    }
                    Value::Array(items) if !is_flat_array(items) => {
                        writeln!(out, "{pad}{k}:")?;
                        for item in items {
                            writeln!(out, "{pad}  -")?;
                            write_text(out, item, depth + 2)?;
                        }
                    }
                    other => writeln!(out, "{pad}{k}: {}", inline(other))?,
                }
            }
            Ok(())
        }
        other => writeln!(out, "{pad}{}", inline(other)),
    }
}
