use serde::{Deserialize, Serialize};
use serde_json::Value;
use superpat_core::Caps;

pub const SCHEMA_VERSION: u32 = 1;

/// Every JSON document the CLI prints has this shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: String,
    pub caps: Caps,
    pub result: T,
}

impl<T> Envelope<T> {
    pub fn new(command: impl Into<String>, caps: Caps, result: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            caps,
            result,
        }
    }
}

/// Pretty JSON with struct-declaration key order and a trailing newline.
pub fn emit_report<T: Serialize>(envelope: &Envelope<T>) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(envelope)?;
    s.push('\n');
    Ok(s)
}

/// `key: value` lines, nested keys joined with dots.
pub fn emit_text<T: Serialize>(envelope: &Envelope<T>) -> serde_json::Result<String> {
    let value = serde_json::to_value(&envelope.result)?;
    let mut out = String::new();
    flatten("", &value, &mut out);
    Ok(out)
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                let p = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&p, val, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{prefix}: {}\n", joined.join(" ")));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
