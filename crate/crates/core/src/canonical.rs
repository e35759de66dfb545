//! Canonical JSON serialization.
//!
//! Scene files, manifests, and log records are emitted in a canonical form
//! so determinism can be tested byte-for-byte: object keys sorted, no
//! insignificant whitespace beyond single spaces after `:` and `,`, floats
//! printed in scientific notation with 17 significant digits (enough for an
//! exact f64 round-trip), `-0.0` normalized to `0.0`.

use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

/// Serialize `value` to canonical JSON text (no trailing newline).
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out)?;
    Ok(out)
}

/// Format one f64 the way the canonical writer does.
pub fn format_f64(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::NonFinite("json number".into()));
    }
    let x = if x == 0.0 { 0.0 } else { x }; // collapse -0.0
    Ok(format!("{:.16e}", x))
}

fn write_value(v: &Value, out: &mut String) -> Result<()> {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().ok_or_else(|| Error::NonFinite("json".into()))?;
                out.push_str(&format_f64(f)?);
            }
        }
        Value::String(s) => {
            // serde_json handles the escaping rules
            out.push_str(&serde_json::to_string(s)?);
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, out)?;
            }
            out.push(']');
        }
        Value::Object(map) => {
            // Sort explicitly rather than relying on the map backing.
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort_unstable();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&serde_json::to_string(k)?);
                out.push_str(": ");
                write_value(&map[k], out)?;
            }
            out.push('}');
        }
    }
    Ok(())
}
