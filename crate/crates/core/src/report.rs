//! Byte-stable JSON and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::Result;

/// `{:.16e}`: 17 significant digits, exact round trip.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no non-finite numbers.
        format!("\"{x}\"")
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent + 1);
    let close = "  ".repeat(indent);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => {
                let _ = write!(out, "{u}");
            }
            (None, Some(i)) => {
                let _ = write!(out, "{i}");
            }
            _ => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &m[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push('}');
        }
    }
}

/// Sorted keys, two-space indent, floats as `{:.16e}`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = String::new();
    write_value(&mut s, &v, 0);
    s.push('\n');
    Ok(s)
}

/// Config lines as `key = value` strings, in canonical order.
pub fn config_lines(c: &RunConfig) -> Vec<String> {
    c.to_text().lines().map(str::to_string).collect()
}

/// JSON document with the effective config embedded under `config`.
pub fn write_json<T: Serialize>(path: &Path, config: &RunConfig, body: &T) -> Result<()> {
    let mut v = serde_json::to_value(body)?;
    if let Value::Object(m) = &mut v {
        m.insert("config".into(), serde_json::to_value(config_lines(config))?);
    }
    fs::write(path, to_json(&v)?)?;
    Ok(())
}

/// CSV with the config as leading `#` lines, a header row and
/// `{:.16e}` cells.
pub fn write_csv(path: &Path, config: &RunConfig, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut s = String::new();
    for line in config_lines(config) {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted_and_floats_fixed() {
        let s = to_json(&json!({"b": 0.1, "a": [1, -2, 2.5e-300], "c": {"z": "x", "y": true}})).unwrap();
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("2.5000000000000000e-300"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
        assert_eq!(back["a"][1].as_i64(), Some(-2));
    }

    #[test]
    fn float_round_trips() {
        for x in [0.0, -1.0, 1.0 / 3.0, 6.02e23, -4.9e-324] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
    }
}
