//! Report envelope and its two renderings. The table is derived from the
//! same JSON payload, so both always carry the same numbers.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub diagnostics: Value,
}

impl Report {
    pub fn new(command: &str, input: &[u8], results: Value, diagnostics: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs_digest: digest(input),
            results,
            diagnostics,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let value = serde_json::to_value(self).expect("plain data");
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(&value).expect("plain data"),
            OutputFormat::Table => table(&value),
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `%g`-style formatting with six significant digits.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("scientific");
        format!("{}e{e}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => g6(n.as_f64().unwrap_or(f64::NAN)),
        }),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Arrays of scalars (or of `[re, im]` pairs) stay on one line.
fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    let Value::Array(items) = v else { return None };
    let parts: Option<Vec<String>> = items
        .iter()
        .map(|item| match item {
            Value::Array(pair) if pair.len() == 2 && pair.iter().all(Value::is_number) => {
                let re = pair[0].as_f64().unwrap_or(f64::NAN);
                let im = pair[1].as_f64().unwrap_or(f64::NAN);
                Some(complex(re, im))
            }
            other => scalar(other),
        })
        .collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        g6(re)
    } else if re == 0.0 {
        format!("{}i", g6(im))
    } else if im < 0.0 {
        format!("{}-{}i", g6(re), g6(-im))
    } else {
        format!("{}+{}i", g6(re), g6(im))
    }
}

fn rows(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(s) = inline(v) {
        out.push((prefix.to_string(), s));
        return;
    }
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push((prefix.to_string(), "{}".into()));
            }
            for (k, item) in map {
                rows(&join(k), item, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (i, item) in items.iter().enumerate() {
                rows(&format!("{prefix}[{}]", i + 1), item, out);
            }
        }
        _ => unreachable!("scalars render inline"),
    }
}

pub fn table(value: &Value) -> String {
    let mut out = Vec::new();
    rows("", value, &mut out);
    let width = out.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    out.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Diagnostics object with an optional `timings_ms` entry.
pub fn diagnostics(mut fields: Map<String, Value>, timings: Option<Value>) -> Value {
    if let Some(t) = timings {
        fields.insert("timings_ms".into(), t);
    }
    Value::Object(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn six_significant_digits() {
        assert_eq!(g6(0.6240581234), "0.624058");
        assert_eq!(g6(0.0365928123), "0.0365928");
        assert_eq!(g6(1.0), "1");
        assert_eq!(g6(-2.5), "-2.5");
        assert_eq!(g6(123456789.0), "1.23457e8");
        assert_eq!(g6(1.5e-9), "1.5e-9");
        assert_eq!(g6(0.0), "0");
    }

    #[test]
    fn table_flattens_nested_payloads() {
        let t = table(&json!({"a": {"b": [1.0, 2.5]}, "c": [{"d": true}], "z": [[0.5, -1.0]]}));
        let rows: Vec<String> = t.lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
        assert_eq!(rows, ["a.b [1, 2.5]", "c[1].d true", "z [0.5-1i]"]);
    }

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(
            digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
