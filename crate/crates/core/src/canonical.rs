//! Stable JSON text: object keys sorted, floats rounded to six significant
//! digits, so that repeated runs produce identical bytes.

use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Round to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let v: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Format with six significant digits in plain notation where practical.
pub fn fmt_sig6(x: f64) -> String {
    let r = round_sig6(x);
    if r.is_finite() && r == r.trunc() && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn normalise(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig6(n.as_f64().unwrap_or(0.0));
            Number::from_f64(r)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalise).collect()),
        Value::Object(o) => {
            let mut sorted: Vec<(String, Value)> = o.into_iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                sorted
                    .into_iter()
                    .map(|(k, v)| (k, normalise(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        other => other,
    }
}

pub fn to_value<T: Serialize>(value: &T) -> serde_json::Result<Value> {
    serde_json::to_value(value).map(normalise)
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&to_value(value)?)?;
    s.push('\n');
    Ok(s)
}
