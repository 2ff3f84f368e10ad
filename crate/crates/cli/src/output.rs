//! JSON conventions: every floating-point value is a decimal string carrying at
//! least 17 significant digits; counts, indices and signs stay JSON integers.

use mb_core::{Real, SignedLogReal};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "mb/1";

/// Decimal string for `v` (18 significant digits; `inf`, `-inf`, `NaN` for non-finite).
pub fn num(v: f64) -> Value {
    Value::String(v.to_decimal())
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// `{"sign", "log_value", "value"}`; the log of an exact zero is `-inf`.
pub fn signed(s: SignedLogReal) -> Value {
    let log = if s.sign == 0 { f64::NEG_INFINITY } else { s.logmag };
    json!({ "sign": s.sign, "log_value": num(log), "value": num(s.to_real()) })
}

/// Replaces every floating-point number in `v` by its decimal string.
pub fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        other => other,
    }
}

/// Inverse of [`stringify`] for input: strings that parse as numbers become numbers.
pub fn numify(v: Value) -> Value {
    match v {
        Value::String(s) => match s.trim().parse::<f64>() {
            Ok(x) => serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::String(s)),
            Err(_) => Value::String(s),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(numify).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, numify(v))).collect()),
        other => other,
    }
}

/// Top-level object with the schema tag, command name and accumulation precision.
pub fn envelope(command: &str, precision: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    m.insert("precision".into(), precision.into());
    m
}
