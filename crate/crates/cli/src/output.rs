use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits; the value printed is the value replayed.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float in place. Non-finite floats are already `null` after
/// `serde_json::to_value`.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round12(x)))
            {
                *num = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("results serialize to JSON");
    round_floats(&mut v);
    v
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub artifact_version: &'static str,
    pub results: Value,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, parameters: &P, results: Value) -> Self {
        let parameters = match to_json(parameters) {
            Value::Object(map) => map,
            _ => Map::new(),
        };
        RunManifest {
            command: command.to_string(),
            parameters,
            artifact_version: ARTIFACT_VERSION,
            results,
        }
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }
}

/// CSV cell for a float: rounded, empty when not finite.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{:?}", round12(x))
    } else {
        String::new()
    }
}

pub fn write_csv(
    out: &mut dyn Write,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(2.0), 2.0);
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(6.913928667944066), 6.91392866794);
        assert_eq!(round12(-1.23456789012345e-20), -1.23456789012e-20);
    }

    #[test]
    fn non_finite_becomes_null() {
        let v = to_json(&vec![1.0, f64::NAN, f64::INFINITY]);
        assert_eq!(v, serde_json::json!([1.0, null, null]));
        assert_eq!(cell(f64::NAN), "");
    }
}
