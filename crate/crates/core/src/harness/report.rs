use serde::{Serialize, Serializer};
use serde_json::Value;

/// Float serialized with 12 significant digits; non-finite values become
/// `"inf"`, `"-inf"` or `"nan"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Number(pub f64);

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(round_sig(v, 12))
        }
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let text = format!("{:.*e}", digits - 1, v);
    let r: f64 = text.parse().expect("formatted float parses");
    if r == 0.0 { 0.0 } else { r }
}

/// Replaces every float in `v` by its 12-significant-digit rounding.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_sig(x, 12)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

/// A subcommand's output: the library version, the configuration that
/// produced it and the result. Keys serialize in sorted order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize, result: Value) -> Self {
        Self {
            command: command.to_string(),
            version: crate::VERSION.to_string(),
            config: round_floats(serde_json::to_value(config).expect("config serializes")),
            result: round_floats(result),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV view of the result. A result with a `rows` array of objects
    /// becomes a table; anything else becomes `key,value` lines with dotted
    /// paths.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = self.result.get("rows").and_then(Value::as_array).filter(|r| r.iter().all(Value::is_object));
        if let Some(rows) = rows.filter(|r| !r.is_empty()) {
            let header: Vec<String> = rows[0].as_object().expect("object row").keys().cloned().collect();
            w.write_record(&header).expect("in-memory write");
            for row in rows {
                w.write_record(header.iter().map(|k| cell(row.get(k).unwrap_or(&Value::Null))))
                    .expect("in-memory write");
            }
        } else {
            w.write_record(["key", "value"]).expect("in-memory write");
            let mut leaves = Vec::new();
            flatten("", &self.result, &mut leaves);
            for (k, v) in leaves {
                w.write_record([k, v]).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        leaf => out.push((prefix.to_string(), cell(leaf))),
    }
}
