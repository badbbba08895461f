//! Report envelope and its JSON and CSV renderings.
//!
//! Floats are written as `{:.16e}` (17 significant digits) in both formats so
//! every value round-trips and the two renderings agree digit for digit.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

pub const TOOL: &str = "qfp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
    pub result: Value,
}

pub fn float_text(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with scientific floats.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float_text(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(value: &impl Serialize) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.push(b'\n');
    Ok(out)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => float_text(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => unreachable!("flattened before rendering"),
    }
}

/// Dotted-path rows; array elements are indexed by position.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        _ => rows.push((prefix.to_string(), scalar_text(v))),
    }
}

pub fn to_csv(value: &impl Serialize) -> io::Result<Vec<u8>> {
    let v = serde_json::to_value(value).map_err(io::Error::other)?;
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(io::Error::other)?;
    for (k, x) in rows {
        w.write_record([k, x]).map_err(io::Error::other)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

pub fn render(envelope: &Envelope, format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Json => to_json(envelope),
        Format::Csv => to_csv(envelope),
    }
}

/// Overlays `top` on `base`; keys of `top` win.
pub fn merge(base: Value, top: Value) -> Value {
    let mut out = match base {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(m) = top {
        out.extend(m);
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1f64 + 0.2;
        let text = float_text(x);
        assert_eq!(text.parse::<f64>().unwrap(), x);
        let json = String::from_utf8(to_json(&vec![x, 1.0]).unwrap()).unwrap();
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![x, 1.0]);
        assert!(json.contains("1.0000000000000000e0"));
    }

    #[test]
    fn csv_flattens_nested_values() {
        let v = serde_json::json!({"a": {"b": [1.5, 2]}, "s": "x"});
        let text = String::from_utf8(to_csv(&v).unwrap()).unwrap();
        assert_eq!(text, "key,value\na.b.0,1.5000000000000000e0\na.b.1,2\ns,x\n");
    }

    #[test]
    fn merge_prefers_top() {
        let m = merge(serde_json::json!({"n": 1, "k": 2}), serde_json::json!({"n": 3}));
        assert_eq!(m, serde_json::json!({"n": 3, "k": 2}));
    }
}
