//! Tabular output with a provenance header.
//!
//! CSV files open with `#` comment lines (tool version, config hash, command,
//! metadata, notes) followed by the header row. Floats are written in their
//! shortest round-trip form, so identical inputs give identical bytes.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{fmt_f64, Format};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => quote(s),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// RFC 4180 quoting, applied only when the field needs it.
fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub command: &'static str,
    pub config_sha256: String,
    /// Ordered `key=value` pairs written on a single comment line.
    pub meta: Vec<(String, String)>,
    /// Free-form lines (validation findings and the like).
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    version: &'a str,
    config_sha256: &'a str,
    command: &'a str,
    metadata: Map<String, Value>,
    notes: &'a [String],
    columns: &'a [&'static str],
    rows: Vec<Vec<Value>>,
}

impl Document {
    pub fn new(command: &'static str, config_sha256: String, columns: Vec<&'static str>) -> Self {
        Document {
            command,
            config_sha256,
            meta: Vec::new(),
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# kpgm {VERSION}\n"));
        out.push_str(&format!("# config-sha256 {}\n", self.config_sha256));
        out.push_str(&format!("# command {}\n", self.command));
        if !self.meta.is_empty() {
            let pairs: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("# {}\n", pairs.join(" ")));
        }
        for n in &self.notes {
            out.push_str(&format!("# note: {}\n", n.replace(['\n', '\r'], " ")));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonDocument {
            version: VERSION,
            config_sha256: &self.config_sha256,
            command: self.command,
            metadata: self.meta.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect(),
            notes: &self.notes,
            columns: &self.columns,
            rows: self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> Document {
        let mut d = Document::new("thermo", "ab".repeat(32), vec!["beta", "path", "Z_re"]);
        d.meta.push(("path".into(), "direct".into()));
        d.meta.push(("n_max".into(), "2".into()));
        d.notes.push("a, b".into());
        d.rows.push(vec![Cell::Float(0.1), Cell::Text("direct".into()), Cell::Float(1e-300)]);
        d.rows.push(vec![Cell::Float(2.0), Cell::Text("x,\"y\"".into()), Cell::Float(f64::NAN)]);
        d
    }

    #[test]
    fn csv_layout() {
        let text = doc().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# kpgm {VERSION}"));
        assert_eq!(lines[1], format!("# config-sha256 {}", "ab".repeat(32)));
        assert_eq!(lines[2], "# command thermo");
        assert_eq!(lines[3], "# path=direct n_max=2");
        assert_eq!(lines[4], "# note: a, b");
        assert_eq!(lines[5], "beta,path,Z_re");
        assert_eq!(lines[6], "0.1,direct,1e-300");
        assert_eq!(lines[7], "2.0,\"x,\"\"y\"\"\",NaN");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -9.353135104300001, 6.02214076e23, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&doc().to_json()).unwrap();
        assert_eq!(v["command"], "thermo");
        assert_eq!(v["metadata"]["n_max"], "2");
        assert_eq!(v["columns"][2], "Z_re");
        assert_eq!(v["rows"][0][2], 1e-300);
        assert!(v["rows"][1][2].is_null());
    }
}
