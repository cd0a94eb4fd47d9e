//! Tables rendered as CSV (`#` metadata lines, one header line) or as a
//! JSON `{meta, rows}` object.

use std::io::Write;

use serde_json::{Map, Number, Value as Json};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Float(x) => format!("{x:?}"),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => csv_escape(s),
            Value::Bool(b) => b.to_string(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Float(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
            Value::Int(i) => Json::from(*i),
            Value::Text(s) => Json::from(s.as_str()),
            Value::Bool(b) => Json::from(*b),
            Value::Missing => Json::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Float)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Command-specific metadata and summary values, in insertion order.
    pub meta: Vec<(String, Value)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn meta_value(&self, key: &str) -> Option<&Value> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn header_meta(&self, cfg: &RunConfig) -> Vec<(String, Value)> {
        let mut m = vec![
            ("command".to_string(), Value::from(cfg.command.as_str())),
            ("config_sha256".to_string(), Value::from(cfg.config_hash())),
            ("seed".to_string(), Value::Int(cfg.seed as i64)),
            ("version".to_string(), Value::from(VERSION)),
        ];
        m.extend(self.meta.iter().cloned());
        m
    }

    pub fn render(&self, cfg: &RunConfig, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(cfg),
            Format::Json => self.render_json(cfg),
        }
    }

    fn render_csv(&self, cfg: &RunConfig) -> String {
        let mut out = String::new();
        for (k, v) in self.header_meta(cfg) {
            let text = match v {
                Value::Text(s) => s,
                other => other.csv(),
            };
            out.push_str(&format!("# {k}: {text}\n"));
        }
        out.push_str(&self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Value::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self, cfg: &RunConfig) -> String {
        let meta: Map<String, Json> = self.header_meta(cfg).into_iter().map(|(k, v)| (k, v.json())).collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                Json::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Json::Object(meta));
        top.insert("rows".into(), Json::Array(rows));
        let mut s = serde_json::to_string_pretty(&Json::Object(top)).expect("serializable");
        s.push('\n');
        s
    }

    /// Writes to `cfg.out`, or stdout when unset.
    pub fn emit(&self, cfg: &RunConfig) -> Result<(), CliError> {
        let text = self.render(cfg, cfg.format);
        match &cfg.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![0.1.into(), "a,b".into()]);
        t.push(vec![Value::Missing, "c".into()]);
        t.meta("count", 2usize);
        t
    }

    #[test]
    fn csv_layout() {
        let cfg = RunConfig::defaults(Command::Fig1);
        let text = sample().render(&cfg, Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# command: fig1"));
        assert!(lines[1].starts_with("# config_sha256: "));
        assert_eq!(lines[4], "# count: 2");
        assert_eq!(lines[5], "x,label");
        assert_eq!(lines[6], "0.1,\"a,b\"");
        assert_eq!(lines[7], ",c");
        let mut t = Table::new(&["v"]);
        t.push(vec![1e-20.into()]);
        t.push(vec![2.0.into()]);
        assert!(t.render(&cfg, Format::Csv).ends_with("v\n1e-20\n2.0\n"));
    }

    #[test]
    fn json_layout() {
        let cfg = RunConfig::defaults(Command::Fig1);
        let v: Json = serde_json::from_str(&sample().render(&cfg, Format::Json)).unwrap();
        assert_eq!(v["meta"]["command"], "fig1");
        assert_eq!(v["meta"]["count"], 2);
        assert_eq!(v["rows"][0]["x"], 0.1);
        assert!(v["rows"][1]["x"].is_null());
    }
}
