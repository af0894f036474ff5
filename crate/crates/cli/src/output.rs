use serde_json::{json, Map, Value};

use crate::config::Format;

/// Rows with a fixed header plus an optional JSON summary. CSV output drops
/// the summary; JSON output carries both.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Option<Value>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), summary: None }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self.header.iter().cloned().zip(r.iter().map(|c| cell(c))).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut v = json!({ "columns": self.header, "rows": rows });
                if let Some(s) = &self.summary {
                    v["summary"] = s.clone();
                }
                format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
            }
        }
    }
}

/// Numbers and booleans keep their JSON types; empty cells become null.
fn cell(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = s.parse::<i64>() {
        return json!(i);
    }
    if let Ok(f) = s.parse::<f64>() {
        if f.is_finite() {
            return json!(f);
        }
    }
    match s {
        "true" => json!(true),
        "false" => json!(false),
        _ => json!(s),
    }
}

pub fn coords(c: &[i128]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn float(x: f64) -> String {
    format!("{x:.6}")
}

pub fn json_doc(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}
