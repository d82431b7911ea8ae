//! Tidy output tables written as CSV or JSON.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn to_field(&self) -> String {
        match self {
            // `Display` for f64 prints the shortest string that parses back
            // to the same value.
            Cell::Float(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Vec<Cell>>) {
        rows.into_iter().for_each(|r| self.push(r));
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field))?;
        }
        w.flush()
    }

    pub fn write_json<W: Write, C: Serialize>(
        &self,
        mut out: W,
        config: &C,
        seed: u64,
    ) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_owned(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "config": config,
            "rows": rows,
            "provenance": {
                "seed": seed,
                "versions": {
                    "risfade": env!("CARGO_PKG_VERSION"),
                },
            },
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        let mut t = Table::new(&["x", "label"]);
        let x = 0.1 + 0.2;
        t.push(vec![x.into(), "a,b".into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,label\n0.30000000000000004,\"a,b\"\n");
        let back: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_shape() {
        let mut t = Table::new(&["n", "v"]);
        t.push(vec![3u32.into(), f64::NAN.into()]);
        let mut buf = Vec::new();
        t.write_json(&mut buf, &json!({"k": 1}), 7).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["provenance"]["seed"], 7);
        assert_eq!(v["rows"][0]["n"], 3);
        assert!(v["rows"][0]["v"].is_null());
        assert_eq!(v["config"]["k"], 1);
    }
}
