//! Table output as CSV or JSON.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, SweepConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(&'static str),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::from)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as u64)
    }
}

impl Cell {
    fn to_json(self) -> Value {
        match self {
            Cell::Num(x) => Value::from(x),
            Cell::Int(k) => Value::from(k),
            Cell::Bool(b) => Value::from(b),
            Cell::Text(s) => Value::from(s),
            Cell::Missing => Value::Null,
        }
    }

    fn to_csv(self) -> String {
        match self {
            Cell::Num(x) => format_number(x),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

/// Shortest decimal that round-trips to `x`; exponent form outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Header plus rows, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, config: &Map<String, Value>, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => self.to_json(config),
        }
    }

    fn to_csv(&self, config: &Map<String, Value>) -> String {
        let mut out = format!("# config: {}\n", Value::Object(config.clone()));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self, config: &Map<String, Value>) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            config: &'a Map<String, Value>,
            columns: &'a [String],
            rows: Vec<Vec<Value>>,
        }
        let rows = self.rows.iter().map(|r| r.iter().map(|c| c.to_json()).collect()).collect();
        let mut s = serde_json::to_string(&Doc { config, columns: &self.columns, rows }).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Writes `table` for `cfg` to `path`, creating or truncating it.
pub fn write_table(path: &Path, cfg: &SweepConfig, table: &Table) -> Result<()> {
    let text = table.render(&cfg.echo(), cfg.format);
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    file.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-7, 6.02214076e23, 1e16, 1e-5, 1e16 - 2.0, f64::MIN_POSITIVE, 123456.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains(' ') && !s.contains(','));
        }
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(2.0), "2");
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new(["x[1]", "y[1]"]);
        t.push(vec![Cell::Num(1.5), Cell::Missing]);
        t.push(vec![Cell::Int(3), Cell::from(f64::NAN)]);
        let mut cfg = Map::new();
        cfg.insert("b".into(), Value::from(1.0));
        cfg.insert("a".into(), Value::from("z"));
        assert_eq!(t.render(&cfg, Format::Csv), "# config: {\"a\":\"z\",\"b\":1.0}\nx[1],y[1]\n1.5,\n3,\n");
        let json: Value = serde_json::from_str(&t.render(&cfg, Format::Json)).unwrap();
        assert_eq!(json["columns"][1], "y[1]");
        assert_eq!(json["rows"][0][0], 1.5);
        assert!(json["rows"][1][1].is_null());
        assert_eq!(json["config"]["a"], "z");
    }
}
