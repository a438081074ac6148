//! Tabular results and their CSV / JSON serializations.

use serde_json::{Map, Value};

use crate::RunConfig;

/// Significant digits used for every emitted float.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn text(&self) -> String {
        match *self {
            Cell::Num(x) => format_number(x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Num(x) if x.is_finite() => {
                let rounded: f64 = format_number(x).parse().expect("formatted float parses");
                Value::from(rounded)
            }
            // JSON has no infinities
            Cell::Num(x) => Value::String(format_number(x)),
            Cell::Int(n) => Value::from(n),
            Cell::Bool(b) => Value::Bool(b),
        }
    }
}

/// Formats like C's `%.12g`: fixed or exponent notation, whichever is
/// shorter for the magnitude, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Named columns with one row of cells per grid point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Numeric values of a column; booleans map to 0/1.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(
            self.column(name)?
                .into_iter()
                .map(|c| match c {
                    Cell::Num(x) => x,
                    Cell::Int(n) => n as f64,
                    Cell::Bool(b) => f64::from(u8::from(b)),
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::text).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut config = serde_json::to_value(cfg).expect("config serializes");
        if let Some(grid) = config.get_mut("theta_grid") {
            *grid = Value::Array(cfg.theta_grid.iter().map(|&t| Cell::Num(t).json()).collect());
        }
        let mut top = Map::new();
        top.insert("config".into(), config);
        top.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("json serializes");
        text.push('\n');
        text
    }
}
