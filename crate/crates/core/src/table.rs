//! Small CSV/JSON table writer for the CLI outputs.

use serde_json::{Map, Number, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    /// Floats use the shortest round-trip form, which always carries a
    /// decimal point (`1.0`, `0.40528473456935109`).
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:?}"),
        }
    }

    fn to_json(self) -> Value {
        match self {
            Cell::Int(i) => Value::from(i),
            Cell::Float(x) => Number::from_f64(x).map_or(Value::Null, Value::Number),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width");
        self.rows.push(row);
    }

    /// Header line then one line per row, LF terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Array of objects keyed by column name.
    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .headers
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["g", "G", "F"]);
        t.push(vec![0.0.into(), 1.0.into(), 1.0.into()]);
        t.push(vec![0.5.into(), 0.8727585213452592.into(), 0.765625.into()]);
        assert_eq!(
            t.to_csv(),
            "g,G,F\n0.0,1.0,1.0\n0.5,0.8727585213452592,0.765625\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 4.0 / std::f64::consts::PI.powi(2), 1e-300, 6.02e23] {
            let s = Cell::Float(x).render();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(vec!["N", "variance_over_t2"]);
        t.push(vec![4usize.into(), 2.5.into()]);
        assert_eq!(
            t.to_json_value().to_string(),
            r#"[{"N":4,"variance_over_t2":2.5}]"#
        );
    }
}
