//! Tabular output as CSV or as a JSON array of row objects.

use std::io::{self, Write};

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    /// Undefined cell: empty in CSV, null in JSON.
    Missing,
    Int(u64),
    Text(String),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Missing, Field::Num)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

/// Shortest digits that parse back to the same value; exponent form outside
/// `[1e-4, 1e15)`.
fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => format_float(*v),
            Field::Num(_) | Field::Missing => String::new(),
            Field::Int(v) => v.to_string(),
            Field::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Field::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Field::Missing => Value::Null,
            Field::Int(v) => Value::from(*v),
            Field::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Field::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, f)| (h.clone(), f.json()))
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
    fn csv_cells() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![0.1.into(), None.into(), "x,y".into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,c\n0.1,,\"x,y\"\n");
        let json = t.to_json();
        assert_eq!(json[0]["b"], Value::Null);
        assert_eq!(json[0]["a"], 0.1);
    }

    #[test]
    fn floats_round_trip() {
        let v = [std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 9.522282013638213e-8, 0.0];
        let mut t = Table::new(["v"]);
        for x in v {
            t.push(vec![x.into()]);
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let parsed: Vec<f64> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.parse().unwrap())
            .collect();
        assert_eq!(parsed, v);
    }
}
