//! Output documents. Floats are written with 17 significant digits so a
//! re-run produces the same bytes and a reader recovers the same `f64`.

use std::io::Write;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Bool(bool),
    Int(i128),
    Float(f64),
    Str(String),
    List(Vec<Cell>),
    Map(Vec<(String, Cell)>),
}

pub fn fmt_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u64, usize, i64, u32);

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Int(i) => s.serialize_i128(*i),
            Cell::Float(x) => match fmt_float(*x) {
                Some(text) => RawValue::from_string(text)
                    .map_err(serde::ser::Error::custom)?
                    .serialize(s),
                None => s.serialize_none(),
            },
            Cell::Str(t) => s.serialize_str(t),
            Cell::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for it in items {
                    seq.serialize_element(it)?;
                }
                seq.end()
            }
            Cell::Map(entries) => {
                let mut map = s.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

impl Cell {
    /// Flat text for a CSV field.
    fn csv_text(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x).unwrap_or_default(),
            Cell::Str(t) => t.clone(),
            other => serde_json::to_string(other).unwrap_or_default(),
        }
    }
}

/// A table of rows sharing one column list.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn as_cells(&self) -> Cell {
        Cell::List(
            self.rows
                .iter()
                .map(|r| {
                    Cell::Map(
                        self.columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

pub struct Report {
    pub config: Cell,
    pub results: Table,
    pub summary: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let doc = Cell::Map(vec![
                    ("config".into(), self.config.clone()),
                    ("results".into(), self.results.as_cells()),
                    ("summary".into(), self.summary.clone()),
                ]);
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.results.columns)?;
                for row in &self.results.rows {
                    w.write_record(row.iter().map(Cell::csv_text))?;
                }
                w.flush()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5e17] {
            let text = fmt_float(x).unwrap();
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(f64::NAN), None);
    }

    #[test]
    fn json_and_csv_shapes() {
        let mut t = Table::new(vec!["name", "x", "ok"]);
        t.push(vec!["a,b".into(), 0.5.into(), true.into()]);
        t.push(vec!["c".into(), f64::INFINITY.into(), false.into()]);
        let rep = Report {
            config: Cell::Map(vec![("seed".into(), 7u64.into())]),
            results: t,
            summary: Cell::Map(Vec::new()),
        };
        let mut buf = Vec::new();
        rep.write(Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["results"][0]["x"], 0.5);
        assert!(v["results"][1]["x"].is_null());
        assert_eq!(v["config"]["seed"], 7);

        let mut buf = Vec::new();
        rep.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "name,x,ok\n\"a,b\",5.0000000000000000e-1,true\nc,,false\n"
        );
    }
}
