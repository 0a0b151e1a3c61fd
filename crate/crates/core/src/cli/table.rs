//! Tabular output: CSV with a `#` metadata line, or JSON `{meta, columns, rows}`.
//! Both formats read back through [`Table::read`].

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Num(x) => Some(x),
            Value::Text(ref s) => s.parse().ok(),
            Value::Missing => None,
        }
    }

    /// Full-precision cell text: 17 significant digits for floats.
    fn to_cell(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => format!("{x:.16e}"),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn parse_cell(s: &str) -> Value {
        if s.is_empty() {
            Value::Missing
        } else if let Ok(i) = s.parse() {
            Value::Int(i)
        } else if let Ok(x) = s.parse() {
            Value::Num(x)
        } else {
            Value::Text(s.to_owned())
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    /// Ordered `key=value` pairs echoed into the header.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// JSON shape: `meta` becomes an object with the keys in insertion order.
#[derive(Serialize, Deserialize)]
struct JsonTable {
    meta: serde_json::Map<String, serde_json::Value>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Table(format!("missing column `{name}`")))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<&Value>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.get(i)
                    .ok_or_else(|| Error::Table(format!("row {r} is shorter than the header")))
            })
            .collect()
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .enumerate()
            .map(|(r, v)| {
                v.as_f64()
                    .ok_or_else(|| Error::Table(format!("non-numeric `{name}` in row {r}: {v:?}")))
            })
            .collect()
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let meta: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "# {}", meta.join(" "))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::to_cell))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let t = JsonTable {
            meta: self
                .meta
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
            columns: self.columns.clone(),
            rows: self.rows.clone(),
        };
        serde_json::to_writer_pretty(&mut *out, &t)?;
        writeln!(out)?;
        Ok(())
    }

    /// Parse either format; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Table> {
        if text.trim_start().starts_with('{') {
            let t: JsonTable = serde_json::from_str(text)?;
            let meta = t
                .meta
                .into_iter()
                .map(|(k, v)| match v {
                    serde_json::Value::String(s) => (k, s),
                    other => (k, other.to_string()),
                })
                .collect();
            return Ok(Table {
                meta,
                columns: t.columns,
                rows: t.rows,
            });
        }
        let mut meta = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(m) = line.strip_prefix('#') {
                meta.extend(m.split_whitespace().filter_map(|kv| {
                    kv.split_once('=').map(|(k, v)| (k.to_owned(), v.to_owned()))
                }));
            } else if !line.trim().is_empty() {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if columns.is_empty() {
            return Err(Error::Table("no header line".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Value::parse_cell).collect());
        }
        Ok(Table { meta, columns, rows })
    }

    pub fn read(path: &Path) -> Result<Table> {
        let mut s = String::new();
        if path.as_os_str() == "-" {
            std::io::stdin().read_to_string(&mut s)?;
        } else {
            std::fs::File::open(path)?.read_to_string(&mut s)?;
        }
        Table::parse(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["kind", "size", "gap"]);
        t.meta("command", "gaps").meta("theta", 0.2);
        t.push(vec!["phy".into(), 6usize.into(), 0.1f64.into()]);
        t.push(vec!["ent".into(), 2usize.into(), Value::Missing]);
        t
    }

    fn render(t: &Table, f: Format) -> String {
        let mut buf = Vec::new();
        t.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_layout() {
        let s = render(&sample(), Format::Csv);
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "# command=gaps theta=0.2");
        assert_eq!(lines[1], "kind,size,gap");
        assert_eq!(lines[2], "phy,6,1.0000000000000001e-1");
        assert_eq!(lines[3], "ent,2,");
    }

    #[test]
    fn round_trips() {
        let t = sample();
        for f in [Format::Csv, Format::Json] {
            let back = Table::parse(&render(&t, f)).unwrap();
            assert_eq!(back, t, "{f:?}");
        }
    }

    #[test]
    fn float_cells_are_exact() {
        let x = std::f64::consts::PI / 7.0;
        let mut t = Table::new(["x"]);
        t.push(vec![x.into()]);
        let back = Table::parse(&render(&t, Format::Csv)).unwrap();
        assert_eq!(back.column_f64("x").unwrap(), vec![x]);
        assert!(back.column_f64("y").is_err());
    }
}
