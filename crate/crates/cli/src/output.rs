//! Output documents: metadata, checks and named tables, written as JSON or
//! as CSV with `#` comment headers. Both forms read back to a document that
//! re-emits byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub precision_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prng: Option<String>,
    pub params: BTreeMap<String, String>,
}

impl Meta {
    pub fn new(command: &str, precision_bits: u32) -> Self {
        Meta {
            tool: "slowbond".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            precision_bits,
            seed: None,
            prng: None,
            params: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) {
        self.params.insert(key.into(), value.to_string());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
    Null,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => write!(f, "{x:?}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Null => Ok(()),
        }
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Null
        }
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }
}

/// Build a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub meta: Meta,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Document {
    pub fn new(meta: Meta) -> Self {
        Document {
            meta,
            checks: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("document serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# meta: {}\n", serde_json::to_string(&self.meta).expect("meta")));
        for c in &self.checks {
            out.push_str(&format!("# check: {}\n", serde_json::to_string(c).expect("check")));
        }
        for t in &self.tables {
            out.push_str(&format!("# table: {}\n", t.name));
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&t.columns).expect("in-memory write");
            for r in &t.rows {
                w.write_record(r.iter().map(|c| c.to_string())).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        }
        out
    }

    pub fn parse(text: &str, format: Format) -> Result<Self, String> {
        match format {
            Format::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
            Format::Csv => Self::parse_csv(text),
        }
    }

    /// Cells come back as text; numbers keep their printed form.
    fn parse_csv(text: &str) -> Result<Self, String> {
        let mut meta = None;
        let mut checks = Vec::new();
        let mut tables = Vec::new();
        let mut current: Option<(String, String)> = None;
        let finish = |cur: Option<(String, String)>, tables: &mut Vec<Table>| -> Result<(), String> {
            if let Some((name, body)) = cur {
                let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
                let columns = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
                let rows = r
                    .records()
                    .map(|rec| rec.map(|rec| rec.iter().map(|c| Cell::Text(c.to_string())).collect()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                tables.push(Table { name, columns, rows });
            }
            Ok(())
        };
        for line in text.split_inclusive('\n') {
            if let Some(m) = line.strip_prefix("# meta: ") {
                meta = Some(serde_json::from_str(m.trim_end()).map_err(|e| e.to_string())?);
            } else if let Some(c) = line.strip_prefix("# check: ") {
                checks.push(serde_json::from_str(c.trim_end()).map_err(|e| e.to_string())?);
            } else if let Some(name) = line.strip_prefix("# table: ") {
                finish(current.take(), &mut tables)?;
                current = Some((name.trim_end().to_string(), String::new()));
            } else if let Some((_, body)) = current.as_mut() {
                body.push_str(line);
            } else if !line.trim().is_empty() {
                return Err(format!("unexpected line before any table: {line:?}"));
            }
        }
        finish(current, &mut tables)?;
        Ok(Document {
            meta: meta.ok_or("missing '# meta:' line")?,
            checks,
            tables,
        })
    }
}
