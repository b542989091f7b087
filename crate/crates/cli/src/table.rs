//! Result tables: CSV with a names row and a units row, or a JSON record.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // shortest round-trip repr: deterministic and lossless
            Cell::Num(x) if *x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e7) => format!("{x:e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    /// "1" for dimensionless numbers, "text" for labels.
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            metadata: BTreeMap::new(),
            columns: columns.iter().map(|(n, u)| Column { name: n.to_string(), unit: u.to_string() }).collect(),
            rows: vec![],
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Metadata as `# key = value` lines, then names, units and rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).expect("in-memory write");
        w.write_record(self.columns.iter().map(|c| c.unit.as_str())).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    pub fn to_record(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialises");
        s.push('\n');
        s
    }
}
