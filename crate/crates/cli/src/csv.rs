//! Buffered CSV tables: 17 significant digits, `\n` line endings.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `{:.16e}` gives one leading digit plus 16 decimals.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_num(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => u8::from(*b).to_string(),
        Cell::Text(s) => s.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    /// Renders the table after a `#` comment row holding `config`.
    pub fn render(&self, config: &[(String, String)]) -> String {
        let mut out = String::from("#");
        for (i, (k, v)) in config.iter().enumerate() {
            let sep = if i == 0 { " " } else { "; " };
            let _ = write!(out, "{sep}{k}={v}");
        }
        out.push('\n');
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let rows = std::iter::once(self.header.clone()).chain(self.rows.iter().map(|r| r.iter().map(format_cell).collect()));
        for row in rows {
            w.write_record(&row).expect("writing to memory");
        }
        let bytes = w.into_inner().expect("flushing to memory");
        out.push_str(&String::from_utf8(bytes).expect("cells are UTF-8"));
        out
    }

    pub fn write(&self, path: &Path, config: &[(String, String)]) -> io::Result<()> {
        std::fs::write(path, self.render(config))
    }
}
