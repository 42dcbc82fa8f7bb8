//! The tidy record-per-point result of a sweep.

use serde::{Deserialize, Serialize};

/// Text written in place of a value at a singular sweep point.
pub const SINGULAR: &str = "singular";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    /// The quantity is undefined at this point (for example the attenuation
    /// where the scintillation index is exactly one).
    Singular,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            Cell::Singular => None,
        }
    }

    /// 17 significant digits, or the sentinel.
    pub fn render(self) -> String {
        match self {
            Cell::Value(v) => format!("{v:.16e}"),
            Cell::Singular => SINGULAR.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub computation: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

/// Rectangular table: every row has one cell per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub meta: TableMeta,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn new(meta: TableMeta, columns: Vec<Column>) -> Self {
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the column count");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All cells of one column, by name.
    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
