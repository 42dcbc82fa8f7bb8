//! CSV and JSON serialisation of [`SweepTable`]s.
//!
//! Both formats write every number with 17 significant digits, which is
//! enough for an exact round trip of any f64. Neither format carries
//! timestamps or host details, so identical tables give identical bytes.
//!
//! CSV layout: `#`-prefixed metadata lines, then the column names, then the
//! units, then one line per row. JSON layout: `{"meta", "columns", "rows"}`
//! with one row per line; singular cells are the string `"singular"`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::table::{Cell, Column, SweepTable, TableMeta, SINGULAR};

pub fn render(table: &SweepTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    }
}

pub fn render_csv(table: &SweepTable) -> String {
    let m = &table.meta;
    let mut out = String::new();
    writeln!(out, "# thz-turb {}", m.version).unwrap();
    writeln!(out, "# computation: {}", m.computation).unwrap();
    writeln!(out, "# config_sha256: {}", m.config_sha256).unwrap();
    writeln!(out, "# seed: {}", m.seed).unwrap();
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(",");
    writeln!(out, "{}", join(&mut table.columns.iter().map(|c| c.name.clone()))).unwrap();
    writeln!(out, "{}", join(&mut table.columns.iter().map(|c| c.unit.clone()))).unwrap();
    for row in &table.rows {
        writeln!(out, "{}", join(&mut row.iter().map(|c| c.render()))).unwrap();
    }
    out
}

pub fn render_json(table: &SweepTable) -> String {
    let meta = serde_json::to_string(&table.meta).expect("metadata is plain strings and integers");
    let columns = serde_json::to_string(&table.columns).expect("columns are plain strings");
    let mut out = format!("{{\n\"meta\": {meta},\n\"columns\": {columns},\n\"rows\": [");
    for (i, row) in table.rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Value(_) => c.render(),
                Cell::Singular => format!("\"{SINGULAR}\""),
            })
            .collect();
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push('[');
        out.push_str(&cells.join(","));
        out.push(']');
    }
    out.push_str("\n]\n}\n");
    out
}

/// Writes the table to `path`, or to standard output when `path` is `None`.
pub fn emit(table: &SweepTable, format: OutputFormat, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(table, format);
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Parses JSON written by [`render_json`].
pub fn parse_json(text: &str) -> Result<SweepTable, String> {
    let root: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let meta: TableMeta =
        serde_json::from_value(root.get("meta").cloned().ok_or("missing `meta`")?).map_err(|e| e.to_string())?;
    let columns: Vec<Column> = serde_json::from_value(root.get("columns").cloned().ok_or("missing `columns`")?)
        .map_err(|e| e.to_string())?;
    let rows = root
        .get("rows")
        .and_then(Value::as_array)
        .ok_or("missing `rows` array")?;
    let mut table = SweepTable::new(meta, columns);
    for (i, row) in rows.iter().enumerate() {
        let cells = row.as_array().ok_or(format!("row {i} is not an array"))?;
        if cells.len() != table.columns.len() {
            return Err(format!("row {i} has {} cells, expected {}", cells.len(), table.columns.len()));
        }
        let parsed = cells
            .iter()
            .map(|c| match c {
                Value::Number(n) => n.as_f64().map(Cell::Value).ok_or(format!("row {i}: bad number")),
                Value::String(s) if s == SINGULAR => Ok(Cell::Singular),
                other => Err(format!("row {i}: unexpected cell {other}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        table.rows.push(parsed);
    }
    Ok(table)
}

/// Reads a JSON table from disk.
pub fn read_json(path: &Path) -> Result<SweepTable, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text).map_err(|message| CliError::Format {
        path: path.to_path_buf(),
        message,
    })
}
