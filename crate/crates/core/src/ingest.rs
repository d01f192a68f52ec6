//! Reading delimited text into columns of raw, uncoerced strings.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named column of raw cells together with per-value occurrence counts.
///
/// Cells are kept exactly as they appeared in the source after delimiter and
/// quote handling. Tallies are ordered by value so every downstream sum over
/// unique values runs in the same order for equal multisets of cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataColumn {
    name: String,
    cells: Vec<String>,
    tallies: BTreeMap<String, usize>,
}

impl DataColumn {
    pub fn new(name: impl Into<String>, cells: Vec<String>) -> Self {
        let mut tallies = BTreeMap::new();
        for cell in &cells {
            *tallies.entry(cell.clone()).or_insert(0) += 1;
        }
        Self {
            name: name.into(),
            cells,
            tallies,
        }
    }

    pub fn from_strs(name: impl Into<String>, cells: &[&str]) -> Self {
        Self::new(name, cells.iter().map(|c| c.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn tallies(&self) -> &BTreeMap<String, usize> {
        &self.tallies
    }

    /// Number of rows, `N`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of distinct values, `U`.
    pub fn unique_count(&self) -> usize {
        self.tallies.len()
    }

    pub fn count_of(&self, value: &str) -> usize {
        self.tallies.get(value).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    relation_name: String,
    columns: Vec<DataColumn>,
}

impl DataTable {
    pub fn new(relation_name: impl Into<String>, columns: Vec<DataColumn>) -> Result<Self> {
        let mut seen = HashSet::new();
        for column in &columns {
            if !seen.insert(column.name()) {
                return Err(Error::DuplicateColumn(column.name().to_string()));
            }
        }
        if let Some(first) = columns.first() {
            if let Some(bad) = columns.iter().find(|c| c.len() != first.len()) {
                return Err(Error::Config(format!(
                    "column `{}` has {} cells, expected {}",
                    bad.name(),
                    bad.len(),
                    first.len()
                )));
            }
        }
        Ok(Self {
            relation_name: relation_name.into(),
            columns,
        })
    }

    pub fn relation_name(&self) -> &str {
        &self.relation_name
    }

    pub fn columns(&self) -> &[DataColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&DataColumn> {
        self.columns.iter().find(|c| c.name() == name)
    }

    pub fn row_count(&self) -> usize {
        self.columns.first().map_or(0, DataColumn::len)
    }

    /// Writes the table as RFC 4180 CSV with a header row.
    pub fn write_csv<W: Write>(&self, writer: W, delimiter: u8) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(writer);
        let csv_err = |e: csv::Error| Error::Parse {
            line: 0,
            message: e.to_string(),
        };
        out.write_record(self.columns.iter().map(DataColumn::name))
            .map_err(csv_err)?;
        for row in 0..self.row_count() {
            out.write_record(self.columns.iter().map(|c| c.cells[row].as_str()))
                .map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Reads a delimited file into a [`DataTable`] named after the file stem.
pub fn read_table(path: impl AsRef<Path>, delimiter: u8, has_header: bool) -> Result<DataTable> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let relation = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "relation".to_string());
    let text = match String::from_utf8(bytes) {
        Ok(text) => text,
        Err(err) => {
            log::warn!(
                "{} is not valid UTF-8; invalid bytes replaced with U+FFFD",
                path.display()
            );
            String::from_utf8_lossy(err.as_bytes()).into_owned()
        }
    };
    parse_table(&text, relation, delimiter, has_header)
}

/// Parses delimited text held in memory. See [`read_table`].
pub fn parse_table(
    text: &str,
    relation_name: impl Into<String>,
    delimiter: u8,
    has_header: bool,
) -> Result<DataTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(text.as_bytes());

    let mut names: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        match &names {
            None => {
                let width = record.len();
                columns = vec![Vec::new(); width];
                if has_header {
                    names = Some(record.iter().map(str::to_string).collect());
                    continue;
                }
                names = Some((0..width).map(|i| format!("col_{i}")).collect());
            }
            Some(header) if header.len() != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", header.len(), record.len()),
                });
            }
            Some(_) => {}
        }
        for (column, field) in columns.iter_mut().zip(record.iter()) {
            column.push(field.to_string());
        }
    }

    let names = names.unwrap_or_default();
    let columns = names
        .into_iter()
        .zip(columns)
        .map(|(name, cells)| DataColumn::new(name, cells))
        .collect();
    DataTable::new(relation_name, columns)
}
