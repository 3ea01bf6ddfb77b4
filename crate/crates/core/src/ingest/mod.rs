//! Dataset ingestion: ARFF/CSV tables, target resolution, preprocessing and
//! k-fold planning.

mod arff;
mod dataset;
mod delimited;
mod folds;

pub use arff::parse_arff;
pub use dataset::{
    preprocess, resolve_target, Dataset, InvalidMiRows, MiColumnMap, PreprocessOptions,
    Provenance, TargetKind, TargetScheme,
};
pub use delimited::parse_csv;
pub use folds::{default_folds, kfold_split, FoldPlan};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

use crate::mi::MiError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: column `{column}`: cannot parse `{value}` as a number")]
    BadNumber {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: {msg}")]
    Unsupported { line: usize, msg: String },
    #[error("required column `{0}` not found")]
    MissingColumn(String),
    #[error("row {row}: {source}")]
    MiDomain {
        row: usize,
        #[source]
        source: MiError,
    },
    #[error("all rows were removed during preprocessing")]
    AllRowsRemoved,
    #[error("all feature columns were removed during preprocessing")]
    AllColumnsRemoved,
    #[error("dataset has missing values and drop_missing is disabled")]
    MissingValues,
    #[error("dataset needs at least 2 instances, has {0}")]
    TooFewRows(usize),
    #[error("invalid fold count k={k} for n={n} (need 2 <= k <= n)")]
    BadFoldCount { n: usize, k: usize },
    #[error("unknown table format `{0}`")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Arff,
    Csv,
}

impl TableFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<TableFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        ext.parse().ok()
    }
}

impl FromStr for TableFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "arff" => Ok(TableFormat::Arff),
            "csv" => Ok(TableFormat::Csv),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Arff => "arff",
            TableFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    /// Declared (ARFF) or observed (CSV) category labels.
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Number(f64),
    Label(String),
    Missing,
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }
}

/// A parsed table before any target or feature interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Case-insensitive column lookup.
    pub fn find_column(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn missing_count(&self, col: usize) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r[col], Cell::Missing))
            .count()
    }
}

/// Reads and parses a table file. The table name defaults to the file stem
/// (ARFF files use their `@relation` name).
pub fn load_table(path: &Path, format: TableFormat) -> Result<RawTable, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("table")
        .to_string();
    match format {
        TableFormat::Arff => parse_arff(&text, &stem),
        TableFormat::Csv => parse_csv(&text, &stem),
    }
}

pub(crate) fn is_missing_token(s: &str) -> bool {
    matches!(s, "" | "?" | "NA" | "NaN" | "nan" | "na")
}
