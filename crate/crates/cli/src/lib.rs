//! Command-line front end: benchmark runs, TOPSIS ranking of metric tables,
//! source scanning and one-shot MI.

pub mod bench;
pub mod config;
pub mod rank;
pub mod report;
pub mod scan;

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use maintix::ingest::{load_table, preprocess, resolve_target, ColumnKind, PreprocessOptions, TableFormat, TargetScheme};

pub use bench::{run_benchmark, run_with_jobs};
pub use config::{ResolvedConfig, RunConfig};
pub use report::{emit_report, BenchmarkReport, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) | CliError::Io(_) => EXIT_PARTIAL,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

/// Text summary of a table: columns, missing counts and the resolved
/// target after preprocessing.
pub fn inspect(path: &Path, format: Option<TableFormat>, target: Option<&TargetScheme>) -> Result<String, CliError> {
    let format = format
        .or_else(|| TableFormat::from_path(path))
        .ok_or_else(|| CliError::Config(format!("cannot infer the format of {}", path.display())))?;
    let raw = load_table(path, format).map_err(|e| CliError::Data(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "table {}: {} rows, {} columns", raw.name, raw.n_rows(), raw.n_cols());
    for (i, c) in raw.columns.iter().enumerate() {
        let kind = match &c.kind {
            ColumnKind::Numeric => "numeric".to_string(),
            ColumnKind::Nominal(v) => format!("nominal {{{}}}", v.join(",")),
        };
        let _ = writeln!(s, "  {:<28} {:<20} missing {}", c.name, kind, raw.missing_count(i));
    }
    if let Some(scheme) = target {
        let data = resolve_target(&raw, scheme).map_err(|e| CliError::Data(e.to_string()))?;
        let data = preprocess(&data, &PreprocessOptions::default()).map_err(|e| CliError::Data(e.to_string()))?;
        let (lo, hi) = data
            .target
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let mean = data.target.iter().sum::<f64>() / data.target.len() as f64;
        let _ = writeln!(
            s,
            "target {:?}: {} instances, {} features, min {lo:.4}, mean {mean:.4}, max {hi:.4}",
            data.target_kind,
            data.n_instances(),
            data.n_features()
        );
        for p in &data.provenance {
            let _ = writeln!(s, "  {p}");
        }
    }
    Ok(s)
}
