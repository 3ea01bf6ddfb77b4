//! Benchmark report structure and its JSON, CSV and Markdown renderings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use maintix::eval::{bench_rows_csv, BenchRow, MetricTriple};
use maintix::ingest::TargetKind;
use maintix::models::Technique;
use maintix::topsis::RankingResult;

use crate::config::ResolvedConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub raw_rows: usize,
    pub n_instances: usize,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub target_kind: TargetKind,
    pub target_min: f64,
    pub target_max: f64,
    pub fold_sizes: Vec<usize>,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: MetricTriple,
    pub notes: Vec<String>,
}

/// Aggregate metrics of one technique on one dataset. Timings are left out
/// so the JSON report is reproducible byte for byte; the CSV carries them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub technique: Technique,
    pub mean: MetricTriple,
    /// Mean RMSE as a percentage of the dataset's target range.
    pub rmse_pct_range: Option<f64>,
    pub folds: Vec<FoldSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRanking {
    pub dataset: String,
    pub result: RankingResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub dataset: String,
    pub technique: Option<Technique>,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    pub tool: String,
    pub model_defaults_version: i64,
    pub config: ResolvedConfig,
    pub datasets: Vec<DatasetSummary>,
    pub rows: Vec<ReportRow>,
    pub rankings: Vec<DatasetRanking>,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub timed_rows: Vec<BenchRow>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("invalid report JSON: {e}")))
    }

    pub fn to_csv(&self) -> String {
        bench_rows_csv(&self.timed_rows)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Benchmark report\n\n");
        let techniques: Vec<&str> = self.config.techniques.iter().map(|t| t.as_str()).collect();
        let _ = writeln!(s, "Seed {}; techniques {}.\n", self.config.seed, techniques.join(", "));
        for d in &self.datasets {
            let _ = writeln!(
                s,
                "## {}\n\n{} instances, {} features, folds {:?}.\n",
                d.name, d.n_instances, d.n_features, d.fold_sizes
            );
            let ranking = self.rankings.iter().find(|r| r.dataset == d.name);
            s.push_str("| Technique | MAE | MAE (rel) | RMSE | RMSE % range | R² | Closeness | Rank |\n");
            s.push_str("|---|---|---|---|---|---|---|---|\n");
            for row in self.rows.iter().filter(|r| r.dataset == d.name) {
                let (closeness, rank) = ranking
                    .and_then(|r| {
                        let j = r.result.alternatives.iter().position(|a| a == row.technique.as_str())?;
                        Some((num(Some(r.result.closeness[j])), r.result.rank[j].to_string()))
                    })
                    .unwrap_or_else(|| ("-".into(), "-".into()));
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    row.technique,
                    num(Some(row.mean.mae)),
                    num(row.mean.mae_relative),
                    num(Some(row.mean.rmse)),
                    num(row.rmse_pct_range),
                    num(row.mean.r_squared),
                    closeness,
                    rank
                );
            }
            s.push('\n');
        }
        s.push_str("## Ranking matrix\n\n");
        s.push_str(&ranking_matrix(&self.rankings));
        if !self.failures.is_empty() {
            s.push_str("\n## Failures\n\n");
            for f in &self.failures {
                let t = f.technique.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
                let _ = writeln!(s, "- {} / {} ({}): {}", f.dataset, t, f.stage, f.message);
            }
        }
        s
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

/// Datasets as rows, `Rank 1..Rank J` as columns. Tied alternatives are
/// marked with `*`.
pub fn ranking_matrix(rankings: &[DatasetRanking]) -> String {
    let j = rankings
        .iter()
        .map(|r| r.result.alternatives.len())
        .max()
        .unwrap_or(0);
    let mut s = String::from("| Dataset |");
    for k in 1..=j {
        let _ = write!(s, " Rank {k} |");
    }
    s.push_str("\n|---|");
    s.push_str(&"---|".repeat(j));
    s.push('\n');
    for r in rankings {
        let _ = write!(s, "| {} |", r.dataset);
        for k in 0..j {
            match r.result.order.get(k) {
                Some(&a) => {
                    let mark = if r.result.tied[a] { "*" } else { "" };
                    let _ = write!(s, " {}{} |", r.result.alternatives[a], mark);
                }
                None => s.push_str(" - |"),
            }
        }
        s.push('\n');
    }
    s
}

/// Output format names accepted by `emit_report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(CliError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

pub fn parse_formats(list: &[String]) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for item in list.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let f: Format = item.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

/// Writes `report.json`, `bench_rows.csv` and/or `report.md` into `dir` and
/// returns the paths written.
pub fn emit_report(report: &BenchmarkReport, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if formats.is_empty() {
        log::warn!("no output formats requested; nothing written");
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for f in formats {
        let (file, body) = match f {
            Format::Json => ("report.json", report.to_json()),
            Format::Csv => ("bench_rows.csv", report.to_csv()),
            Format::Markdown => ("report.md", report.to_markdown()),
        };
        let path = dir.join(file);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
