//! TOPSIS ranking of externally produced metrics
//! (`dataset,technique,mae,rmse,r2`).

use std::collections::BTreeMap;

use serde::Deserialize;

use maintix::matrix::Matrix;
use maintix::topsis::{rank, Criterion, DecisionMatrix, Direction, RankingResult, WeightVector};

use crate::report::DatasetRanking;
use crate::CliError;

#[derive(Debug, Deserialize)]
struct MetricsRecord {
    dataset: String,
    technique: String,
    mae: f64,
    rmse: f64,
    r2: f64,
}

pub const CRITERIA: [&str; 3] = ["mae", "rmse", "r2"];
pub const DEFAULT_DIRECTIONS: [Direction; 3] = [Direction::Cost, Direction::Cost, Direction::Benefit];

pub fn parse_directions(text: &str) -> Result<Vec<Direction>, CliError> {
    text.split(',')
        .map(|s| s.parse::<Direction>().map_err(|e| CliError::Config(e.to_string())))
        .collect()
}

pub fn parse_weights(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("weight `{}` is not a number", s.trim())))
        })
        .collect()
}

/// Ranks the techniques of every dataset in the CSV; datasets come out in
/// name order, alternatives in label order.
pub fn rank_metrics_csv(
    text: &str,
    weights: Option<&[f64]>,
    directions: Option<&[Direction]>,
) -> Result<Vec<DatasetRanking>, CliError> {
    let directions = directions.unwrap_or(&DEFAULT_DIRECTIONS);
    if directions.len() != CRITERIA.len() {
        return Err(CliError::Config(format!(
            "{} directions given for criteria mae,rmse,r2",
            directions.len()
        )));
    }
    let weights = match weights {
        None => WeightVector::uniform(CRITERIA.len()),
        Some(w) if w.len() != CRITERIA.len() => {
            return Err(CliError::Config(format!("{} weights given for criteria mae,rmse,r2", w.len())))
        }
        Some(w) => WeightVector::new(w).map_err(|e| CliError::Config(e.to_string()))?,
    };

    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut groups: BTreeMap<String, BTreeMap<String, [f64; 3]>> = BTreeMap::new();
    for (i, rec) in reader.deserialize::<MetricsRecord>().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("metrics row {}: {e}", i + 1)))?;
        let entry = groups.entry(rec.dataset.clone()).or_default();
        if entry.insert(rec.technique.clone(), [rec.mae, rec.rmse, rec.r2]).is_some() {
            return Err(CliError::Data(format!(
                "duplicate row for dataset `{}`, technique `{}`",
                rec.dataset, rec.technique
            )));
        }
    }
    if groups.is_empty() {
        return Err(CliError::Data("metrics file has no rows".into()));
    }

    let criteria: Vec<Criterion> = CRITERIA
        .iter()
        .zip(directions)
        .map(|(n, d)| Criterion::new(*n, *d))
        .collect();
    let mut out = Vec::with_capacity(groups.len());
    for (dataset, techs) in groups {
        let labels: Vec<String> = techs.keys().cloned().collect();
        let rows: Vec<[f64; 3]> = techs.values().copied().collect();
        let result = if rows.len() == 1 {
            RankingResult::single(labels[0].clone(), criteria.clone(), &rows[0])
        } else {
            let m = DecisionMatrix::new(labels, criteria.clone(), Matrix::from_rows(&rows))
                .map_err(|e| CliError::Data(format!("dataset `{dataset}`: {e}")))?;
            rank(&m, &weights).map_err(|e| CliError::Data(format!("dataset `{dataset}`: {e}")))?
        };
        out.push(DatasetRanking { dataset, result });
    }
    Ok(out)
}
