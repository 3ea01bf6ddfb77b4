//! Accuracy measures and the cross-validated benchmark harness.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, FoldPlan};
use crate::models::{self, ModelError, RegressorSpec, Technique};
use crate::rng::SeedStream;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted values")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("need at least {need} values, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("actual value at index {index} is zero; relative MAE is undefined")]
    ZeroActual { index: usize },
    #[error("actual values have zero variance")]
    ZeroVariance,
    #[error("fold plan covers {plan} rows but the dataset has {data}")]
    PlanMismatch { plan: usize, data: usize },
    #[error("fold {fold}: training target is constant")]
    DegenerateFold { fold: usize },
    #[error("fold {fold}: {source}")]
    Model {
        fold: usize,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaeMode {
    Standard,
    Relative,
}

fn check(actual: &[f64], predicted: &[f64], need: usize) -> Result<(), EvalError> {
    if actual.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.len() < need {
        return Err(EvalError::TooShort {
            need,
            got: actual.len(),
        });
    }
    Ok(())
}

/// Mean absolute error; the relative form divides each error by `|actual|`.
pub fn mae(actual: &[f64], predicted: &[f64], mode: MaeMode) -> Result<f64, EvalError> {
    check(actual, predicted, 1)?;
    let mut sum = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        let e = (a - p).abs();
        sum += match mode {
            MaeMode::Standard => e,
            MaeMode::Relative => {
                if *a == 0.0 {
                    return Err(EvalError::ZeroActual { index: i });
                }
                e / a.abs()
            }
        };
    }
    Ok(sum / actual.len() as f64)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, EvalError> {
    check(actual, predicted, 1)?;
    let sse: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok((sse / actual.len() as f64).sqrt())
}

pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64, EvalError> {
    check(actual, predicted, 2)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let tss: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if tss == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    let rss: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok(1.0 - rss / tss)
}

/// The three accuracy measures. Undefined entries (relative MAE with a zero
/// actual value, R² on a constant fold) are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub mae: f64,
    pub mae_relative: Option<f64>,
    pub rmse: f64,
    pub r_squared: Option<f64>,
}

impl MetricTriple {
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self, EvalError> {
        let mae_std = mae(actual, predicted, MaeMode::Standard)?;
        let mae_relative = match mae(actual, predicted, MaeMode::Relative) {
            Ok(v) => Some(v),
            Err(EvalError::ZeroActual { .. }) => None,
            Err(e) => return Err(e),
        };
        let r_squared = match r_squared(actual, predicted) {
            Ok(v) => Some(v),
            Err(EvalError::ZeroVariance | EvalError::TooShort { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            mae: mae_std,
            mae_relative,
            rmse: rmse(actual, predicted)?,
            r_squared,
        })
    }

    /// Unweighted mean over folds; optional entries average the folds where
    /// they are defined.
    pub fn mean(items: &[MetricTriple]) -> MetricTriple {
        let n = items.len() as f64;
        let opt_mean = |f: fn(&MetricTriple) -> Option<f64>| {
            let vals: Vec<f64> = items.iter().filter_map(f).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        MetricTriple {
            mae: items.iter().map(|m| m.mae).sum::<f64>() / n,
            mae_relative: opt_mean(|m| m.mae_relative),
            rmse: items.iter().map(|m| m.rmse).sum::<f64>() / n,
            r_squared: opt_mean(|m| m.r_squared),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: MetricTriple,
    pub seconds: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub technique: Technique,
    pub mean: MetricTriple,
    pub folds: Vec<FoldRecord>,
    pub seconds: f64,
}

/// Seed used for fold `f` of a spec.
pub fn fold_seed(spec_seed: u64, fold: usize) -> u64 {
    SeedStream::new(spec_seed).child("fold").index(fold as u64).seed()
}

pub fn cross_validate(spec: &RegressorSpec, data: &Dataset, plan: &FoldPlan) -> Result<BenchRow, EvalError> {
    if plan.n() != data.n_instances() {
        return Err(EvalError::PlanMismatch {
            plan: plan.n(),
            data: data.n_instances(),
        });
    }
    let start = Instant::now();
    let folds: Vec<Result<FoldRecord, EvalError>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let train = plan.train_indices(fold);
            let test = plan.test_indices(fold);
            let y_train: Vec<f64> = train.iter().map(|&i| data.target[i]).collect();
            if y_train.iter().all(|&v| v == y_train[0]) {
                return Err(EvalError::DegenerateFold { fold });
            }
            let fold_spec = RegressorSpec {
                params: spec.params.clone(),
                seed: fold_seed(spec.seed, fold),
            };
            let t0 = Instant::now();
            let model = models::fit(&data.features.select_rows(&train), &y_train, &fold_spec)
                .map_err(|source| EvalError::Model { fold, source })?;
            let predicted = model
                .predict(&data.features.select_rows(&test))
                .map_err(|source| EvalError::Model { fold, source })?;
            let actual: Vec<f64> = test.iter().map(|&i| data.target[i]).collect();
            Ok(FoldRecord {
                fold,
                n_train: train.len(),
                n_test: test.len(),
                metrics: MetricTriple::compute(&actual, &predicted)?,
                seconds: t0.elapsed().as_secs_f64(),
                notes: model.notes,
            })
        })
        .collect();
    let folds = folds.into_iter().collect::<Result<Vec<_>, _>>()?;
    let metrics: Vec<MetricTriple> = folds.iter().map(|f| f.metrics).collect();
    Ok(BenchRow {
        dataset: data.name.clone(),
        technique: spec.technique(),
        mean: MetricTriple::mean(&metrics),
        folds,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub const BENCH_CSV_HEADER: &str = "dataset,technique,fold,mae,mae_rel,rmse,r2,seconds";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line per fold plus a `mean` line per row. Empty cells mark undefined
/// metrics.
pub fn bench_rows_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_CSV_HEADER);
    s.push('\n');
    for row in rows {
        let mut line = |fold: &str, m: &MetricTriple, secs: f64| {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{:.6}",
                row.dataset,
                row.technique,
                fold,
                m.mae,
                opt(m.mae_relative),
                m.rmse,
                opt(m.r_squared),
                secs
            );
        };
        for f in &row.folds {
            line(&f.fold.to_string(), &f.metrics, f.seconds);
        }
        line("mean", &row.mean, row.seconds);
    }
    s
}
