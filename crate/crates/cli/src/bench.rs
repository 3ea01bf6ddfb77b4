//! The end-to-end pipeline: ingest, preprocess, cross-validate every
//! technique, then rank techniques per dataset.

use rayon::prelude::*;

use maintix::eval::{cross_validate, BenchRow};
use maintix::ingest::{default_folds, kfold_split, load_table, preprocess, resolve_target, Dataset, FoldPlan};
use maintix::matrix::Matrix;
use maintix::models::{defaults_version, RegressorSpec};
use maintix::rng::SeedStream;
use maintix::topsis::{rank, Criterion, DecisionMatrix, RankingResult, WeightVector};

use crate::config::{Metric, ResolvedConfig, ResolvedDataset};
use crate::report::{
    BenchmarkReport, DatasetRanking, DatasetSummary, Failure, FoldSummary, ReportRow, SCHEMA_VERSION,
};

struct Prepared {
    data: Dataset,
    plan: FoldPlan,
    summary: DatasetSummary,
}

fn prepare(cfg: &ResolvedConfig, entry: &ResolvedDataset) -> Result<Prepared, (String, String)> {
    let fail = |stage: &str, e: &dyn std::fmt::Display| (stage.to_string(), e.to_string());
    let raw = load_table(&entry.location, entry.format).map_err(|e| fail("ingest", &e))?;
    let resolved = resolve_target(&raw, &entry.target).map_err(|e| fail("target", &e))?;
    let mut data = preprocess(&resolved, &cfg.preprocess).map_err(|e| fail("preprocess", &e))?;
    data.name = entry.name.clone();
    let n = data.n_instances();
    let k = cfg.cv.folds.unwrap_or_else(|| default_folds(n));
    let plan_seed = SeedStream::new(cfg.seed).child("folds").child(&entry.name).seed();
    let plan = kfold_split(n, k, plan_seed).map_err(|e| fail("folds", &e))?;
    let (target_min, target_max) = data
        .target
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let summary = DatasetSummary {
        name: entry.name.clone(),
        raw_rows: raw.n_rows(),
        n_instances: n,
        n_features: data.n_features(),
        feature_names: data.feature_names.clone(),
        target_kind: data.target_kind,
        target_min,
        target_max,
        fold_sizes: plan.fold_sizes(),
        provenance: data.provenance.iter().map(|p| p.to_string()).collect(),
    };
    Ok(Prepared { data, plan, summary })
}

fn metric_value(row: &ReportRow, m: Metric) -> Option<f64> {
    match m {
        Metric::Mae => Some(row.mean.mae),
        Metric::MaeRel => row.mean.mae_relative,
        Metric::Rmse => Some(row.mean.rmse),
        Metric::R2 => row.mean.r_squared,
    }
}

fn rank_dataset(cfg: &ResolvedConfig, rows: &[&ReportRow]) -> Result<RankingResult, String> {
    let criteria: Vec<Criterion> = cfg
        .criteria
        .iter()
        .map(|c| Criterion::new(c.metric.as_str(), c.direction))
        .collect();
    let mut values = Matrix::zeros(rows.len(), criteria.len());
    for (j, row) in rows.iter().enumerate() {
        for (i, c) in cfg.criteria.iter().enumerate() {
            let v = metric_value(row, c.metric)
                .ok_or_else(|| format!("{} is undefined for {}", c.metric.as_str(), row.technique))?;
            values.set(j, i, v);
        }
    }
    let labels: Vec<String> = rows.iter().map(|r| r.technique.to_string()).collect();
    if rows.len() == 1 {
        return Ok(RankingResult::single(labels[0].clone(), criteria, values.row(0)));
    }
    let m = DecisionMatrix::new(labels, criteria, values).map_err(|e| e.to_string())?;
    let w = WeightVector::new(&cfg.weights).map_err(|e| e.to_string())?;
    rank(&m, &w).map_err(|e| e.to_string())
}

fn report_row(bench: &BenchRow, summary: &DatasetSummary) -> ReportRow {
    let range = summary.target_max - summary.target_min;
    ReportRow {
        dataset: bench.dataset.clone(),
        technique: bench.technique,
        mean: bench.mean,
        rmse_pct_range: (range > 0.0).then(|| 100.0 * bench.mean.rmse / range),
        folds: bench
            .folds
            .iter()
            .map(|f| FoldSummary {
                fold: f.fold,
                n_train: f.n_train,
                n_test: f.n_test,
                metrics: f.metrics,
                notes: f.notes.clone(),
            })
            .collect(),
    }
}

/// Runs the whole pipeline on the current rayon pool. Module errors do not
/// abort the run; they are collected in the report's failure manifest.
pub fn run_benchmark(cfg: &ResolvedConfig) -> BenchmarkReport {
    let mut failures = Vec::new();
    let mut prepared = Vec::new();
    for entry in &cfg.datasets {
        match prepare(cfg, entry) {
            Ok(p) => prepared.push(p),
            Err((stage, message)) => failures.push(Failure {
                dataset: entry.name.clone(),
                technique: None,
                stage,
                message,
            }),
        }
    }

    let mut tasks = Vec::new();
    for (d, p) in prepared.iter().enumerate() {
        for (t, params) in cfg.params.iter().enumerate() {
            let seed = SeedStream::new(cfg.seed)
                .child("spec")
                .child(&p.summary.name)
                .child(cfg.techniques[t].as_str())
                .seed();
            tasks.push((d, RegressorSpec { params: params.clone(), seed }));
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(d, spec)| cross_validate(spec, &prepared[*d].data, &prepared[*d].plan))
        .collect();

    let mut timed_rows = Vec::new();
    for ((d, spec), result) in tasks.iter().zip(results) {
        match result {
            Ok(row) => timed_rows.push(row),
            Err(e) => failures.push(Failure {
                dataset: prepared[*d].summary.name.clone(),
                technique: Some(spec.technique()),
                stage: "evaluate".into(),
                message: e.to_string(),
            }),
        }
    }
    timed_rows.sort_by(|a, b| {
        (a.dataset.as_str(), a.technique.as_str()).cmp(&(b.dataset.as_str(), b.technique.as_str()))
    });
    let summaries: Vec<DatasetSummary> = prepared.into_iter().map(|p| p.summary).collect();
    let rows: Vec<ReportRow> = timed_rows
        .iter()
        .map(|r| {
            let s = summaries.iter().find(|s| s.name == r.dataset).expect("row has a dataset");
            report_row(r, s)
        })
        .collect();

    let mut rankings = Vec::new();
    for s in &summaries {
        let ds_rows: Vec<&ReportRow> = rows.iter().filter(|r| r.dataset == s.name).collect();
        if ds_rows.is_empty() {
            continue;
        }
        match rank_dataset(cfg, &ds_rows) {
            Ok(result) => rankings.push(DatasetRanking {
                dataset: s.name.clone(),
                result,
            }),
            Err(message) => failures.push(Failure {
                dataset: s.name.clone(),
                technique: None,
                stage: "rank".into(),
                message,
            }),
        }
    }
    failures.sort_by(|a, b| {
        (a.dataset.as_str(), a.technique.map(|t| t.as_str())).cmp(&(b.dataset.as_str(), b.technique.map(|t| t.as_str())))
    });

    BenchmarkReport {
        schema_version: SCHEMA_VERSION,
        tool: format!("maintix {}", env!("CARGO_PKG_VERSION")),
        model_defaults_version: defaults_version(),
        config: cfg.clone(),
        datasets: summaries,
        rows,
        rankings,
        failures,
        timed_rows,
    }
}

/// Runs the pipeline on a dedicated pool of `jobs` workers.
pub fn run_with_jobs(cfg: &ResolvedConfig, jobs: usize) -> BenchmarkReport {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| run_benchmark(cfg)),
        Err(e) => {
            log::warn!("cannot build a {jobs}-worker pool ({e}); using the global pool");
            run_benchmark(cfg)
        }
    }
}
