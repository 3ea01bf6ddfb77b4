//! Forward stepwise least squares with a partial-F entry test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::linalg::{qr_least_squares, ridge_least_squares, rss, Singular};
use crate::matrix::Matrix;

const RIDGE_FALLBACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwrParams {
    /// Entry threshold on the partial-F p-value.
    pub alpha_enter: f64,
    /// Optional cap on the number of selected features.
    #[serde(default)]
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseModel {
    /// Selected feature indices in entry order.
    pub selected: Vec<usize>,
    pub intercept: f64,
    /// One coefficient per entry of `selected`.
    pub coefficients: Vec<f64>,
    /// RSS after each step; element 0 is the intercept-only model.
    pub rss_path: Vec<f64>,
    /// Partial-F p-value of each entered feature.
    pub p_values: Vec<f64>,
}

impl StepwiseModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .selected
                .iter()
                .zip(&self.coefficients)
                .map(|(&j, b)| row[j] * b)
                .sum::<f64>()
    }
}

fn design(x: &Matrix, features: &[usize]) -> Vec<Vec<f64>> {
    let mut cols = Vec::with_capacity(features.len() + 1);
    cols.push(vec![1.0; x.nrows()]);
    cols.extend(features.iter().map(|&j| x.column(j)));
    cols
}

fn solve(cols: &[Vec<f64>], y: &[f64], notes: &mut Vec<String>, ctx: &str) -> Vec<f64> {
    match qr_least_squares(cols, y) {
        Ok(b) => b,
        Err(Singular) => {
            let msg = format!("singular design ({ctx}); ridge fallback lambda={RIDGE_FALLBACK:e}");
            log::debug!("{msg}");
            notes.push(msg);
            ridge_least_squares(cols, y, RIDGE_FALLBACK).unwrap_or_else(|_| vec![0.0; cols.len()])
        }
    }
}

pub fn fit(x: &Matrix, y: &[f64], params: &SwrParams, notes: &mut Vec<String>) -> StepwiseModel {
    let n = y.len();
    let p = x.ncols();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let cap = params.max_features.unwrap_or(p).min(p);

    let mut selected: Vec<usize> = Vec::new();
    let mut rss_path = vec![tss];
    let mut p_values = Vec::new();
    let mut current = tss;
    let mut candidate_notes = Vec::new();

    while selected.len() < cap {
        let k_new = selected.len() + 1;
        if n <= k_new + 1 {
            break;
        }
        let df2 = (n - k_new - 1) as f64;
        let mut best: Option<(usize, f64)> = None;
        for j in (0..p).filter(|j| !selected.contains(j)) {
            let mut feats = selected.clone();
            feats.push(j);
            let cols = design(x, &feats);
            let coef = solve(&cols, y, &mut candidate_notes, "candidate");
            let r = rss(&cols, &coef, y);
            if best.map_or(true, |(_, b)| r < b) {
                best = Some((j, r));
            }
        }
        let Some((j, new_rss)) = best else { break };
        let reduction = current - new_rss;
        if !(reduction > 0.0) {
            break;
        }
        let p_value = if new_rss <= f64::EPSILON * tss.max(f64::MIN_POSITIVE) {
            0.0
        } else {
            let f = reduction / (new_rss / df2);
            FisherSnedecor::new(1.0, df2).map_or(1.0, |d| d.sf(f))
        };
        if p_value >= params.alpha_enter {
            break;
        }
        selected.push(j);
        p_values.push(p_value);
        rss_path.push(new_rss);
        current = new_rss;
    }
    if !candidate_notes.is_empty() {
        notes.push(format!(
            "{} singular candidate designs resolved with ridge fallback",
            candidate_notes.len()
        ));
    }

    let cols = design(x, &selected);
    let coef = solve(&cols, y, notes, "final");
    StepwiseModel {
        selected,
        intercept: coef[0],
        coefficients: coef[1..].to_vec(),
        rss_path,
        p_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use rand::Rng;

    #[test]
    fn exact_linear_fit() {
        let x = Matrix::column_vector(&[1.0, 2.0, 3.0, 4.0]);
        let y = [3.0, 6.0, 9.0, 12.0];
        let m = fit(&x, &y, &SwrParams { alpha_enter: 0.05, max_features: None }, &mut vec![]);
        assert_eq!(m.selected, vec![0]);
        assert!(m.intercept.abs() < 1e-12);
        assert!((m.coefficients[0] - 3.0).abs() < 1e-12);
        assert!(m.rss_path[1] < 1e-20);
    }

    #[test]
    fn constant_target_is_intercept_only() {
        let x = Matrix::from_rows(&[[1.0, 5.0], [2.0, 3.0], [3.0, 9.0], [4.0, 1.0]]);
        let m = fit(&x, &[7.0; 4], &SwrParams { alpha_enter: 0.05, max_features: None }, &mut vec![]);
        assert!(m.selected.is_empty());
        assert_eq!(m.intercept, 7.0);
        assert_eq!(m.predict_row(&[100.0, -3.0]), 7.0);
    }

    #[test]
    fn rss_path_non_increasing_and_selection_is_subset() {
        let mut rng = SeedStream::new(11).rng();
        let n = 60;
        let p = 6;
        let x = Matrix::from_vec(n, p, (0..n * p).map(|_| rng.gen::<f64>()).collect());
        let y: Vec<f64> = (0..n)
            .map(|i| 3.0 * x.get(i, 1) - 2.0 * x.get(i, 4) + 0.5 * x.get(i, 0) + 0.05 * rng.gen::<f64>())
            .collect();
        let m = fit(&x, &y, &SwrParams { alpha_enter: 0.05, max_features: None }, &mut vec![]);
        assert!(m.rss_path.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.selected.iter().all(|&j| j < p));
        assert_eq!(&m.selected[..2], &[1, 4]);
        assert_eq!(m.selected.len(), m.rss_path.len() - 1);
    }

    #[test]
    fn collinear_candidate_uses_fallback() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0], [5.0, 10.5]]);
        let y = [1.0, 2.1, 2.9, 4.2, 5.0];
        let mut notes = vec![];
        let m = fit(&x, &y, &SwrParams { alpha_enter: 0.5, max_features: None }, &mut notes);
        assert!(!m.selected.is_empty());
        assert!(m.intercept.is_finite());
    }
}
