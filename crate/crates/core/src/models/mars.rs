//! Two-pass MARS: greedy forward addition of mirrored hinge pairs followed
//! by backward elimination scored with generalized cross-validation.

use serde::{Deserialize, Serialize};

use super::linalg::{dot, qr_least_squares, ridge_least_squares, rss};
use crate::matrix::Matrix;

const DEGENERATE: f64 = 1e-10;
const MIN_REDUCTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarsParams {
    /// Cap on basis terms including the intercept.
    pub max_terms: usize,
    pub max_interaction: usize,
    pub penalty: f64,
    /// Knot candidates per variable and parent, evenly sampled from the
    /// observed values.
    pub max_knots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hinge {
    pub feature: usize,
    pub knot: f64,
    /// `true` for `max(0, x - t)`, `false` for `max(0, t - x)`.
    pub positive: bool,
}

impl Hinge {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        if self.positive {
            (x - self.knot).max(0.0)
        } else {
            (self.knot - x).max(0.0)
        }
    }
}

/// Product of hinges; the empty product is the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub factors: Vec<Hinge>,
}

impl Term {
    pub fn eval(&self, row: &[f64]) -> f64 {
        self.factors.iter().map(|h| h.eval(row[h.feature])).product()
    }

    fn column(&self, x: &Matrix) -> Vec<f64> {
        x.rows_iter().map(|r| self.eval(r)).collect()
    }

    fn uses(&self, feature: usize) -> bool {
        self.factors.iter().any(|h| h.feature == feature)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarsModel {
    pub terms: Vec<Term>,
    pub coefficients: Vec<f64>,
    /// RSS after each forward step; element 0 is the intercept-only model.
    pub forward_rss: Vec<f64>,
    /// GCV of the full forward model and of each backward subset.
    #[serde(with = "crate::floats::vec")]
    pub backward_gcv: Vec<f64>,
    #[serde(with = "crate::floats::scalar")]
    pub gcv: f64,
}

impl MarsModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.terms
            .iter()
            .zip(&self.coefficients)
            .map(|(t, c)| c * t.eval(row))
            .sum()
    }
}

pub fn gcv(rss: f64, n: usize, terms: usize, penalty: f64) -> f64 {
    let m = terms as f64;
    let c = m + penalty * (m - 1.0) / 2.0;
    let n = n as f64;
    if c >= n {
        return f64::INFINITY;
    }
    (rss / n) / (1.0 - c / n).powi(2)
}

/// Orthonormal basis of the current span plus the residual of `y`.
struct Span {
    q: Vec<Vec<f64>>,
    resid: Vec<f64>,
}

impl Span {
    /// Component of `v` orthogonal to the span (two Gram-Schmidt sweeps).
    fn orthogonalize(&self, v: &[f64], extra: Option<&[f64]>) -> Vec<f64> {
        let mut u = v.to_vec();
        for _ in 0..2 {
            for q in self.q.iter().map(|q| q.as_slice()).chain(extra) {
                let c = dot(q, &u);
                u.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        u
    }

    /// Normalized orthogonal direction, or `None` when `v` is (numerically)
    /// inside the span.
    fn direction(&self, v: &[f64], extra: Option<&[f64]>) -> Option<Vec<f64>> {
        let norm_v = dot(v, v);
        if norm_v == 0.0 {
            return None;
        }
        let mut u = self.orthogonalize(v, extra);
        let norm_u = dot(&u, &u);
        if norm_u <= DEGENERATE * norm_v {
            return None;
        }
        let s = norm_u.sqrt();
        u.iter_mut().for_each(|a| *a /= s);
        Some(u)
    }

    fn push(&mut self, u: Vec<f64>) -> f64 {
        let c = dot(&u, &self.resid);
        self.resid.iter_mut().zip(&u).for_each(|(r, q)| *r -= c * q);
        self.q.push(u);
        c * c
    }
}

struct PairCandidate {
    pos: Option<Vec<f64>>,
    neg: Option<Vec<f64>>,
    reduction: f64,
    parent: usize,
    feature: usize,
    knot: f64,
}

fn knot_candidates(x: &Matrix, feature: usize, support: &[usize], max_knots: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = support.iter().map(|&r| x.get(r, feature)).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    // the largest value gives an all-zero positive hinge
    vals.pop();
    if vals.len() <= max_knots || max_knots == 0 {
        return vals;
    }
    let last = (vals.len() - 1) as f64;
    let denom = (max_knots - 1).max(1) as f64;
    let mut picked: Vec<f64> = (0..max_knots)
        .map(|i| vals[((i as f64) * last / denom).round() as usize])
        .collect();
    picked.dedup();
    picked
}

fn forward(
    x: &Matrix,
    y: &[f64],
    params: &MarsParams,
    notes: &mut Vec<String>,
) -> (Vec<Term>, Vec<f64>) {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let mut terms = vec![Term { factors: vec![] }];
    let mut cols = vec![vec![1.0; n]];
    let inv = 1.0 / (n as f64).sqrt();
    let mut span = Span {
        q: vec![vec![inv; n]],
        resid: y.iter().map(|v| v - mean).collect(),
    };
    let mut path = vec![tss];
    let mut current = tss;
    let mut degenerate = 0usize;

    while terms.len() < params.max_terms {
        let mut best: Option<PairCandidate> = None;
        for (pi, parent) in terms.iter().enumerate() {
            if parent.factors.len() >= params.max_interaction {
                continue;
            }
            let pcol = &cols[pi];
            let support: Vec<usize> = (0..n).filter(|&r| pcol[r] > 0.0).collect();
            if support.len() < 2 {
                continue;
            }
            for f in (0..x.ncols()).filter(|&f| !parent.uses(f)) {
                for knot in knot_candidates(x, f, &support, params.max_knots) {
                    let hp: Vec<f64> = (0..n).map(|r| pcol[r] * (x.get(r, f) - knot).max(0.0)).collect();
                    let hn: Vec<f64> = (0..n).map(|r| pcol[r] * (knot - x.get(r, f)).max(0.0)).collect();
                    let pos = span.direction(&hp, None);
                    let neg = span.direction(&hn, pos.as_deref());
                    let red = |u: &Option<Vec<f64>>| u.as_ref().map_or(0.0, |u| dot(u, &span.resid).powi(2));
                    let reduction = red(&pos) + red(&neg);
                    if best.as_ref().map_or(true, |b| reduction > b.reduction) {
                        best = Some(PairCandidate {
                            pos,
                            neg,
                            reduction,
                            parent: pi,
                            feature: f,
                            knot,
                        });
                    }
                }
            }
        }
        let Some(c) = best else { break };
        if !(c.reduction > MIN_REDUCTION * tss) {
            break;
        }
        let parent = terms[c.parent].clone();
        for (u, positive) in [(c.pos, true), (c.neg, false)] {
            if terms.len() >= params.max_terms {
                break;
            }
            let Some(u) = u else {
                degenerate += 1;
                continue;
            };
            let mut factors = parent.factors.clone();
            factors.push(Hinge {
                feature: c.feature,
                knot: c.knot,
                positive,
            });
            let term = Term { factors };
            cols.push(term.column(x));
            terms.push(term);
            let red = span.push(u);
            current = (current - red).max(0.0);
        }
        path.push(current);
    }
    if degenerate > 0 {
        notes.push(format!("mars: {degenerate} hinge terms dropped as linearly dependent"));
    }
    (terms, path)
}

fn subset_fit(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let coef = qr_least_squares(cols, y)
        .or_else(|_| ridge_least_squares(cols, y, 1e-8))
        .unwrap_or_else(|_| vec![0.0; cols.len()]);
    let r = rss(cols, &coef, y);
    (coef, r)
}

pub fn fit(x: &Matrix, y: &[f64], params: &MarsParams, notes: &mut Vec<String>) -> MarsModel {
    let n = y.len();
    let (terms, forward_rss) = forward(x, y, params, notes);
    let all_cols: Vec<Vec<f64>> = terms.iter().map(|t| t.column(x)).collect();

    // backward elimination over index sets; the intercept (index 0) stays
    let mut active: Vec<usize> = (0..terms.len()).collect();
    let pick = |set: &[usize]| -> Vec<Vec<f64>> { set.iter().map(|&i| all_cols[i].clone()).collect() };
    let (_, full_rss) = subset_fit(&pick(&active), y);
    let mut best_set = active.clone();
    let mut best_gcv = gcv(full_rss, n, active.len(), params.penalty);
    let mut backward_gcv = vec![best_gcv];
    while active.len() > 1 {
        let mut step: Option<(usize, f64)> = None;
        for k in 1..active.len() {
            let mut trial = active.clone();
            trial.remove(k);
            let (_, r) = subset_fit(&pick(&trial), y);
            if step.map_or(true, |(_, b)| r < b) {
                step = Some((k, r));
            }
        }
        let (k, r) = step.expect("at least one removable term");
        active.remove(k);
        let g = gcv(r, n, active.len(), params.penalty);
        backward_gcv.push(g);
        if g < best_gcv {
            best_gcv = g;
            best_set = active.clone();
        }
    }

    let (coefficients, _) = subset_fit(&pick(&best_set), y);
    MarsModel {
        terms: best_set.iter().map(|&i| terms[i].clone()).collect(),
        coefficients,
        forward_rss,
        backward_gcv,
        gcv: best_gcv,
    }
}
