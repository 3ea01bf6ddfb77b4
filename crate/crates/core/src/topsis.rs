//! TOPSIS ranking of alternatives by relative closeness to the ideal point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TopsisError {
    #[error("need at least {need} alternatives, got {got}")]
    TooFewAlternatives { need: usize, got: usize },
    #[error("need at least one criterion")]
    NoCriteria,
    #[error("value matrix is {rows}x{cols}, expected {alternatives}x{criteria}")]
    Shape {
        rows: usize,
        cols: usize,
        alternatives: usize,
        criteria: usize,
    },
    #[error("non-finite value for alternative '{alternative}', criterion '{criterion}'")]
    NonFinite { alternative: String, criterion: String },
    #[error("criterion '{0}' has a zero-norm column")]
    ZeroNorm(String),
    #[error("weight {index} is {value}; weights must be finite and > 0")]
    BadWeight { index: usize, value: f64 },
    #[error("{weights} weights for {criteria} criteria")]
    WeightCount { weights: usize, criteria: usize },
    #[error("all alternatives are identical on every criterion")]
    Indistinguishable,
    #[error("unknown direction '{0}' (expected benefit or cost)")]
    UnknownDirection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Benefit,
    Cost,
}

impl FromStr for Direction {
    type Err = TopsisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "benefit" | "max" | "+" => Ok(Direction::Benefit),
            "cost" | "min" | "-" => Ok(Direction::Cost),
            _ => Err(TopsisError::UnknownDirection(s.to_string())),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Benefit => "benefit",
            Direction::Cost => "cost",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub direction: Direction,
}

impl Criterion {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<Criterion>,
    /// Alternatives in rows, criteria in columns.
    pub values: Matrix,
}

impl DecisionMatrix {
    pub fn new(alternatives: Vec<String>, criteria: Vec<Criterion>, values: Matrix) -> Result<Self, TopsisError> {
        if alternatives.len() < 2 {
            return Err(TopsisError::TooFewAlternatives {
                need: 2,
                got: alternatives.len(),
            });
        }
        if criteria.is_empty() {
            return Err(TopsisError::NoCriteria);
        }
        if values.nrows() != alternatives.len() || values.ncols() != criteria.len() {
            return Err(TopsisError::Shape {
                rows: values.nrows(),
                cols: values.ncols(),
                alternatives: alternatives.len(),
                criteria: criteria.len(),
            });
        }
        for (j, alt) in alternatives.iter().enumerate() {
            for (i, c) in criteria.iter().enumerate() {
                if !values.get(j, i).is_finite() {
                    return Err(TopsisError::NonFinite {
                        alternative: alt.clone(),
                        criterion: c.name.clone(),
                    });
                }
            }
        }
        for (i, c) in criteria.iter().enumerate() {
            if (0..values.nrows()).all(|j| values.get(j, i) == 0.0) {
                return Err(TopsisError::ZeroNorm(c.name.clone()));
            }
        }
        Ok(Self {
            alternatives,
            criteria,
            values,
        })
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.criteria.iter().map(|c| c.direction).collect()
    }
}

/// Positive weights normalized to sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(raw: &[f64]) -> Result<Self, TopsisError> {
        for (index, &value) in raw.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(TopsisError::BadWeight { index, value });
            }
        }
        if raw.is_empty() {
            return Err(TopsisError::NoCriteria);
        }
        let s: f64 = raw.iter().sum();
        Ok(Self(raw.iter().map(|w| w / s).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Divides every criterion column by its Euclidean norm.
pub fn normalize(m: &DecisionMatrix) -> Result<Matrix, TopsisError> {
    let v = &m.values;
    let mut r = Matrix::zeros(v.nrows(), v.ncols());
    for i in 0..v.ncols() {
        let norm = v.column(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(TopsisError::ZeroNorm(m.criteria[i].name.clone()));
        }
        for j in 0..v.nrows() {
            r.set(j, i, v.get(j, i) / norm);
        }
    }
    Ok(r)
}

pub fn weight(r: &Matrix, w: &WeightVector) -> Result<Matrix, TopsisError> {
    if w.0.len() != r.ncols() {
        return Err(TopsisError::WeightCount {
            weights: w.0.len(),
            criteria: r.ncols(),
        });
    }
    let mut v = r.clone();
    for j in 0..r.nrows() {
        for (i, wi) in w.0.iter().enumerate() {
            v.set(j, i, wi * r.get(j, i));
        }
    }
    Ok(v)
}

/// Ideal (`S+`) and anti-ideal (`S-`) points.
pub fn ideal_points(v: &Matrix, directions: &[Direction]) -> (Vec<f64>, Vec<f64>) {
    let mut plus = Vec::with_capacity(v.ncols());
    let mut minus = Vec::with_capacity(v.ncols());
    for (i, d) in directions.iter().enumerate().take(v.ncols()) {
        let col = v.column(i);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        match d {
            Direction::Benefit => {
                plus.push(hi);
                minus.push(lo);
            }
            Direction::Cost => {
                plus.push(lo);
                minus.push(hi);
            }
        }
    }
    (plus, minus)
}

/// Euclidean distances of every alternative to `S+` and `S-`.
pub fn separations(v: &Matrix, plus: &[f64], minus: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dist = |row: &[f64], p: &[f64]| row.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    v.rows_iter().map(|row| (dist(row, plus), dist(row, minus))).unzip()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub alternatives: Vec<String>,
    pub criteria: Vec<Criterion>,
    pub weights: Vec<f64>,
    pub normalized: Vec<Vec<f64>>,
    pub weighted: Vec<Vec<f64>>,
    pub ideal: Vec<f64>,
    pub anti_ideal: Vec<f64>,
    pub d_plus: Vec<f64>,
    pub d_minus: Vec<f64>,
    pub closeness: Vec<f64>,
    /// 1-based rank per alternative (a permutation of `1..=J`).
    pub rank: Vec<usize>,
    /// Alternative indices from best to worst.
    pub order: Vec<usize>,
    /// Alternatives whose closeness equals another alternative's; their
    /// relative order comes from label order.
    pub tied: Vec<bool>,
    /// Set when fewer than two alternatives made ranking trivial.
    pub trivial: bool,
}

impl RankingResult {
    pub fn has_ties(&self) -> bool {
        self.tied.iter().any(|&t| t)
    }

    /// Labels from rank 1 downwards.
    pub fn ranked_labels(&self) -> Vec<&str> {
        self.order.iter().map(|&j| self.alternatives[j].as_str()).collect()
    }

    /// Result for a single alternative: rank 1, closeness 1, flagged trivial.
    pub fn single(alternative: String, criteria: Vec<Criterion>, values: &[f64]) -> Self {
        let n = criteria.len();
        Self {
            alternatives: vec![alternative],
            weights: vec![1.0 / n.max(1) as f64; n],
            criteria,
            normalized: vec![vec![1.0; n]],
            weighted: vec![vec![1.0 / n.max(1) as f64; n]],
            ideal: values.to_vec(),
            anti_ideal: values.to_vec(),
            d_plus: vec![0.0],
            d_minus: vec![0.0],
            closeness: vec![1.0],
            rank: vec![1],
            order: vec![0],
            tied: vec![false],
            trivial: true,
        }
    }
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.rows_iter().map(|r| r.to_vec()).collect()
}

pub fn rank(m: &DecisionMatrix, w: &WeightVector) -> Result<RankingResult, TopsisError> {
    let r = normalize(m)?;
    let v = weight(&r, w)?;
    let (plus, minus) = ideal_points(&v, &m.directions());
    let (d_plus, d_minus) = separations(&v, &plus, &minus);
    let mut closeness = Vec::with_capacity(d_plus.len());
    for (dp, dm) in d_plus.iter().zip(&d_minus) {
        let s = dp + dm;
        if s == 0.0 {
            return Err(TopsisError::Indistinguishable);
        }
        closeness.push(dm / s);
    }
    let j = closeness.len();
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| {
        closeness[b]
            .total_cmp(&closeness[a])
            .then_with(|| m.alternatives[a].cmp(&m.alternatives[b]))
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; j];
    for (pos, &alt) in order.iter().enumerate() {
        rank[alt] = pos + 1;
    }
    let tied = (0..j)
        .map(|a| (0..j).any(|b| b != a && (closeness[a] - closeness[b]).abs() <= TIE_TOL))
        .collect();
    Ok(RankingResult {
        alternatives: m.alternatives.clone(),
        criteria: m.criteria.clone(),
        weights: w.as_slice().to_vec(),
        normalized: rows_of(&r),
        weighted: rows_of(&v),
        ideal: plus,
        anti_ideal: minus,
        d_plus,
        d_minus,
        closeness,
        rank,
        order,
        tied,
        trivial: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked() -> DecisionMatrix {
        DecisionMatrix::new(
            vec!["A".into(), "B".into()],
            vec![
                Criterion::new("r2", Direction::Benefit),
                Criterion::new("rmse", Direction::Cost),
            ],
            Matrix::from_rows(&[[0.9, 2.0], [0.6, 1.0]]),
        )
        .unwrap()
    }

    #[test]
    fn worked_two_by_two() {
        let res = rank(&worked(), &WeightVector::uniform(2)).unwrap();
        assert!((res.closeness[0] - 0.38278).abs() < 1e-5);
        assert!((res.closeness[1] - 0.61722).abs() < 1e-5);
        assert!((res.d_plus[0] - 0.22361).abs() < 1e-5);
        assert!((res.d_minus[0] - 0.13868).abs() < 1e-5);
        assert_eq!(res.rank, vec![2, 1]);
        assert_eq!(res.ranked_labels(), vec!["B", "A"]);
        assert!(!res.has_ties());
    }

    #[test]
    fn normalize_and_weight_fixtures() {
        let m = DecisionMatrix::new(
            vec!["a".into(), "b".into()],
            vec![Criterion::new("c", Direction::Benefit), Criterion::new("d", Direction::Cost)],
            Matrix::from_rows(&[[3.0, 2.0], [4.0, 2.0]]),
        )
        .unwrap();
        let r = normalize(&m).unwrap();
        assert!((r.get(0, 0) - 0.6).abs() < 1e-15 && (r.get(1, 0) - 0.8).abs() < 1e-15);
        assert!((r.get(0, 1) - 0.70711).abs() < 1e-5);
        let v = weight(&r, &WeightVector::new(&[1.0, 1.0]).unwrap()).unwrap();
        assert!((v.get(0, 0) - 0.3).abs() < 1e-15 && (v.get(1, 0) - 0.4).abs() < 1e-15);
        assert!(weight(&r, &WeightVector::uniform(3)).is_err());
    }

    #[test]
    fn invalid_inputs() {
        let zero = DecisionMatrix::new(
            vec!["a".into(), "b".into()],
            vec![Criterion::new("z", Direction::Benefit)],
            Matrix::from_rows(&[[0.0], [0.0]]),
        );
        assert_eq!(zero.unwrap_err(), TopsisError::ZeroNorm("z".into()));
        assert!(matches!(WeightVector::new(&[1.0, 0.0]), Err(TopsisError::BadWeight { index: 1, .. })));
        let same = DecisionMatrix::new(
            vec!["a".into(), "b".into()],
            vec![Criterion::new("x", Direction::Benefit)],
            Matrix::from_rows(&[[1.0], [1.0]]),
        )
        .unwrap();
        assert_eq!(rank(&same, &WeightVector::uniform(1)).unwrap_err(), TopsisError::Indistinguishable);
    }

    #[test]
    fn ideal_points_follow_direction() {
        let v = Matrix::column_vector(&[0.3, 0.7]);
        assert_eq!(ideal_points(&v, &[Direction::Benefit]), (vec![0.7], vec![0.3]));
        assert_eq!(ideal_points(&v, &[Direction::Cost]), (vec![0.3], vec![0.7]));
    }

    #[test]
    fn dominant_alternative_has_closeness_one() {
        let m = DecisionMatrix::new(
            vec!["best".into(), "mid".into(), "worst".into()],
            vec![Criterion::new("r2", Direction::Benefit), Criterion::new("rmse", Direction::Cost)],
            Matrix::from_rows(&[[0.9, 1.0], [0.5, 2.0], [0.1, 3.0]]),
        )
        .unwrap();
        let res = rank(&m, &WeightVector::uniform(2)).unwrap();
        assert_eq!(res.closeness[0], 1.0);
        assert_eq!(res.closeness[2], 0.0);
        assert_eq!(res.rank, vec![1, 2, 3]);
    }

    #[test]
    fn identical_pair_is_tied_and_label_ordered() {
        let m = DecisionMatrix::new(
            vec!["zeta".into(), "alpha".into(), "mid".into()],
            vec![Criterion::new("r2", Direction::Benefit)],
            Matrix::from_rows(&[[0.8], [0.8], [0.2]]),
        )
        .unwrap();
        let res = rank(&m, &WeightVector::uniform(1)).unwrap();
        assert_eq!(res.closeness[0], res.closeness[1]);
        assert_eq!(res.tied, vec![true, true, false]);
        assert_eq!(res.ranked_labels(), vec!["alpha", "zeta", "mid"]);
    }

    fn arb_matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<bool>, Vec<f64>)> {
        (2usize..8, 1usize..5).prop_flat_map(|(j, c)| {
            (
                proptest::collection::vec(proptest::collection::vec(0.01f64..100.0, c), j),
                proptest::collection::vec(any::<bool>(), c),
                proptest::collection::vec(0.05f64..1.0, c),
            )
        })
    }

    fn build(rows: &[Vec<f64>], dirs: &[bool]) -> DecisionMatrix {
        DecisionMatrix::new(
            (0..rows.len()).map(|j| format!("alt{j:02}")).collect(),
            dirs.iter()
                .enumerate()
                .map(|(i, &b)| Criterion::new(format!("c{i}"), if b { Direction::Benefit } else { Direction::Cost }))
                .collect(),
            Matrix::from_rows(rows),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn closeness_in_unit_interval_and_ranks_permutation((rows, dirs, w) in arb_matrix()) {
            let m = build(&rows, &dirs);
            if let Ok(res) = rank(&m, &WeightVector::new(&w).unwrap()) {
                prop_assert!(res.closeness.iter().all(|c| (0.0..=1.0).contains(c)));
                let mut r = res.rank.clone();
                r.sort_unstable();
                prop_assert_eq!(r, (1..=rows.len()).collect::<Vec<_>>());
                for pair in res.order.windows(2) {
                    prop_assert!(res.closeness[pair[0]] >= res.closeness[pair[1]]);
                }
            }
        }

        #[test]
        fn column_scale_invariance((rows, dirs, w) in arb_matrix(), col in 0usize..5, c in prop::sample::select(vec![0.01, 1.0, 100.0])) {
            let m = build(&rows, &dirs);
            let col = col % dirs.len();
            let scaled: Vec<Vec<f64>> = rows.iter().map(|r| {
                let mut r = r.clone();
                r[col] *= c;
                r
            }).collect();
            let wv = WeightVector::new(&w).unwrap();
            if let (Ok(a), Ok(b)) = (rank(&m, &wv), rank(&build(&scaled, &dirs), &wv)) {
                for (x, y) in a.closeness.iter().zip(&b.closeness) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn duplication_equals_column_reweighting((rows, dirs, w) in arb_matrix(), which in 0usize..8) {
            let which = which % rows.len();
            let mut dup = rows.clone();
            dup.push(rows[which].clone());
            let wv = WeightVector::new(&w).unwrap();
            // duplicating a row rescales column i's norm by k_i
            let implied: Vec<f64> = (0..dirs.len())
                .map(|i| {
                    let n2: f64 = rows.iter().map(|r| r[i] * r[i]).sum();
                    w[i] * (n2 / (n2 + rows[which][i] * rows[which][i])).sqrt()
                })
                .collect();
            let a = rank(&build(&rows, &dirs), &WeightVector::new(&implied).unwrap());
            let b = rank(&build(&dup, &dirs), &wv);
            if let (Ok(a), Ok(b)) = (a, b) {
                for (x, y) in a.closeness.iter().zip(&b.closeness) {
                    prop_assert!((x - y).abs() <= 1e-9);
                }
                prop_assert!((b.closeness[rows.len()] - b.closeness[which]).abs() <= 1e-12);
            }
        }

        #[test]
        fn single_criterion_duplication_invariance((rows, dirs, w) in arb_matrix(), which in 0usize..8) {
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0]]).collect();
            let which = which % rows.len();
            let mut dup = rows.clone();
            dup.push(rows[which].clone());
            let wv = WeightVector::new(&w[..1]).unwrap();
            if let (Ok(a), Ok(b)) = (rank(&build(&rows, &dirs[..1]), &wv), rank(&build(&dup, &dirs[..1]), &wv)) {
                for (x, y) in a.closeness.iter().zip(&b.closeness) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }
    }
}
