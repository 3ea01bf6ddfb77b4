use serde::{Deserialize, Serialize};
use std::fmt;

use super::{Cell, ColumnKind, IngestError, RawTable};
use crate::matrix::Matrix;
use crate::mi::{mi_score, MiInputs, MiVariant};

/// What the target vector measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// Lines changed during maintenance (Li & Henry tables).
    Change,
    /// Maintainability Index computed from metric columns.
    Mi(MiVariant),
}

/// Candidate column names for each MI input, matched case-insensitively in
/// order. The defaults cover NASA MDP naming followed by PROMISE naming.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiColumnMap {
    pub volume: Vec<String>,
    pub cyclomatic: Vec<String>,
    pub loc: Vec<String>,
    /// Comment-line counts; only consulted by variants with a comment term.
    pub comments: Vec<String>,
}

impl Default for MiColumnMap {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            volume: v(&["HALSTEAD_VOLUME", "v"]),
            cyclomatic: v(&["CYCLOMATIC_COMPLEXITY", "v(g)"]),
            loc: v(&["LOC_TOTAL", "loc"]),
            comments: v(&["LOC_COMMENTS", "lOComment"]),
        }
    }
}

/// Handling of rows whose V or L falls outside the logarithm domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidMiRows {
    #[default]
    Error,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetScheme {
    ChangeColumn,
    MiFromColumns {
        variant: MiVariant,
        #[serde(default)]
        columns: MiColumnMap,
        #[serde(default)]
        invalid_rows: InvalidMiRows,
    },
}

impl TargetScheme {
    pub fn mi(variant: MiVariant) -> Self {
        TargetScheme::MiFromColumns {
            variant,
            columns: MiColumnMap::default(),
            invalid_rows: InvalidMiRows::Error,
        }
    }
}

/// One line of the preprocessing provenance log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    DropRow { index: usize, reason: String },
    DropCol { name: String, reason: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::DropRow { index, reason } => write!(f, "DROP_ROW {index} {reason}"),
            Provenance::DropCol { name, reason } => write!(f, "DROP_COL {name} {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    pub feature_names: Vec<String>,
    pub target: Vec<f64>,
    pub target_kind: TargetKind,
    /// Source-table row index of every retained row.
    pub row_ids: Vec<usize>,
    pub provenance: Vec<Provenance>,
}

impl Dataset {
    /// Builds a dataset directly from numeric arrays (synthetic data, tests).
    pub fn from_parts(
        name: impl Into<String>,
        features: Matrix,
        feature_names: Vec<String>,
        target: Vec<f64>,
        target_kind: TargetKind,
    ) -> Self {
        assert_eq!(features.nrows(), target.len(), "row count mismatch");
        assert_eq!(features.ncols(), feature_names.len(), "name count mismatch");
        let n = target.len();
        Self {
            name: name.into(),
            features,
            feature_names,
            target,
            target_kind,
            row_ids: (0..n).collect(),
            provenance: Vec::new(),
        }
    }

    pub fn n_instances(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Row subset, preserving names and kind. Provenance is not copied.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select_rows(rows),
            feature_names: self.feature_names.clone(),
            target: rows.iter().map(|&i| self.target[i]).collect(),
            target_kind: self.target_kind,
            row_ids: rows.iter().map(|&i| self.row_ids[i]).collect(),
            provenance: Vec::new(),
        }
    }

    /// Provenance log as line-oriented text.
    pub fn provenance_text(&self) -> String {
        self.provenance.iter().map(|p| format!("{p}\n")).collect()
    }
}

fn find_any(raw: &RawTable, names: &[String]) -> Result<usize, IngestError> {
    names
        .iter()
        .find_map(|n| raw.find_column(n))
        .ok_or_else(|| IngestError::MissingColumn(names.join("|")))
}

fn numeric_cell(cell: &Cell) -> f64 {
    cell.as_number().unwrap_or(f64::NAN)
}

/// Turns a raw table into a dataset by choosing the target column(s).
///
/// Nominal columns never become features; they are dropped and logged.
/// Missing numeric cells become `NaN` and are handled by [`preprocess`].
pub fn resolve_target(raw: &RawTable, scheme: &TargetScheme) -> Result<Dataset, IngestError> {
    let mut provenance = Vec::new();
    let mut excluded: Vec<usize> = Vec::new();
    let mut keep_rows: Vec<usize> = (0..raw.n_rows()).collect();

    let (target, kind): (Vec<f64>, TargetKind) = match scheme {
        TargetScheme::ChangeColumn => {
            let c = raw
                .find_column("CHANGE")
                .ok_or_else(|| IngestError::MissingColumn("CHANGE".into()))?;
            if raw.columns[c].kind != ColumnKind::Numeric {
                return Err(IngestError::MissingColumn("CHANGE (numeric)".into()));
            }
            excluded.push(c);
            (
                raw.rows.iter().map(|r| numeric_cell(&r[c])).collect(),
                TargetKind::Change,
            )
        }
        TargetScheme::MiFromColumns {
            variant,
            columns,
            invalid_rows,
        } => {
            let vc = find_any(raw, &columns.volume)?;
            let gc = find_any(raw, &columns.cyclomatic)?;
            let lc = find_any(raw, &columns.loc)?;
            excluded.extend([vc, gc, lc]);
            let cc = if variant.needs_comments() {
                let c = find_any(raw, &columns.comments)?;
                excluded.push(c);
                Some(c)
            } else {
                None
            };
            let mut target = Vec::with_capacity(raw.n_rows());
            let mut dropped = Vec::new();
            for (i, row) in raw.rows.iter().enumerate() {
                let v = numeric_cell(&row[vc]);
                let g = numeric_cell(&row[gc]);
                let l = numeric_cell(&row[lc]);
                let c = cc.map(|c| numeric_cell(&row[c]));
                if v.is_nan() || g.is_nan() || l.is_nan() || c.is_some_and(f64::is_nan) {
                    target.push(f64::NAN);
                    continue;
                }
                let mut inputs = MiInputs::new(v, g, l);
                if let Some(comment_lines) = c {
                    let frac = if l > 0.0 { comment_lines / l } else { 0.0 };
                    inputs = inputs.with_comments(frac.clamp(0.0, 1.0));
                }
                match mi_score(&inputs, *variant) {
                    Ok(s) => target.push(s.value),
                    Err(e) => match invalid_rows {
                        InvalidMiRows::Error => {
                            return Err(IngestError::MiDomain { row: i, source: e })
                        }
                        InvalidMiRows::Drop => {
                            target.push(f64::NAN);
                            dropped.push(i);
                        }
                    },
                }
            }
            if !dropped.is_empty() {
                keep_rows.retain(|r| !dropped.contains(r));
                provenance.extend(dropped.iter().map(|&index| Provenance::DropRow {
                    index,
                    reason: "mi_domain".into(),
                }));
            }
            (target, TargetKind::Mi(*variant))
        }
    };

    let mut feature_cols = Vec::new();
    for (c, col) in raw.columns.iter().enumerate() {
        if excluded.contains(&c) {
            continue;
        }
        match col.kind {
            ColumnKind::Numeric => feature_cols.push(c),
            ColumnKind::Nominal(_) => provenance.push(Provenance::DropCol {
                name: col.name.clone(),
                reason: "nominal".into(),
            }),
        }
    }

    let mut data = Vec::with_capacity(keep_rows.len() * feature_cols.len());
    for &r in &keep_rows {
        data.extend(feature_cols.iter().map(|&c| numeric_cell(&raw.rows[r][c])));
    }
    Ok(Dataset {
        name: raw.name.clone(),
        features: Matrix::from_vec(keep_rows.len(), feature_cols.len(), data),
        feature_names: feature_cols
            .iter()
            .map(|&c| raw.columns[c].name.clone())
            .collect(),
        target: keep_rows.iter().map(|&r| target[r]).collect(),
        target_kind: kind,
        row_ids: keep_rows,
        provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessOptions {
    pub drop_missing: bool,
    pub minmax_normalize: bool,
    pub drop_zero_variance: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            drop_missing: true,
            minmax_normalize: true,
            drop_zero_variance: true,
        }
    }
}

/// Cleans a dataset: row drop for missing values, constant-column removal
/// and per-column min-max scaling. Every removal is appended to the
/// provenance log. Applying it twice with the same options is a no-op the
/// second time.
pub fn preprocess(data: &Dataset, options: &PreprocessOptions) -> Result<Dataset, IngestError> {
    let mut provenance = data.provenance.clone();
    let n = data.n_instances();
    let p = data.n_features();

    let mut keep_rows = Vec::with_capacity(n);
    for r in 0..n {
        let missing = data.target[r].is_nan() || data.features.row(r).iter().any(|v| v.is_nan());
        if !missing {
            keep_rows.push(r);
        } else if options.drop_missing {
            provenance.push(Provenance::DropRow {
                index: data.row_ids[r],
                reason: "missing".into(),
            });
        } else {
            return Err(IngestError::MissingValues);
        }
    }
    if keep_rows.is_empty() {
        return Err(IngestError::AllRowsRemoved);
    }

    let mut keep_cols = Vec::with_capacity(p);
    let mut ranges = Vec::with_capacity(p);
    for c in 0..p {
        let (lo, hi) = keep_rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            let v = data.features.get(r, c);
            (lo.min(v), hi.max(v))
        });
        let constant = lo == hi;
        if constant && (options.drop_zero_variance || options.minmax_normalize) {
            let reason = if options.drop_zero_variance {
                "zero_variance"
            } else {
                "constant_before_normalization"
            };
            provenance.push(Provenance::DropCol {
                name: data.feature_names[c].clone(),
                reason: reason.into(),
            });
            continue;
        }
        keep_cols.push(c);
        ranges.push((lo, hi));
    }
    if keep_cols.is_empty() {
        return Err(IngestError::AllColumnsRemoved);
    }
    if keep_rows.len() < 2 {
        return Err(IngestError::TooFewRows(keep_rows.len()));
    }

    let mut out = Matrix::zeros(keep_rows.len(), keep_cols.len());
    for (i, &r) in keep_rows.iter().enumerate() {
        for (j, (&c, &(lo, hi))) in keep_cols.iter().zip(&ranges).enumerate() {
            let v = data.features.get(r, c);
            let v = if options.minmax_normalize {
                (v - lo) / (hi - lo)
            } else {
                v
            };
            out.set(i, j, v);
        }
    }

    Ok(Dataset {
        name: data.name.clone(),
        features: out,
        feature_names: keep_cols
            .iter()
            .map(|&c| data.feature_names[c].clone())
            .collect(),
        target: keep_rows.iter().map(|&r| data.target[r]).collect(),
        target_kind: data.target_kind,
        row_ids: keep_rows.iter().map(|&r| data.row_ids[r]).collect(),
        provenance,
    })
}
