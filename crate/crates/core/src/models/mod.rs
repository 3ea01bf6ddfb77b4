//! Regression techniques behind one fit/predict contract.

pub mod forest;
pub mod linalg;
pub mod mars;
pub mod nn;
pub mod svr;
pub mod swr;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::{self, GaConfig, GarfModel};
use crate::matrix::Matrix;
use crate::rng::SeedStream;

pub use forest::{ForestParams, RandomForest};
pub use mars::{MarsModel, MarsParams};
pub use nn::{Activation, NnModel, NnParams};
pub use svr::{KernelKind, SvrModel, SvrParams};
pub use swr::{StepwiseModel, SwrParams};
pub use tree::{RegressionTree, TreeParams};

pub const MODEL_SCHEMA_VERSION: u32 = 1;
const DEFAULTS_TOML: &str = include_str!("../../defaults/models.toml");

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown technique '{0}'")]
    UnknownTechnique(String),
    #[error("invalid {technique} hyperparameters: {message}")]
    InvalidSpec { technique: Technique, message: String },
    #[error("expected {expected} feature columns, got {given}")]
    DimensionMismatch { expected: usize, given: usize },
    #[error("training data has {rows} rows and {targets} targets")]
    ShapeMismatch { rows: usize, targets: usize },
    #[error("need at least 2 training rows, got {0}")]
    TooFewRows(usize),
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("neural network diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error(transparent)]
    Ga(#[from] ga::GaError),
    #[error("model document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Swr,
    Svr,
    Nn,
    Mars,
    Cart,
    Rf,
    Garf,
}

impl Technique {
    pub const ALL: [Technique; 7] = [
        Technique::Swr,
        Technique::Svr,
        Technique::Nn,
        Technique::Mars,
        Technique::Cart,
        Technique::Rf,
        Technique::Garf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Swr => "swr",
            Technique::Svr => "svr",
            Technique::Nn => "nn",
            Technique::Mars => "mars",
            Technique::Cart => "cart",
            Technique::Rf => "rf",
            Technique::Garf => "garf",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = match s.trim().to_ascii_lowercase().as_str() {
            "swr" | "stepwise" => Technique::Swr,
            "svr" | "svm" => Technique::Svr,
            "nn" | "mlp" => Technique::Nn,
            "mars" => Technique::Mars,
            "cart" => Technique::Cart,
            "rf" => Technique::Rf,
            "garf" => Technique::Garf,
            _ => return Err(ModelError::UnknownTechnique(s.to_string())),
        };
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "technique", rename_all = "lowercase")]
pub enum RegressorParams {
    Swr(SwrParams),
    Svr(SvrParams),
    Nn(NnParams),
    Mars(MarsParams),
    Cart(TreeParams),
    Rf(ForestParams),
    Garf(GaConfig),
}

impl RegressorParams {
    pub fn technique(&self) -> Technique {
        match self {
            RegressorParams::Swr(_) => Technique::Swr,
            RegressorParams::Svr(_) => Technique::Svr,
            RegressorParams::Nn(_) => Technique::Nn,
            RegressorParams::Mars(_) => Technique::Mars,
            RegressorParams::Cart(_) => Technique::Cart,
            RegressorParams::Rf(_) => Technique::Rf,
            RegressorParams::Garf(_) => Technique::Garf,
        }
    }

    fn validate(&self) -> Result<(), String> {
        fn check(ok: bool, msg: &str) -> Result<(), String> {
            if ok {
                Ok(())
            } else {
                Err(msg.to_string())
            }
        }
        match self {
            RegressorParams::Swr(p) => {
                check(p.alpha_enter > 0.0 && p.alpha_enter <= 1.0, "alpha_enter must be in (0, 1]")?;
                check(p.max_features != Some(0), "max_features must be >= 1")
            }
            RegressorParams::Cart(p) => {
                check(p.min_samples_leaf >= 1, "min_samples_leaf must be >= 1")?;
                check(p.max_depth != Some(0), "max_depth must be >= 1")
            }
            RegressorParams::Rf(p) => {
                check(p.n_trees >= 1, "n_trees must be >= 1")?;
                check(p.mtry != Some(0), "mtry must be >= 1")?;
                check(p.min_samples_leaf >= 1, "min_samples_leaf must be >= 1")?;
                check(p.max_depth != Some(0), "max_depth must be >= 1")
            }
            RegressorParams::Svr(p) => {
                check(p.c > 0.0 && p.c.is_finite(), "c must be > 0")?;
                check(p.epsilon >= 0.0 && p.epsilon.is_finite(), "epsilon must be >= 0")?;
                check(p.gamma.map_or(true, |g| g > 0.0 && g.is_finite()), "gamma must be > 0")?;
                check(p.tol > 0.0, "tol must be > 0")?;
                check(p.max_iter >= 1, "max_iter must be >= 1")
            }
            RegressorParams::Nn(p) => {
                check(p.hidden_units >= 1, "hidden_units must be >= 1")?;
                check(p.learning_rate > 0.0 && p.learning_rate.is_finite(), "learning_rate must be > 0")?;
                check(p.epochs >= 1, "epochs must be >= 1")?;
                check(p.batch >= 1, "batch must be >= 1")
            }
            RegressorParams::Mars(p) => {
                check(p.max_terms >= 1, "max_terms must be >= 1")?;
                check(p.max_interaction >= 1, "max_interaction must be >= 1")?;
                check(p.penalty >= 0.0 && p.penalty.is_finite(), "penalty must be >= 0")?;
                check(p.max_knots >= 1, "max_knots must be >= 1")
            }
            RegressorParams::Garf(c) => c.validate().map_err(|e| e.to_string()),
        }
    }
}

fn defaults_table() -> &'static toml::Table {
    static TABLE: OnceLock<toml::Table> = OnceLock::new();
    TABLE.get_or_init(|| DEFAULTS_TOML.parse().expect("bundled defaults parse"))
}

/// Version of the bundled defaults file.
pub fn defaults_version() -> i64 {
    defaults_table()
        .get("version")
        .and_then(|v| v.as_integer())
        .unwrap_or(0)
}

/// The bundled default table for one technique.
pub fn default_table(technique: Technique) -> toml::Table {
    defaults_table()
        .get(technique.as_str())
        .and_then(|v| v.as_table())
        .cloned()
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    pub params: RegressorParams,
    pub seed: u64,
}

impl RegressorSpec {
    pub fn technique(&self) -> Technique {
        self.params.technique()
    }

    pub fn new(params: RegressorParams, seed: u64) -> Result<Self, ModelError> {
        params.validate().map_err(|message| ModelError::InvalidSpec {
            technique: params.technique(),
            message,
        })?;
        Ok(Self { params, seed })
    }

    pub fn default_for(technique: Technique, seed: u64) -> Self {
        Self::with_overrides(technique, &BTreeMap::new(), seed).expect("bundled defaults are valid")
    }

    /// Merges `overrides` key by key over the bundled defaults; nested tables
    /// merge recursively. Unknown keys and out-of-range values are rejected.
    pub fn with_overrides(
        technique: Technique,
        overrides: &BTreeMap<String, toml::Value>,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let mut table = default_table(technique);
        merge(&mut table, overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        table.insert("technique".into(), toml::Value::String(technique.as_str().into()));
        let params: RegressorParams = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ModelError::InvalidSpec {
                technique,
                message: e.message().trim().to_string(),
            })?;
        Self::new(params, seed)
    }
}

fn merge(into: &mut toml::Table, from: impl IntoIterator<Item = (String, toml::Value)>) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => merge(dst, src),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Fitted {
    Swr(StepwiseModel),
    Svr(SvrModel),
    Nn(NnModel),
    Mars(MarsModel),
    Cart(RegressionTree),
    Rf(RandomForest),
    Garf(GarfModel),
}

impl Fitted {
    fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Fitted::Swr(m) => m.predict_row(row),
            Fitted::Svr(m) => m.predict_row(row),
            Fitted::Nn(m) => m.predict_row(row),
            Fitted::Mars(m) => m.predict_row(row),
            Fitted::Cart(m) => m.predict_row(row),
            Fitted::Rf(m) => m.predict_row(row),
            Fitted::Garf(m) => m.predict_row(row),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub technique: Technique,
    pub spec: RegressorSpec,
    pub n_features: usize,
    pub n_train: usize,
    pub target_range: (f64, f64),
    pub train_seconds: f64,
    /// Solver notes such as fallbacks and non-convergence flags.
    pub notes: Vec<String>,
    pub fitted: Fitted,
}

pub fn fit(x: &Matrix, y: &[f64], spec: &RegressorSpec) -> Result<TrainedModel, ModelError> {
    if x.nrows() != y.len() {
        return Err(ModelError::ShapeMismatch {
            rows: x.nrows(),
            targets: y.len(),
        });
    }
    if y.len() < 2 {
        return Err(ModelError::TooFewRows(y.len()));
    }
    if !x.as_slice().iter().chain(y).all(|v| v.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    spec.params.validate().map_err(|message| ModelError::InvalidSpec {
        technique: spec.technique(),
        message,
    })?;
    let technique = spec.technique();
    let seed = SeedStream::new(spec.seed).child(technique.as_str());
    let mut notes = Vec::new();
    let start = Instant::now();
    let fitted = match &spec.params {
        RegressorParams::Swr(p) => Fitted::Swr(swr::fit(x, y, p, &mut notes)),
        RegressorParams::Svr(p) => Fitted::Svr(svr::fit(x, y, p, &mut notes)),
        RegressorParams::Nn(p) => Fitted::Nn(
            nn::fit(x, y, p, seed).map_err(|d| ModelError::Diverged { epoch: d.epoch })?,
        ),
        RegressorParams::Mars(p) => Fitted::Mars(mars::fit(x, y, p, &mut notes)),
        RegressorParams::Cart(p) => Fitted::Cart(RegressionTree::fit(x, y, *p)),
        RegressorParams::Rf(p) => {
            if p.mtry.is_some_and(|m| m > x.ncols()) {
                return Err(ModelError::InvalidSpec {
                    technique,
                    message: format!("mtry exceeds the {} available features", x.ncols()),
                });
            }
            Fitted::Rf(RandomForest::fit(x, y, p, seed))
        }
        RegressorParams::Garf(c) => {
            let mut cfg = c.clone();
            cfg.seed = seed.seed();
            let m = ga::fit_garf(x, y, &cfg)?;
            notes.extend(m.history.notes.iter().cloned());
            Fitted::Garf(m)
        }
    };
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(TrainedModel {
        schema_version: MODEL_SCHEMA_VERSION,
        technique,
        spec: spec.clone(),
        n_features: x.ncols(),
        n_train: y.len(),
        target_range: (lo, hi),
        train_seconds: start.elapsed().as_secs_f64(),
        notes,
        fitted,
    })
}

impl TrainedModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        if x.ncols() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                given: x.ncols(),
            });
        }
        Ok(x.rows_iter().map(|r| self.fitted.predict_row(r)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let m: TrainedModel =
            serde_json::from_str(text).map_err(|e| ModelError::Document(e.to_string()))?;
        if m.schema_version != MODEL_SCHEMA_VERSION {
            return Err(ModelError::Document(format!(
                "unsupported schema_version {} (expected {MODEL_SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

pub fn predict(model: &TrainedModel, x: &Matrix) -> Result<Vec<f64>, ModelError> {
    model.predict(x)
}
