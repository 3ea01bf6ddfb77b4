//! Run configuration: a TOML file naming datasets, techniques, CV and
//! ranking settings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use maintix::ingest::{PreprocessOptions, TableFormat, TargetScheme};
use maintix::models::{RegressorParams, RegressorSpec, Technique};
use maintix::topsis::{Direction, WeightVector};

use crate::CliError;

pub const DEFAULT_TECHNIQUES: [Technique; 6] = [
    Technique::Swr,
    Technique::Svr,
    Technique::Nn,
    Technique::Mars,
    Technique::Garf,
    Technique::Cart,
];

/// Per-(dataset, technique) aggregate metric used as a TOPSIS criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Mae,
    MaeRel,
    Rmse,
    R2,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::MaeRel => "mae_rel",
            Metric::Rmse => "rmse",
            Metric::R2 => "r2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionSpec {
    pub metric: Metric,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopsisSettings {
    #[serde(default = "default_criteria")]
    pub criteria: Vec<CriterionSpec>,
    /// Raw weights; uniform when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

fn default_criteria() -> Vec<CriterionSpec> {
    vec![
        CriterionSpec {
            metric: Metric::Mae,
            direction: Direction::Cost,
        },
        CriterionSpec {
            metric: Metric::Rmse,
            direction: Direction::Cost,
        },
        CriterionSpec {
            metric: Metric::R2,
            direction: Direction::Benefit,
        },
    ]
}

impl Default for TopsisSettings {
    fn default() -> Self {
        Self {
            criteria: default_criteria(),
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSettings {
    /// Fold count; by default chosen from the instance count.
    #[serde(default)]
    pub folds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    /// Relative paths are resolved against the config file's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub format: Option<TableFormat>,
    #[serde(default = "default_target")]
    pub target: TargetScheme,
}

fn default_target() -> TargetScheme {
    TargetScheme::ChangeColumn
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub formats: Option<Vec<String>>,
    #[serde(default)]
    pub techniques: Option<Vec<String>>,
    /// Hyperparameter overrides keyed by technique name.
    #[serde(default)]
    pub overrides: BTreeMap<String, BTreeMap<String, toml::Value>>,
    #[serde(default)]
    pub cv: CvSettings,
    #[serde(default)]
    pub preprocess: PreprocessOptions,
    #[serde(default)]
    pub topsis: TopsisSettings,
    #[serde(default)]
    pub datasets: Vec<DatasetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedDataset {
    pub name: String,
    /// Path as written in the config.
    pub path: PathBuf,
    #[serde(skip)]
    pub location: PathBuf,
    pub format: TableFormat,
    pub target: TargetScheme,
}

/// A validated configuration with every default filled in. Serialized into
/// the report so a run describes itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub seed: u64,
    pub techniques: Vec<Technique>,
    /// Full hyperparameter set per technique, defaults included.
    pub params: Vec<RegressorParams>,
    pub cv: CvSettings,
    pub preprocess: PreprocessOptions,
    pub criteria: Vec<CriterionSpec>,
    /// Normalized weights.
    pub weights: Vec<f64>,
    pub datasets: Vec<ResolvedDataset>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub formats: Option<Vec<String>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks every invariant and fills defaults. `base` is the directory
    /// relative dataset paths are resolved against; `seed` overrides the
    /// file's seed.
    pub fn resolve(&self, base: &Path, seed: Option<u64>) -> Result<ResolvedConfig, CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let Some(seed) = seed.or(self.seed) else {
            return bad("no seed given (set `seed` in the config or pass --seed)".into());
        };

        let techniques: Vec<Technique> = match &self.techniques {
            None => DEFAULT_TECHNIQUES.to_vec(),
            Some(names) => names
                .iter()
                .map(|n| n.parse().map_err(|e: maintix::models::ModelError| CliError::Config(e.to_string())))
                .collect::<Result<_, _>>()?,
        };
        if techniques.is_empty() {
            return bad("technique list is empty".into());
        }
        let mut seen = BTreeSet::new();
        for t in &techniques {
            if !seen.insert(*t) {
                return bad(format!("technique `{t}` listed twice"));
            }
        }
        let mut params = Vec::with_capacity(techniques.len());
        for key in self.overrides.keys() {
            let t: Technique = key
                .parse()
                .map_err(|e: maintix::models::ModelError| CliError::Config(e.to_string()))?;
            if !techniques.contains(&t) {
                return bad(format!("overrides given for `{t}`, which is not in the technique list"));
            }
        }
        for &t in &techniques {
            let over = self
                .overrides
                .iter()
                .find(|(k, _)| k.parse::<Technique>().ok() == Some(t))
                .map(|(_, v)| v.clone())
                .unwrap_or_default();
            let spec = RegressorSpec::with_overrides(t, &over, seed).map_err(|e| CliError::Config(e.to_string()))?;
            params.push(spec.params);
        }

        if let Some(k) = self.cv.folds {
            if k < 2 {
                return bad(format!("cv.folds = {k}; need at least 2"));
            }
        }

        if self.topsis.criteria.is_empty() {
            return bad("topsis.criteria is empty".into());
        }
        let weights = match &self.topsis.weights {
            None => WeightVector::uniform(self.topsis.criteria.len()),
            Some(w) if w.len() != self.topsis.criteria.len() => {
                return bad(format!(
                    "{} topsis weights for {} criteria",
                    w.len(),
                    self.topsis.criteria.len()
                ))
            }
            Some(w) => WeightVector::new(w).map_err(|e| CliError::Config(e.to_string()))?,
        };

        if self.datasets.is_empty() {
            return bad("no datasets configured".into());
        }
        let mut datasets = Vec::with_capacity(self.datasets.len());
        let mut names = BTreeSet::new();
        for entry in &self.datasets {
            let location = base.join(&entry.path);
            if !location.is_file() {
                return bad(format!("dataset file {} does not exist", location.display()));
            }
            let format = match entry.format.or_else(|| TableFormat::from_path(&entry.path)) {
                Some(f) => f,
                None => return bad(format!("cannot infer the format of {}; set `format`", entry.path.display())),
            };
            let name = match &entry.name {
                Some(n) => n.clone(),
                None => entry
                    .path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("dataset")
                    .to_string(),
            };
            if !names.insert(name.clone()) {
                return bad(format!("duplicate dataset name `{name}`"));
            }
            datasets.push(ResolvedDataset {
                name,
                path: entry.path.clone(),
                location,
                format,
                target: entry.target.clone(),
            });
        }
        datasets.sort_by(|a, b| a.name.cmp(&b.name));

        Ok(ResolvedConfig {
            seed,
            techniques,
            params,
            cv: self.cv.clone(),
            preprocess: self.preprocess,
            criteria: self.topsis.criteria.clone(),
            weights: weights.as_slice().to_vec(),
            datasets,
            output: self.output.clone(),
            formats: self.formats.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir_with(files: &[&str]) -> tempfile::TempDir {
        let d = tempfile::tempdir().unwrap();
        for f in files {
            std::fs::write(d.path().join(f), "CHANGE,a\n1,2\n").unwrap();
        }
        d
    }

    #[test]
    fn defaults_are_filled_in() {
        let d = dir_with(&["x.csv"]);
        let cfg = RunConfig::parse("seed = 7\n[[datasets]]\npath = \"x.csv\"\n").unwrap();
        let r = cfg.resolve(d.path(), None).unwrap();
        assert_eq!(r.seed, 7);
        assert_eq!(r.techniques, DEFAULT_TECHNIQUES.to_vec());
        assert_eq!(r.params.len(), 6);
        assert_eq!(r.weights, vec![1.0 / 3.0; 3]);
        assert_eq!(r.datasets[0].name, "x");
        assert_eq!(r.datasets[0].format, TableFormat::Csv);
        assert_eq!(r.datasets[0].target, TargetScheme::ChangeColumn);
    }

    #[test]
    fn partial_preprocess_table() {
        let cfg = RunConfig::parse("seed = 1\n[preprocess]\nminmax_normalize = false\n").unwrap();
        assert!(!cfg.preprocess.minmax_normalize);
        assert!(cfg.preprocess.drop_missing && cfg.preprocess.drop_zero_variance);
    }

    #[test]
    fn seed_is_required() {
        let d = dir_with(&["x.csv"]);
        let cfg = RunConfig::parse("[[datasets]]\npath = \"x.csv\"\n").unwrap();
        assert!(matches!(cfg.resolve(d.path(), None), Err(CliError::Config(_))));
        assert_eq!(cfg.resolve(d.path(), Some(3)).unwrap().seed, 3);
    }

    #[test]
    fn rejects_bad_configs() {
        let d = dir_with(&["x.csv"]);
        let cases = [
            "seed = 1\n[[datasets]]\npath = \"missing.csv\"\n",
            "seed = 1\ntechniques = []\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\ntechniques = [\"cart\", \"cart\"]\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\ntechniques = [\"lasso\"]\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\ntechniques = [\"cart\"]\n[overrides.svr]\nc = 2.0\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\n[overrides.svr]\nc = -2.0\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\n[overrides.cart]\nbogus = 1\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\n[topsis]\nweights = [1.0]\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\n[cv]\nfolds = 1\n[[datasets]]\npath = \"x.csv\"\n",
            "seed = 1\n",
            "seed = 1\n[[datasets]]\npath = \"x.csv\"\n[[datasets]]\npath = \"x.csv\"\n",
        ];
        for text in cases {
            let cfg = RunConfig::parse(text).unwrap();
            assert!(matches!(cfg.resolve(d.path(), None), Err(CliError::Config(_))), "{text}");
        }
        assert!(RunConfig::parse("seed = 1\nunknown = 2\n").is_err());
    }

    #[test]
    fn mi_target_and_overrides_parse() {
        let d = dir_with(&["m.arff"]);
        let text = r#"
seed = 5
techniques = ["cart", "svm"]
[overrides.svm]
c = 4.0
[[datasets]]
path = "m.arff"
target = { mi_from_columns = { variant = "visual_studio" } }
"#;
        let r = RunConfig::parse(text).unwrap().resolve(d.path(), None).unwrap();
        assert_eq!(r.techniques, vec![Technique::Cart, Technique::Svr]);
        match &r.params[1] {
            RegressorParams::Svr(p) => assert_eq!(p.c, 4.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(r.datasets[0].target, TargetScheme::MiFromColumns { .. }));
    }
}
