//! Genetic search over feature masks and random-forest hyperparameters
//! (the GARF technique).
//!
//! Fitness is the mean k-fold cross-validated RMSE of a forest built from a
//! chromosome; lower is better.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{kfold_split, Dataset, FoldPlan};
use crate::matrix::Matrix;
use crate::models::{ForestParams, RandomForest};
use crate::rng::{Rng, SeedStream};

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    Config(String),
    #[error("chromosome has {mask} mask bits but the data has {features} features")]
    Width { mask: usize, features: usize },
    #[error("too few rows ({rows}) for {folds}-fold fitness evaluation")]
    TooFewRows { rows: usize, folds: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneBounds {
    pub n_trees: [usize; 2],
    pub max_depth: [usize; 2],
    pub min_samples_leaf: [usize; 2],
}

impl Default for GeneBounds {
    fn default() -> Self {
        Self {
            n_trees: [10, 200],
            max_depth: [2, 20],
            min_samples_leaf: [1, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Optional wall-clock budget in seconds. Runs stopped by it are not
    /// reproducible and are flagged in the history.
    #[serde(default)]
    pub time_budget: Option<f64>,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub cv_folds: usize,
    #[serde(default = "yes")]
    pub bootstrap: bool,
    #[serde(default)]
    pub bounds: GeneBounds,
    /// Replaced by the regressor seed when fitted through `models`.
    #[serde(default)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            max_generations: 15,
            time_budget: None,
            crossover_rate: 0.8,
            mutation_rate: 0.05,
            elitism_count: 2,
            tournament_size: 3,
            cv_folds: 3,
            bootstrap: true,
            bounds: GeneBounds::default(),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let err = |m: &str| Err(GaError::Config(m.to_string()));
        if self.population_size < 2 {
            return err("population_size must be >= 2");
        }
        if self.max_generations < 1 {
            return err("max_generations must be >= 1");
        }
        if self.elitism_count < 1 || self.elitism_count >= self.population_size {
            return err("elitism_count must be in [1, population_size)");
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return err("tournament_size must be in [1, population_size]");
        }
        for (name, r) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(GaError::Config(format!("{name} must be in [0, 1]")));
            }
        }
        if self.cv_folds < 2 {
            return err("cv_folds must be >= 2");
        }
        if self.time_budget.is_some_and(|t| !(t > 0.0)) {
            return err("time_budget must be > 0");
        }
        let b = &self.bounds;
        for (name, [lo, hi]) in [
            ("n_trees", b.n_trees),
            ("max_depth", b.max_depth),
            ("min_samples_leaf", b.min_samples_leaf),
        ] {
            if lo < 1 || lo > hi {
                return Err(GaError::Config(format!("bounds.{name} must satisfy 1 <= lo <= hi")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub feature_mask: Vec<bool>,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub mtry_fraction: f64,
}

type CacheKey = (Vec<bool>, usize, usize, usize, u64);

impl Chromosome {
    pub fn selected(&self) -> Vec<usize> {
        (0..self.feature_mask.len())
            .filter(|&i| self.feature_mask[i])
            .collect()
    }

    pub fn is_valid(&self, bounds: &GeneBounds) -> bool {
        let within = |v: usize, [lo, hi]: [usize; 2]| (lo..=hi).contains(&v);
        self.feature_mask.iter().any(|&b| b)
            && within(self.n_trees, bounds.n_trees)
            && within(self.max_depth, bounds.max_depth)
            && within(self.min_samples_leaf, bounds.min_samples_leaf)
            && self.mtry_fraction > 0.0
            && self.mtry_fraction <= 1.0
    }

    /// Forest hyperparameters for the masked feature set.
    pub fn forest_params(&self, bootstrap: bool) -> ForestParams {
        let k = self.selected().len();
        let mtry = ((self.mtry_fraction * k as f64).ceil() as usize).clamp(1, k.max(1));
        ForestParams {
            n_trees: self.n_trees,
            mtry: Some(mtry),
            bootstrap,
            max_depth: Some(self.max_depth),
            min_samples_leaf: self.min_samples_leaf,
        }
    }

    fn key(&self) -> CacheKey {
        (
            self.feature_mask.clone(),
            self.n_trees,
            self.max_depth,
            self.min_samples_leaf,
            self.mtry_fraction.to_bits(),
        )
    }
}

fn draw_gene(rng: &mut Rng, [lo, hi]: [usize; 2]) -> usize {
    rng.gen_range(lo..=hi)
}

/// Uniform on `(0, 1]`.
fn draw_fraction(rng: &mut Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

pub fn random_chromosome(p: usize, bounds: &GeneBounds, rng: &mut Rng) -> Chromosome {
    let mut mask: Vec<bool> = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    while p > 0 && !mask.iter().any(|&b| b) {
        mask = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    }
    Chromosome {
        feature_mask: mask,
        n_trees: draw_gene(rng, bounds.n_trees),
        max_depth: draw_gene(rng, bounds.max_depth),
        min_samples_leaf: draw_gene(rng, bounds.min_samples_leaf),
        mtry_fraction: draw_fraction(rng),
    }
}

pub fn init_population(p: usize, cfg: &GaConfig) -> Result<Vec<Chromosome>, GaError> {
    cfg.validate()?;
    if p == 0 {
        return Err(GaError::Config("no features to select from".into()));
    }
    let mut rng = SeedStream::new(cfg.seed).child("init").rng();
    Ok((0..cfg.population_size)
        .map(|_| random_chromosome(p, &cfg.bounds, &mut rng))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Best `elitism_count` chromosomes, copied verbatim.
    pub elites: Vec<Chromosome>,
    /// Tournament winners for the remaining slots.
    pub parents: Vec<Chromosome>,
}

/// Indices ordered by fitness, ties by index.
fn ranking(fitnesses: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]).then(a.cmp(&b)));
    order
}

/// One tournament: `size` distinct contestants drawn uniformly; the lowest
/// fitness wins and equal fitness goes to the earlier draw.
pub fn tournament(fitnesses: &[f64], size: usize, rng: &mut Rng) -> usize {
    let drawn = sample(rng, fitnesses.len(), size.min(fitnesses.len()));
    let mut best = drawn.index(0);
    for i in drawn.iter().skip(1) {
        if fitnesses[i] < fitnesses[best] {
            best = i;
        }
    }
    best
}

pub fn select(population: &[Chromosome], fitnesses: &[f64], cfg: &GaConfig, rng: &mut Rng) -> Selection {
    assert_eq!(population.len(), fitnesses.len(), "population and fitness sizes differ");
    let order = ranking(fitnesses);
    let n_elite = cfg.elitism_count.min(population.len());
    let elites = order[..n_elite].iter().map(|&i| population[i].clone()).collect();
    let parents = (0..population.len() - n_elite)
        .map(|_| population[tournament(fitnesses, cfg.tournament_size, rng)].clone())
        .collect();
    Selection { elites, parents }
}

/// Sets one bit drawn from `donors` (or from the full width when they are
/// all empty).
fn repair(mask: &mut [bool], donors: &[&[bool]], rng: &mut Rng) {
    if mask.iter().any(|&b| b) || mask.is_empty() {
        return;
    }
    let set: Vec<usize> = (0..mask.len())
        .filter(|&i| donors.iter().any(|d| d[i]))
        .collect();
    let i = if set.is_empty() {
        rng.gen_range(0..mask.len())
    } else {
        set[rng.gen_range(0..set.len())]
    };
    mask[i] = true;
}

pub fn crossover(a: &Chromosome, b: &Chromosome, cfg: &GaConfig, rng: &mut Rng) -> (Chromosome, Chromosome) {
    let mut ca = a.clone();
    let mut cb = b.clone();
    if !rng.gen_bool(cfg.crossover_rate) {
        return (ca, cb);
    }
    let p = a.feature_mask.len();
    if p >= 2 {
        let cut = rng.gen_range(1..p);
        ca.feature_mask[cut..].copy_from_slice(&b.feature_mask[cut..]);
        cb.feature_mask[cut..].copy_from_slice(&a.feature_mask[cut..]);
    }
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut ca.n_trees, &mut cb.n_trees);
    }
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut ca.max_depth, &mut cb.max_depth);
    }
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut ca.min_samples_leaf, &mut cb.min_samples_leaf);
    }
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut ca.mtry_fraction, &mut cb.mtry_fraction);
    }
    let donors = [a.feature_mask.as_slice(), b.feature_mask.as_slice()];
    repair(&mut ca.feature_mask, &donors, rng);
    repair(&mut cb.feature_mask, &donors, rng);
    (ca, cb)
}

pub fn mutate(ch: &Chromosome, cfg: &GaConfig, rng: &mut Rng) -> Chromosome {
    let rate = cfg.mutation_rate;
    let mut out = ch.clone();
    for bit in out.feature_mask.iter_mut() {
        if rng.gen_bool(rate) {
            *bit = !*bit;
        }
    }
    if rng.gen_bool(rate) {
        out.n_trees = draw_gene(rng, cfg.bounds.n_trees);
    }
    if rng.gen_bool(rate) {
        out.max_depth = draw_gene(rng, cfg.bounds.max_depth);
    }
    if rng.gen_bool(rate) {
        out.min_samples_leaf = draw_gene(rng, cfg.bounds.min_samples_leaf);
    }
    if rng.gen_bool(rate) {
        out.mtry_fraction = draw_fraction(rng);
    }
    repair(&mut out.feature_mask, &[ch.feature_mask.as_slice()], rng);
    out
}

/// Shared fold plan and forest seeds so every chromosome is scored on the
/// same splits.
pub struct FitnessEvaluator<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    plan: FoldPlan,
    seed: SeedStream,
    bootstrap: bool,
    cache: HashMap<CacheKey, f64>,
    pub degenerate_folds: usize,
}

impl<'a> FitnessEvaluator<'a> {
    pub fn new(x: &'a Matrix, y: &'a [f64], cfg: &GaConfig) -> Result<Self, GaError> {
        let n = y.len();
        if n < 2 * cfg.cv_folds {
            return Err(GaError::TooFewRows {
                rows: n,
                folds: cfg.cv_folds,
            });
        }
        let root = SeedStream::new(cfg.seed);
        let plan = kfold_split(n, cfg.cv_folds, root.child("fitness-folds").seed())
            .map_err(|e| GaError::Config(e.to_string()))?;
        Ok(Self {
            x,
            y,
            plan,
            seed: root.child("fitness"),
            bootstrap: cfg.bootstrap,
            cache: HashMap::new(),
            degenerate_folds: 0,
        })
    }

    /// Uncached evaluation: mean fold RMSE, or `+inf` when a training fold
    /// has a constant target. Returns the score and degenerate fold count.
    pub fn evaluate(&self, ch: &Chromosome) -> (f64, usize) {
        let cols = ch.selected();
        let xm = self.x.select_cols(&cols);
        let params = ch.forest_params(self.bootstrap);
        let mut total = 0.0;
        let mut degenerate = 0;
        for f in 0..self.plan.k {
            let train = self.plan.train_indices(f);
            let test = self.plan.test_indices(f);
            let first = self.y[train[0]];
            if train.iter().all(|&i| self.y[i] == first) {
                degenerate += 1;
                continue;
            }
            let ytr: Vec<f64> = train.iter().map(|&i| self.y[i]).collect();
            let forest = RandomForest::fit(&xm.select_rows(&train), &ytr, &params, self.seed.index(f as u64));
            let sse: f64 = test
                .iter()
                .map(|&i| (forest.predict_row(xm.row(i)) - self.y[i]).powi(2))
                .sum();
            total += (sse / test.len() as f64).sqrt();
        }
        if degenerate > 0 {
            return (f64::INFINITY, degenerate);
        }
        (total / self.plan.k as f64, 0)
    }

    /// Scores a population, reusing cached values; new evaluations run in
    /// parallel and are gathered positionally.
    pub fn evaluate_population(&mut self, pop: &[Chromosome]) -> Vec<f64> {
        let mut pending: Vec<(CacheKey, &Chromosome)> = Vec::new();
        for ch in pop {
            let k = ch.key();
            if !self.cache.contains_key(&k) && !pending.iter().any(|(pk, _)| *pk == k) {
                pending.push((k, ch));
            }
        }
        let this = &*self;
        let scored: Vec<(f64, usize)> = pending.par_iter().map(|(_, ch)| this.evaluate(ch)).collect();
        for ((k, _), (score, degenerate)) in pending.into_iter().zip(scored) {
            if degenerate > 0 {
                log::warn!("fitness: {degenerate} degenerate training folds, score set to +inf");
                self.degenerate_folds += degenerate;
            }
            self.cache.insert(k, score);
        }
        pop.iter().map(|ch| self.cache[&ch.key()]).collect()
    }
}

/// Fitness of one chromosome on a dataset.
pub fn fitness(ch: &Chromosome, data: &Dataset, cfg: &GaConfig) -> Result<f64, GaError> {
    if ch.feature_mask.len() != data.n_features() {
        return Err(GaError::Width {
            mask: ch.feature_mask.len(),
            features: data.n_features(),
        });
    }
    let eval = FitnessEvaluator::new(&data.features, &data.target, cfg)?;
    Ok(eval.evaluate(ch).0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    #[serde(with = "crate::floats::scalar")]
    pub best_fitness: f64,
    /// Mean over finite fitness values (`inf` when none are finite).
    #[serde(with = "crate::floats::scalar")]
    pub mean_fitness: f64,
    pub best: Chromosome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaHistory {
    pub records: Vec<GenerationRecord>,
    pub best_ever: Chromosome,
    #[serde(with = "crate::floats::scalar")]
    pub best_ever_fitness: f64,
    pub stopped_by_time_budget: bool,
    pub notes: Vec<String>,
}

impl GaHistory {
    pub fn best_fitness_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_fitness).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("generation,best_fitness,mean_fitness\n");
        for r in &self.records {
            let _ = writeln!(s, "{},{},{}", r.generation, r.best_fitness, r.mean_fitness);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarfModel {
    pub selected: Vec<usize>,
    pub chromosome: Chromosome,
    pub forest: RandomForest,
    pub history: GaHistory,
}

impl GarfModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let projected: Vec<f64> = self.selected.iter().map(|&j| row[j]).collect();
        self.forest.predict_row(&projected)
    }
}

/// Runs the generational loop and refits the best chromosome ever seen on
/// all rows.
pub fn fit_garf(x: &Matrix, y: &[f64], cfg: &GaConfig) -> Result<GarfModel, GaError> {
    cfg.validate()?;
    let p = x.ncols();
    let root = SeedStream::new(cfg.seed);
    let mut evaluator = FitnessEvaluator::new(x, y, cfg)?;
    let mut population = init_population(p, cfg)?;
    let start = Instant::now();
    let mut records = Vec::new();
    let mut best_ever: Option<(Chromosome, f64)> = None;
    let mut stopped_by_time_budget = false;

    for generation in 0..cfg.max_generations {
        debug_assert!(population.iter().all(|c| c.is_valid(&cfg.bounds)));
        let fits = evaluator.evaluate_population(&population);
        let order = ranking(&fits);
        let best_idx = order[0];
        let finite: Vec<f64> = fits.iter().cloned().filter(|f| f.is_finite()).collect();
        let mean = if finite.is_empty() {
            f64::INFINITY
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        records.push(GenerationRecord {
            generation,
            best_fitness: fits[best_idx],
            mean_fitness: mean,
            best: population[best_idx].clone(),
        });
        if best_ever.as_ref().map_or(true, |(_, f)| fits[best_idx] < *f) {
            best_ever = Some((population[best_idx].clone(), fits[best_idx]));
        }
        if generation + 1 == cfg.max_generations {
            break;
        }
        if cfg.time_budget.is_some_and(|t| start.elapsed().as_secs_f64() >= t) {
            stopped_by_time_budget = true;
            break;
        }

        let mut rng = root.child("generation").index(generation as u64).rng();
        let Selection { elites, parents } = select(&population, &fits, cfg, &mut rng);
        let mut next = elites;
        let mut i = 0;
        while next.len() < cfg.population_size {
            let a = &parents[i % parents.len()];
            let b = &parents[(i + 1) % parents.len()];
            i += 2;
            let (ca, cb) = crossover(a, b, cfg, &mut rng);
            next.push(mutate(&ca, cfg, &mut rng));
            if next.len() < cfg.population_size {
                next.push(mutate(&cb, cfg, &mut rng));
            }
        }
        population = next;
    }

    let (best, best_fitness) = best_ever.expect("at least one generation runs");
    let mut notes = Vec::new();
    if evaluator.degenerate_folds > 0 {
        notes.push(format!(
            "garf: {} degenerate fitness folds scored +inf",
            evaluator.degenerate_folds
        ));
    }
    if stopped_by_time_budget {
        notes.push("garf: stopped by wall-clock budget (not reproducible)".into());
    }
    let selected = best.selected();
    let forest = RandomForest::fit(
        &x.select_cols(&selected),
        y,
        &best.forest_params(cfg.bootstrap),
        root.child("final"),
    );
    Ok(GarfModel {
        selected,
        chromosome: best.clone(),
        forest,
        history: GaHistory {
            records,
            best_ever: best,
            best_ever_fitness: best_fitness,
            stopped_by_time_budget,
            notes,
        },
    })
}
