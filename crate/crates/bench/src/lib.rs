//! Shared inputs for the criterion benchmarks.

use maintix::ga::Chromosome;
use maintix::ingest::Dataset;
use maintix::synthetic::ga_benchmark;

/// The GA benchmark table (5 informative, 15 noise features).
pub fn friedman(n: usize) -> Dataset {
    ga_benchmark(n, 7)
}

/// A chromosome keeping the informative features only.
pub fn informative_chromosome(p: usize, n_trees: usize) -> Chromosome {
    Chromosome {
        feature_mask: (0..p).map(|j| j < 5).collect(),
        n_trees,
        max_depth: 12,
        min_samples_leaf: 2,
        mtry_fraction: 0.6,
    }
}

/// A C-like source text of roughly `lines` lines.
pub fn source_text(lines: usize) -> String {
    let mut s = String::from("/* bench */\nint total(int *v, int n) {\n    int acc = 0;\n");
    for i in 0..lines {
        s.push_str(&format!("    if (v[{i}] > {i} && n > 0) acc += v[{i}] * 2; // step\n"));
    }
    s.push_str("    return acc;\n}\n");
    s
}
