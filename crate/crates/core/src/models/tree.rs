//! Binary regression tree grown by exhaustive variance-reduction search.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    /// `None` grows until another stopping rule applies.
    #[serde(default)]
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

/// Per-split feature subsampling for random forests.
pub(crate) struct FeatureSampler<'a> {
    pub rng: &'a mut Rng,
    pub mtry: usize,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    split_pos: usize,
}

/// Column-major copy of the feature matrix, shared by all trees of a fit.
pub(crate) struct Columns(Vec<Vec<f64>>);

impl Columns {
    pub(crate) fn new(x: &Matrix) -> Self {
        Columns((0..x.ncols()).map(|c| x.column(c)).collect())
    }
}

struct Builder<'a> {
    cols: &'a [Vec<f64>],
    y: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
    /// (feature value, centred target) scratch buffer
    pairs: Vec<(f64, f64)>,
}

impl<'a> Builder<'a> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let sum: f64 = idx.iter().map(|&i| self.y[i]).sum();
        Node::Leaf {
            value: sum / idx.len() as f64,
            samples: idx.len(),
        }
    }

    /// Best split of `idx` over `features` (ascending). Ties keep the first
    /// candidate found: lowest feature index, then lowest threshold.
    fn best_split(&mut self, idx: &[usize], features: &[usize]) -> Option<Candidate> {
        let n = idx.len();
        let leaf = self.params.min_samples_leaf.max(1);
        let mean = idx.iter().map(|&i| self.y[i]).sum::<f64>() / n as f64;
        let (tot, tot_sq) = idx.iter().fold((0.0, 0.0), |(s, q), &i| {
            let d = self.y[i] - mean;
            (s + d, q + d * d)
        });
        let parent_sse = tot_sq - tot * tot / n as f64;
        let mut best: Option<Candidate> = None;

        for &f in features {
            let col = &self.cols[f];
            self.pairs.clear();
            self.pairs
                .extend(idx.iter().map(|&i| (col[i], self.y[i] - mean)));
            self.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (mut ls, mut lq) = (0.0, 0.0);
            for pos in 1..n {
                let (lo, d) = self.pairs[pos - 1];
                ls += d;
                lq += d * d;
                if pos < leaf || n - pos < leaf {
                    continue;
                }
                let hi = self.pairs[pos].0;
                if lo >= hi {
                    continue;
                }
                let (rs, rq) = (tot - ls, tot_sq - lq);
                let nl = pos as f64;
                let nr = (n - pos) as f64;
                let sse = (lq - ls * ls / nl) + (rq - rs * rs / nr);
                let gain = parent_sse - sse;
                if best.as_ref().map_or(true, |b| gain > b.gain) {
                    let mut threshold = 0.5 * (lo + hi);
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(Candidate {
                        feature: f,
                        threshold,
                        gain,
                        split_pos: pos,
                    });
                }
            }
        }
        best.filter(|b| b.gain > 0.0 && b.split_pos > 0)
    }

    fn build(&mut self, root: Vec<usize>, mut sampler: Option<FeatureSampler<'_>>) {
        let p = self.cols.len();
        let all_features: Vec<usize> = (0..p).collect();
        // (node slot, indices, depth)
        let mut stack = vec![(0usize, root, 0usize)];
        self.nodes.push(Node::Leaf {
            value: 0.0,
            samples: 0,
        });
        while let Some((slot, idx, depth)) = stack.pop() {
            let n = idx.len();
            let leaf = self.params.min_samples_leaf.max(1);
            let constant = idx.iter().all(|&i| self.y[i] == self.y[idx[0]]);
            let depth_done = self.params.max_depth.is_some_and(|d| depth >= d);
            if constant || depth_done || n < 2 * leaf {
                self.nodes[slot] = self.leaf(&idx);
                continue;
            }
            let features: Vec<usize> = match sampler.as_mut() {
                Some(s) if s.mtry < p => {
                    let mut f = sample(s.rng, p, s.mtry).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => all_features.clone(),
            };
            match self.best_split(&idx, &features) {
                None => self.nodes[slot] = self.leaf(&idx),
                Some(c) => {
                    let (l, r): (Vec<usize>, Vec<usize>) =
                        idx.iter().partition(|&&i| self.cols[c.feature][i] <= c.threshold);
                    let left = self.nodes.len();
                    let right = left + 1;
                    self.nodes.push(Node::Leaf {
                        value: 0.0,
                        samples: 0,
                    });
                    self.nodes.push(Node::Leaf {
                        value: 0.0,
                        samples: 0,
                    });
                    self.nodes[slot] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right,
                    };
                    stack.push((right, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
            }
        }
    }
}

impl RegressionTree {
    /// Grows a tree on the given rows (`rows` may repeat indices, as in a
    /// bootstrap sample).
    pub(crate) fn grow(
        cols: &Columns,
        y: &[f64],
        rows: Vec<usize>,
        params: TreeParams,
        sampler: Option<FeatureSampler<'_>>,
    ) -> RegressionTree {
        let mut b = Builder {
            cols: &cols.0,
            y,
            params,
            nodes: Vec::new(),
            pairs: Vec::with_capacity(rows.len()),
        };
        b.build(rows, sampler);
        RegressionTree {
            nodes: b.nodes,
            n_features: cols.0.len(),
        }
    }

    pub fn fit(x: &Matrix, y: &[f64], params: TreeParams) -> RegressionTree {
        Self::grow(&Columns::new(x), y, (0..y.len()).collect(), params, None)
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Root split as `(feature, threshold)`, if the tree is not a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Leaf index reached by a row.
    pub fn leaf_of(&self, row: &[f64]) -> usize {
        let mut i = 0;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
        } = &self.nodes[i]
        {
            i = if row[*feature] <= *threshold {
                *left
            } else {
                *right
            };
        }
        i
    }
}
