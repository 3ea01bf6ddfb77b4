//! Epsilon-insensitive support vector regression.
//!
//! The dual is posed over `2n` variables (`alpha` then `alpha*`) in the
//! single-label form used by LIBSVM and solved by SMO with second-order
//! working-set selection.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelKind,
    /// RBF width; `None` uses `1 / n_features`.
    #[serde(default)]
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// Fit on `(y - mean) / std`, so `c` and `epsilon` are in standard units.
    pub standardize_target: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: Kernel,
    pub support_vectors: Matrix,
    /// `alpha_i - alpha*_i` for each support vector.
    pub dual_coef: Vec<f64>,
    /// Bias in the (possibly standardized) target space.
    pub bias: f64,
    pub y_mean: f64,
    pub y_scale: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SvrModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let f: f64 = self
            .support_vectors
            .rows_iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * self.kernel.eval(sv, row))
            .sum::<f64>()
            + self.bias;
        self.y_mean + self.y_scale * f
    }

    /// Bias expressed in target units (what a constant model predicts).
    pub fn effective_bias(&self) -> f64 {
        self.y_mean + self.y_scale * self.bias
    }
}

const TAU: f64 = 1e-12;
const FULL_CACHE_LIMIT: usize = 2500;

struct KernelRows<'a> {
    x: &'a Matrix,
    kernel: Kernel,
    full: Option<Vec<f64>>,
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a Matrix, kernel: Kernel) -> Self {
        let n = x.nrows();
        let full = (n <= FULL_CACHE_LIMIT).then(|| {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v = kernel.eval(x.row(i), x.row(j));
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            k
        });
        Self { x, kernel, full }
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        let n = self.x.nrows();
        match &self.full {
            Some(k) => out.copy_from_slice(&k[i * n..(i + 1) * n]),
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.kernel.eval(self.x.row(i), self.x.row(j));
                }
            }
        }
    }
}

pub fn fit(x: &Matrix, y: &[f64], params: &SvrParams, notes: &mut Vec<String>) -> SvrModel {
    let n = y.len();
    let kernel = match params.kernel {
        KernelKind::Linear => Kernel::Linear,
        KernelKind::Rbf => Kernel::Rbf {
            gamma: params.gamma.unwrap_or(1.0 / x.ncols().max(1) as f64),
        },
    };
    let (y_mean, y_scale) = if params.standardize_target {
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        (mean, if sd > 0.0 { sd } else { 1.0 })
    } else {
        (0.0, 1.0)
    };
    let z: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();

    let l = 2 * n;
    let c = params.c;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = (0..l)
        .map(|t| {
            if t < n {
                params.epsilon - z[t]
            } else {
                params.epsilon + z[t - n]
            }
        })
        .collect();
    let rows = KernelRows::new(x, kernel);
    let diag: Vec<f64> = (0..n).map(|i| kernel.eval(x.row(i), x.row(i))).collect();
    let mut ki = vec![0.0; n];
    let mut kj = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        // working set selection, second-order variant
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..l {
            if sign(t) > 0.0 {
                if alpha[t] < c && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = t;
                }
            } else if alpha[t] > 0.0 && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = t;
            }
        }
        if i_sel == usize::MAX {
            converged = true;
            break;
        }
        let i = i_sel;
        let yi = sign(i);
        rows.row(i % n, &mut ki);
        let q_i = |t: usize| yi * sign(t) * ki[t % n];
        let qd = |t: usize| diag[t % n];

        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut obj_min = f64::INFINITY;
        for t in 0..l {
            let yt = sign(t);
            if yt > 0.0 {
                if alpha[t] > 0.0 {
                    let grad_diff = gmax + grad[t];
                    if grad[t] >= gmax2 {
                        gmax2 = grad[t];
                    }
                    if grad_diff > 0.0 {
                        let quad = qd(i) + qd(t) - 2.0 * yi * q_i(t);
                        let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                        if obj <= obj_min {
                            obj_min = obj;
                            j_sel = t;
                        }
                    }
                }
            } else if alpha[t] < c {
                let grad_diff = gmax - grad[t];
                if -grad[t] >= gmax2 {
                    gmax2 = -grad[t];
                }
                if grad_diff > 0.0 {
                    let quad = qd(i) + qd(t) + 2.0 * yi * q_i(t);
                    let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= obj_min {
                        obj_min = obj;
                        j_sel = t;
                    }
                }
            }
        }
        if gmax + gmax2 < params.tol || j_sel == usize::MAX {
            converged = true;
            break;
        }
        let j = j_sel;
        let yj = sign(j);
        rows.row(j % n, &mut kj);
        let q_ij = q_i(j);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if yi != yj {
            let quad = {
                let q = qd(i) + qd(j) + 2.0 * q_ij;
                if q > 0.0 {
                    q
                } else {
                    TAU
                }
            };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = {
                let q = qd(i) + qd(j) - 2.0 * q_ij;
                if q > 0.0 {
                    q
                } else {
                    TAU
                }
            };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_i = alpha[i] - old_i;
        let d_j = alpha[j] - old_j;
        for t in 0..l {
            let st = sign(t);
            grad[t] += yi * st * ki[t % n] * d_i + yj * st * kj[t % n] * d_j;
        }
        iterations += 1;
    }
    if !converged {
        let msg = format!("SMO stopped at max_iter={} before reaching tol", params.max_iter);
        log::warn!("{msg}");
        notes.push(msg);
    }

    // bias from free variables, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for t in 0..l {
        let yg = sign(t) * grad[t];
        if alpha[t] >= c {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let mut sv_rows = Vec::new();
    let mut dual_coef = Vec::new();
    for i in 0..n {
        let coef = alpha[i] - alpha[i + n];
        if coef != 0.0 {
            sv_rows.push(i);
            dual_coef.push(coef);
        }
    }
    SvrModel {
        kernel,
        support_vectors: x.select_rows(&sv_rows),
        dual_coef,
        bias: -rho,
        y_mean,
        y_scale,
        iterations,
        converged,
    }
}
