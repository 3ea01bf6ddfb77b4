//! One-hidden-layer perceptron with a linear output unit, trained by
//! mini-batch gradient descent on mean squared error.
//!
//! Inputs are min-max scaled to `[0, 1]` with training-set ranges and the
//! target is standardized; both transforms are stored with the model.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `z`.
    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 - s)
            }
            Activation::Tanh => 1.0 - z.tanh().powi(2),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NnParams {
    pub hidden_units: usize,
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch: usize,
}

/// Network weights in a flat layout: `w1` (hidden x inputs, row-major),
/// `b1` (hidden), `w2` (hidden), `b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub inputs: usize,
    pub hidden: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
}

impl Network {
    pub fn n_params(inputs: usize, hidden: usize) -> usize {
        hidden * inputs + 2 * hidden + 1
    }

    /// Uniform initialisation in `+-1/sqrt(fan_in)` per layer.
    pub fn init(inputs: usize, hidden: usize, activation: Activation, seed: SeedStream) -> Self {
        let mut rng = seed.child("init").rng();
        let mut weights = Vec::with_capacity(Self::n_params(inputs, hidden));
        let a1 = 1.0 / (inputs.max(1) as f64).sqrt();
        for _ in 0..hidden * inputs + hidden {
            weights.push(rng.gen_range(-a1..=a1));
        }
        let a2 = 1.0 / (hidden as f64).sqrt();
        for _ in 0..hidden + 1 {
            weights.push(rng.gen_range(-a2..=a2));
        }
        Self {
            inputs,
            hidden,
            activation,
            weights,
        }
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b1 = self.hidden * self.inputs;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.hidden;
        (b1, w2, b2)
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let (b1, w2, b2) = self.offsets();
        let w = &self.weights;
        let mut out = w[b2];
        for h in 0..self.hidden {
            let row = &w[h * self.inputs..(h + 1) * self.inputs];
            let z = w[b1 + h] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            out += w[w2 + h] * self.activation.apply(z);
        }
        out
    }

    /// Mean squared error over the given rows and its gradient with respect
    /// to every weight.
    pub fn loss_and_gradient(&self, x: &Matrix, t: &[f64], rows: &[usize]) -> (f64, Vec<f64>) {
        let (b1, w2, b2) = self.offsets();
        let w = &self.weights;
        let mut grad = vec![0.0; w.len()];
        let mut loss = 0.0;
        let m = rows.len() as f64;
        let mut z = vec![0.0; self.hidden];
        let mut a = vec![0.0; self.hidden];
        for &r in rows {
            let xr = x.row(r);
            let mut out = w[b2];
            for h in 0..self.hidden {
                let row = &w[h * self.inputs..(h + 1) * self.inputs];
                z[h] = w[b1 + h] + row.iter().zip(xr).map(|(p, q)| p * q).sum::<f64>();
                a[h] = self.activation.apply(z[h]);
                out += w[w2 + h] * a[h];
            }
            let err = out - t[r];
            loss += err * err / m;
            let d_out = 2.0 * err / m;
            grad[b2] += d_out;
            for h in 0..self.hidden {
                grad[w2 + h] += d_out * a[h];
                let d_z = d_out * w[w2 + h] * self.activation.derivative(z[h]);
                grad[b1 + h] += d_z;
                for (g, xv) in grad[h * self.inputs..(h + 1) * self.inputs].iter_mut().zip(xr) {
                    *g += d_z * xv;
                }
            }
        }
        (loss, grad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnModel {
    pub network: Network,
    pub x_min: Vec<f64>,
    pub x_range: Vec<f64>,
    pub y_mean: f64,
    pub y_scale: f64,
    /// Training loss (standardized units) after each epoch.
    pub loss_history: Vec<f64>,
}

impl NnModel {
    pub fn scale_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.x_min)
            .zip(&self.x_range)
            .map(|((v, lo), r)| (v - lo) / r)
            .collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.y_mean + self.y_scale * self.network.forward(&self.scale_row(row))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diverged {
    pub epoch: usize,
}

pub fn fit(x: &Matrix, y: &[f64], params: &NnParams, seed: SeedStream) -> Result<NnModel, Diverged> {
    let n = y.len();
    let p = x.ncols();
    let mut x_min = vec![0.0; p];
    let mut x_range = vec![1.0; p];
    for c in 0..p {
        let col = x.column(c);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        x_min[c] = lo;
        x_range[c] = if hi > lo { hi - lo } else { 1.0 };
    }
    let mut scaled = Matrix::zeros(n, p);
    for r in 0..n {
        for c in 0..p {
            scaled.set(r, c, (x.get(r, c) - x_min[c]) / x_range[c]);
        }
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let y_scale = if sd > 0.0 { sd } else { 1.0 };
    let t: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();

    let mut net = Network::init(p, params.hidden_units, params.activation, seed);
    let all: Vec<usize> = (0..n).collect();
    let batch = params.batch.clamp(1, n);
    let mut order = all.clone();
    let mut loss_history = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        order.shuffle(&mut seed.child("epoch").index(epoch as u64).rng());
        for chunk in order.chunks(batch) {
            let (_, g) = net.loss_and_gradient(&scaled, &t, chunk);
            for (w, gi) in net.weights.iter_mut().zip(&g) {
                *w -= params.learning_rate * gi;
            }
        }
        let (loss, _) = net.loss_and_gradient(&scaled, &t, &all);
        if !loss.is_finite() || net.weights.iter().any(|w| !w.is_finite()) {
            return Err(Diverged { epoch });
        }
        loss_history.push(loss);
    }
    Ok(NnModel {
        network: net,
        x_min,
        x_range,
        y_mean,
        y_scale,
        loss_history,
    })
}
