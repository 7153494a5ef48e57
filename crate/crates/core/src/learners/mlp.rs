//! Feed-forward network with rectifier hidden layers and a linear output,
//! trained on mean squared error with mini-batch Adam.
//!
//! Hidden layers start from a He-style uniform draw; the output layer starts
//! at zero weights with its bias at the mean training target, so training
//! begins from the constant mean predictor.

use std::collections::HashMap;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_layers: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub step_size: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_layers: vec![64, 32],
            epochs: 200,
            batch_size: 32,
            step_size: 1e-3,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameters(format!("mlp: {m}")));
        if self.hidden_layers.contains(&0) {
            return bad("hidden layer widths must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad("step_size must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `inputs × outputs`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Layer stack; every layer but the last applies a rectifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Dense>,
}

/// Gradients with the same shapes as [`Network::layers`].
struct Grads {
    layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Network {
    /// Widths run from the input width to the output width (1).
    pub fn init(widths: &[usize], rng: &mut impl Rng, zero_output: bool, output_bias: f64) -> Self {
        let last = widths.len() - 2;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                if i == last && zero_output {
                    Dense {
                        weights: Array2::zeros((fan_in, fan_out)),
                        bias: Array1::from_elem(fan_out, output_bias),
                    }
                } else {
                    let limit = (6.0 / fan_in.max(1) as f64).sqrt();
                    Dense {
                        weights: Array2::from_shape_fn((fan_in, fan_out), |_| {
                            rng.random_range(-limit..limit)
                        }),
                        bias: if i == last {
                            Array1::from_elem(fan_out, output_bias)
                        } else {
                            Array1::zeros(fan_out)
                        },
                    }
                }
            })
            .collect();
        Self { layers }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let mut a = x.to_owned();
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            a = a.dot(&l.weights) + &l.bias;
            if i < last {
                a.mapv_inplace(|v| v.max(0.0));
            }
        }
        a.column(0).to_owned()
    }

    /// Mean squared error over the batch.
    pub fn loss(&self, x: ArrayView2<'_, f64>, y: &[f64]) -> f64 {
        let pred = self.forward(x);
        pred.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / y.len() as f64
    }

    fn backward(&self, x: ArrayView2<'_, f64>, y: &[f64]) -> (f64, Grads) {
        let n = y.len() as f64;
        let last = self.layers.len() - 1;
        // activations[i] is the input of layer i.
        let mut activations: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_owned());
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = activations[i].dot(&l.weights) + &l.bias;
            if i < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            activations.push(z);
        }
        let out = &activations[self.layers.len()];
        let mut loss = 0.0;
        let mut delta = Array2::zeros((y.len(), 1));
        for (k, t) in y.iter().enumerate() {
            let r = out[[k, 0]] - t;
            loss += r * r;
            delta[[k, 0]] = 2.0 * r / n;
        }
        loss /= n;

        let mut grads = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let input = &activations[i];
            let gw = input.t().dot(&delta);
            let gb = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut prev = delta.dot(&self.layers[i].weights.t());
                // Rectifier derivative, taken as 0 at exactly 0.
                ndarray::Zip::from(&mut prev)
                    .and(input)
                    .for_each(|d, &a| {
                        if a <= 0.0 {
                            *d = 0.0
                        }
                    });
                delta = prev;
            }
            grads.push((gw, gb));
        }
        grads.reverse();
        (loss, Grads { layers: grads })
    }

    /// Loss and gradient flattened in [`Network::params`] order.
    pub fn loss_and_gradient(&self, x: ArrayView2<'_, f64>, y: &[f64]) -> (f64, Vec<f64>) {
        let (loss, g) = self.backward(x, y);
        let mut flat = Vec::new();
        for (gw, gb) in &g.layers {
            flat.extend(gw.iter().copied());
            flat.extend(gb.iter().copied());
        }
        (loss, flat)
    }

    /// All parameters: per layer, weights in row-major order then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for l in &self.layers {
            flat.extend(l.weights.iter().copied());
            flat.extend(l.bias.iter().copied());
        }
        flat
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut() {
                *w = it.next().expect("parameter count");
            }
            for b in l.bias.iter_mut() {
                *b = it.next().expect("parameter count");
            }
        }
    }

    fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_width()];
        w.extend(self.layers.iter().map(|l| l.weights.ncols()));
        w
    }
}

struct Adam {
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
    t: i32,
    step: f64,
}

impl Adam {
    fn new(net: &Network, step: f64) -> Self {
        let zeros = || {
            net.layers
                .iter()
                .map(|l| (Array2::zeros(l.weights.dim()), Array1::zeros(l.bias.len())))
                .collect::<Vec<_>>()
        };
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
            step,
        }
    }

    fn update(&mut self, net: &mut Network, grads: &Grads) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        let lr = self.step;
        let apply = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        };
        for (i, layer) in net.layers.iter_mut().enumerate() {
            let (gw, gb) = &grads.layers[i];
            let (mw, mb) = &mut self.m[i];
            let (vw, vb) = &mut self.v[i];
            ndarray::Zip::from(&mut layer.weights)
                .and(gw)
                .and(mw)
                .and(vw)
                .for_each(|p, &g, m, v| apply(p, g, m, v));
            ndarray::Zip::from(&mut layer.bias)
                .and(gb)
                .and(mb)
                .and(vb)
                .for_each(|p, &g, m, v| apply(p, g, m, v));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub network: Network,
    /// Training-set MSE before the first update, then after every epoch.
    pub loss_history: Vec<f64>,
}

impl MlpModel {
    pub fn fit(params: &MlpParams, x: ArrayView2<'_, f64>, y: &[f64], seed: u64) -> Result<Self> {
        Self::fit_from(params, x, y, seed, None)
    }

    /// Trains starting from `network` when given, otherwise from a fresh
    /// initialisation.
    pub fn fit_from(
        params: &MlpParams,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        seed: u64,
        network: Option<Network>,
    ) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let mut net = match network {
            Some(n) => n,
            None => {
                let mut widths = vec![x.ncols()];
                widths.extend(&params.hidden_layers);
                widths.push(1);
                Network::init(&widths, &mut rng, true, mean)
            }
        };
        let mut adam = Adam::new(&net, params.step_size);
        let mut history = Vec::with_capacity(params.epochs + 1);
        let initial = net.loss(x, y);
        if !initial.is_finite() {
            return Err(Error::NonFiniteLoss { epoch: 0 });
        }
        history.push(initial);
        let mut order: Vec<usize> = (0..y.len()).collect();
        let mut yb = Vec::with_capacity(params.batch_size);
        for epoch in 1..=params.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(params.batch_size) {
                let xb = x.select(Axis(0), chunk);
                yb.clear();
                yb.extend(chunk.iter().map(|&i| y[i]));
                let (_, grads) = net.backward(xb.view(), &yb);
                adam.update(&mut net, &grads);
            }
            let loss = net.loss(x, y);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            history.push(loss);
        }
        Ok(Self {
            network: net,
            loss_history: history,
        })
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        if x.nrows() == 0 {
            return Vec::new();
        }
        self.network.forward(x).to_vec()
    }

    pub(crate) fn sections(&self) -> Vec<(String, Vec<f64>)> {
        let widths: Vec<f64> = self.network.widths().iter().map(|w| *w as f64).collect();
        vec![
            ("mlp.widths".to_string(), widths),
            ("mlp.params".to_string(), self.network.params()),
            ("mlp.loss_history".to_string(), self.loss_history.clone()),
        ]
    }

    pub(crate) fn from_sections(sections: &HashMap<String, Vec<f64>>) -> Result<Self> {
        let bad = |m: &str| Error::MalformedModel(format!("mlp: {m}"));
        let widths: Vec<usize> = sections
            .get("mlp.widths")
            .ok_or_else(|| bad("missing widths"))?
            .iter()
            .map(|w| *w as usize)
            .collect();
        if widths.len() < 2 || widths.contains(&0) {
            return Err(bad("invalid widths"));
        }
        let params = sections.get("mlp.params").ok_or_else(|| bad("missing params"))?;
        let expected: usize = widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        if params.len() != expected {
            return Err(bad("parameter count does not match widths"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut network = Network::init(&widths, &mut rng, true, 0.0);
        network.set_params(params);
        Ok(Self {
            network,
            loss_history: sections.get("mlp.loss_history").cloned().unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_targets_start_at_zero_loss() {
        let x = Array2::from_shape_fn((10, 3), |(i, j)| (i + j) as f64 / 10.0);
        let y = vec![0.0; 10];
        let params = MlpParams {
            epochs: 2,
            ..Default::default()
        };
        let m = MlpModel::fit(&params, x.view(), &y, 1).unwrap();
        assert_eq!(m.loss_history[0], 0.0);
    }

    #[test]
    fn constant_targets_are_a_fixed_point() {
        let x = Array2::from_shape_fn((20, 4), |(i, j)| ((i * 3 + j) % 7) as f64 / 7.0);
        let y = vec![123.25; 20];
        let params = MlpParams {
            epochs: 5,
            ..Default::default()
        };
        let m = MlpModel::fit(&params, x.view(), &y, 4).unwrap();
        for p in m.predict(x.view()) {
            assert!((p - 123.25).abs() < 1e-6);
        }
    }

    #[test]
    fn diverging_training_is_reported() {
        let x = Array2::from_shape_fn((8, 2), |(i, j)| (i * 2 + j) as f64);
        let y: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1e308 } else { -1e308 }).collect();
        let params = MlpParams {
            epochs: 3,
            ..Default::default()
        };
        assert!(matches!(
            MlpModel::fit(&params, x.view(), &y, 0),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn rejects_bad_params() {
        let x = Array2::zeros((4, 2));
        let y = [1.0, 2.0, 3.0, 4.0];
        for p in [
            MlpParams {
                hidden_layers: vec![0],
                ..Default::default()
            },
            MlpParams {
                epochs: 0,
                ..Default::default()
            },
            MlpParams {
                batch_size: 0,
                ..Default::default()
            },
            MlpParams {
                step_size: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                MlpModel::fit(&p, x.view(), &y, 0),
                Err(Error::InvalidHyperparameters(_))
            ));
        }
    }

    #[test]
    fn params_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Network::init(&[3, 4, 1], &mut rng, false, 0.5);
        let mut other = Network::init(&[3, 4, 1], &mut rng, true, 0.0);
        other.set_params(&net.params());
        assert_eq!(net, other);
    }
}
