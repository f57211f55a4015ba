//! Dense feed-forward network with ReLU hidden layers and a single logit output.
//!
//! Logistic regression is the zero-hidden-layer case.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `inputs × outputs`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            weights: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Pre-activation bound used when producing probabilities, so that the
/// sigmoid stays strictly inside `(0, 1)`.
const LOGIT_CLAMP: f64 = 30.0;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Layer>,
}

impl Network {
    /// All-zero parameters for the given layer widths (`[d, h1, ..., 1]`).
    pub fn zeros(widths: &[usize]) -> Self {
        Network {
            layers: widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        }
    }

    /// Fan-in uniform initialization `U(-1/sqrt(fan_in), 1/sqrt(fan_in))` for
    /// weights, zero biases.
    pub fn kaiming_uniform(widths: &[usize], rng: &mut impl Rng) -> Self {
        let mut net = Network::zeros(widths);
        for layer in &mut net.layers {
            let bound = 1.0 / (layer.weights.nrows() as f64).sqrt();
            layer
                .weights
                .mapv_inplace(|_| rng.random_range(-bound..bound));
        }
        net
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.n_inputs()];
        w.extend(self.layers.iter().map(|l| l.bias.len()));
        w
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    /// Output logits for already-scaled inputs.
    pub fn logits(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let mut h = x.to_owned();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = h.dot(&layer.weights);
            z += &layer.bias;
            if k < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            h = z;
        }
        h.index_axis_move(Axis(1), 0)
    }

    /// Sign pattern (`z > 0`) of every hidden pre-activation, row by row.
    pub(crate) fn relu_pattern(&self, x: ArrayView2<'_, f64>) -> Vec<bool> {
        let mut h = x.to_owned();
        let mut out = Vec::new();
        for layer in &self.layers[..self.layers.len() - 1] {
            let mut z = h.dot(&layer.weights);
            z += &layer.bias;
            out.extend(z.iter().map(|&v| v > 0.0));
            z.mapv_inplace(|v| v.max(0.0));
            h = z;
        }
        out
    }

    pub fn probabilities(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        self.logits(x)
            .mapv(|z| sigmoid(z.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)))
    }

    /// Mean binary cross-entropy plus `weight_decay/2 · ‖θ‖²`, and its gradient.
    ///
    /// Returns `(bce, total_loss, gradient)`.
    pub fn loss_and_gradient(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        weight_decay: f64,
    ) -> (f64, f64, Vec<Layer>) {
        let n = x.nrows() as f64;
        let last = self.layers.len() - 1;
        // Forward pass, keeping inputs to every layer.
        let mut inputs: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len());
        let mut h = x.to_owned();
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = h.dot(&layer.weights);
            z += &layer.bias;
            if k < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            inputs.push(h);
            h = z;
        }
        let logits = h.column(0);
        let mut bce = 0.0;
        let mut delta = Array2::<f64>::zeros((x.nrows(), 1));
        for ((d, &z), &t) in delta.column_mut(0).iter_mut().zip(logits).zip(y) {
            bce += softplus(z) - t * z;
            *d = (sigmoid(z) - t) / n;
        }
        bce /= n;

        let mut grads: Vec<Layer> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &inputs[k];
            let mut gw = input.t().dot(&delta);
            let mut gb = delta.sum_axis(Axis(0));
            if weight_decay > 0.0 {
                gw.scaled_add(weight_decay, &layer.weights);
                gb.scaled_add(weight_decay, &layer.bias);
            }
            if k > 0 {
                let mut upstream = delta.dot(&layer.weights.t());
                // `input` is the ReLU output of the previous layer.
                Zip::from(&mut upstream)
                    .and(input)
                    .for_each(|u, &a| {
                        if a <= 0.0 {
                            *u = 0.0;
                        }
                    });
                delta = upstream;
            }
            grads.push(Layer {
                weights: gw,
                bias: gb,
            });
        }
        grads.reverse();

        let penalty = 0.5
            * weight_decay
            * self
                .layers
                .iter()
                .map(|l| l.weights.iter().chain(&l.bias).map(|v| v * v).sum::<f64>())
                .sum::<f64>();
        (bce, bce + penalty, grads)
    }

    /// Parameters in a fixed order: per layer, weights row-major then bias.
    pub fn flat_params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let mut it = params.iter();
        for l in &mut self.layers {
            for v in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *v = *it.next().expect("parameter count");
            }
        }
    }
}

pub(crate) fn flatten(layers: &[Layer]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
        .collect()
}
