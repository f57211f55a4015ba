//! Black-box classifiers: logistic regression and a `d→50→100→200→1` ReLU MLP,
//! both trained with Adam on binary cross-entropy with coupled L2 decay.

mod adam;
mod gradcheck;
mod io;
mod network;

use std::fmt;

use ndarray::{Array1, Array2, ArrayView2};
use rand::seq::SliceRandom;

pub use gradcheck::{gradient_check, GradientCheck};
pub use io::{load, save, FORMAT_VERSION};
pub use network::{sigmoid, Layer, Network};

use crate::dgp::{ColumnKind, TabularDataset};
use crate::rng::{self, tag};
use crate::{Error, Result};
use adam::Adam;

pub const MLP_HIDDEN: [usize; 3] = [50, 100, 200];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lr,
    Mlp,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Lr => "LR",
            ModelKind::Mlp => "MLP",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Columns the model sees, in input order.
    pub feature_names: Vec<String>,
    pub hidden_dims: Vec<usize>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn lr<S: AsRef<str>>(features: &[S], seed: u64) -> Self {
        ModelSpec {
            kind: ModelKind::Lr,
            feature_names: features.iter().map(|s| s.as_ref().to_string()).collect(),
            hidden_dims: Vec::new(),
            seed,
        }
    }

    pub fn mlp<S: AsRef<str>>(features: &[S], seed: u64) -> Self {
        ModelSpec {
            kind: ModelKind::Mlp,
            feature_names: features.iter().map(|s| s.as_ref().to_string()).collect(),
            hidden_dims: MLP_HIDDEN.to_vec(),
            seed,
        }
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.feature_names.len()];
        if self.kind == ModelKind::Mlp {
            w.extend(&self.hidden_dims);
        }
        w.push(1);
        w
    }

    fn validate(&self) -> Result<()> {
        if self.feature_names.is_empty() {
            return Err(Error::config("feature_names", "must not be empty"));
        }
        if self.kind == ModelKind::Mlp && self.hidden_dims.contains(&0) {
            return Err(Error::config("hidden_dims", "layer widths must be positive"));
        }
        if self.kind == ModelKind::Lr && !self.hidden_dims.is_empty() {
            return Err(Error::config("hidden_dims", "logistic regression has no hidden layers"));
        }
        Ok(())
    }

    /// Initial parameters: zeros for LR, fan-in uniform for the MLP.
    pub fn init_network(&self) -> Network {
        match self.kind {
            ModelKind::Lr => Network::zeros(&self.widths()),
            ModelKind::Mlp => Network::kaiming_uniform(
                &self.widths(),
                &mut rng::stream(self.seed, tag::MODEL_INIT),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub adam_betas: (f64, f64),
    pub adam_eps: f64,
    /// Mini-batch size; `None` means full-batch updates. Rows are reshuffled
    /// every epoch from a stream derived from the model seed.
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 1e-3,
            weight_decay: 1e-4,
            adam_betas: (0.9, 0.999),
            adam_eps: 1e-8,
            batch_size: Some(128),
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning_rate", "must be positive"));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::config("weight_decay", "must be non-negative"));
        }
        if self.batch_size == Some(0) {
            return Err(Error::config("batch_size", "must be positive"));
        }
        Ok(())
    }
}

/// Standardizes continuous inputs with training mean/sd; binary inputs pass
/// through unchanged (`mean = 0`, `sd = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaler {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl InputScaler {
    pub fn identity(d: usize) -> Self {
        InputScaler {
            mean: vec![0.0; d],
            sd: vec![1.0; d],
        }
    }

    pub fn fit(ds: &TabularDataset, features: &[String]) -> Result<Self> {
        let mut mean = Vec::with_capacity(features.len());
        let mut sd = Vec::with_capacity(features.len());
        for name in features {
            let j = ds
                .column_index(name)
                .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))?;
            if ds.columns()[j].kind == ColumnKind::Binary {
                mean.push(0.0);
                sd.push(1.0);
                continue;
            }
            let col = ds.column_at(j);
            let n = col.len() as f64;
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
            mean.push(m);
            sd.push(if var > 0.0 { var.sqrt() } else { 1.0 });
        }
        Ok(InputScaler { mean, sd })
    }

    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.sd) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// A trained classifier. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    spec: ModelSpec,
    scaler: InputScaler,
    network: Network,
    training_log: Vec<f64>,
}

impl TrainedModel {
    /// Assemble a model from known parameters.
    pub fn from_parts(spec: ModelSpec, scaler: InputScaler, network: Network) -> Result<Self> {
        Self::from_parts_with_log(spec, scaler, network, Vec::new())
    }

    pub(crate) fn from_parts_with_log(
        spec: ModelSpec,
        scaler: InputScaler,
        network: Network,
        training_log: Vec<f64>,
    ) -> Result<Self> {
        spec.validate()?;
        if network.widths() != spec.widths() {
            return Err(Error::Schema(format!(
                "network widths {:?} do not match spec {:?}",
                network.widths(),
                spec.widths()
            )));
        }
        let d = spec.feature_names.len();
        if scaler.mean.len() != d || scaler.sd.len() != d {
            return Err(Error::Schema("scaler width does not match features".into()));
        }
        Ok(TrainedModel {
            spec,
            scaler,
            network,
            training_log,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn scaler(&self) -> &InputScaler {
        &self.scaler
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Per-epoch mean BCE.
    pub fn training_log(&self) -> &[f64] {
        &self.training_log
    }

    pub fn feature_names(&self) -> &[String] {
        &self.spec.feature_names
    }

    /// Input slot of a dataset column, if the model uses it.
    pub fn feature_index(&self, column: &str) -> Option<usize> {
        self.spec.feature_names.iter().position(|f| f == column)
    }

    /// Probabilities for raw rows given in model feature order.
    pub fn predict_proba_rows(&self, rows: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if rows.ncols() != self.spec.feature_names.len() {
            return Err(Error::Schema(format!(
                "expected {} feature columns, got {}",
                self.spec.feature_names.len(),
                rows.ncols()
            )));
        }
        Ok(self.network.probabilities(self.scaler.transform(rows).view()))
    }

    /// Probabilities for every row of `ds`; columns are looked up by name.
    pub fn predict_proba(&self, ds: &TabularDataset) -> Result<Array1<f64>> {
        let x = ds.matrix_of(&self.spec.feature_names)?;
        self.predict_proba_rows(x.view())
    }

    pub fn predict_class(&self, ds: &TabularDataset, threshold: f64) -> Result<Vec<u8>> {
        Ok(classify(&self.predict_proba(ds)?, threshold))
    }
}

/// `1{p ≥ threshold}`.
pub fn classify(probs: &Array1<f64>, threshold: f64) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p >= threshold)).collect()
}

/// Train `spec` on `train` with Adam; deterministic given the spec seed.
pub fn train(spec: &ModelSpec, train: &TabularDataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    spec.validate()?;
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Sampling("training set is empty".into()));
    }
    let raw = train.matrix_of(&spec.feature_names)?;
    let scaler = InputScaler::fit(train, &spec.feature_names)?;
    let x = scaler.transform(raw.view());
    let y: Vec<f64> = train.y().iter().map(|&v| f64::from(v)).collect();
    let n = x.nrows();

    let mut net = spec.init_network();
    let mut opt = Adam::new(&net, cfg.learning_rate, cfg.adam_betas, cfg.adam_eps);
    let mut log = Vec::with_capacity(cfg.epochs);
    let batch = cfg.batch_size.unwrap_or(n).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = rng::stream(rng::derive(spec.seed, 1), tag::MODEL_INIT);

    for epoch in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        if batch == n {
            let (bce, _, grads) = net.loss_and_gradient(x.view(), &y, cfg.weight_decay);
            epoch_loss = bce;
            check_finite(epoch, bce, &grads)?;
            opt.update(&mut net, &grads);
        } else {
            order.shuffle(&mut shuffle_rng);
            for chunk in order.chunks(batch) {
                let xb = x.select(ndarray::Axis(0), chunk);
                let yb: Vec<f64> = chunk.iter().map(|&i| y[i]).collect();
                let (bce, _, grads) = net.loss_and_gradient(xb.view(), &yb, cfg.weight_decay);
                check_finite(epoch, bce, &grads)?;
                epoch_loss += bce * chunk.len() as f64;
                opt.update(&mut net, &grads);
            }
            epoch_loss /= n as f64;
        }
        log.push(epoch_loss);
    }
    TrainedModel::from_parts_with_log(spec.clone(), scaler, net, log)
}

fn check_finite(epoch: usize, loss: f64, grads: &[Layer]) -> Result<()> {
    if !loss.is_finite() {
        return Err(Error::Numerical {
            epoch,
            reason: format!("loss is {loss}"),
        });
    }
    if grads
        .iter()
        .any(|g| g.weights.iter().chain(&g.bias).any(|v| !v.is_finite()))
    {
        return Err(Error::Numerical {
            epoch,
            reason: "non-finite gradient".into(),
        });
    }
    Ok(())
}

/// Accuracy of `model` on the rows of `ds` belonging to `group`.
pub fn group_accuracy(model: &TrainedModel, ds: &TabularDataset, group: u8) -> Result<f64> {
    let rows = ds.group_indices(group);
    if rows.is_empty() {
        return Err(Error::EmptyGroup {
            sizes: vec![ds.group_count(0), ds.group_count(1)],
        });
    }
    let sub = ds.select_rows(&rows);
    let pred = model.predict_class(&sub, 0.5)?;
    let hits = pred.iter().zip(sub.y()).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / rows.len() as f64)
}
