use ndarray::{Array1, Array2};
use rayon::prelude::*;

use super::{fit_surrogate, kernel_weights, perturb, ExplainerConfig, FeatureScaler, SurrogateTarget};
use crate::blackbox::TrainedModel;
use crate::dgp::TabularDataset;
use crate::rng::{self, tag};
use crate::{Error, Result};

/// One row to explain, with values in model feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: usize,
    pub group: u8,
    pub values: Array1<f64>,
}

impl Instance {
    /// Row `row` of `ds`, projected onto `features`.
    pub fn from_dataset(ds: &TabularDataset, row: usize, features: &[String]) -> Result<Self> {
        let r = ds.row(row);
        let values = features
            .iter()
            .map(|f| {
                ds.column_index(f)
                    .map(|j| r[j])
                    .ok_or_else(|| Error::Schema(format!("no column named `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance {
            id: row,
            group: ds.sensitive()[row],
            values: Array1::from(values),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalExplanation {
    pub instance_id: usize,
    pub group: u8,
    pub feature_names: Vec<String>,
    /// Surrogate coefficients; continuous features are in standardized units.
    pub feature_weights: Vec<f64>,
    pub intercept: f64,
    pub surrogate_prob_at_instance: f64,
    pub surrogate_class: u8,
    pub blackbox_prob: f64,
    pub blackbox_class: u8,
    /// The surrogate system was singular and solved by pseudoinverse.
    pub singular: bool,
}

impl LocalExplanation {
    pub fn weight(&self, feature: &str) -> Option<f64> {
        self.feature_names
            .iter()
            .position(|f| f == feature)
            .map(|k| self.feature_weights[k])
    }
}

/// `1` when surrogate and black box predict the same class at the instance.
pub fn agreement(expl: &LocalExplanation) -> u8 {
    u8::from(expl.surrogate_class == expl.blackbox_class)
}

/// Explain one instance. Deterministic in `(cfg.seed, instance.id)`.
pub fn explain(
    model: &TrainedModel,
    instance: &Instance,
    cfg: &ExplainerConfig,
    scaler: &FeatureScaler,
) -> Result<LocalExplanation> {
    cfg.validate()?;
    if scaler.feature_names != model.feature_names() {
        return Err(Error::Schema(format!(
            "explainer features {:?} differ from model features {:?}",
            scaler.feature_names,
            model.feature_names()
        )));
    }
    let mut rng = rng::stream(rng::derive(cfg.seed, instance.id as u64), tag::LIME);
    let samples = perturb(instance.values.view(), scaler, cfg, &mut rng)?;
    let probs = model.predict_proba_rows(samples.view())?;
    let targets: Vec<f64> = match cfg.target {
        SurrogateTarget::Probability => probs.to_vec(),
        SurrogateTarget::HardLabel => probs.iter().map(|&p| f64::from(u8::from(p >= 0.5))).collect(),
    };
    let weights = kernel_weights(samples.view(), instance.values.view(), scaler, cfg);
    let design = Array2::from_shape_fn(samples.dim(), |(i, j)| scaler.design_value(j, samples[[i, j]]));
    let fit = fit_surrogate(
        design.view(),
        &targets,
        weights.as_slice().expect("contiguous"),
        cfg.ridge_lambda,
    )?;
    let at_instance = fit.predict(design.row(0).as_slice().expect("contiguous"));
    let blackbox_prob = probs[0];
    Ok(LocalExplanation {
        instance_id: instance.id,
        group: instance.group,
        feature_names: scaler.feature_names.clone(),
        feature_weights: fit.coefficients,
        intercept: fit.intercept,
        surrogate_prob_at_instance: at_instance,
        surrogate_class: u8::from(at_instance >= 0.5),
        blackbox_prob,
        blackbox_class: u8::from(blackbox_prob >= 0.5),
        singular: fit.singular,
    })
}

/// Explain many instances in parallel. Output order follows `instances`;
/// results equal sequential [`explain`] calls.
pub fn explain_batch(
    model: &TrainedModel,
    instances: &[Instance],
    cfg: &ExplainerConfig,
    scaler: &FeatureScaler,
) -> Result<Vec<LocalExplanation>> {
    let results: Vec<Result<LocalExplanation>> = instances
        .par_iter()
        .map(|inst| explain(model, inst, cfg, scaler))
        .collect();
    let failures: Vec<String> = results
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.as_ref().err().map(|e| format!("index {k}: {e}")))
        .collect();
    if !failures.is_empty() {
        return Err(Error::Batch {
            count: failures.len(),
            detail: failures.join("; "),
        });
    }
    Ok(results.into_iter().map(|r| r.expect("checked")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{train, InputScaler, ModelSpec, Network, TrainConfig};
    use crate::dgp::{sample_population, DataGenSpec, Objective};
    use ndarray::array;

    fn features() -> Vec<String> {
        ["A", "C", "L"].iter().map(|s| s.to_string()).collect()
    }

    fn population(n: usize) -> TabularDataset {
        sample_population(&DataGenSpec::new(Objective::SampleSize, 17).with_n(n)).unwrap()
    }

    fn lr_with(weights: [f64; 3], bias: f64) -> TrainedModel {
        let spec = ModelSpec::lr(&features(), 0);
        let mut net = Network::zeros(&spec.widths());
        net.layers[0].weights = array![[weights[0]], [weights[1]], [weights[2]]];
        net.layers[0].bias = array![bias];
        TrainedModel::from_parts(spec, InputScaler::identity(3), net).unwrap()
    }

    fn instances(ds: &TabularDataset, k: usize) -> Vec<Instance> {
        (0..k).map(|i| Instance::from_dataset(ds, i, &features()).unwrap()).collect()
    }

    #[test]
    fn constant_black_box_is_explained_exactly() {
        let ds = population(400);
        let logit = (0.9f64 / 0.1).ln();
        let model = lr_with([0.0; 3], logit);
        let cfg = ExplainerConfig::default().with_seed(3);
        let scaler = FeatureScaler::fit(&ds, &features(), &[], &cfg).unwrap();
        for inst in instances(&ds, 20) {
            let e = explain(&model, &inst, &cfg, &scaler).unwrap();
            assert!((e.intercept - 0.9).abs() < 1e-9);
            let norm = e.feature_weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            assert!(norm <= 1e-6);
            assert_eq!(agreement(&e), 1);
        }
    }

    #[test]
    fn weight_signs_follow_linear_black_box() {
        let ds = population(2000);
        let model = lr_with([0.8, -1.2, 0.5], 0.1);
        let cfg = ExplainerConfig::default().with_seed(5);
        let scaler = FeatureScaler::fit(&ds, &features(), &[], &cfg).unwrap();
        for inst in instances(&ds, 30) {
            let e = explain(&model, &inst, &cfg, &scaler).unwrap();
            for (w, psi) in [0.8f64, -1.2, 0.5].iter().zip(&e.feature_weights) {
                assert_eq!(w.signum(), psi.signum(), "{:?}", e.feature_weights);
            }
        }
    }

    #[test]
    fn explanations_are_deterministic() {
        let ds = population(300);
        let model = lr_with([0.3, -0.7, 1.1], 0.0);
        let cfg = ExplainerConfig::default().with_seed(8);
        let scaler = FeatureScaler::fit(&ds, &features(), &[], &cfg).unwrap();
        let inst = &instances(&ds, 1)[0];
        assert_eq!(
            explain(&model, inst, &cfg, &scaler).unwrap(),
            explain(&model, inst, &cfg, &scaler).unwrap()
        );
    }

    #[test]
    fn batch_matches_sequential_and_follows_permutation() {
        let ds = population(500);
        let cfg_t = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let model = train(&ModelSpec::mlp(&features(), 1), &ds, &cfg_t).unwrap();
        let cfg = ExplainerConfig {
            n_samples: 200,
            ..ExplainerConfig::default().with_seed(2)
        };
        let scaler = FeatureScaler::fit(&ds, &features(), &[], &cfg).unwrap();
        let insts = instances(&ds, 12);
        let batch = explain_batch(&model, &insts, &cfg, &scaler).unwrap();
        let seq: Vec<_> = insts.iter().map(|i| explain(&model, i, &cfg, &scaler).unwrap()).collect();
        assert_eq!(batch, seq);
        assert_eq!(explain_batch(&model, &insts[..1], &cfg, &scaler).unwrap()[0], seq[0]);

        let mut rev = insts.clone();
        rev.reverse();
        let mut out = explain_batch(&model, &rev, &cfg, &scaler).unwrap();
        out.reverse();
        assert_eq!(out, batch);
    }

    #[test]
    fn agreement_shares_tie_rule() {
        let e = |bb: f64, sg: f64| LocalExplanation {
            instance_id: 0,
            group: 0,
            feature_names: vec![],
            feature_weights: vec![],
            intercept: sg,
            surrogate_prob_at_instance: sg,
            surrogate_class: u8::from(sg >= 0.5),
            blackbox_prob: bb,
            blackbox_class: u8::from(bb >= 0.5),
            singular: false,
        };
        assert_eq!(agreement(&e(0.8, 0.6)), 1);
        assert_eq!(agreement(&e(0.8, 0.4)), 0);
        assert_eq!(agreement(&e(0.5, 0.5)), 1);
    }

    #[test]
    fn mismatched_scaler_is_schema_error() {
        let ds = population(100);
        let model = lr_with([0.0; 3], 0.0);
        let cfg = ExplainerConfig::default();
        let f: Vec<String> = vec!["C".into(), "L".into()];
        let scaler = FeatureScaler::fit(&ds, &f, &[], &cfg).unwrap();
        let inst = Instance::from_dataset(&ds, 0, &f).unwrap();
        assert!(matches!(explain(&model, &inst, &cfg, &scaler), Err(Error::Schema(_))));
    }
}
