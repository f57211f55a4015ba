//! Score LIME fidelity per group over several trials and print the gap
//! report with t-intervals, then the same report with bootstrap intervals.
//!
//! cargo run --release --example fidelity_gaps

use xdaudit::blackbox::{train, ModelSpec, TrainConfig};
use xdaudit::dgp::{apply_covariate_shift, sample_population, split_train_test, DataGenSpec, Objective};
use xdaudit::lime::{explain_batch, ExplainerConfig, FeatureScaler, Instance};
use xdaudit::metrics::{fidelity_from_explanations, fidelity_report, CiMethod, QKind};

fn main() -> xdaudit::Result<()> {
    let features: Vec<String> = ["A", "C", "L"].map(String::from).to_vec();
    let mut trials = Vec::new();
    for seed in 0..3 {
        let population = sample_population(&DataGenSpec::new(Objective::CovariateShift, seed).with_n(6000))?;
        let (train_set, test) = split_train_test(&population, 0.7, seed)?;
        let train_set = apply_covariate_shift(&train_set, 0.2)?.dataset;
        let model = train(&ModelSpec::lr(&features, seed), &train_set, &TrainConfig::default())?;
        let cfg = ExplainerConfig::default().with_seed(seed);
        let scaler = FeatureScaler::fit(&train_set, &features, &[], &cfg)?;
        let instances = (0..test.n_rows())
            .map(|row| Instance::from_dataset(&test, row, &features))
            .collect::<xdaudit::Result<Vec<_>>>()?;
        let explanations = explain_batch(&model, &instances, &cfg, &scaler)?;
        trials.push(fidelity_from_explanations(&explanations, QKind::Accuracy));
    }

    for method in [CiMethod::TrialT, CiMethod::Bootstrap { resamples: 1000, seed: 1 }] {
        let report = fidelity_report(&trials, QKind::Accuracy, method, 0.95)?;
        println!("{method:?}");
        for (metric, q, who, value, lo, hi) in report.rows() {
            println!("  {metric:<16} {q:<9} {who:<4} {value:.4}  ({lo:.4}, {hi:.4})");
        }
    }
    Ok(())
}
