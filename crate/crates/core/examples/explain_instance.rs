//! Explain a handful of test predictions with LIME and print the local
//! feature weights next to the black-box and surrogate probabilities.
//!
//! cargo run --release --example explain_instance

use xdaudit::blackbox::{train, ModelSpec, TrainConfig};
use xdaudit::dgp::{sample_population, split_train_test, DataGenSpec, Objective};
use xdaudit::lime::{agreement, explain_batch, ExplainerConfig, FeatureScaler, Instance};

fn main() -> xdaudit::Result<()> {
    let population = sample_population(&DataGenSpec::new(Objective::SampleSize, 11).with_n(6000))?;
    let (train_set, test) = split_train_test(&population, 0.7, 11)?;
    let features: Vec<String> = ["A", "C", "L"].map(String::from).to_vec();
    let model = train(&ModelSpec::mlp(&features, 2), &train_set, &TrainConfig::default())?;

    let cfg = ExplainerConfig::default().with_seed(5);
    let scaler = FeatureScaler::fit(&train_set, &features, &[], &cfg)?;
    let instances = (0..8)
        .map(|row| Instance::from_dataset(&test, row, &features))
        .collect::<xdaudit::Result<Vec<_>>>()?;

    println!("  id grp   f(x)   g(x) agree   w_A      w_C      w_L");
    for e in explain_batch(&model, &instances, &cfg, &scaler)? {
        println!(
            "{:>4} {:>3}  {:.3}  {:.3}   {}   {:+.4}  {:+.4}  {:+.4}",
            e.instance_id,
            e.group,
            e.blackbox_prob,
            e.surrogate_prob_at_instance,
            agreement(&e),
            e.weight("A").unwrap_or(f64::NAN),
            e.weight("C").unwrap_or(f64::NAN),
            e.weight("L").unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
