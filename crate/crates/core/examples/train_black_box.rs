//! Train both classifier families with and without the sensitive attribute
//! and compare group accuracies. Also round-trips a model through disk.
//!
//! cargo run --release --example train_black_box

use xdaudit::blackbox::{group_accuracy, load, save, train, ModelSpec, TrainConfig};
use xdaudit::dgp::{sample_population, split_train_test, DataGenSpec, Objective};

fn main() -> xdaudit::Result<()> {
    let population = sample_population(&DataGenSpec::new(Objective::ConceptShift, 3))?;
    let (train_set, test) = split_train_test(&population, 0.7, 3)?;
    let cfg = TrainConfig::default();

    for spec in [
        ModelSpec::lr(&["A", "C", "L"], 1),
        ModelSpec::lr(&["C", "L"], 1),
        ModelSpec::mlp(&["A", "C", "L"], 1),
        ModelSpec::mlp(&["C", "L"], 1),
    ] {
        let model = train(&spec, &train_set, &cfg)?;
        let (a0, a1) = (group_accuracy(&model, &test, 0)?, group_accuracy(&model, &test, 1)?);
        println!(
            "{:<3} on {:<9} acc(A=0)={a0:.3} acc(A=1)={a1:.3} gap={:+.3} final loss={:.4}",
            spec.kind.to_string(),
            spec.feature_names.join(","),
            a1 - a0,
            model.training_log().last().copied().unwrap_or(f64::NAN),
        );
        if spec.feature_names.len() == 3 && spec.kind.to_string() == "LR" {
            let path = std::env::temp_dir().join("xdaudit-lr.model");
            save(&model, &path)?;
            let back = load(&path)?;
            assert_eq!(back.predict_proba(&test)?, model.predict_proba(&test)?);
            println!("    saved and reloaded {}", path.display());
        }
    }
    Ok(())
}
