//! Load and encode the UCI Adult files, run the sex × hours interaction
//! test, and build each training restriction.
//!
//! ADULT_DATA_DIR=/path/to/adult cargo run --release --example adult_pipeline

use xdaudit::adult::{
    build_scenario, concept_shift_test, load_raw, preprocess, AdultConfig, AdultScenario,
};
use xdaudit::dgp::split_indices;

fn main() -> xdaudit::Result<()> {
    let cfg = AdultConfig::from_env_or("data/adult");
    if !cfg.files_present() {
        println!(
            "adult.data / adult.test not found in {}; set ADULT_DATA_DIR",
            cfg.data_dir.display()
        );
        return Ok(());
    }
    let raw = load_raw(&cfg)?;
    for w in &raw.warnings {
        eprintln!("warning: {w}");
    }
    let encoded = preprocess(&raw.records, &cfg)?;
    println!(
        "{} records, {} after dropping missing values, {} encoded columns",
        raw.records.len(),
        encoded.dataset.n_rows(),
        encoded.dataset.n_cols()
    );

    let test = concept_shift_test(&encoded.dataset)?;
    println!(
        "interaction β₃={:.4} (se {:.4}), p={:.2e}",
        test.coefficients[3], test.interaction_se, test.p_value
    );

    let (train_rows, _) = split_indices(encoded.dataset.n_rows(), 0.7, 0)?;
    let train = encoded.standardized(&train_rows)?.select_rows(&train_rows);
    for scenario in [
        AdultScenario::Proportion(0.05),
        AdultScenario::FemaleFraction(0.3),
        AdultScenario::HoursCap(40.0),
        AdultScenario::DropColumns(vec!["nationality".into()]),
        AdultScenario::Balanced5050,
    ] {
        let ds = build_scenario(&train, &scenario, 0)?.dataset;
        println!(
            "{scenario:?}: {} rows ({} male, {} female), {} columns",
            ds.n_rows(),
            ds.group_count(0),
            ds.group_count(1),
            ds.n_cols()
        );
    }
    Ok(())
}
