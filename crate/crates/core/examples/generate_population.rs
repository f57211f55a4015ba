//! Draw a synthetic population, split it, and apply both sampling
//! interventions to the training half.
//!
//! cargo run --example generate_population

use xdaudit::dgp::{
    apply_covariate_shift, apply_proportion_filter, sample_population, split_train_test,
    summary_stats, write_csv, DataGenSpec, Objective, TabularDataset,
};

fn show(label: &str, ds: &TabularDataset) {
    for g in summary_stats(ds) {
        let l = g.moments("L").expect("L is continuous");
        println!(
            "{label:<22} group {}: n={:>5}  P(Y=1)={:.3}  mean L={:+.3}",
            g.group, g.count, g.p_y1, l.mean
        );
    }
}

fn main() -> xdaudit::Result<()> {
    let spec = DataGenSpec::new(Objective::CovariateShift, 7);
    let population = sample_population(&spec)?;
    let (train, test) = split_train_test(&population, 0.7, 7)?;
    show("train", &train);
    show("test", &test);

    let small = apply_proportion_filter(&train, 0.1, 7)?;
    show("train, 10% group 0", &small);

    let shifted = apply_covariate_shift(&train, 0.4)?;
    println!("covariate shift keeps group-0 rows with L >= {:.3}", shifted.threshold);
    show("train, 40% overlap", &shifted.dataset);

    let dir = std::env::temp_dir().join("xdaudit-example");
    std::fs::create_dir_all(&dir)?;
    write_csv(&shifted.dataset, &dir.join("train.csv"))?;
    println!("wrote {}", dir.join("train.csv").display());
    Ok(())
}
