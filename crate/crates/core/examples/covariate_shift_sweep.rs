//! A reduced objective-2 sweep through the harness: run, summarize, and
//! render SVG trend charts into a temporary directory.
//!
//! cargo run --release --example covariate_shift_sweep

use xdaudit::dgp::Objective;
use xdaudit::harness::{
    objective_defaults, render_plots, run_plan, summarize, write_results, write_summary,
};

fn main() -> xdaudit::Result<()> {
    let mut plan = objective_defaults(Objective::CovariateShift);
    plan.n = 4000;
    plan.trials = 2;
    plan.grid = vec![0.2, 0.6, 1.0];
    plan.max_explained_per_group = Some(200);
    println!("{} cells", plan.n_cells());

    let out = run_plan(&plan)?;
    for f in &out.failures {
        eprintln!("failed {} trial {:?} at {}: {}", f.run_id, f.trial, f.stage, f.message);
    }
    let summary = summarize(&out.rows, plan.ci_level)?;
    for s in summary.iter().filter(|s| s.metric == "mean_gap" && s.q_kind == "accuracy") {
        println!(
            "{:<8} overlap {:.1}: {:>6.2}% ({:.2}, {:.2})",
            s.model_variant,
            s.sweep_value,
            100.0 * s.mean,
            100.0 * s.ci_low,
            100.0 * s.ci_high
        );
    }

    let dir = std::env::temp_dir().join("xdaudit-sweep");
    std::fs::create_dir_all(&dir)?;
    write_results(&out.rows, &dir.join("results.csv"))?;
    write_summary(&summary, &dir.join("summary.csv"))?;
    for p in render_plots(&summary, &dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
