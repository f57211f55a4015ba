//! Build an experiment plan from key=value text, the same format the
//! `xdaudit` binary accepts through `--config`.
//!
//! cargo run --example plan_from_config

use xdaudit::dgp::Objective;
use xdaudit::harness::{objective_defaults, parse_config};

const CONFIG: &str = "
# three overlaps, two trials, linear models only
grid = 0.2, 0.6, 1.0
trials = 2
seed = 42
variants = LR_A, LR_noA
cap = all
kernel_width = 1.5
ci = bootstrap
";

fn main() -> xdaudit::Result<()> {
    let mut plan = objective_defaults(Objective::CovariateShift);
    plan.apply_overrides(&parse_config(CONFIG)?)?;
    println!("source     {:?}", plan.source);
    println!("grid       {:?}", plan.grid);
    println!("variants   {:?}", plan.variants);
    println!("trials     {} (seeds {}..{})", plan.trials, plan.base_seed, plan.base_seed + plan.trials as u64);
    println!("cap        {:?}", plan.max_explained_per_group);
    println!("kernel     {:?}", plan.lime.kernel_width);
    println!("ci         {:?}", plan.ci);
    println!("cells      {}", plan.n_cells());
    Ok(())
}
