//! End-to-end experiment sweeps.
//!
//! A plan names a data source (a synthetic objective or an Adult scenario),
//! a sweep grid, model variants and a trial count. Each (grid point, trial)
//! draws its data once; every variant is then trained, explained and scored
//! on it. Trial `t` uses seed `base_seed + t`, and every stage draws from its
//! own stream derived from that seed.

mod plan;
mod plot;
mod run;
mod summary;

pub use plan::{
    adult_plan, objective_defaults, parse_config, parse_list, AdultKind, ExperimentPlan,
    ModelVariant, Omitted, PlanSource,
};
pub use plot::render_plots;
pub use run::{
    dump_file_name, read_results, run_id, run_plan, select_instances, trial_seed, write_failures,
    write_results, FailureRecord, ResultRow, RunOutput,
};
pub use summary::{lookup, summarize, write_summary, SummaryRow};
