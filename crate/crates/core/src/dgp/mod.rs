//! Synthetic populations and sampling interventions.
//!
//! All four objectives share the same skeleton: `A ~ Bernoulli(0.5)`,
//! `C ~ N(0, 1)`, `L = N(0, σ_L) + a·A + c·C`, and a binary outcome drawn with
//! probability `step(i)` where `i` is an objective-specific linear index.

mod dataset;
mod intervene;
mod io;
mod sample;
mod spec;
mod stats;

pub use dataset::{Column, ColumnKind, Provenance, TabularDataset};
pub use intervene::{
    apply_covariate_shift, apply_proportion_filter, empirical_quantile, restrict_group_share,
    split_indices, split_train_test, subsample_group, CovariateShift,
};
pub use io::{meta_path, read_csv, write_csv};
pub use sample::{sample_population, step_outcome_prob};
pub use spec::{DataGenSpec, Objective};
pub use stats::{summary_stats, ColumnMoments, GroupSummary};

/// Group code of the disadvantaged group.
pub const DISADVANTAGED: u8 = 0;
/// Group code of the advantaged group.
pub const ADVANTAGED: u8 = 1;
