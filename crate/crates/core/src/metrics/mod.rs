//! Fidelity-gap metrics over per-instance fidelity records.
//!
//! With group means `Q_p` and the pooled mean `Q̄` over all `N` records:
//!
//! - Maximum Fidelity Gap `Δ_Q = max_j (Q̄ − Q_j)`
//! - Mean Fidelity Gap `Δ_Q^group = 2 / (G(G−1)) · Σ_{p<j} |Q_p − Q_j|`

mod ci;
mod gaps;
pub mod oracle;
mod report;

pub use ci::{bootstrap_ci, trial_ci};
pub use gaps::{
    fidelity_from_explanations, group_summary, max_fidelity_gap, mean_fidelity_gap,
    FidelityRecord, GroupSummary, QKind,
};
pub use report::{fidelity_report, write_report_csv, CiMethod, FidelityReport, StatCi};
