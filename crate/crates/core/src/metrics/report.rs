use std::path::Path;

use super::{bootstrap_ci, group_summary, max_fidelity_gap, mean_fidelity_gap, trial_ci};
use super::{FidelityRecord, QKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CiMethod {
    /// Student-t interval across per-trial statistics.
    #[default]
    TrialT,
    /// Percentile bootstrap over instances within each trial.
    Bootstrap { resamples: usize, seed: u64 },
}


/// A point value with its interval. The point is the mean of per-trial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatCi {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub q_kind: QKind,
    pub n_trials: usize,
    pub per_group_q: Vec<StatCi>,
    pub overall_q: StatCi,
    pub max_gap: StatCi,
    pub mean_gap: StatCi,
    /// Gaps computed after pooling the records of all trials.
    pub pooled_max_gap: f64,
    pub pooled_mean_gap: f64,
    /// Instance counts per group summed over trials.
    pub n_per_group: Vec<usize>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Aggregates per-trial fidelity records. With a single trial the t-interval
/// is undefined and both ends are NaN.
pub fn fidelity_report(
    trials: &[Vec<FidelityRecord>],
    q_kind: QKind,
    method: CiMethod,
    level: f64,
) -> Result<FidelityReport> {
    if trials.is_empty() {
        return Err(Error::UndefinedCi("no trials".into()));
    }
    let summaries = trials.iter().map(|t| group_summary(t)).collect::<Result<Vec<_>>>()?;
    let g = summaries[0].means.len();
    if let Some(bad) = summaries.iter().find(|s| s.means.len() != g) {
        return Err(Error::EmptyGroup { sizes: bad.sizes.clone() });
    }

    let max_vals = trials.iter().map(|t| max_fidelity_gap(t).map(|m| m.0)).collect::<Result<Vec<_>>>()?;
    let mean_vals = trials.iter().map(|t| mean_fidelity_gap(t)).collect::<Result<Vec<_>>>()?;
    let overall_vals: Vec<f64> = summaries.iter().map(|s| s.overall).collect();

    let interval = |vals: &[f64], stat: &dyn Fn(&[FidelityRecord]) -> Result<f64>| -> Result<StatCi> {
        let (ci_low, ci_high) = match method {
            CiMethod::TrialT if vals.len() < 2 => (f64::NAN, f64::NAN),
            CiMethod::TrialT => trial_ci(vals, level)?,
            CiMethod::Bootstrap { resamples, seed } => bootstrap_ci(trials, stat, resamples, level, seed)?,
        };
        Ok(StatCi {
            value: mean(vals),
            ci_low,
            ci_high,
        })
    };

    let mut per_group_q = Vec::with_capacity(g);
    for j in 0..g {
        let vals: Vec<f64> = summaries.iter().map(|s| s.means[j]).collect();
        per_group_q.push(interval(&vals, &|r| group_summary(r).map(|s| s.means[j]))?);
    }
    let overall_q = interval(&overall_vals, &|r| group_summary(r).map(|s| s.overall))?;
    let max_gap = interval(&max_vals, &|r| max_fidelity_gap(r).map(|m| m.0))?;
    let mean_gap = interval(&mean_vals, &mean_fidelity_gap)?;

    let pooled: Vec<FidelityRecord> = trials.iter().flatten().copied().collect();
    let pooled_summary = group_summary(&pooled)?;
    Ok(FidelityReport {
        q_kind,
        n_trials: trials.len(),
        per_group_q,
        overall_q,
        max_gap,
        mean_gap,
        pooled_max_gap: max_fidelity_gap(&pooled)?.0,
        pooled_mean_gap: mean_fidelity_gap(&pooled)?,
        n_per_group: pooled_summary.sizes,
    })
}

impl FidelityReport {
    /// Rows of `(metric, q_kind, group_or_all, value, ci_low, ci_high)`.
    pub fn rows(&self) -> Vec<(String, String, String, f64, f64, f64)> {
        let q = self.q_kind.to_string();
        let row = |metric: &str, who: String, s: &StatCi| {
            (metric.to_string(), q.clone(), who, s.value, s.ci_low, s.ci_high)
        };
        let mut out: Vec<_> = self
            .per_group_q
            .iter()
            .enumerate()
            .map(|(j, s)| row("Q", j.to_string(), s))
            .collect();
        out.push(row("Q", "all".into(), &self.overall_q));
        out.push(row("max_gap", "all".into(), &self.max_gap));
        out.push(row("mean_gap", "all".into(), &self.mean_gap));
        let nan = f64::NAN;
        out.push(("max_gap_pooled".into(), q.clone(), "all".into(), self.pooled_max_gap, nan, nan));
        out.push(("mean_gap_pooled".into(), q, "all".into(), self.pooled_mean_gap, nan, nan));
        out
    }
}

/// Writes one or more reports to a single CSV with a header row.
pub fn write_report_csv(reports: &[FidelityReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["metric", "q_kind", "group_or_all", "value", "ci_low", "ci_high"])?;
    for rep in reports {
        for (m, q, who, v, lo, hi) in rep.rows() {
            w.write_record([m, q, who, v.to_string(), lo.to_string(), hi.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
