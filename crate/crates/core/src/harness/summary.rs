use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::ResultRow;
use crate::metrics::trial_ci;
use crate::Result;

/// Mean over trials of one metric, with a t-interval when ≥ 2 trials exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub objective: String,
    pub model_variant: String,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub q_kind: String,
    pub metric: String,
    pub group_or_all: String,
    pub n_trials: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

type Key = (String, String, String, u64, String, String, String);

fn key(r: &ResultRow) -> Key {
    (
        r.objective.clone(),
        r.model_variant.clone(),
        r.sweep_param.clone(),
        r.sweep_value.to_bits(),
        r.q_kind.clone(),
        r.metric.clone(),
        r.group_or_all.clone(),
    )
}

/// Groups keep the order in which they first appear in `rows`.
pub fn summarize(rows: &[ResultRow], level: f64) -> Result<Vec<SummaryRow>> {
    let mut order: Vec<Key> = Vec::new();
    let mut values: std::collections::HashMap<Key, (usize, Vec<f64>)> = Default::default();
    for r in rows {
        let k = key(r);
        let entry = values.entry(k.clone()).or_insert_with(|| {
            order.push(k);
            (order.len() - 1, Vec::new())
        });
        entry.1.push(r.value);
    }
    let mut out = Vec::with_capacity(order.len());
    for k in order {
        let vals = &values[&k].1;
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let (ci_low, ci_high) = if vals.len() >= 2 {
            trial_ci(vals, level)?
        } else {
            (f64::NAN, f64::NAN)
        };
        let (objective, model_variant, sweep_param, bits, q_kind, metric, group_or_all) = k;
        out.push(SummaryRow {
            objective,
            model_variant,
            sweep_param,
            sweep_value: f64::from_bits(bits),
            q_kind,
            metric,
            group_or_all,
            n_trials: vals.len(),
            mean,
            ci_low,
            ci_high,
        });
    }
    Ok(out)
}

/// First summary row matching the selectors.
pub fn lookup<'a>(
    summary: &'a [SummaryRow],
    variant: &str,
    sweep_value: f64,
    q_kind: &str,
    metric: &str,
) -> Option<&'a SummaryRow> {
    summary.iter().find(|s| {
        s.model_variant == variant
            && (s.sweep_value - sweep_value).abs() < 1e-9
            && s.q_kind == q_kind
            && s.metric == metric
            && s.group_or_all == "all"
    })
}

pub fn write_summary(summary: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in summary {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: &str, value: f64, trial: usize, metric: &str, v: f64) -> ResultRow {
        ResultRow {
            run_id: format!("x:{variant}:{value}"),
            objective: "x".into(),
            model_variant: variant.into(),
            sweep_param: "p".into(),
            sweep_value: value,
            trial,
            seed: trial as u64,
            q_kind: "accuracy".into(),
            metric: metric.into(),
            group_or_all: "all".into(),
            value: v,
        }
    }

    #[test]
    fn identical_trials_zero_width() {
        let rows: Vec<_> = (0..5).map(|t| row("LR_A", 0.1, t, "mean_gap", 0.02)).collect();
        let s = summarize(&rows, 0.95).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].ci_low, s[0].ci_high), (0.02, 0.02));
        assert_eq!(s[0].n_trials, 5);
    }

    #[test]
    fn row_count_is_grid_by_variant_by_metric() {
        let mut rows = Vec::new();
        for v in ["LR_A", "MLP_A", "LR_noA"] {
            for g in [0.1, 0.2] {
                for m in ["max_gap", "mean_gap"] {
                    for t in 0..3 {
                        rows.push(row(v, g, t, m, t as f64));
                    }
                }
            }
        }
        let s = summarize(&rows, 0.95).unwrap();
        assert_eq!(s.len(), 3 * 2 * 2);
        assert_eq!(lookup(&s, "MLP_A", 0.2, "accuracy", "max_gap").unwrap().mean, 1.0);
    }

    #[test]
    fn mean_of_trials_equals_pooled_with_equal_group_sizes() {
        use crate::metrics::{mean_fidelity_gap, FidelityRecord};
        // Three trials, each with 4 records per group.
        let trials: Vec<Vec<FidelityRecord>> = (0..3)
            .map(|t| {
                (0..8)
                    .map(|i| FidelityRecord {
                        instance_id: i,
                        group: i % 2,
                        q_value: if i % 2 == 0 { 0.25 * ((i / 2 + t) % 4) as f64 } else { 1.0 },
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<_> = trials
            .iter()
            .enumerate()
            .map(|(t, r)| row("MLP_A", 0.5, t, "mean_gap", mean_fidelity_gap(r).unwrap()))
            .collect();
        let s = summarize(&rows, 0.95).unwrap();
        let pooled: Vec<FidelityRecord> = trials.concat();
        // Group 1 is constant, so |mean(q0) - 1| averages linearly across trials.
        assert!((s[0].mean - mean_fidelity_gap(&pooled).unwrap()).abs() < 1e-12);
    }
}
