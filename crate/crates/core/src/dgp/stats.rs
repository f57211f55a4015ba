use super::{ColumnKind, TabularDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMoments {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

/// Per-group moments, used to eyeball generated data.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: u8,
    pub count: usize,
    pub continuous: Vec<ColumnMoments>,
    pub p_y1: f64,
}

impl GroupSummary {
    pub fn moments(&self, name: &str) -> Option<&ColumnMoments> {
        self.continuous.iter().find(|m| m.name == name)
    }
}

/// Summaries for groups 0 and 1 (sample sd, `n - 1` denominator).
pub fn summary_stats(ds: &TabularDataset) -> Vec<GroupSummary> {
    [0u8, 1]
        .into_iter()
        .map(|g| {
            let rows = ds.group_indices(g);
            let n = rows.len();
            let continuous = ds
                .columns()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind == ColumnKind::Continuous)
                .map(|(j, c)| {
                    let col = ds.column_at(j).to_owned();
                    let mean = rows.iter().map(|&i| col[i]).sum::<f64>() / n.max(1) as f64;
                    let ss = rows.iter().map(|&i| (col[i] - mean).powi(2)).sum::<f64>();
                    let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
                    ColumnMoments {
                        name: c.name.clone(),
                        mean,
                        sd,
                    }
                })
                .collect();
            let pos = rows.iter().filter(|&&i| ds.y()[i] == 1).count();
            GroupSummary {
                group: g,
                count: n,
                continuous,
                p_y1: pos as f64 / n.max(1) as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{apply_covariate_shift, sample_population, split_train_test, DataGenSpec, Objective};

    #[test]
    fn balanced_population_moments() {
        let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, 4)).unwrap();
        let s = summary_stats(&ds);
        for g in &s {
            assert!((g.count as f64 - 10_000.0).abs() <= 400.0);
            let c = g.moments("C").unwrap();
            assert!((c.sd - 1.0).abs() <= 0.03, "sd(C) = {}", c.sd);
        }
    }

    #[test]
    fn covariate_shift_changes_training_outcome_rate() {
        let ds = sample_population(&DataGenSpec::new(Objective::CovariateShift, 8)).unwrap();
        let (train, test) = split_train_test(&ds, 0.7, 8).unwrap();
        let shifted = apply_covariate_shift(&train, 0.2).unwrap().dataset;
        let p_train = summary_stats(&shifted)[0].p_y1;
        let p_test = summary_stats(&test)[0].p_y1;
        assert!((p_train - p_test).abs() > 0.1, "{p_train} vs {p_test}");
    }
}
