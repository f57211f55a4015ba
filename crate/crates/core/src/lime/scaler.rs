use std::collections::BTreeMap;

use ndarray::ArrayView1;

use super::ExplainerConfig;
use crate::dgp::{ColumnKind, TabularDataset};
use crate::{Error, Result};

/// Columns that are resampled jointly: a single binary/categorical column or a
/// one-hot block. `patterns` are the distinct training rows over `slots`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalGroup {
    pub slots: Vec<usize>,
    pub patterns: Vec<Vec<f64>>,
    pub frequencies: Vec<f64>,
}

impl CategoricalGroup {
    /// Index of the pattern drawn by a uniform `u ∈ [0, 1)`.
    pub(crate) fn draw(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, f) in self.frequencies.iter().enumerate() {
            acc += f;
            if u < acc {
                return k;
            }
        }
        self.frequencies.len() - 1
    }
}

/// Training statistics the explainer perturbs and measures distance with.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub feature_names: Vec<String>,
    /// `(mean, sd)` for continuous slots, `None` for categorical ones.
    pub continuous: Vec<Option<(f64, f64)>>,
    pub groups: Vec<CategoricalGroup>,
}

impl FeatureScaler {
    /// Fit on the training rows for `features`.
    ///
    /// `one_hot_blocks` lists column sets that encode one categorical variable;
    /// every other binary column (or column named in
    /// `cfg.categorical_columns`) forms its own categorical group.
    pub fn fit(
        train: &TabularDataset,
        features: &[String],
        one_hot_blocks: &[Vec<String>],
        cfg: &ExplainerConfig,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Sampling("cannot fit explainer statistics on no rows".into()));
        }
        let slot_of = |name: &str| features.iter().position(|f| f == name);
        let col_of = |name: &str| {
            train
                .column_index(name)
                .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))
        };
        let mut continuous = vec![None; features.len()];
        let mut grouped = vec![false; features.len()];
        let mut group_slots: Vec<Vec<usize>> = Vec::new();

        for block in one_hot_blocks {
            let slots: Vec<usize> = block.iter().filter_map(|n| slot_of(n)).collect();
            if slots.is_empty() {
                continue;
            }
            if slots.len() != block.len() {
                return Err(Error::Schema(format!(
                    "one-hot block {block:?} is only partly among the model features"
                )));
            }
            slots.iter().for_each(|&s| grouped[s] = true);
            group_slots.push(slots);
        }
        for (slot, name) in features.iter().enumerate() {
            if grouped[slot] {
                continue;
            }
            let j = col_of(name)?;
            let categorical = train.columns()[j].kind == ColumnKind::Binary
                || cfg.categorical_columns.contains(name);
            if categorical {
                group_slots.push(vec![slot]);
            } else {
                let col = train.column_at(j);
                continuous[slot] = Some(mean_sd(col));
            }
        }

        let cols: Vec<usize> = features.iter().map(|n| col_of(n)).collect::<Result<_>>()?;
        let n = train.n_rows() as f64;
        let groups = group_slots
            .into_iter()
            .map(|slots| {
                let mut counts: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
                for i in 0..train.n_rows() {
                    let row = train.row(i);
                    let key = slots.iter().map(|&s| row[cols[s]].to_bits()).collect();
                    *counts.entry(key).or_default() += 1;
                }
                let (patterns, frequencies) = counts
                    .into_iter()
                    .map(|(k, c)| {
                        (
                            k.into_iter().map(f64::from_bits).collect::<Vec<_>>(),
                            c as f64 / n,
                        )
                    })
                    .unzip();
                CategoricalGroup {
                    slots,
                    patterns,
                    frequencies,
                }
            })
            .collect();
        Ok(FeatureScaler {
            feature_names: features.to_vec(),
            continuous,
            groups,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Surrogate design value of slot `j`: standardized for continuous slots,
    /// raw for categorical ones.
    pub(crate) fn design_value(&self, j: usize, v: f64) -> f64 {
        match self.continuous[j] {
            Some((m, sd)) if sd > 0.0 => (v - m) / sd,
            Some(_) => 0.0,
            None => v,
        }
    }
}

fn mean_sd(col: ArrayView1<'_, f64>) -> (f64, f64) {
    let n = col.len() as f64;
    let m = col.sum() / n;
    let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    (m, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{sample_population, DataGenSpec, Objective};

    #[test]
    fn binary_columns_become_groups_with_frequencies() {
        let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, 1).with_n(1000)).unwrap();
        let f: Vec<String> = ["A", "C", "L"].iter().map(|s| s.to_string()).collect();
        let s = FeatureScaler::fit(&ds, &f, &[], &ExplainerConfig::default()).unwrap();
        assert!(s.continuous[0].is_none());
        assert!(s.continuous[1].is_some());
        assert_eq!(s.groups.len(), 1);
        let g = &s.groups[0];
        assert_eq!(g.patterns, vec![vec![0.0], vec![1.0]]);
        assert!((g.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.continuous.iter().flatten().all(|(_, sd)| *sd >= 0.0));
    }
}
