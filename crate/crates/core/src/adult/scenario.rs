use super::EncodedDataset;
use crate::dgp::{restrict_group_share, subsample_group, ADVANTAGED, DISADVANTAGED};
use crate::{Error, Result};

/// Training-set restrictions. Apply them to the training split only.
#[derive(Debug, Clone, PartialEq)]
pub enum AdultScenario {
    /// Males make up this share of the training rows.
    Proportion(f64),
    /// Keep this fraction of the female training rows; males untouched.
    FemaleFraction(f64),
    /// Remove male rows with `hours-per-week ≥ h`.
    HoursCap(f64),
    /// Remove whole fields, e.g. `sex` and/or `native-country`.
    DropColumns(Vec<String>),
    /// Equal male and female counts.
    Balanced5050,
}

pub fn build_scenario(train: &EncodedDataset, scenario: &AdultScenario, seed: u64) -> Result<EncodedDataset> {
    let ds = &train.dataset;
    match scenario {
        AdultScenario::Proportion(p) => {
            let n_male = ds.group_count(DISADVANTAGED);
            let n_female = ds.group_count(ADVANTAGED);
            let out = restrict_group_share(ds, DISADVANTAGED, *p, seed).map_err(|e| {
                Error::Sampling(format!(
                    "{e}; with {n_male} male and {n_female} female rows the achievable male share lies in [{:.4}, {:.4}]",
                    1.0 / (n_female as f64 + 1.0),
                    n_male as f64 / (n_male as f64 + 1.0),
                ))
            })?;
            train.with_dataset(out)
        }
        AdultScenario::FemaleFraction(f) => train.with_dataset(subsample_group(ds, ADVANTAGED, *f, seed)?),
        AdultScenario::HoursCap(h) => {
            let hours = train.raw_continuous("hours-per-week")?;
            let keep: Vec<usize> = (0..ds.n_rows())
                .filter(|&i| ds.sensitive()[i] != DISADVANTAGED || hours[i] < *h)
                .collect();
            if keep.iter().all(|&i| ds.sensitive()[i] != DISADVANTAGED) {
                return Err(Error::Sampling(format!("hours cap {h} removes every male row")));
            }
            Ok(train.select_rows(&keep))
        }
        AdultScenario::DropColumns(fields) => {
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            train.drop_fields(&refs)
        }
        AdultScenario::Balanced5050 => train.with_dataset(restrict_group_share(ds, DISADVANTAGED, 0.5, seed)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adult::raw::fixtures;
    use crate::adult::{load_raw, preprocess, AdultConfig};

    fn encoded() -> EncodedDataset {
        let dir = tempfile::tempdir().unwrap();
        fixtures::write(dir.path(), fixtures::TRAIN, fixtures::TEST);
        let cfg = AdultConfig::new(dir.path());
        preprocess(&load_raw(&cfg).unwrap().records, &cfg).unwrap()
    }

    #[test]
    fn hours_cap_removes_long_hours_males() {
        let enc = encoded();
        let all: Vec<usize> = (0..enc.dataset.n_rows()).collect();
        let enc = enc.standardized(&all).unwrap();
        let out = build_scenario(&enc, &AdultScenario::HoursCap(20.0), 0).unwrap();
        let hours = out.raw_continuous("hours-per-week").unwrap();
        for (i, h) in hours.iter().enumerate() {
            assert!(out.dataset.sensitive()[i] != DISADVANTAGED || *h < 20.0);
        }
        assert_eq!(out.dataset.group_count(DISADVANTAGED), 1);
        assert_eq!(out.dataset.group_count(ADVANTAGED), enc.dataset.group_count(ADVANTAGED));
    }

    #[test]
    fn hours_cap_can_empty_the_group() {
        let enc = encoded();
        assert!(build_scenario(&enc, &AdultScenario::HoursCap(1.0), 0).is_err());
    }

    #[test]
    fn balanced_counts_within_one() {
        let out = build_scenario(&encoded(), &AdultScenario::Balanced5050, 4).unwrap();
        let (m, f) = (out.dataset.group_count(0), out.dataset.group_count(1));
        assert!(m.abs_diff(f) <= 1, "{m} vs {f}");
    }

    #[test]
    fn dropping_nationality_shrinks_by_block_width() {
        let enc = encoded();
        let width = enc.n_cols_of("native-country");
        assert_eq!(width, 3);
        let out = build_scenario(&enc, &AdultScenario::DropColumns(vec!["nationality".into()]), 0).unwrap();
        assert_eq!(out.dataset.n_cols(), enc.dataset.n_cols() - width);
        assert!(out.blocks.iter().all(|b| b.field != "native-country"));
    }

    #[test]
    fn proportion_sets_male_share() {
        let enc = encoded();
        let out = build_scenario(&enc, &AdultScenario::Proportion(0.25), 1).unwrap();
        let share = out.dataset.group_count(0) as f64 / out.dataset.n_rows() as f64;
        assert!((share - 0.25).abs() < 0.1, "{share}");
        assert!(build_scenario(&enc, &AdultScenario::Proportion(1.5), 1).is_err());
    }

    #[test]
    fn female_fraction_keeps_males() {
        let enc = encoded();
        let out = build_scenario(&enc, &AdultScenario::FemaleFraction(0.5), 1).unwrap();
        assert_eq!(out.dataset.group_count(0), enc.dataset.group_count(0));
        // round(0.5 · 5) = 3
        assert_eq!(out.dataset.group_count(1), 3);
    }
}
