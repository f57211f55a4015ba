use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;

use super::raw::{RawRecord, FIELDS};
use super::{canonical_field, AdultConfig};
use crate::dgp::{Column, Provenance, TabularDataset};
use crate::{Error, Result};

const CONTINUOUS: [&str; 5] = ["age", "education-num", "capital-gain", "capital-loss", "hours-per-week"];
const CATEGORICAL: [&str; 6] = [
    "workclass",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "native-country",
];
/// Never encoded: survey weight and the string twin of `education-num`.
const DROPPED: [&str; 2] = ["fnlwgt", "education"];
const SEX: &str = "sex";
const FEMALE: &str = "Female";
const MALE: &str = "Male";

/// One categorical field expanded into indicator columns `field=category`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotBlock {
    pub field: String,
    pub categories: Vec<String>,
}

impl OneHotBlock {
    pub fn slot_names(&self) -> Vec<String> {
        self.categories.iter().map(|c| format!("{}={c}", self.field)).collect()
    }
}

/// Per-column `(mean, sd)` for standardized continuous columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousScaler {
    pub columns: Vec<(String, f64, f64)>,
}

impl ContinuousScaler {
    /// Population moments over `ds`; constant columns get sd 1.
    pub fn fit(ds: &TabularDataset, names: &[String]) -> Result<Self> {
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let col = ds.column(name)?;
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            columns.push((name.clone(), mean, sd));
        }
        Ok(ContinuousScaler { columns })
    }

    pub fn apply(&self, ds: &TabularDataset) -> Result<TabularDataset> {
        let mut x = ds.x().to_owned();
        for (name, mean, sd) in &self.columns {
            let j = ds
                .column_index(name)
                .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))?;
            x.column_mut(j).mapv_inplace(|v| (v - mean) / sd);
        }
        TabularDataset::new(
            ds.columns().to_vec(),
            x,
            ds.y().to_vec(),
            ds.sensitive().to_vec(),
            ds.provenance().clone(),
        )
    }

    fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.columns.iter().find(|c| c.0 == name).map(|c| (c.1, c.2))
    }
}

/// Encoded records with the map needed to decode them.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub dataset: TabularDataset,
    pub blocks: Vec<OneHotBlock>,
    /// Continuous columns present in the dataset.
    pub continuous: Vec<String>,
    /// Whether a binary `sex` column (1 = Female) is present.
    pub has_sex_column: bool,
    pub scaler: Option<ContinuousScaler>,
}

/// Category vocabulary for every encoded categorical field, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct AdultEncoder {
    excluded: BTreeSet<String>,
    vocab: Vec<OneHotBlock>,
}

impl AdultEncoder {
    pub fn fit(records: &[RawRecord], cfg: &AdultConfig) -> Result<Self> {
        let excluded: BTreeSet<String> = cfg
            .excluded_columns
            .iter()
            .map(|c| canonical_field(c).to_string())
            .collect();
        for c in &excluded {
            if !FIELDS[..14].contains(&c.as_str()) {
                return Err(Error::config("excluded_columns", format!("unknown field `{c}`")));
            }
        }
        let vocab = CATEGORICAL
            .iter()
            .filter(|f| !excluded.contains(**f))
            .map(|&field| {
                let cats: BTreeSet<&str> = records.iter().filter_map(|r| r.field(field)).collect();
                OneHotBlock {
                    field: field.to_string(),
                    categories: cats.into_iter().map(String::from).collect(),
                }
            })
            .collect();
        Ok(AdultEncoder { excluded, vocab })
    }

    pub fn blocks(&self) -> &[OneHotBlock] {
        &self.vocab
    }

    /// Encode in raw field order. Categories absent from the fitted
    /// vocabulary are a schema error.
    pub fn encode(&self, records: &[RawRecord]) -> Result<EncodedDataset> {
        let keep_sex = !self.excluded.contains(SEX);
        let mut columns = Vec::new();
        let mut continuous = Vec::new();
        for &field in &FIELDS[..14] {
            if self.excluded.contains(field) || DROPPED.contains(&field) {
                continue;
            }
            if CONTINUOUS.contains(&field) {
                columns.push(Column::continuous(field));
                continuous.push(field.to_string());
            } else if field == SEX {
                columns.push(Column::binary(SEX));
            } else {
                let block = self.vocab.iter().find(|b| b.field == field).expect("fitted");
                columns.extend(block.slot_names().into_iter().map(Column::binary));
            }
        }
        let mut x = Array2::zeros((records.len(), columns.len()));
        let mut y = Vec::with_capacity(records.len());
        let mut sensitive = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let sex = r.field(SEX).unwrap_or_default();
            let s = match sex {
                FEMALE => 1,
                MALE => 0,
                other => return Err(Error::Schema(format!("record {i}: unknown sex `{other}`"))),
            };
            sensitive.push(s);
            y.push(r.income);
            let mut j = 0;
            for &field in &FIELDS[..14] {
                if self.excluded.contains(field) || DROPPED.contains(&field) {
                    continue;
                }
                let value = r.field(field).expect("14 fields");
                if CONTINUOUS.contains(&field) {
                    x[[i, j]] = value.parse::<f64>().map_err(|_| {
                        Error::Schema(format!("record {i}: `{field}` is not numeric: `{value}`"))
                    })?;
                    j += 1;
                } else if field == SEX {
                    x[[i, j]] = f64::from(s);
                    j += 1;
                } else {
                    let block = self.vocab.iter().find(|b| b.field == field).expect("fitted");
                    let k = block.categories.iter().position(|c| c == value).ok_or_else(|| {
                        Error::Schema(format!("record {i}: unknown `{field}` category `{value}`"))
                    })?;
                    x[[i, j + k]] = 1.0;
                    j += block.categories.len();
                }
            }
        }
        let dataset = TabularDataset::new(
            columns,
            x,
            y,
            sensitive,
            Provenance::Source("UCI Adult".into()),
        )?;
        Ok(EncodedDataset {
            dataset,
            blocks: self.vocab.clone(),
            continuous,
            has_sex_column: keep_sex,
            scaler: None,
        })
    }
}

/// Drop missing-valued records if configured, fit the vocabulary and encode.
/// Continuous columns stay on their raw scale; see [`EncodedDataset::standardized`].
pub fn preprocess(records: &[RawRecord], cfg: &AdultConfig) -> Result<EncodedDataset> {
    let kept: Vec<RawRecord> = if cfg.drop_missing {
        records.iter().filter(|r| !r.has_missing()).cloned().collect()
    } else {
        records.to_vec()
    };
    AdultEncoder::fit(&kept, cfg)?.encode(&kept)
}

impl EncodedDataset {
    /// Indicator column names of every block, for grouped perturbation.
    pub fn one_hot_blocks(&self) -> Vec<Vec<String>> {
        self.blocks.iter().map(OneHotBlock::slot_names).collect()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.dataset.column_names().into_iter().map(String::from).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> EncodedDataset {
        EncodedDataset {
            dataset: self.dataset.select_rows(rows),
            ..self.clone()
        }
    }

    /// Replace the dataset, e.g. after a row restriction. Columns must match.
    pub fn with_dataset(&self, dataset: TabularDataset) -> Result<EncodedDataset> {
        if dataset.columns() != self.dataset.columns() {
            return Err(Error::Schema("replacement dataset has different columns".into()));
        }
        Ok(EncodedDataset {
            dataset,
            ..self.clone()
        })
    }

    /// Standardize continuous columns with population moments of `fit_rows`,
    /// applied to every row.
    pub fn standardized(&self, fit_rows: &[usize]) -> Result<EncodedDataset> {
        let raw = self.unstandardized()?;
        let scaler = ContinuousScaler::fit(&raw.dataset.select_rows(fit_rows), &self.continuous)?;
        Ok(EncodedDataset {
            dataset: scaler.apply(&raw.dataset)?,
            scaler: Some(scaler),
            ..self.clone()
        })
    }

    /// Continuous values back on the raw scale.
    pub fn unstandardized(&self) -> Result<EncodedDataset> {
        let Some(scaler) = &self.scaler else {
            return Ok(self.clone());
        };
        let inverse = ContinuousScaler {
            columns: scaler.columns.iter().map(|(n, m, s)| (n.clone(), -m / s, 1.0 / s)).collect(),
        };
        Ok(EncodedDataset {
            dataset: inverse.apply(&self.dataset)?,
            scaler: None,
            ..self.clone()
        })
    }

    /// Raw-scale values of a continuous column.
    pub fn raw_continuous(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.dataset.column(name)?;
        let (m, s) = self.scaler.as_ref().and_then(|sc| sc.get(name)).unwrap_or((0.0, 1.0));
        Ok(col.iter().map(|v| v * s + m).collect())
    }

    /// Drop whole raw fields (one-hot blocks, `sex`, or continuous columns).
    pub fn drop_fields(&self, fields: &[&str]) -> Result<EncodedDataset> {
        let fields: Vec<&str> = fields.iter().map(|f| canonical_field(f)).collect();
        for f in &fields {
            if !FIELDS[..14].contains(f) {
                return Err(Error::config("drop", format!("unknown field `{f}`")));
            }
        }
        let blocks: Vec<OneHotBlock> =
            self.blocks.iter().filter(|b| !fields.contains(&b.field.as_str())).cloned().collect();
        let continuous: Vec<String> =
            self.continuous.iter().filter(|c| !fields.contains(&c.as_str())).cloned().collect();
        let dropped_slots: BTreeSet<String> = self
            .blocks
            .iter()
            .filter(|b| fields.contains(&b.field.as_str()))
            .flat_map(OneHotBlock::slot_names)
            .collect();
        let keep: Vec<&str> = self
            .dataset
            .column_names()
            .into_iter()
            .filter(|c| !dropped_slots.contains(*c) && !fields.contains(c))
            .collect();
        let scaler = self.scaler.as_ref().map(|s| ContinuousScaler {
            columns: s.columns.iter().filter(|c| continuous.contains(&c.0)).cloned().collect(),
        });
        Ok(EncodedDataset {
            dataset: self.dataset.select_columns(&keep)?,
            blocks,
            continuous,
            has_sex_column: self.has_sex_column && !fields.contains(&SEX),
            scaler,
        })
    }

    /// Raw values of the retained fields of row `i`.
    pub fn decode_row(&self, i: usize) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for name in &self.continuous {
            let raw = self.raw_continuous_at(name, i)?;
            out.insert(name.clone(), format_number(raw));
        }
        if self.has_sex_column {
            let v = self.dataset.column(SEX)?[i];
            out.insert(SEX.to_string(), if v == 1.0 { FEMALE } else { MALE }.to_string());
        }
        for block in &self.blocks {
            let slots = block.slot_names();
            let mut hit = None;
            for (k, s) in slots.iter().enumerate() {
                if self.dataset.column(s)?[i] == 1.0 {
                    if hit.is_some() {
                        return Err(Error::Schema(format!("row {i}: `{}` has several hot slots", block.field)));
                    }
                    hit = Some(k);
                }
            }
            let k = hit.ok_or_else(|| Error::Schema(format!("row {i}: `{}` has no hot slot", block.field)))?;
            out.insert(block.field.clone(), block.categories[k].clone());
        }
        Ok(out)
    }

    fn raw_continuous_at(&self, name: &str, i: usize) -> Result<f64> {
        let v = self.dataset.column(name)?[i];
        let (m, s) = self.scaler.as_ref().and_then(|sc| sc.get(name)).unwrap_or((0.0, 1.0));
        Ok(v * s + m)
    }

    pub fn n_cols_of(&self, field: &str) -> usize {
        let field = canonical_field(field);
        self.blocks
            .iter()
            .find(|b| b.field == field)
            .map(|b| b.categories.len())
            .unwrap_or_else(|| usize::from(self.dataset.column_index(field).is_some()))
    }
}

fn format_number(v: f64) -> String {
    let r = v.round();
    if (v - r).abs() < 1e-6 {
        format!("{r}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adult::raw::fixtures;
    use crate::adult::load_raw;

    fn records() -> Vec<RawRecord> {
        let dir = tempfile::tempdir().unwrap();
        fixtures::write(dir.path(), fixtures::TRAIN, fixtures::TEST);
        load_raw(&AdultConfig::new(dir.path())).unwrap().records
    }

    fn cfg() -> AdultConfig {
        AdultConfig::new("/nonexistent")
    }

    #[test]
    fn drops_missing_and_unused_fields() {
        let enc = preprocess(&records(), &cfg()).unwrap();
        assert_eq!(enc.dataset.n_rows(), 14);
        let names = enc.feature_names();
        assert!(!names.iter().any(|n| n == "fnlwgt" || n == "education"));
        assert!(names.iter().any(|n| n == "education-num"));
        assert!(names.iter().any(|n| n == "native-country=Cuba"));
        assert_eq!(enc.dataset.column("sex").unwrap().sum(), 5.0);
        assert_eq!(enc.dataset.sensitive().iter().filter(|&&s| s == 1).count(), 5);
    }

    #[test]
    fn one_hot_blocks_sum_to_one() {
        let enc = preprocess(&records(), &cfg()).unwrap();
        for block in enc.one_hot_blocks() {
            for i in 0..enc.dataset.n_rows() {
                let s: f64 = block.iter().map(|c| enc.dataset.column(c).unwrap()[i]).sum();
                assert_eq!(s, 1.0);
            }
        }
    }

    #[test]
    fn decode_round_trips_raw_values() {
        let recs = records();
        let clean: Vec<&RawRecord> = recs.iter().filter(|r| !r.has_missing()).collect();
        let enc = preprocess(&recs, &cfg()).unwrap();
        let train: Vec<usize> = (0..10).collect();
        let std = enc.standardized(&train).unwrap();
        for (i, r) in clean.iter().enumerate() {
            let decoded = std.decode_row(i).unwrap();
            assert_eq!(decoded.len(), 12);
            for (field, value) in &decoded {
                assert_eq!(r.field(field).unwrap(), value, "row {i} field {field}");
            }
        }
    }

    #[test]
    fn standardized_on_training_rows() {
        let enc = preprocess(&records(), &cfg()).unwrap();
        let train: Vec<usize> = (0..10).collect();
        let std = enc.standardized(&train).unwrap();
        let age = std.dataset.select_rows(&train).column("age").unwrap().to_owned();
        let mean = age.sum() / 10.0;
        let sd = (age.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 10.0).sqrt();
        assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
        // Standardizing twice refits from the raw scale.
        let again = std.standardized(&train).unwrap();
        assert!((&again.dataset.x() - &std.dataset.x()).iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn exclusion_removes_sex_dependence() {
        let mut c = cfg();
        c.excluded_columns.insert("gender".into());
        let enc = preprocess(&records(), &c).unwrap();
        assert!(enc.dataset.column_index("sex").is_none());
        // Flip test: changing only the sex field leaves the encoding unchanged.
        let recs: Vec<RawRecord> = records().into_iter().filter(|r| !r.has_missing()).collect();
        let flipped: Vec<RawRecord> = recs
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.fields[9] = if r.fields[9] == "Male" { "Female".into() } else { "Male".into() };
                r
            })
            .collect();
        let encoder = AdultEncoder::fit(&recs, &c).unwrap();
        let a = encoder.encode(&recs).unwrap();
        let b = encoder.encode(&flipped).unwrap();
        assert_eq!(a.dataset.x(), b.dataset.x());
        assert_ne!(a.dataset.sensitive(), b.dataset.sensitive());
    }

    #[test]
    fn unknown_category_is_schema_error() {
        let recs: Vec<RawRecord> = records().into_iter().filter(|r| !r.has_missing()).collect();
        let encoder = AdultEncoder::fit(&recs[..4], &cfg()).unwrap();
        assert!(matches!(encoder.encode(&recs), Err(Error::Schema(_))));
    }
}
