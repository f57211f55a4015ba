//! UCI Adult census data: loading, encoding, training-set restrictions and
//! the sex × hours interaction test.
//!
//! Group coding follows the rest of the crate: `sex = Male` is group 0
//! (disadvantaged), `Female` is group 1. `hours-per-week` plays the role of
//! `L` and the `native-country` block plays `C`.

mod encode;
mod logit;
mod raw;
mod scenario;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

pub use encode::{preprocess, AdultEncoder, ContinuousScaler, EncodedDataset, OneHotBlock};
pub use logit::{concept_shift_test, interaction_logit_test, InteractionTest};
pub use raw::{load_raw, RawAdult, RawRecord, EXPECTED_ROWS, FIELDS};
pub use scenario::{build_scenario, AdultScenario};

/// Environment variable that overrides [`AdultConfig::data_dir`].
pub const DATA_DIR_ENV: &str = "ADULT_DATA_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct AdultConfig {
    pub data_dir: PathBuf,
    /// Drop records holding the missing marker `?`.
    pub drop_missing: bool,
    /// Raw field names left out of the encoding. `gender` and `nationality`
    /// are accepted as aliases for `sex` and `native-country`.
    pub excluded_columns: BTreeSet<String>,
}

impl AdultConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        AdultConfig {
            data_dir: data_dir.into(),
            drop_missing: true,
            excluded_columns: BTreeSet::new(),
        }
    }

    /// `ADULT_DATA_DIR` if set, otherwise `fallback`.
    pub fn from_env_or(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => AdultConfig::new(dir),
            None => AdultConfig::new(fallback),
        }
    }

    pub fn train_path(&self) -> PathBuf {
        self.data_dir.join("adult.data")
    }

    pub fn test_path(&self) -> PathBuf {
        self.data_dir.join("adult.test")
    }

    pub fn files_present(&self) -> bool {
        self.train_path().is_file() && self.test_path().is_file()
    }
}

/// Canonical raw field name for a user-facing alias.
pub fn canonical_field(name: &str) -> &str {
    match name {
        "gender" => "sex",
        "nationality" => "native-country",
        other => other,
    }
}

pub(crate) fn require_file(path: &Path) -> crate::Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(crate::Error::MissingFile(path.to_path_buf()))
    }
}
