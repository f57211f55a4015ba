use std::fs;
use std::path::Path;

use super::{require_file, AdultConfig};
use crate::{Error, Result};

/// Field names of the UCI files, in file order.
pub const FIELDS: [&str; 15] = [
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
    "income",
];

/// Record count of `adult.data` plus `adult.test`.
pub const EXPECTED_ROWS: usize = 48842;

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    /// The 14 attribute fields, whitespace-trimmed.
    pub fields: Vec<String>,
    /// `1` if income is above 50K.
    pub income: u8,
}

impl RawRecord {
    pub fn field(&self, name: &str) -> Option<&str> {
        FIELDS[..14]
            .iter()
            .position(|f| *f == name)
            .map(|j| self.fields[j].as_str())
    }

    pub fn has_missing(&self) -> bool {
        self.fields.iter().any(|f| f == "?")
    }
}

#[derive(Debug, Clone)]
pub struct RawAdult {
    pub records: Vec<RawRecord>,
    /// Records that came from `adult.data`; the rest came from `adult.test`.
    pub n_from_train_file: usize,
    pub warnings: Vec<String>,
}

/// Parse both UCI files. A wrong total count is reported as a warning, a
/// malformed line as an error carrying its 1-based line number.
pub fn load_raw(cfg: &AdultConfig) -> Result<RawAdult> {
    let (train, test) = (cfg.train_path(), cfg.test_path());
    require_file(&train)?;
    require_file(&test)?;
    let mut records = parse_file(&train)?;
    let n_from_train_file = records.len();
    records.extend(parse_file(&test)?);
    let mut warnings = Vec::new();
    if records.len() != EXPECTED_ROWS {
        warnings.push(format!(
            "parsed {} records, expected {EXPECTED_ROWS}",
            records.len()
        ));
    }
    Ok(RawAdult {
        records,
        n_from_train_file,
        warnings,
    })
}

fn parse_file(path: &Path) -> Result<Vec<RawRecord>> {
    let text = fs::read_to_string(path)?;
    let name = path.display();
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        // The test file opens with "|1x3 Cross validator".
        if trimmed.is_empty() || trimmed.starts_with('|') {
            continue;
        }
        let parse_err = |reason: String| Error::ParseLine {
            line: k + 1,
            reason: format!("{name}: {reason}"),
        };
        let fields: Vec<String> = trimmed.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != FIELDS.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                FIELDS.len(),
                fields.len()
            )));
        }
        let income = match fields[14].trim_end_matches('.') {
            ">50K" => 1,
            "<=50K" => 0,
            other => return Err(parse_err(format!("unknown income label `{other}`"))),
        };
        let mut fields = fields;
        fields.truncate(14);
        out.push(RawRecord { fields, income });
    }
    Ok(out)
}
