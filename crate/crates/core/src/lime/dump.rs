//! Explanation dump: `instance_id,group,blackbox_prob,surrogate_prob,agreement`
//! followed by one column per feature weight.

use std::path::Path;

use super::{agreement, LocalExplanation};
use crate::{Error, Result};

const FIXED: [&str; 5] = ["instance_id", "group", "blackbox_prob", "surrogate_prob", "agreement"];

#[derive(Debug, Clone, PartialEq)]
pub struct DumpRow {
    pub instance_id: usize,
    pub group: u8,
    pub blackbox_prob: f64,
    pub surrogate_prob: f64,
    pub agreement: u8,
    pub weights: Vec<f64>,
}

pub fn write_dump(expls: &[LocalExplanation], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let names: &[String] = expls.first().map_or(&[], |e| &e.feature_names);
    let mut header: Vec<&str> = FIXED.to_vec();
    header.extend(names.iter().map(String::as_str));
    w.write_record(&header)?;
    for e in expls {
        let mut rec = vec![
            e.instance_id.to_string(),
            e.group.to_string(),
            e.blackbox_prob.to_string(),
            e.surrogate_prob_at_instance.to_string(),
            agreement(e).to_string(),
        ];
        rec.extend(e.feature_weights.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Returns the feature names and rows of a dump.
pub fn read_dump(path: &Path) -> Result<(Vec<String>, Vec<DumpRow>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < FIXED.len() || header[..FIXED.len()] != FIXED {
        return Err(Error::Schema(format!("not an explanation dump: header {header:?}")));
    }
    let names = header[FIXED.len()..].to_vec();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::ParseLine {
            line: i + 2,
            reason: format!("bad {what}"),
        };
        let f = |k: usize, what: &str| -> Result<f64> {
            rec.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| bad(what))
        };
        rows.push(DumpRow {
            instance_id: rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("instance_id"))?,
            group: rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad("group"))?,
            blackbox_prob: f(2, "blackbox_prob")?,
            surrogate_prob: f(3, "surrogate_prob")?,
            agreement: rec.get(4).and_then(|s| s.parse().ok()).ok_or_else(|| bad("agreement"))?,
            weights: (FIXED.len()..header.len())
                .map(|k| f(k, "weight"))
                .collect::<Result<_>>()?,
        });
    }
    Ok((names, rows))
}
