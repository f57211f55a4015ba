//! CSV form of a dataset plus a `key=value` sidecar.
//!
//! The CSV header is the column names followed by `Y` (e.g. `A,C,L,Y` for a
//! synthetic population). The sidecar `<stem>.meta` records the column kinds,
//! the sensitive column and, for synthetic data, every `DataGenSpec` field.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{Column, ColumnKind, DataGenSpec, Provenance, TabularDataset};
use crate::{Error, Result};

const SPEC_PREFIX: &str = "spec.";

pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta")
}

pub fn write_csv(ds: &TabularDataset, path: &Path) -> Result<()> {
    let sensitive_col = sensitive_column(ds);
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = ds.columns().iter().map(|c| c.name.clone()).collect();
    header.push("Y".into());
    if sensitive_col.is_none() {
        header.push("S".into());
    }
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..ds.n_rows() {
        record.clear();
        record.extend(ds.row(i).iter().map(|v| v.to_string()));
        record.push(ds.y()[i].to_string());
        if sensitive_col.is_none() {
            record.push(ds.sensitive()[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;

    let mut meta = fs::File::create(meta_path(path))?;
    let kinds = ds
        .columns()
        .iter()
        .map(|c| format!("{}:{}", c.name, c.kind.as_str()))
        .collect::<Vec<_>>()
        .join(",");
    writeln!(meta, "columns={kinds}")?;
    writeln!(meta, "sensitive={}", sensitive_col.unwrap_or("S"))?;
    match ds.provenance() {
        Provenance::Synthetic(spec) => {
            for (k, v) in spec.to_params() {
                writeln!(meta, "{SPEC_PREFIX}{k}={v}")?;
            }
        }
        Provenance::Source(s) => writeln!(meta, "source={s}")?,
    }
    Ok(())
}

/// The column that carries the sensitive attribute, when one matches it exactly.
fn sensitive_column(ds: &TabularDataset) -> Option<&str> {
    ds.columns().iter().enumerate().find_map(|(j, c)| {
        let col = ds.column_at(j);
        let same = c.kind == ColumnKind::Binary
            && col
                .iter()
                .zip(ds.sensitive())
                .all(|(&v, &s)| v == f64::from(s));
        same.then_some(c.name.as_str())
    })
}

pub fn read_csv(path: &Path) -> Result<TabularDataset> {
    let meta_file = meta_path(path);
    let meta = fs::read_to_string(&meta_file).map_err(|_| Error::MissingFile(meta_file.clone()))?;
    let mut columns = Vec::new();
    let mut sensitive_name = None;
    let mut spec_params = Vec::new();
    let mut source = None;
    for (lineno, line) in meta.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::ParseLine {
            line: lineno + 1,
            reason: format!("expected key=value in {}", meta_file.display()),
        })?;
        match k {
            "columns" => {
                for item in v.split(',') {
                    let (name, kind) = item.split_once(':').ok_or_else(|| Error::ParseLine {
                        line: lineno + 1,
                        reason: format!("bad column entry `{item}`"),
                    })?;
                    let kind = match kind {
                        "continuous" => ColumnKind::Continuous,
                        "binary" => ColumnKind::Binary,
                        other => {
                            return Err(Error::ParseLine {
                                line: lineno + 1,
                                reason: format!("unknown column kind `{other}`"),
                            })
                        }
                    };
                    columns.push(Column {
                        name: name.to_string(),
                        kind,
                    });
                }
            }
            "sensitive" => sensitive_name = Some(v.to_string()),
            "source" => source = Some(v.to_string()),
            k if k.starts_with(SPEC_PREFIX) => {
                spec_params.push((k[SPEC_PREFIX.len()..].to_string(), v.to_string()))
            }
            _ => {}
        }
    }
    let sensitive_name =
        sensitive_name.ok_or_else(|| Error::Schema("metadata lacks `sensitive`".into()))?;

    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expect_y = columns.len();
    if header.len() < expect_y + 1
        || header[..expect_y]
            .iter()
            .zip(&columns)
            .any(|(h, c)| *h != c.name)
        || header[expect_y] != "Y"
    {
        return Err(Error::Schema(format!("CSV header {header:?} disagrees with metadata")));
    }
    let s_idx = header
        .iter()
        .position(|h| *h == sensitive_name)
        .ok_or_else(|| Error::Schema(format!("sensitive column `{sensitive_name}` not in CSV")))?;

    let d = columns.len();
    let mut flat = Vec::new();
    let mut y = Vec::new();
    let mut sensitive = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |j: usize| -> Result<f64> {
            rec.get(j)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::ParseLine {
                    line,
                    reason: format!("field {} is not a number", j + 1),
                })
        };
        for j in 0..d {
            flat.push(num(j)?);
        }
        y.push(num(d)? as u8);
        sensitive.push(num(s_idx)? as u8);
    }
    let x = Array2::from_shape_vec((y.len(), d), flat)
        .map_err(|e| Error::Schema(e.to_string()))?;
    let provenance = if spec_params.is_empty() {
        Provenance::Source(source.unwrap_or_else(|| path.display().to_string()))
    } else {
        Provenance::Synthetic(DataGenSpec::from_params(
            spec_params.iter().map(|(k, v)| (k.as_str(), v.as_str())),
        )?)
    };
    TabularDataset::new(columns, x, y, sensitive, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{sample_population, Objective};

    #[test]
    fn synthetic_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pop.csv");
        let spec = DataGenSpec::new(Objective::ConceptShift, 5).with_n(200);
        let ds = sample_population(&spec).unwrap();
        write_csv(&ds, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("A,C,L,Y\n"));
        let back = read_csv(&path).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn dataset_without_sensitive_column_gets_s_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("noa.csv");
        let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, 5).with_n(50))
            .unwrap()
            .select_columns(&["C", "L"])
            .unwrap();
        write_csv(&ds, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("C,L,Y,S\n"));
        assert_eq!(read_csv(&path).unwrap(), ds);
    }

    #[test]
    fn missing_sidecar_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "A,Y\n0,1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::MissingFile(_))));
    }
}
