use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use super::DataGenSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Continuous,
    Binary,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Continuous => "continuous",
            ColumnKind::Binary => "binary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn continuous(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Continuous,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Binary,
        }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Synthetic(DataGenSpec),
    Source(String),
}

/// Feature matrix with named columns, binary labels and a binary sensitive
/// attribute (`0` = disadvantaged).
///
/// Values are never mutated after construction; every restriction returns a
/// new dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    columns: Vec<Column>,
    x: Array2<f64>,
    y: Vec<u8>,
    sensitive: Vec<u8>,
    provenance: Provenance,
}

impl TabularDataset {
    pub fn new(
        columns: Vec<Column>,
        x: Array2<f64>,
        y: Vec<u8>,
        sensitive: Vec<u8>,
        provenance: Provenance,
    ) -> Result<Self> {
        if x.ncols() != columns.len() {
            return Err(Error::Schema(format!(
                "{} columns declared but matrix has {}",
                columns.len(),
                x.ncols()
            )));
        }
        if x.nrows() != y.len() || x.nrows() != sensitive.len() {
            return Err(Error::Schema(format!(
                "row counts disagree: X {}, y {}, sensitive {}",
                x.nrows(),
                y.len(),
                sensitive.len()
            )));
        }
        for (name, v) in [("y", &y), ("sensitive", &sensitive)] {
            if v.iter().any(|&b| b > 1) {
                return Err(Error::Schema(format!("{name} must be binary")));
            }
        }
        for (j, col) in columns.iter().enumerate() {
            let values = x.column(j);
            match col.kind {
                ColumnKind::Binary => {
                    if values.iter().any(|&v| v != 0.0 && v != 1.0) {
                        return Err(Error::Schema(format!(
                            "binary column `{}` holds values other than 0/1",
                            col.name
                        )));
                    }
                }
                ColumnKind::Continuous => {
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Schema(format!(
                            "column `{}` holds non-finite values",
                            col.name
                        )));
                    }
                }
            }
        }
        for (i, a) in columns.iter().enumerate() {
            if columns[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Schema(format!("duplicate column `{}`", a.name)));
            }
        }
        Ok(TabularDataset {
            columns,
            x,
            y,
            sensitive,
            provenance,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn sensitive(&self) -> &[u8] {
        &self.sensitive
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<ArrayView1<'_, f64>> {
        self.column_index(name)
            .map(|j| self.x.column(j))
            .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))
    }

    pub fn column_at(&self, j: usize) -> ArrayView1<'_, f64> {
        self.x.column(j)
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.x.row(i)
    }

    /// Row indices belonging to `group`, in dataset order.
    pub fn group_indices(&self, group: u8) -> Vec<usize> {
        self.sensitive
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| (g == group).then_some(i))
            .collect()
    }

    pub fn group_count(&self, group: u8) -> usize {
        self.sensitive.iter().filter(|&&g| g == group).count()
    }

    /// New dataset holding `rows` in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> TabularDataset {
        TabularDataset {
            columns: self.columns.clone(),
            x: self.x.select(Axis(0), rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            sensitive: rows.iter().map(|&i| self.sensitive[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// New dataset restricted to the named columns, in the given order.
    pub fn select_columns(&self, names: &[&str]) -> Result<TabularDataset> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::Schema(format!("no column named `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(TabularDataset {
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            x: self.x.select(Axis(1), &idx),
            y: self.y.clone(),
            sensitive: self.sensitive.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Extract the named columns as a matrix, in the given order.
    pub fn matrix_of(&self, names: &[String]) -> Result<Array2<f64>> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::Schema(format!("no column named `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(self.x.select(Axis(1), &idx))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}
