//! Column-typed data matrices.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Continuous,
    /// Integer codes in `0..levels`.
    Categorical { levels: usize },
}

impl ColumnKind {
    pub fn is_continuous(&self) -> bool {
        matches!(self, ColumnKind::Continuous)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Categorical codes are stored as exact small integers.
    pub values: Vec<f64>,
    /// Numeric value of each categorical level, used when the column is
    /// read as continuous. `None` means the codes themselves.
    pub level_values: Option<Vec<f64>>,
}

impl Column {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self { name: name.into(), kind: ColumnKind::Continuous, values, level_values: None }
    }

    pub fn categorical(name: impl Into<String>, levels: usize, codes: Vec<u32>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical { levels },
            values: codes.into_iter().map(f64::from).collect(),
            level_values: None,
        }
    }

    /// Attaches numeric level values to a categorical column.
    pub fn with_level_values(mut self, level_values: Vec<f64>) -> Self {
        self.level_values = Some(level_values);
        self
    }

    /// Values as reals: codes mapped through `level_values` when present.
    pub fn numeric_values(&self) -> Vec<f64> {
        match &self.level_values {
            Some(map) => self.values.iter().map(|&c| map[c as usize]).collect(),
            None => self.values.clone(),
        }
    }
}

/// A data matrix stored column-wise, with one kind per column.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.values.len());
        for col in &columns {
            if col.values.len() != n_rows {
                return Err(Error::InvalidDataset(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    col.name,
                    col.values.len()
                )));
            }
            match col.kind {
                ColumnKind::Continuous => {
                    if let Some(v) = col.values.iter().find(|v| !v.is_finite()) {
                        return Err(Error::InvalidDataset(format!(
                            "column `{}` has non-finite value {v}",
                            col.name
                        )));
                    }
                }
                ColumnKind::Categorical { levels } => {
                    if levels == 0 {
                        return Err(Error::InvalidDataset(format!(
                            "column `{}` declares zero levels",
                            col.name
                        )));
                    }
                    if let Some(&code) = col
                        .values
                        .iter()
                        .find(|&&v| v < 0.0 || v.fract() != 0.0 || v >= levels as f64)
                    {
                        return Err(Error::UnseenLevel { column: col.name.clone(), code, levels });
                    }
                }
            }
            if let Some(map) = &col.level_values {
                let ok = matches!(col.kind, ColumnKind::Categorical { levels } if levels == map.len())
                    && map.iter().all(|v| v.is_finite());
                if !ok {
                    return Err(Error::InvalidDataset(format!(
                        "column `{}` needs one finite level value per level",
                        col.name
                    )));
                }
            }
        }
        for (i, a) in columns.iter().enumerate() {
            if columns[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidDataset(format!("duplicate column name `{}`", a.name)));
            }
        }
        Ok(Self { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.values[r]).collect()
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    /// Copy with rows reordered by `order` (a permutation of `0..n_rows`).
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                kind: c.kind,
                values: order.iter().map(|&r| c.values[r]).collect(),
                level_values: c.level_values.clone(),
            })
            .collect();
        Self { columns, n_rows: order.len() }
    }
}
