use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::{Error, Result};

/// An `n x d` table of finite observations, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Array2<f64>,
    column_names: Option<Vec<String>>,
}

impl FeatureMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "feature matrix must be at least 1x1, got {n}x{d}"
            )));
        }
        if let Some(((i, j), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {v} at row {i}, column {j}"
            )));
        }
        Ok(Self {
            data,
            column_names: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} values, expected {d}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        let data = Array2::from_shape_vec((n, d), flat)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(data)
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols(),
                actual: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.data.row(i)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Rows selected by index, keeping column names.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty row selection".into()));
        }
        let d = self.n_cols();
        let mut flat = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            if i >= self.n_rows() {
                return Err(Error::InvalidInput(format!("row index {i} out of range")));
            }
            flat.extend(self.data.row(i).iter());
        }
        let data = Array2::from_shape_vec((indices.len(), d), flat)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(Self {
            data,
            column_names: self.column_names.clone(),
        })
    }
}

impl TryFrom<Array2<f64>> for FeatureMatrix {
    type Error = Error;

    fn try_from(data: Array2<f64>) -> Result<Self> {
        Self::new(data)
    }
}
