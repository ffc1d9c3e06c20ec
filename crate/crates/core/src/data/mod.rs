//! Datasets: benchmark generators and CSV loading.

mod catalog;
mod csv_source;

pub use catalog::{catalog, generate, Benchmark, Catalog, Design, DesignKind, CATALOG_TOML};
pub use csv_source::{load_csv, SplitSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("unknown benchmark id {0:?}")]
    UnknownBenchmark(String),
    #[error("benchmark catalog is invalid: {0}")]
    Catalog(String),
    #[error("{0} rows but {1} targets")]
    LengthMismatch(usize, usize),
    #[error("need at least {0} rows, got {1}")]
    TooFewRows(usize, usize),
    #[error("non-finite value in {what} at row {row}")]
    NonFinite { what: String, row: usize },
    #[error("training targets have zero variance")]
    ZeroVariance,
    #[error("dataset has no features")]
    NoFeatures,
    #[error("i/o error reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    Parse { row: usize, column: String, value: String },
    #[error("target column {0:?} not found")]
    MissingTarget(String),
    #[error("file {0} has no data rows")]
    Empty(String),
    #[error("invalid split: {0}")]
    Split(String),
}

/// Column-major feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    columns: Vec<Vec<f64>>,
}

impl Matrix {
    /// Builds a matrix from columns of equal length.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Matrix {
        let n_rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == n_rows), "ragged columns");
        Matrix { n_rows, columns }
    }

    pub fn from_rows(rows: &[Vec<f64>], n_cols: usize) -> Matrix {
        let mut columns = vec![Vec::with_capacity(rows.len()); n_cols];
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(*v);
            }
        }
        Matrix {
            n_rows: rows.len(),
            columns,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

/// Where a dataset came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Benchmark {
        id: String,
        seed: u64,
        catalog_version: u32,
    },
    Csv {
        path: String,
        target: String,
        split: String,
    },
    Inline,
}

/// Training and test partitions over a fixed feature list.
#[derive(Clone, Debug)]
pub struct Dataset {
    feature_names: Vec<String>,
    train: Matrix,
    train_targets: Vec<f64>,
    test: Matrix,
    test_targets: Vec<f64>,
    provenance: Provenance,
}

impl Dataset {
    /// Validates shapes, finiteness and nonzero training-target variance.
    /// An empty test partition is allowed.
    pub fn new(
        feature_names: Vec<String>,
        train: Matrix,
        train_targets: Vec<f64>,
        test: Matrix,
        test_targets: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Dataset, DataError> {
        if feature_names.is_empty() {
            return Err(DataError::NoFeatures);
        }
        for (m, y, what) in [(&train, &train_targets, "train"), (&test, &test_targets, "test")] {
            if m.n_rows() != y.len() {
                return Err(DataError::LengthMismatch(m.n_rows(), y.len()));
            }
            if m.n_cols() != feature_names.len() && m.n_rows() > 0 {
                return Err(DataError::Catalog(format!(
                    "{what} has {} columns for {} features",
                    m.n_cols(),
                    feature_names.len()
                )));
            }
            for (row, v) in y.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonFinite {
                        what: format!("{what} target"),
                        row,
                    });
                }
            }
            for col in m.columns() {
                if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                    return Err(DataError::NonFinite {
                        what: format!("{what} features"),
                        row,
                    });
                }
            }
        }
        if train.n_rows() < 2 {
            return Err(DataError::TooFewRows(2, train.n_rows()));
        }
        if variance(&train_targets) <= 0.0 {
            return Err(DataError::ZeroVariance);
        }
        Ok(Dataset {
            feature_names,
            train,
            train_targets,
            test,
            test_targets,
            provenance,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn train(&self) -> &Matrix {
        &self.train
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.train_targets
    }

    pub fn test(&self) -> &Matrix {
        &self.test
    }

    pub fn test_targets(&self) -> &[f64] {
        &self.test_targets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by n).
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[f64]) -> Matrix {
        Matrix::from_columns(vec![rows.to_vec()])
    }

    #[test]
    fn dataset_validation() {
        let names = vec!["x".to_string()];
        let ok = Dataset::new(
            names.clone(),
            m(&[0.0, 1.0]),
            vec![0.0, 1.0],
            m(&[]),
            vec![],
            Provenance::Inline,
        );
        assert!(ok.is_ok());
        let flat = Dataset::new(
            names.clone(),
            m(&[0.0, 1.0]),
            vec![2.0, 2.0],
            m(&[]),
            vec![],
            Provenance::Inline,
        );
        assert!(matches!(flat, Err(DataError::ZeroVariance)));
        let nan = Dataset::new(
            names.clone(),
            m(&[0.0, f64::NAN]),
            vec![0.0, 1.0],
            m(&[]),
            vec![],
            Provenance::Inline,
        );
        assert!(matches!(nan, Err(DataError::NonFinite { .. })));
        let short = Dataset::new(names, m(&[0.0]), vec![0.0, 1.0], m(&[]), vec![], Provenance::Inline);
        assert!(matches!(short, Err(DataError::LengthMismatch(1, 2))));
    }

    #[test]
    fn matrix_rows_and_columns() {
        let mat = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], 2);
        assert_eq!(mat.column(1), &[2.0, 4.0]);
        assert_eq!(mat.row(1), vec![3.0, 4.0]);
    }
}
