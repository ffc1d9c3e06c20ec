use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset, Matrix, Provenance};

/// How CSV rows are divided into training and test partitions.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitSpec {
    /// Seeded shuffle, then the first `train_fraction` of rows train.
    Shuffle { train_fraction: f64, seed: u64 },
    /// Explicit half-open row ranges (0-based data rows).
    Ranges {
        train: std::ops::Range<usize>,
        test: std::ops::Range<usize>,
    },
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::Shuffle {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

impl std::fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitSpec::Shuffle { train_fraction, seed } => write!(f, "shuffle({train_fraction}, seed={seed})"),
            SplitSpec::Ranges { train, test } => write!(f, "rows(train={train:?}, test={test:?})"),
        }
    }
}

/// Loads a headed numeric CSV. Every column except `target` is a feature.
/// Row numbers in errors are 1-based data rows (the header is not counted).
pub fn load_csv(path: &Path, target: &str, split: SplitSpec) -> Result<Dataset, DataError> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => DataError::Io {
                path: shown.clone(),
                source,
            },
            other => DataError::Csv(format!("{other:?}")),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let target_col = header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| DataError::MissingTarget(target.to_string()))?;
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&j| j != target_col).collect();
    if feature_cols.is_empty() {
        return Err(DataError::NoFeatures);
    }

    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        let cell = |j: usize| -> Result<f64, DataError> {
            let raw = record.get(j).unwrap_or("");
            raw.parse::<f64>().map_err(|_| DataError::Parse {
                row: i + 1,
                column: header[j].clone(),
                value: raw.to_string(),
            })
        };
        ys.push(cell(target_col)?);
        rows.push(feature_cols.iter().map(|&j| cell(j)).collect::<Result<Vec<_>, _>>()?);
    }
    if rows.is_empty() {
        return Err(DataError::Empty(shown));
    }

    let (train_idx, test_idx) = split_indices(rows.len(), &split)?;
    let take = |idx: &[usize]| {
        let r: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let y: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
        (Matrix::from_rows(&r, feature_cols.len()), y)
    };
    let (train, ytrain) = take(&train_idx);
    let (test, ytest) = take(&test_idx);
    Dataset::new(
        feature_cols.iter().map(|&j| header[j].clone()).collect(),
        train,
        ytrain,
        test,
        ytest,
        Provenance::Csv {
            path: shown,
            target: target.to_string(),
            split: split.to_string(),
        },
    )
}

fn split_indices(n: usize, split: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    match split {
        SplitSpec::Shuffle { train_fraction, seed } => {
            if !(0.0 < *train_fraction && *train_fraction <= 1.0) {
                return Err(DataError::Split(format!(
                    "train fraction {train_fraction} not in (0, 1]"
                )));
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            let n_train = ((n as f64) * train_fraction).round() as usize;
            let test = idx.split_off(n_train.min(n));
            Ok((idx, test))
        }
        SplitSpec::Ranges { train, test } => {
            if train.end > n || test.end > n || train.start >= train.end {
                return Err(DataError::Split(format!(
                    "ranges {train:?}/{test:?} do not fit {n} rows"
                )));
            }
            Ok((train.clone().collect(), test.clone().collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn linear_csv(n: usize) -> String {
        let mut s = String::from("x,y\n");
        for i in 0..n {
            s.push_str(&format!("{i},{}\n", 2 * i + 1));
        }
        s
    }

    #[test]
    fn shuffle_split_is_80_20_and_seeded() {
        let f = write(&linear_csv(50));
        let a = load_csv(f.path(), "y", SplitSpec::default()).unwrap();
        assert_eq!(a.train().n_rows(), 40);
        assert_eq!(a.test().n_rows(), 10);
        assert_eq!(a.feature_names(), &["x".to_string()]);
        let b = load_csv(f.path(), "y", SplitSpec::default()).unwrap();
        assert_eq!(a.train(), b.train());
        let c = load_csv(
            f.path(),
            "y",
            SplitSpec::Shuffle {
                train_fraction: 0.8,
                seed: 9,
            },
        )
        .unwrap();
        assert_ne!(a.train(), c.train());
        for i in 0..a.train().n_rows() {
            assert_eq!(a.train_targets()[i], 2.0 * a.train().column(0)[i] + 1.0);
        }
    }

    #[test]
    fn text_cell_names_row_and_column() {
        let f = write("x,y\n1,2\n2,abc\n");
        match load_csv(f.path(), "y", SplitSpec::default()) {
            Err(DataError::Parse { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "y", "abc"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_target_and_file() {
        let f = write(&linear_csv(5));
        assert!(matches!(
            load_csv(f.path(), "z", SplitSpec::default()),
            Err(DataError::MissingTarget(_))
        ));
        assert!(matches!(
            load_csv(Path::new("/nonexistent/file.csv"), "y", SplitSpec::default()),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn explicit_ranges() {
        let f = write(&linear_csv(10));
        let d = load_csv(
            f.path(),
            "y",
            SplitSpec::Ranges {
                train: 0..6,
                test: 6..10,
            },
        )
        .unwrap();
        assert_eq!(d.train().column(0), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(d.test_targets(), &[13.0, 15.0, 17.0, 19.0]);
    }
}
