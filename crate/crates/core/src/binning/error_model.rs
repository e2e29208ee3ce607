use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Stochastic map from a request's true bin to the bin it is queued in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    #[default]
    Perfect,
    /// Interior bins move to each neighbour with probability `p_e`; edge bins
    /// move to their single neighbour with probability `p_e`.
    Symmetric { p_e: f64 },
    /// Row `i` is the distribution of the predicted bin given true bin `i`.
    Confusion { matrix: Vec<Vec<f64>> },
}

impl ErrorModel {
    pub fn symmetric(p_e: f64) -> Result<Self> {
        let m = Self::Symmetric { p_e };
        m.validate(None)?;
        Ok(m)
    }

    pub fn confusion(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::Confusion { matrix };
        m.validate(None)?;
        Ok(m)
    }

    /// True when every request lands in its true bin.
    pub fn is_error_free(&self) -> bool {
        match self {
            Self::Perfect => true,
            Self::Symmetric { p_e } => *p_e == 0.0,
            Self::Confusion { matrix } => matrix
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, p)| *p == if i == j { 1.0 } else { 0.0 })),
        }
    }

    /// Checks the model's invariants, and when `k` is given, that a
    /// confusion matrix has matching dimension.
    pub fn validate(&self, k: Option<usize>) -> Result<()> {
        match self {
            Self::Perfect => Ok(()),
            Self::Symmetric { p_e } => {
                if !(0.0..=0.5).contains(p_e) {
                    return Err(Error::InvalidErrorModel(format!("p_e must lie in [0, 0.5], got {p_e}")));
                }
                Ok(())
            }
            Self::Confusion { matrix } => {
                let n = matrix.len();
                if n == 0 {
                    return Err(Error::InvalidErrorModel("confusion matrix is empty".into()));
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidErrorModel(format!(
                            "row {} has {} entries, expected {n}",
                            i + 1,
                            row.len()
                        )));
                    }
                    if let Some(p) = row.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
                        return Err(Error::InvalidErrorModel(format!("row {} has invalid probability {p}", i + 1)));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                        return Err(Error::InvalidErrorModel(format!("row {} sums to {sum}, not 1", i + 1)));
                    }
                }
                match k {
                    Some(k) if k != n => {
                        Err(Error::InvalidErrorModel(format!("confusion matrix is {n}x{n} but there are {k} bins")))
                    }
                    _ => Ok(()),
                }
            }
        }
    }
}

/// Draws the predicted bin for a request whose true bin is `true_bin`
/// (numbered from 0) among `k` bins.
pub fn predict_bin<R: Rng + ?Sized>(model: &ErrorModel, true_bin: usize, k: usize, rng: &mut R) -> usize {
    debug_assert!(true_bin < k);
    match model {
        ErrorModel::Perfect => true_bin,
        ErrorModel::Symmetric { p_e } => {
            // one draw per request regardless of outcome keeps the stream aligned
            let u: f64 = rng.random();
            if k == 1 {
                true_bin
            } else if true_bin == 0 {
                if u < *p_e {
                    1
                } else {
                    0
                }
            } else if true_bin == k - 1 {
                if u < *p_e {
                    k - 2
                } else {
                    k - 1
                }
            } else if u < *p_e {
                true_bin - 1
            } else if u < 2.0 * p_e {
                true_bin + 1
            } else {
                true_bin
            }
        }
        ErrorModel::Confusion { matrix } => {
            let row = &matrix[true_bin];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (j, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    return j;
                }
            }
            // rounding left u above the cumulative sum; take the last reachable bin
            row.iter().rposition(|p| *p > 0.0).unwrap_or(true_bin)
        }
    }
}

/// Parses a whitespace-separated k x k matrix, one row per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_confusion_matrix(text: &str, origin: &Path) -> Result<ErrorModel> {
    let mut matrix = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, tok) in trimmed.split_whitespace().enumerate() {
            let p = tok.parse::<f64>().map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                column: Some(col + 1),
                message: format!("bad probability `{tok}`: {e}"),
            })?;
            row.push(p);
        }
        matrix.push(row);
    }
    let model = ErrorModel::Confusion { matrix };
    model.validate(None)?;
    Ok(model)
}

pub fn load_confusion_matrix(path: impl AsRef<Path>) -> Result<ErrorModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_confusion_matrix(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    #[test]
    fn error_free_models() {
        assert!(ErrorModel::Perfect.is_error_free());
        assert!(ErrorModel::symmetric(0.0).unwrap().is_error_free());
        assert!(!ErrorModel::symmetric(0.01).unwrap().is_error_free());
        assert!(ErrorModel::confusion(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap().is_error_free());
        assert!(!ErrorModel::confusion(vec![vec![0.9, 0.1], vec![0.0, 1.0]]).unwrap().is_error_free());
    }

    #[test]
    fn perfect_and_zero_error_are_identity() {
        let mut rng = stream(1, 2);
        assert_eq!(predict_bin(&ErrorModel::Perfect, 2, 8, &mut rng), 2);
        let zero = ErrorModel::symmetric(0.0).unwrap();
        for k in 1..10 {
            for i in 0..k {
                assert_eq!(predict_bin(&zero, i, k, &mut rng), i);
            }
        }
    }

    #[test]
    fn single_bin_is_identity() {
        let m = ErrorModel::symmetric(0.5).unwrap();
        let mut rng = stream(1, 2);
        for _ in 0..100 {
            assert_eq!(predict_bin(&m, 0, 1, &mut rng), 0);
        }
    }

    fn frequencies(model: &ErrorModel, true_bin: usize, k: usize, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 2);
        let mut counts = vec![0usize; k];
        for _ in 0..n {
            counts[predict_bin(model, true_bin, k, &mut rng)] += 1;
        }
        counts.iter().map(|c| *c as f64 / n as f64).collect()
    }

    #[test]
    fn edge_rule_frequency() {
        let m = ErrorModel::symmetric(0.25).unwrap();
        let f = frequencies(&m, 0, 4, 1_000_000, 9);
        assert!((f[1] - 0.25).abs() < 0.002, "{f:?}");
        assert!((f[0] - 0.75).abs() < 0.002, "{f:?}");
        assert_eq!(f[2] + f[3], 0.0);
        // both bins are edges when k = 2
        let f = frequencies(&m, 1, 2, 1_000_000, 10);
        assert!((f[0] - 0.25).abs() < 0.002, "{f:?}");
    }

    #[test]
    fn interior_rule_frequency() {
        let m = ErrorModel::symmetric(0.1).unwrap();
        let f = frequencies(&m, 2, 5, 1_000_000, 11);
        for (got, want) in f.iter().zip([0.0, 0.1, 0.8, 0.1, 0.0]) {
            assert!((got - want).abs() < 0.002, "{f:?}");
        }
    }

    #[test]
    fn confusion_rows_match_within_three_sigma() {
        let matrix = vec![vec![0.7, 0.2, 0.1], vec![0.15, 0.6, 0.25], vec![0.0, 0.3, 0.7]];
        let m = ErrorModel::confusion(matrix.clone()).unwrap();
        let n = 1_000_000;
        for (i, row) in matrix.iter().enumerate() {
            let f = frequencies(&m, i, 3, n, 20 + i as u64);
            for (got, p) in f.iter().zip(row) {
                let se = (p * (1.0 - p) / n as f64).sqrt();
                assert!((got - p).abs() <= 3.0 * se + 1e-12, "row {i}: {f:?}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(ErrorModel::symmetric(0.51).is_err());
        assert!(ErrorModel::symmetric(-0.1).is_err());
        assert!(ErrorModel::confusion(vec![vec![0.5, 0.4], vec![0.0, 1.0]]).is_err());
        assert!(ErrorModel::confusion(vec![vec![1.2, -0.2], vec![0.0, 1.0]]).is_err());
        assert!(ErrorModel::confusion(vec![vec![1.0], vec![0.0, 1.0]]).is_err());
        let ok = ErrorModel::confusion(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(ok.validate(Some(2)).is_ok());
        assert!(ok.validate(Some(3)).is_err());
    }

    #[test]
    fn parses_matrix_text() {
        let text = "# true bin per row\n0.9 0.1\n\n0.2   0.8\n";
        let m = parse_confusion_matrix(text, Path::new("m.txt")).unwrap();
        assert_eq!(m, ErrorModel::Confusion { matrix: vec![vec![0.9, 0.1], vec![0.2, 0.8]] });

        let err = parse_confusion_matrix("0.9 x\n0.2 0.8\n", Path::new("m.txt")).unwrap_err();
        assert!(err.to_string().starts_with("m.txt:1:2"), "{err}");
        assert!(parse_confusion_matrix("0.9 0.2\n0.2 0.8\n", Path::new("m.txt")).is_err());
    }

    #[test]
    fn loads_matrix_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("confusion.txt");
        std::fs::write(&path, "1 0 0\n0.1 0.8 0.1\n0 0 1\n").unwrap();
        let m = load_confusion_matrix(&path).unwrap();
        assert!(m.validate(Some(3)).is_ok());
    }

    proptest! {
        #[test]
        fn symmetric_moves_at_most_one_bin(p in 0.0f64..=0.5, k in 1usize..16, seed: u64, pick in 0usize..16) {
            let m = ErrorModel::symmetric(p).unwrap();
            let i = pick % k;
            let mut rng = stream(seed, 2);
            for _ in 0..64 {
                let j = predict_bin(&m, i, k, &mut rng);
                prop_assert!(j < k);
                prop_assert!(i.abs_diff(j) <= 1);
            }
        }
    }
}
