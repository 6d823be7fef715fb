//! Datasets: CSV ingestion, z-score standardization, the synthetic monotone
//! generator and MNIST IDX decoding.

mod csv_io;
mod mnist;
mod synth;

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

pub use csv_io::{load_csv, write_csv};
pub use mnist::{binary_task, load_mnist_idx, MnistImages, IMAGE_PIXELS};
pub use synth::{synth_generate, FeatureKind, FeatureSpec, SynthSpec};

/// Feature matrix (row-major, one row per sample), target vector and
/// unique feature names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    target: Vec<f64>,
    names: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, target: Vec<f64>, names: Vec<String>) -> Result<Self> {
        let n_features = names.len();
        if rows.len() != target.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: target.len(),
            });
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in &rows {
            if row.len() != n_features {
                return Err(Error::LengthMismatch {
                    expected: n_features,
                    actual: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::from_flat(features, target, names)
    }

    pub fn from_flat(features: Vec<f64>, target: Vec<f64>, names: Vec<String>) -> Result<Self> {
        if target.is_empty() || names.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != target.len() * names.len() {
            return Err(Error::LengthMismatch {
                expected: target.len() * names.len(),
                actual: features.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        if let Some(index) = features.iter().chain(&target).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            features,
            target,
            names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_features();
        &self.features[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Convention used by [`standardize`]; echoed into run manifests.
pub const STD_CONVENTION: &str = "sample standard deviation (divisor N-1)";

#[derive(Clone, Debug, Serialize)]
pub struct ColumnScaling {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn zscore(values: &mut [f64], name: &str) -> Result<ColumnScaling> {
    let (mean, sd) = if values.len() < 2 {
        (values[0], 0.0)
    } else {
        mean_sd(values)
    };
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::ConstantColumn(name.to_string()));
    }
    for v in values.iter_mut() {
        *v = (*v - mean) / sd;
    }
    Ok(ColumnScaling {
        name: name.to_string(),
        mean,
        sd,
    })
}

/// Shift and scale every feature column and the target to mean 0 and sample
/// standard deviation 1. Returns the standardized dataset and the per-column
/// scalings (features first, target last).
pub fn standardize(data: &Dataset) -> Result<(Dataset, Vec<ColumnScaling>)> {
    let n = data.n_features();
    let mut columns: Vec<Vec<f64>> = (0..n).map(|j| data.column(j)).collect();
    let mut scalings = Vec::with_capacity(n + 1);
    for (col, name) in columns.iter_mut().zip(&data.names) {
        scalings.push(zscore(col, name)?);
    }
    let mut target = data.target.clone();
    scalings.push(zscore(&mut target, "<target>")?);

    let mut features = vec![0.0; data.features.len()];
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            features[i * n + j] = *v;
        }
    }
    let out = Dataset::from_flat(features, target, data.names.clone())?;
    Ok((out, scalings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::spearman;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("c{j}")).collect()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            Dataset::new(vec![], vec![], names(1)),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            Dataset::new(vec![vec![1.0]], vec![1.0], vec!["a".into(), "a".into()]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            Dataset::new(
                vec![vec![1.0, 2.0]],
                vec![1.0],
                vec!["a".into(), "a".into()]
            ),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(matches!(
            Dataset::new(vec![vec![f64::NAN]], vec![1.0], names(1)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn standardize_two_values() {
        let d = Dataset::new(vec![vec![1.0], vec![3.0]], vec![0.0, 10.0], names(1)).unwrap();
        let (s, scal) = standardize(&d).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.column(0)[0] + h).abs() < 1e-15);
        assert!((s.column(0)[1] - h).abs() < 1e-15);
        assert_eq!(scal[0].mean, 2.0);
        assert!((scal[0].sd - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.target()[1] - h).abs() < 1e-15);
    }

    #[test]
    fn standardize_rejects_constant_column() {
        let d = Dataset::new(
            vec![vec![1.0, 5.0], vec![2.0, 5.0]],
            vec![0.0, 1.0],
            vec!["a".into(), "flat".into()],
        )
        .unwrap();
        match standardize(&d) {
            Err(Error::ConstantColumn(c)) => assert_eq!(c, "flat"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn standardize_is_idempotent_and_rank_preserving() {
        let spec = SynthSpec::default_13(7);
        let d = synth_generate(&spec).unwrap();
        let (s1, _) = standardize(&d).unwrap();
        let (s2, _) = standardize(&s1).unwrap();
        for (a, b) in s1.features.iter().zip(&s2.features) {
            assert!((a - b).abs() < 1e-12);
        }
        for j in 0..d.n_features() {
            let before = spearman(&d.column(j), d.target()).unwrap();
            let after = spearman(&s1.column(j), s1.target()).unwrap();
            assert_eq!(before, after);
        }
    }
}
