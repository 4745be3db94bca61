use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Column-wise shift and scale with population statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Population standard deviations; zero marks a constant column.
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::invalid("cannot standardize zero rows"));
        }
        let n = x.rows() as f64;
        let mut means = vec![0.0; x.cols()];
        for i in 0..x.rows() {
            for (m, v) in means.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; x.cols()];
        for i in 0..x.rows() {
            for ((s, v), m) in vars.iter_mut().zip(x.row(i)).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let stds = vars.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Standardizer { means, stds })
    }

    /// Centre and scale; constant columns become zero.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.means.len() {
            return Err(Error::invalid(format!(
                "standardizer fitted on {} columns, given {}",
                self.means.len(),
                x.cols()
            )));
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let s = self.stds[j];
                *v = if s > 0.0 {
                    (*v - self.means[j]) / s
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

/// Assembled design matrix with block boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub x: Matrix,
    pub labels: Vec<usize>,
    pub tfidf_cols: Range<usize>,
    pub emotion_cols: Option<Range<usize>>,
    pub concern_cols: Option<Range<usize>>,
}

/// Concatenate `[tfidf | emotions | concerns]`. When a standardizer is
/// given it must have been fitted on the numeric blocks present (emotions
/// then concerns), normally over training rows only.
pub fn assemble_features(
    tfidf: &Matrix,
    emotions: Option<&Matrix>,
    concerns: Option<&Matrix>,
    labels: &[usize],
    scaler: Option<&Standardizer>,
) -> Result<FeatureMatrix> {
    if labels.len() != tfidf.rows() {
        return Err(Error::RowMismatch(format!(
            "{} labels for {} rows",
            labels.len(),
            tfidf.rows()
        )));
    }
    let numeric_blocks: Vec<&Matrix> = emotions.into_iter().chain(concerns).collect();
    let numeric = Matrix::hstack(&numeric_blocks)?;
    let numeric = match (scaler, numeric_blocks.is_empty()) {
        (Some(s), false) => s.transform(&numeric)?,
        _ => numeric,
    };
    let x = if numeric_blocks.is_empty() {
        tfidf.clone()
    } else {
        Matrix::hstack(&[tfidf, &numeric])?
    };
    let t = tfidf.cols();
    let e = emotions.map(|m| m.cols()).unwrap_or(0);
    let c = concerns.map(|m| m.cols()).unwrap_or(0);
    Ok(FeatureMatrix {
        x,
        labels: labels.to_vec(),
        tfidf_cols: 0..t,
        emotion_cols: emotions.map(|_| t..t + e),
        concern_cols: concerns.map(|_| t + e..t + e + c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(values: &[f64]) -> Matrix {
        Matrix::from_vec(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn population_scaling() {
        let x = col(&[1.0, 2.0, 3.0]);
        let s = Standardizer::fit(&x).unwrap();
        let z = s.transform(&x).unwrap();
        let want = 1.0 / (2.0f64 / 3.0).sqrt();
        assert!((z.get(0, 0) + want).abs() < 1e-12);
        assert_eq!(z.get(1, 0), 0.0);
        assert!((z.get(2, 0) - 1.2247).abs() < 1e-4);
    }

    #[test]
    fn constant_column_zeroed() {
        let x = col(&[4.0, 4.0]);
        let z = Standardizer::fit(&x).unwrap().transform(&x).unwrap();
        assert_eq!(z.get(0, 0), 0.0);
        assert_eq!(z.get(1, 0), 0.0);
    }

    #[test]
    fn unscaled_blocks_concatenate() {
        let t = Matrix::from_rows(&[[0.6, 0.8], [1.0, 0.0]]).unwrap();
        let e = col(&[5.0, 7.0]);
        let c = col(&[1.0, 0.0]);
        let f = assemble_features(&t, Some(&e), Some(&c), &[0, 1], None).unwrap();
        assert_eq!(f.x.row(0), &[0.6, 0.8, 5.0, 1.0]);
        assert_eq!(f.emotion_cols, Some(2..3));
        assert_eq!(f.concern_cols, Some(3..4));
        let only_text = assemble_features(&t, None, None, &[0, 1], None).unwrap();
        assert_eq!(only_text.x, t);
    }

    #[test]
    fn scaler_applies_fitted_parameters() {
        let t = Matrix::zeros(2, 1);
        let e = col(&[1.0, 3.0]);
        let s = Standardizer::fit(&col(&[1.0, 2.0, 3.0])).unwrap();
        let f = assemble_features(&t, Some(&e), None, &[0, 1], Some(&s)).unwrap();
        assert!((f.x.get(0, 1) + 1.2247).abs() < 1e-4);
        assert!(assemble_features(&t, Some(&e), None, &[0], None).is_err());
    }
}
