//! Per-feature z-score standardization fitted on training data.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Variance floor below which a feature is treated as constant and dropped.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Training-set feature statistics plus the surviving feature indices.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    /// Per-input-feature mean.
    pub mean: Vec<f64>,
    /// Per-input-feature population standard deviation.
    pub std: Vec<f64>,
    /// Indices of features with nonzero variance, in input order.
    pub kept: Vec<usize>,
}

impl Standardizer {
    /// Fits means and standard deviations on the rows of `x`.
    pub fn fit(x: &Mat) -> Result<Self> {
        let (m, n) = x.shape();
        if m == 0 || n == 0 {
            return Err(Error::InsufficientSamples { got: m, need: 1 });
        }
        let mut mean = alloc::vec![0.0; n];
        for r in 0..m {
            for (acc, &v) in mean.iter_mut().zip(x.row(r)) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m as f64);
        let mut var = alloc::vec![0.0; n];
        for r in 0..m {
            for ((acc, &v), &mu) in var.iter_mut().zip(x.row(r)).zip(&mean) {
                let d = v - mu;
                *acc += d * d;
            }
        }
        var.iter_mut().for_each(|v| *v /= m as f64);
        let kept: Vec<usize> = (0..n).filter(|&j| var[j] > VARIANCE_FLOOR).collect();
        if kept.is_empty() {
            return Err(Error::DegenerateData);
        }
        let std = var.iter().map(|&v| libm::sqrt(v)).collect();
        Ok(Standardizer { mean, std, kept })
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.kept.len()
    }

    /// Dropped (constant) feature indices.
    pub fn dropped(&self) -> Vec<usize> {
        let mut keep_iter = self.kept.iter().peekable();
        let mut out = Vec::new();
        for j in 0..self.input_dim() {
            if keep_iter.peek() == Some(&&j) {
                keep_iter.next();
            } else {
                out.push(j);
            }
        }
        out
    }

    /// Z-scores the surviving features of one vector.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(self
            .kept
            .iter()
            .map(|&j| (x[j] - self.mean[j]) / self.std[j])
            .collect())
    }

    pub fn transform_matrix(&self, x: &Mat) -> Result<Mat> {
        let mut out = Mat::zeros(x.rows(), self.output_dim());
        for r in 0..x.rows() {
            let z = self.transform(x.row(r))?;
            out.row_mut(r).copy_from_slice(&z);
        }
        Ok(out)
    }

    /// Maps a standardized vector back to input space; dropped features
    /// come back as their (constant) training mean.
    pub fn inverse(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                got: z.len(),
            });
        }
        let mut out = self.mean.clone();
        for (&j, &v) in self.kept.iter().zip(z) {
            out[j] = v * self.std[j] + self.mean[j];
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transform_produces_zero_mean_unit_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Mat::from_fn(50, 4, |_, c| rng.gen_range(-3.0..3.0) * (c + 1) as f64 + 10.0);
        let s = Standardizer::fit(&x).unwrap();
        let z = s.transform_matrix(&x).unwrap();
        for c in 0..4 {
            let mean: f64 = (0..50).map(|r| z.get(r, c)).sum::<f64>() / 50.0;
            let var: f64 = (0..50).map(|r| z.get(r, c).powi(2)).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = Mat::from_fn(30, 5, |_, _| rng.gen_range(-5.0..5.0));
        // feature 2 constant: dropped but restored exactly by inverse
        for r in 0..30 {
            x.set(r, 2, 7.5);
        }
        let s = Standardizer::fit(&x).unwrap();
        assert_eq!(s.kept, alloc::vec![0, 1, 3, 4]);
        assert_eq!(s.dropped(), alloc::vec![2]);
        for r in 0..30 {
            let z = s.transform(x.row(r)).unwrap();
            let back = s.inverse(&z).unwrap();
            for (a, b) in x.row(r).iter().zip(&back) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn all_constant_features_rejected() {
        let x = Mat::from_fn(10, 3, |_, c| c as f64);
        assert!(matches!(
            Standardizer::fit(&x),
            Err(Error::DegenerateData)
        ));
    }

    #[test]
    fn dimension_checked() {
        let x = Mat::from_fn(10, 3, |r, c| (r * 3 + c) as f64);
        let s = Standardizer::fit(&x).unwrap();
        assert!(s.transform(&[1.0, 2.0]).is_err());
    }
}
