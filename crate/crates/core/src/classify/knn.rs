//! Brute-force k-nearest-neighbor majority voting.

use alloc::vec;
use alloc::vec::Vec;

use crate::classify::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::mat::Mat;

/// Reference set for k-NN classification. The stored matrix is already
/// standardized; queries are standardized on the way in.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnnModel {
    pub reference: Mat,
    pub labels: Vec<usize>,
    pub k: usize,
    pub class_count: usize,
    pub standardizer: Standardizer,
}

/// Memorizes the (standardized) training set.
pub fn knn_fit(x: &Mat, y: &[usize], class_count: usize, k: usize) -> Result<KnnModel> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if k == 0 || k > x.rows() {
        return Err(Error::InvalidParameter("k must satisfy 1 <= k <= m"));
    }
    for &label in y {
        if label >= class_count {
            return Err(Error::LabelOutOfRange {
                label,
                k: class_count,
            });
        }
    }
    let standardizer = Standardizer::fit(x)?;
    Ok(KnnModel {
        reference: standardizer.transform_matrix(x)?,
        labels: y.to_vec(),
        k,
        class_count,
        standardizer,
    })
}

/// Majority vote among the k nearest reference rows by Euclidean distance.
///
/// Neighbors are ordered by `(distance, row index)`, which makes the
/// selection total. Vote ties go to the tied class with the nearest
/// member, then to the lowest class index.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<usize> {
    let q = model.standardizer.transform(x)?;
    knn_predict_standardized(model, &q)
}

/// [`knn_predict`] on an already-standardized query.
pub fn knn_predict_standardized(model: &KnnModel, q: &[f64]) -> Result<usize> {
    if q.len() != model.reference.cols() {
        return Err(Error::DimensionMismatch {
            expected: model.reference.cols(),
            got: q.len(),
        });
    }
    let m = model.reference.rows();
    let mut order: Vec<(f64, usize)> = (0..m)
        .map(|r| {
            let d2: f64 = model
                .reference
                .row(r)
                .iter()
                .zip(q)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            (d2, r)
        })
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut votes = vec![0usize; model.class_count];
    for &(_, r) in order.iter().take(model.k) {
        votes[model.labels[r]] += 1;
    }
    let top = *votes.iter().max().unwrap();
    // nearest member of a top-voted class decides ties; scanning the
    // distance-ordered list finds it directly
    for &(_, r) in order.iter().take(model.k) {
        if votes[model.labels[r]] == top {
            return Ok(model.labels[r]);
        }
    }
    unreachable!("k >= 1 guarantees a winner");
}
