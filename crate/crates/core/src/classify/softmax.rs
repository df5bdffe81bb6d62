//! Multinomial (softmax) logistic regression with L2 regularization.

use alloc::vec;
use alloc::vec::Vec;

use crate::classify::optim::{gradient_descent, TrainConfig};
use crate::classify::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::mat::Mat;

/// Trained softmax regression model.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRegModel {
    /// `K x d` weights; when `intercept` is set the last column multiplies
    /// the appended constant-1 feature and is not regularized.
    pub theta: Mat,
    pub lambda: f64,
    pub intercept: bool,
    pub class_count: usize,
    pub standardizer: Standardizer,
}

/// Regularized cross-entropy cost and gradient.
///
/// `x` is the `m x d` design matrix (intercept column, if any, already
/// appended as the last column and excluded from the regularizer).
/// Softmax is evaluated with max subtraction so large scores cannot
/// overflow.
pub fn softmax_cost_grad(
    theta: &Mat,
    x: &Mat,
    y: &[usize],
    lambda: f64,
    intercept: bool,
) -> Result<(f64, Mat)> {
    let (k, d) = theta.shape();
    let m = x.rows();
    if x.cols() != d {
        return Err(Error::ShapeMismatch {
            expected: (m, d),
            got: x.shape(),
        });
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&label| label >= k) {
        return Err(Error::LabelOutOfRange { label: bad, k });
    }

    let mf = m as f64;
    let mut cost = 0.0;
    let mut grad = Mat::zeros(k, d);
    let mut scores = vec![0.0; k];
    for i in 0..m {
        let xi = x.row(i);
        for (j, s) in scores.iter_mut().enumerate() {
            *s = theta.row(j).iter().zip(xi).map(|(&t, &v)| t * v).sum();
        }
        let zmax = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut denom = 0.0;
        for &s in scores.iter() {
            denom += libm::exp(s - zmax);
        }
        let log_denom = libm::log(denom);
        cost -= scores[y[i]] - zmax - log_denom;
        for j in 0..k {
            let p = libm::exp(scores[j] - zmax) / denom;
            let coeff = p - if y[i] == j { 1.0 } else { 0.0 };
            for (g, &v) in grad.row_mut(j).iter_mut().zip(xi) {
                *g += coeff * v;
            }
        }
    }
    cost /= mf;
    grad.data_mut().iter_mut().for_each(|g| *g /= mf);

    // L2 term over non-intercept weights
    let reg_cols = if intercept { d - 1 } else { d };
    let mut reg = 0.0;
    for j in 0..k {
        for c in 0..reg_cols {
            let t = theta.get(j, c);
            reg += t * t;
            grad.set(j, c, grad.get(j, c) + lambda / mf * t);
        }
    }
    cost += lambda / (2.0 * mf) * reg;
    Ok((cost, grad))
}

fn design_matrix(z: &Mat, intercept: bool) -> Mat {
    if !intercept {
        return z.clone();
    }
    let mut out = Mat::zeros(z.rows(), z.cols() + 1);
    for r in 0..z.rows() {
        out.row_mut(r)[..z.cols()].copy_from_slice(z.row(r));
        out.set(r, z.cols(), 1.0);
    }
    out
}

/// Trains softmax regression by gradient descent from zero weights.
pub fn logreg_train(
    x: &Mat,
    y: &[usize],
    class_count: usize,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<LogRegModel> {
    logreg_train_opts(x, y, class_count, lambda, cfg, true)
}

/// [`logreg_train`] with the intercept column optional.
pub fn logreg_train_opts(
    x: &Mat,
    y: &[usize],
    class_count: usize,
    lambda: f64,
    cfg: &TrainConfig,
    intercept: bool,
) -> Result<LogRegModel> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    let mut present = vec![false; class_count];
    for &label in y {
        if label >= class_count {
            return Err(Error::LabelOutOfRange {
                label,
                k: class_count,
            });
        }
        present[label] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::InvalidParameter("need >= 2 classes present"));
    }

    let standardizer = Standardizer::fit(x)?;
    let design = design_matrix(&standardizer.transform_matrix(x)?, intercept);
    let (k, d) = (class_count, design.cols());

    let mut cost_grad = |flat: &[f64]| -> Result<(f64, Vec<f64>)> {
        let theta = Mat::from_vec(k, d, flat.to_vec());
        let (cost, grad) = softmax_cost_grad(&theta, &design, y, lambda, intercept)?;
        Ok((cost, grad.data().to_vec()))
    };
    let result = gradient_descent(&mut cost_grad, vec![0.0; k * d], cfg)?;
    Ok(LogRegModel {
        theta: Mat::from_vec(k, d, result.theta),
        lambda,
        intercept,
        class_count,
        standardizer,
    })
}

/// Class probabilities for one raw feature vector; nonnegative and summing
/// to one.
pub fn logreg_predict_proba(model: &LogRegModel, x: &[f64]) -> Result<Vec<f64>> {
    let z = model.standardizer.transform(x)?;
    let d = model.theta.cols();
    let expected = if model.intercept { d - 1 } else { d };
    if z.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: z.len(),
        });
    }
    let mut scores = vec![0.0; model.class_count];
    for (j, s) in scores.iter_mut().enumerate() {
        let row = model.theta.row(j);
        let mut acc: f64 = row[..z.len()].iter().zip(&z).map(|(&t, &v)| t * v).sum();
        if model.intercept {
            acc += row[d - 1];
        }
        *s = acc;
    }
    let zmax = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut denom = 0.0;
    for s in scores.iter_mut() {
        *s = libm::exp(*s - zmax);
        denom += *s;
    }
    scores.iter_mut().for_each(|s| *s /= denom);
    Ok(scores)
}

/// Predicted class = argmax probability (first class wins ties).
pub fn logreg_predict(model: &LogRegModel, x: &[f64]) -> Result<usize> {
    let p = logreg_predict_proba(model, x)?;
    Ok(argmax(&p))
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
