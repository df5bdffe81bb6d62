//! One-hidden-layer neural network with sigmoid activations, trained by
//! backpropagation and batch gradient descent.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::optim::{gradient_descent, TrainConfig};
use crate::classify::softmax::argmax;
use crate::classify::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::mat::Mat;

/// Trained network. Layer weights carry the bias in column 0, so the
/// shapes are `hidden x (n+1)` and `K x (hidden+1)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpModel {
    pub theta1: Mat,
    pub theta2: Mat,
    pub hidden_units: usize,
    pub lambda: f64,
    pub class_count: usize,
    pub standardizer: Standardizer,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}

/// Numerically safe `ln(1 + e^t)`.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t
    } else if t < -30.0 {
        libm::exp(t)
    } else {
        libm::log1p(libm::exp(t))
    }
}

/// Per-unit cross-entropy cost over the sigmoid outputs, plus
/// backpropagated gradients. `y_onehot` is `m x K`; bias columns are not
/// regularized. The cost is evaluated through softplus identities so
/// saturated units stay finite.
pub fn mlp_cost_grad(
    theta1: &Mat,
    theta2: &Mat,
    x: &Mat,
    y_onehot: &Mat,
    lambda: f64,
) -> Result<(f64, Mat, Mat)> {
    let (s2, n1) = theta1.shape();
    let (k, s21) = theta2.shape();
    let (m, n) = x.shape();
    if n1 != n + 1 {
        return Err(Error::ShapeMismatch {
            expected: (s2, n + 1),
            got: theta1.shape(),
        });
    }
    if s21 != s2 + 1 {
        return Err(Error::ShapeMismatch {
            expected: (k, s2 + 1),
            got: theta2.shape(),
        });
    }
    if y_onehot.shape() != (m, k) {
        return Err(Error::ShapeMismatch {
            expected: (m, k),
            got: y_onehot.shape(),
        });
    }

    let mf = m as f64;
    let mut cost = 0.0;
    let mut grad1 = Mat::zeros(s2, n + 1);
    let mut grad2 = Mat::zeros(k, s2 + 1);
    let mut a2 = vec![0.0; s2];
    let mut z3 = vec![0.0; k];
    let mut delta3 = vec![0.0; k];
    let mut delta2 = vec![0.0; s2];

    for i in 0..m {
        let xi = x.row(i);
        for (j, a) in a2.iter_mut().enumerate() {
            let row = theta1.row(j);
            let z: f64 = row[0] + row[1..].iter().zip(xi).map(|(&t, &v)| t * v).sum::<f64>();
            *a = sigmoid(z);
        }
        for (j, z) in z3.iter_mut().enumerate() {
            let row = theta2.row(j);
            *z = row[0] + row[1..].iter().zip(&a2).map(|(&t, &v)| t * v).sum::<f64>();
        }
        for j in 0..k {
            let yj = y_onehot.get(i, j);
            // y ln(a) + (1-y) ln(1-a) = -softplus(-z) - (1-y) z
            cost += softplus(-z3[j]) + (1.0 - yj) * z3[j];
            delta3[j] = sigmoid(z3[j]) - yj;
        }

        for (j, d) in delta2.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (c, d3) in delta3.iter().enumerate() {
                acc += theta2.get(c, j + 1) * d3;
            }
            *d = acc * a2[j] * (1.0 - a2[j]);
        }

        for (j, &d3) in delta3.iter().enumerate() {
            let row = grad2.row_mut(j);
            row[0] += d3;
            for (g, &a) in row[1..].iter_mut().zip(&a2) {
                *g += d3 * a;
            }
        }
        for (j, &d2) in delta2.iter().enumerate() {
            let row = grad1.row_mut(j);
            row[0] += d2;
            for (g, &v) in row[1..].iter_mut().zip(xi) {
                *g += d2 * v;
            }
        }
    }

    cost /= mf;
    grad1.data_mut().iter_mut().for_each(|g| *g /= mf);
    grad2.data_mut().iter_mut().for_each(|g| *g /= mf);

    let mut reg = 0.0;
    for j in 0..s2 {
        for c in 1..=n {
            let t = theta1.get(j, c);
            reg += t * t;
            grad1.set(j, c, grad1.get(j, c) + lambda / mf * t);
        }
    }
    for j in 0..k {
        for c in 1..=s2 {
            let t = theta2.get(j, c);
            reg += t * t;
            grad2.set(j, c, grad2.get(j, c) + lambda / mf * t);
        }
    }
    cost += lambda / (2.0 * mf) * reg;
    Ok((cost, grad1, grad2))
}

/// Glorot-style uniform initialization bound `sqrt(6 / (fan_in + fan_out))`.
fn init_epsilon(fan_in: usize, fan_out: usize) -> f64 {
    libm::sqrt(6.0 / (fan_in + fan_out) as f64)
}

/// Trains the network. Weights start uniform in `[-eps, eps]` (seeded);
/// when `cfg.grad_check_every > 0` the descent verifies backpropagation
/// against central differences at that cadence and aborts on disagreement.
pub fn mlp_train(
    x: &Mat,
    y: &[usize],
    class_count: usize,
    hidden_units: usize,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<MlpModel> {
    if hidden_units == 0 {
        return Err(Error::InvalidParameter("hidden_units must be >= 1"));
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
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
    let z = standardizer.transform_matrix(x)?;
    let (m, n) = z.shape();
    let k = class_count;
    let mut y_onehot = Mat::zeros(m, k);
    for (i, &label) in y.iter().enumerate() {
        y_onehot.set(i, label, 1.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eps1 = init_epsilon(n, hidden_units);
    let eps2 = init_epsilon(hidden_units, k);
    let len1 = hidden_units * (n + 1);
    let len2 = k * (hidden_units + 1);
    let mut theta0 = Vec::with_capacity(len1 + len2);
    for _ in 0..len1 {
        theta0.push(rng.gen_range(-eps1..eps1));
    }
    for _ in 0..len2 {
        theta0.push(rng.gen_range(-eps2..eps2));
    }

    let mut cost_grad = |flat: &[f64]| -> Result<(f64, Vec<f64>)> {
        let theta1 = Mat::from_vec(hidden_units, n + 1, flat[..len1].to_vec());
        let theta2 = Mat::from_vec(k, hidden_units + 1, flat[len1..].to_vec());
        let (cost, g1, g2) = mlp_cost_grad(&theta1, &theta2, &z, &y_onehot, lambda)?;
        let mut grad = Vec::with_capacity(len1 + len2);
        grad.extend_from_slice(g1.data());
        grad.extend_from_slice(g2.data());
        Ok((cost, grad))
    };
    let result = gradient_descent(&mut cost_grad, theta0, cfg)?;
    Ok(MlpModel {
        theta1: Mat::from_vec(hidden_units, n + 1, result.theta[..len1].to_vec()),
        theta2: Mat::from_vec(k, hidden_units + 1, result.theta[len1..].to_vec()),
        hidden_units,
        lambda,
        class_count,
        standardizer,
    })
}

/// Raw sigmoid output activations for one raw feature vector.
pub fn mlp_activations(model: &MlpModel, x: &[f64]) -> Result<Vec<f64>> {
    let z = model.standardizer.transform(x)?;
    if z.len() + 1 != model.theta1.cols() {
        return Err(Error::DimensionMismatch {
            expected: model.theta1.cols() - 1,
            got: z.len(),
        });
    }
    let a2: Vec<f64> = (0..model.hidden_units)
        .map(|j| {
            let row = model.theta1.row(j);
            sigmoid(row[0] + row[1..].iter().zip(&z).map(|(&t, &v)| t * v).sum::<f64>())
        })
        .collect();
    Ok((0..model.class_count)
        .map(|j| {
            let row = model.theta2.row(j);
            sigmoid(row[0] + row[1..].iter().zip(&a2).map(|(&t, &v)| t * v).sum::<f64>())
        })
        .collect())
}

/// Output activations normalized to sum to one.
pub fn mlp_predict_proba(model: &MlpModel, x: &[f64]) -> Result<Vec<f64>> {
    let mut a = mlp_activations(model, x)?;
    let total: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= total);
    Ok(a)
}

/// Predicted class = argmax activation.
pub fn mlp_predict(model: &MlpModel, x: &[f64]) -> Result<usize> {
    Ok(argmax(&mlp_activations(model, x)?))
}
