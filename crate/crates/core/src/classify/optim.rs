//! Batch gradient descent with adaptive learning-rate halving and an
//! optional periodic finite-difference gradient check.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Shared training knobs for the gradient-descent based models.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    /// Initial step size; halved whenever a step would increase the cost
    /// and restored after three consecutive accepted steps.
    pub learning_rate: f64,
    /// Iteration budget (accepted and rejected steps both count).
    pub max_iters: usize,
    /// Stop when the gradient max-norm drops below this.
    pub tol: f64,
    /// Seed for weight initialization and gradient-check sampling.
    pub seed: u64,
    /// Check analytic gradients against central differences every this
    /// many iterations on up to 20 random coordinates; 0 disables.
    pub grad_check_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            max_iters: 500,
            tol: 1e-6,
            seed: 0,
            grad_check_every: 0,
        }
    }
}

/// Outcome of a descent run.
#[derive(Clone, Debug, PartialEq)]
pub struct DescentResult {
    pub theta: Vec<f64>,
    /// Cost at the start plus after every accepted step; non-increasing.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Step size for central differences in gradient checks.
pub const GRAD_CHECK_H: f64 = 1e-5;

/// Abort threshold for the periodic gradient check.
pub const GRAD_CHECK_TOL: f64 = 1e-4;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(libm::fabs(x)))
}

fn check_gradient(
    f: &mut impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    theta: &[f64],
    grad: &[f64],
    rng: &mut ChaCha8Rng,
    iteration: usize,
) -> Result<()> {
    let dims = theta.len();
    let samples = dims.min(20);
    let mut probe = theta.to_vec();
    for _ in 0..samples {
        let j = rng.gen_range(0..dims);
        let orig = probe[j];
        probe[j] = orig + GRAD_CHECK_H;
        let (up, _) = f(&probe)?;
        probe[j] = orig - GRAD_CHECK_H;
        let (down, _) = f(&probe)?;
        probe[j] = orig;
        let numeric = (up - down) / (2.0 * GRAD_CHECK_H);
        let analytic = grad[j];
        // near-zero slopes drown in finite-difference noise; skip them
        if libm::fabs(numeric) < 1e-7 && libm::fabs(analytic) < 1e-7 {
            continue;
        }
        let relative_error =
            libm::fabs(numeric - analytic) / (libm::fabs(numeric) + libm::fabs(analytic));
        if relative_error > GRAD_CHECK_TOL {
            return Err(Error::GradientCheckFailed {
                iteration,
                relative_error,
            });
        }
    }
    Ok(())
}

/// Minimizes `f` starting from `theta0`.
///
/// Proposed steps that would raise the cost are rejected and halve the
/// learning rate; three consecutive accepted steps restore it. Stops when
/// the gradient max-norm is below `cfg.tol` or the iteration budget runs
/// out. Fails with [`Error::NonFiniteCost`] if the cost cannot be kept
/// finite.
pub fn gradient_descent(
    f: &mut impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    theta0: Vec<f64>,
    cfg: &TrainConfig,
) -> Result<DescentResult> {
    if !(cfg.learning_rate > 0.0) || !cfg.learning_rate.is_finite() {
        return Err(Error::InvalidParameter(
            "learning_rate must be positive and finite",
        ));
    }
    let mut check_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut theta = theta0;
    let (mut cost, mut grad) = f(&theta)?;
    if !cost.is_finite() {
        return Err(Error::NonFiniteCost { iteration: 0 });
    }
    let mut trace = alloc::vec![cost];
    let mut lr = cfg.learning_rate;
    let mut streak = 0usize;
    let mut iterations = 0usize;

    for it in 1..=cfg.max_iters {
        iterations = it;
        if inf_norm(&grad) < cfg.tol {
            iterations = it - 1;
            break;
        }
        if cfg.grad_check_every > 0 && it % cfg.grad_check_every == 0 {
            check_gradient(f, &theta, &grad, &mut check_rng, it)?;
        }
        let candidate: Vec<f64> = theta
            .iter()
            .zip(&grad)
            .map(|(t, g)| t - lr * g)
            .collect();
        let (c_new, g_new) = f(&candidate)?;
        if c_new.is_finite() && c_new <= cost {
            theta = candidate;
            cost = c_new;
            grad = g_new;
            trace.push(cost);
            streak += 1;
            if streak >= 3 {
                lr = cfg.learning_rate;
                streak = 0;
            }
        } else {
            lr *= 0.5;
            streak = 0;
            if lr < 1e-300 {
                return Err(Error::NonFiniteCost { iteration: it });
            }
        }
    }
    Ok(DescentResult {
        theta,
        trace,
        iterations,
    })
}
