//! The three classifiers and their shared optimization machinery.
//!
//! All three standardize their input features internally (z-scores from
//! training statistics, zero-variance features dropped), because both
//! k-NN distances and gradient descent are scale-sensitive. Training is
//! single-threaded and fully determined by the data and the seed.

pub mod knn;
pub mod mlp;
pub mod optim;
pub mod softmax;
pub mod standardize;

pub use knn::{knn_fit, knn_predict, KnnModel};
pub use mlp::{mlp_cost_grad, mlp_predict, mlp_predict_proba, mlp_train, MlpModel};
pub use optim::{gradient_descent, DescentResult, TrainConfig};
pub use softmax::{
    logreg_predict, logreg_predict_proba, logreg_train, logreg_train_opts, softmax_cost_grad,
    LogRegModel,
};
pub use standardize::Standardizer;
