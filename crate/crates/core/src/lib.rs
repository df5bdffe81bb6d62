//! Core primitives for content-based camera-model identification.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: every
//! operation that consumes randomness takes an explicit 64-bit seed, and
//! training loops are single-threaded with a fixed iteration order.
//!
//! Pipeline overview:
//!
//! 1. [`dataset`] — labeled manifests, stratified splits, quadrant-crop
//!    augmentation.
//! 2. [`wavelet`] — multilevel 2D fast wavelet transform (db8 and bior3.5
//!    filter banks), inverse transform, hard thresholding.
//! 3. [`dwd`] — 351-dimensional wavelet-domain statistics (subband moments,
//!    linear-predictor log errors, co-occurrence texture statistics).
//! 4. [`lbp`] — 30-dimensional rotation-invariant uniform local binary
//!    pattern histograms of denoising noise residuals.
//! 5. [`pca`] — principal component analysis with the projection-error
//!    identity used for component selection.
//! 6. [`classify`] — softmax regression, k-NN, and a one-hidden-layer
//!    neural network trained by backpropagation with gradient checking.
//! 7. [`eval`] — confusion matrices, per-class accuracies, grid selection.

#![cfg_attr(not(test), no_std)]
// indexed loops are the house style for the matrix kernels, and
// `!(x >= 0.0)` is how NaN-rejecting bound checks are written here
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classify;
pub mod dataset;
pub mod dwd;
pub mod error;
pub mod eval;
pub mod lbp;
pub mod mat;
pub mod pca;
pub mod wavelet;

pub use error::{Error, Result};
pub use mat::Mat;
