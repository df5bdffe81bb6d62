//! Principal component analysis over feature matrices.
//!
//! Fitting mean-centers by default, eigendecomposes the scatter matrix
//! (via the Gram matrix `Xc Xc^T` when there are fewer samples than
//! features, else the `n x n` scatter `Xc^T Xc`; the nonzero spectra
//! coincide) and keeps either a requested component count or the smallest
//! count whose discarded-eigenvalue mass is below a tolerance. Eigenvalues
//! are those of the unnormalized scatter, so the rank-k reconstruction
//! error in squared Frobenius norm equals the eigenvalue tail sum; both
//! sides of that identity are exposed by [`PcaModel::projection_error`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Scatter mass below which the data is considered degenerate.
const DEGENERATE_SCATTER: f64 = 1e-18;

/// Eigenvalue cutoff (relative to the largest) below which a Gram-route
/// eigenvector cannot be lifted reliably.
const RANK_TOL: f64 = 1e-12;

/// Component selection rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PcaTarget {
    /// Keep exactly this many components.
    Components(usize),
    /// Keep the smallest k with `sum_{j>k} lambda_j / sum_j lambda_j <= tol`.
    NormalizedTolerance(f64),
    /// Keep the smallest k with `sum_{j>k} lambda_j <= tol` (scale-dependent).
    AbsoluteTolerance(f64),
}

/// Fitted PCA basis.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcaModel {
    /// Training mean (all zeros when fitted uncentered).
    pub mean: Vec<f64>,
    /// Eigenvalues of the (centered) scatter matrix, descending, clamped
    /// to be nonnegative.
    pub eigenvalues: Vec<f64>,
    /// `n x k` orthonormal basis, one component per column.
    pub basis: Mat,
    /// Retained component count (`basis.cols()`).
    pub k: usize,
    /// Whether fitting subtracted the mean.
    pub centered: bool,
}

/// Both sides of the projection-error identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionError {
    /// Squared Frobenius norm of (centered data minus rank-k reconstruction).
    pub direct: f64,
    /// Sum of the discarded eigenvalues.
    pub eigenvalue_tail: f64,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns eigenvalues (unsorted) and eigenvectors as columns of `v`.
fn jacobi_eigh(a_in: &Mat) -> (Vec<f64>, Mat) {
    let n = a_in.rows();
    debug_assert_eq!(n, a_in.cols());
    let mut a = a_in.clone();
    let mut v = Mat::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 });
    if n == 0 {
        return (Vec::new(), v);
    }

    let frob: f64 = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let stop = (frob * 1e-15).max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if libm::sqrt(2.0 * off) <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if libm::fabs(apq) <= stop / (n as f64) {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - s * aiq);
                    a.set(i, q, s * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, c * apj - s * aqj);
                    a.set(q, j, s * apj + c * aqj);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    ((0..n).map(|i| a.get(i, i)).collect(), v)
}

/// Sorts eigenpairs descending and clamps tiny negative eigenvalues to zero.
fn sorted_eigh(a: &Mat) -> (Vec<f64>, Mat) {
    let (raw, v) = jacobi_eigh(a);
    let n = raw.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i].max(0.0)).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v.get(r, order[c]));
    (eigenvalues, vectors)
}

fn column_means(x: &Mat) -> Vec<f64> {
    let mut mean = vec![0.0; x.cols()];
    for r in 0..x.rows() {
        for (m, &v) in mean.iter_mut().zip(x.row(r)) {
            *m += v;
        }
    }
    let inv = 1.0 / x.rows() as f64;
    mean.iter_mut().for_each(|m| *m *= inv);
    mean
}

/// Positive sign convention: the largest-magnitude entry of each column is
/// made positive so fits are reproducible across eigensolver sign choices.
fn fix_column_signs(basis: &mut Mat) {
    for c in 0..basis.cols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..basis.rows() {
            let a = libm::fabs(basis.get(r, c));
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if basis.get(best, c) < 0.0 {
            for r in 0..basis.rows() {
                basis.set(r, c, -basis.get(r, c));
            }
        }
    }
}

/// Fits a centered PCA model.
pub fn pca_fit(x: &Mat, target: PcaTarget) -> Result<PcaModel> {
    pca_fit_with(x, target, true)
}

/// Fits a PCA model, optionally skipping mean centering (the scatter is
/// then taken around the origin).
pub fn pca_fit_with(x: &Mat, target: PcaTarget, centered: bool) -> Result<PcaModel> {
    let (m, n) = x.shape();
    if m < 2 || n == 0 {
        return Err(Error::InvalidParameter("need at least 2 samples and 1 feature"));
    }
    if !x.is_finite() {
        return Err(Error::InvalidParameter("features must be finite"));
    }
    let mean = if centered {
        column_means(x)
    } else {
        vec![0.0; n]
    };
    let xc = Mat::from_fn(m, n, |r, c| x.get(r, c) - mean[c]);
    let scatter_mass: f64 = xc.iter().map(|v| v * v).sum();
    if scatter_mass < DEGENERATE_SCATTER {
        return Err(Error::DegenerateData);
    }

    let stored = m.min(n);
    let (eigenvalues, basis_full, rank) = if m < n {
        // Gram route: eigenvectors u of Xc Xc^T lift to Xc^T u / sqrt(lambda)
        let (vals, u) = sorted_eigh(&xc.gram());
        let lmax = vals[0];
        let rank = vals.iter().take_while(|&&l| l > lmax * RANK_TOL).count();
        let mut basis = Mat::zeros(n, rank);
        for j in 0..rank {
            let uj: Vec<f64> = (0..m).map(|i| u.get(i, j)).collect();
            let col = xc.tr_matvec(&uj)?;
            let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
            for r in 0..n {
                basis.set(r, j, col[r] / norm);
            }
        }
        (vals, basis, rank)
    } else {
        let (vals, v) = sorted_eigh(&xc.xtx());
        let rank = vals.len();
        (vals, v, rank)
    };
    let eigenvalues: Vec<f64> = eigenvalues.into_iter().take(stored).collect();
    let total: f64 = eigenvalues.iter().sum();

    let k = match target {
        PcaTarget::Components(k) => {
            if k > rank {
                return Err(Error::InvalidParameter(
                    "requested more components than the data supports",
                ));
            }
            k
        }
        PcaTarget::NormalizedTolerance(tol) => {
            if !(tol >= 0.0) {
                return Err(Error::InvalidParameter("tolerance must be >= 0"));
            }
            smallest_k(&eigenvalues, tol * total).min(rank)
        }
        PcaTarget::AbsoluteTolerance(tol) => {
            if !(tol >= 0.0) {
                return Err(Error::InvalidParameter("tolerance must be >= 0"));
            }
            smallest_k(&eigenvalues, tol).min(rank)
        }
    };

    let mut basis = Mat::from_fn(n, k, |r, c| basis_full.get(r, c));
    fix_column_signs(&mut basis);
    Ok(PcaModel {
        mean,
        eigenvalues,
        basis,
        k,
        centered,
    })
}

/// Smallest k with `sum_{j>k} lambda_j <= budget`.
fn smallest_k(eigenvalues: &[f64], budget: f64) -> usize {
    let mut tail: f64 = eigenvalues.iter().sum();
    for (k, &l) in eigenvalues.iter().enumerate() {
        if tail <= budget {
            return k;
        }
        tail -= l;
    }
    eigenvalues.len()
}

impl PcaModel {
    /// Projects one feature vector: `basis^T (x - mean)`.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.len(),
            });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        self.basis.tr_matvec(&centered)
    }

    /// Projects every row of a feature matrix.
    pub fn transform_matrix(&self, x: &Mat) -> Result<Mat> {
        let mut out = Mat::zeros(x.rows(), self.k);
        for r in 0..x.rows() {
            let p = self.transform(x.row(r))?;
            out.row_mut(r).copy_from_slice(&p);
        }
        Ok(out)
    }

    /// Evaluates the projection-error identity on the fitted data: the
    /// squared Frobenius reconstruction error computed directly, and the
    /// eigenvalue tail sum it must equal.
    pub fn projection_error(&self, x: &Mat) -> Result<ProjectionError> {
        if x.cols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.cols(),
            });
        }
        let mut direct = 0.0;
        for r in 0..x.rows() {
            let centered: Vec<f64> = x.row(r).iter().zip(&self.mean).map(|(a, b)| a - b).collect();
            let proj = self.basis.tr_matvec(&centered)?;
            let recon = self.basis.matvec(&proj)?;
            for (c, rec) in centered.iter().zip(&recon) {
                let d = c - rec;
                direct += d * d;
            }
        }
        let eigenvalue_tail: f64 = self.eigenvalues.iter().skip(self.k).sum();
        Ok(ProjectionError {
            direct,
            eigenvalue_tail,
        })
    }
}
