//! PCA oracle checks: an independent power-iteration eigensolver, the
//! reconstruction-optimality property, and fit-transform idempotence.

use camid_core::mat::Mat;
use camid_core::pca::{pca_fit, PcaTarget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mat(seed: u64, m: usize, n: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Mat::from_fn(m, n, |_, _| rng.gen_range(-1.5..1.5))
}

fn centered(x: &Mat) -> Mat {
    let (m, n) = x.shape();
    let mut mean = vec![0.0; n];
    for r in 0..m {
        for (acc, &v) in mean.iter_mut().zip(x.row(r)) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    Mat::from_fn(m, n, |r, c| x.get(r, c) - mean[c])
}

/// Brute-force symmetric eigensolver: power iteration with deflation.
fn power_eigh(a: &Mat, count: usize, iters: usize, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = a.clone();
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for _ in 0..count {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..iters {
            let next = work.matvec(&v).unwrap();
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = next.iter().map(|x| x / norm).collect();
        }
        let av = work.matvec(&v).unwrap();
        let lambda: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        for r in 0..n {
            for c in 0..n {
                work.set(r, c, work.get(r, c) - lambda * v[r] * v[c]);
            }
        }
        values.push(lambda);
        vectors.push(v);
    }
    (values, vectors)
}

#[test]
fn eigenpairs_match_power_iteration_oracle() {
    let x = random_mat(50, 50, 10);
    let model = pca_fit(&x, PcaTarget::Components(5)).unwrap();
    let scatter = centered(&x).xtx();
    let (values, vectors) = power_eigh(&scatter, 5, 30_000, 7);
    for j in 0..5 {
        let rel = (model.eigenvalues[j] - values[j]).abs() / values[j];
        assert!(rel < 1e-6, "eigenvalue {j}: {} vs {}", model.eigenvalues[j], values[j]);
        let fit: Vec<f64> = (0..10).map(|r| model.basis.get(r, j)).collect();
        let same: f64 = fit
            .iter()
            .zip(&vectors[j])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let flipped: f64 = fit
            .iter()
            .zip(&vectors[j])
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        assert!(
            same.min(flipped) < 1e-6,
            "eigenvector {j} differs by {}",
            same.min(flipped)
        );
    }
}

#[test]
fn pca_beats_random_rank_k_projections() {
    let x = random_mat(51, 40, 8);
    let k = 3;
    let model = pca_fit(&x, PcaTarget::Components(k)).unwrap();
    let pca_err = model.projection_error(&x).unwrap().direct;
    let xc = centered(&x);

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..100 {
        // random orthonormal 8 x 3 basis by Gram-Schmidt on Gaussians
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < k {
            let mut v: Vec<f64> = (0..8)
                .map(|_| {
                    // Box-Muller keeps the direction distribution isotropic
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    (-2.0 * u1.ln()).sqrt() * u2.cos()
                })
                .collect();
            for u in &cols {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        let q = Mat::from_fn(8, k, |r, c| cols[c][r]);
        let mut err = 0.0;
        for r in 0..xc.rows() {
            let proj = q.tr_matvec(xc.row(r)).unwrap();
            let recon = q.matvec(&proj).unwrap();
            for (a, b) in xc.row(r).iter().zip(&recon) {
                err += (a - b) * (a - b);
            }
        }
        assert!(
            pca_err <= err + 1e-9,
            "trial {trial}: PCA {pca_err} vs random {err}"
        );
    }
}

#[test]
fn refit_on_reconstruction_keeps_leading_eigenvalues() {
    let x = random_mat(52, 35, 9);
    let k = 4;
    let model = pca_fit(&x, PcaTarget::Components(k)).unwrap();

    // project and reconstruct, then refit
    let mut recon = Mat::zeros(x.rows(), x.cols());
    for r in 0..x.rows() {
        let p = model.transform(x.row(r)).unwrap();
        let back = model.basis.matvec(&p).unwrap();
        for c in 0..x.cols() {
            recon.set(r, c, model.mean[c] + back[c]);
        }
    }
    let refit = pca_fit(&recon, PcaTarget::Components(k)).unwrap();
    for j in 0..k {
        let rel = (model.eigenvalues[j] - refit.eigenvalues[j]).abs() / model.eigenvalues[j];
        assert!(rel < 1e-6, "eigenvalue {j}");
    }
}
