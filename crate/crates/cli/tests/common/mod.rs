//! Shared helpers for the integration suites: a synthetic "camera class"
//! image generator and binary-invocation utilities.
//!
//! Each synthetic class stamps its own fixed 3x3 kernel onto per-image
//! white noise before adding it to a smooth random background, mimicking
//! how different camera pipelines shape sensor noise.

use std::path::Path;
use std::process::Command;

use camid_core::dataset::{DatasetManifest, ImageRgb, ManifestEntry};
use camid_core::mat::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-class noise-shaping kernels (unit L2 mass). The rotation-invariant
/// LBP histogram cannot tell a kernel from its rotation, so the classes
/// differ in neighborhood correlation structure, not orientation: white,
/// isotropic blur, directional blur, and alternating-sign high frequency.
fn class_kernels() -> [[[f64; 3]; 3]; 4] {
    let h = 1.0 / 3.0f64.sqrt();
    let b = 1.0 / 3.0;
    [
        // white noise
        [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
        // isotropic blur
        [[b, b, b], [b, b, b], [b, b, b]],
        // directional blur
        [[0.0, 0.0, 0.0], [h, h, h], [0.0, 0.0, 0.0]],
        // checkerboard
        [[b, -b, b], [-b, b, -b], [b, -b, b]],
    ]
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// One synthetic photo of the given class.
pub fn synthetic_image(class: usize, size: usize, rng: &mut ChaCha8Rng) -> ImageRgb {
    let kernel = class_kernels()[class % 4];
    let planes = [0, 1, 2].map(|_| {
        // smooth background: a few random low-frequency waves
        let waves: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.gen_range(15.0..35.0),
                    rng.gen_range(0.5..3.5) * std::f64::consts::TAU / size as f64,
                    rng.gen_range(0.5..3.5) * std::f64::consts::TAU / size as f64,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let noise = Mat::from_fn(size, size, |_, _| gaussian(rng));
        Mat::from_fn(size, size, |r, c| {
            let mut v = 120.0;
            for &(amp, fr, fc, phase) in &waves {
                v += amp * (fr * r as f64 + fc * c as f64 + phase).sin();
            }
            let mut shaped = 0.0;
            for (ki, krow) in kernel.iter().enumerate() {
                for (kj, &kv) in krow.iter().enumerate() {
                    if kv == 0.0 {
                        continue;
                    }
                    let rr = (r + ki).saturating_sub(1).min(size - 1);
                    let cc = (c + kj).saturating_sub(1).min(size - 1);
                    shaped += kv * noise.get(rr, cc);
                }
            }
            (v + 16.0 * shaped).clamp(0.0, 255.0)
        })
    });
    ImageRgb::new(planes).expect("synthetic image is valid")
}

/// Generates `per_class` images for each of `classes` classes, in
/// class-major order, deterministically from the seed.
pub fn synthetic_dataset(
    classes: usize,
    per_class: usize,
    size: usize,
    seed: u64,
) -> Vec<(ImageRgb, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(classes * per_class);
    for class in 0..classes {
        for _ in 0..per_class {
            out.push((synthetic_image(class, size, &mut rng), class));
        }
    }
    out
}

/// Writes a synthetic dataset to `dir` as PNGs plus a manifest.
#[allow(dead_code)]
pub fn write_synthetic_dataset(
    dir: &Path,
    classes: usize,
    per_class: usize,
    size: usize,
    seed: u64,
) -> std::path::PathBuf {
    let images = synthetic_dataset(classes, per_class, size, seed);
    let mut entries = Vec::new();
    for (i, (image, label)) in images.iter().enumerate() {
        let name = format!("img_{label}_{i}.png");
        camid::imageio::encode_png(image, &dir.join(&name)).unwrap();
        entries.push(ManifestEntry {
            id: format!("img_{label}_{i}"),
            path: name,
            label: *label,
        });
    }
    let manifest = DatasetManifest {
        entries,
        class_names: (0..classes).map(|c| format!("camera{c}")).collect(),
    };
    let path = dir.join("manifest.csv");
    camid::manifest::save_manifest(&manifest, &path).unwrap();
    path
}

/// The compiled `camid` binary.
#[allow(dead_code)]
pub fn camid_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_camid"))
}

/// Runs a command, asserting success and returning stdout.
#[allow(dead_code)]
pub fn run_ok(cmd: &mut Command) -> String {
    let output = cmd.output().expect("spawn camid");
    assert!(
        output.status.success(),
        "command failed ({:?}):\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}
