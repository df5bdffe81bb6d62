//! Labeled-sample manifests, stratified splitting, and quadrant-crop
//! augmentation.
//!
//! Image decoding lives in the companion CLI crate; here an image is just
//! three floating-point planes in `[0, 255]`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Minimum width/height for the 4-level decomposition paths.
pub const MIN_DIMENSION: usize = 32;

/// Decoded 8-bit RGB raster promoted to floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    planes: [Mat; 3],
}

/// Plane names, in slot order.
pub const CHANNEL_NAMES: [&str; 3] = ["R", "G", "B"];

impl ImageRgb {
    /// Builds an image from three `height x width` planes.
    ///
    /// Fails when a dimension is below [`MIN_DIMENSION`], the planes
    /// disagree in shape, or any intensity is outside `[0, 255]`.
    pub fn new(planes: [Mat; 3]) -> Result<Self> {
        let (height, width) = planes[0].shape();
        if width < MIN_DIMENSION || height < MIN_DIMENSION {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min: MIN_DIMENSION,
            });
        }
        for p in &planes {
            if p.shape() != (height, width) {
                return Err(Error::ShapeMismatch {
                    expected: (height, width),
                    got: p.shape(),
                });
            }
            if !p.iter().all(|v| v.is_finite() && (0.0..=255.0).contains(v)) {
                return Err(Error::InvalidParameter(
                    "intensities must be finite and within [0, 255]",
                ));
            }
        }
        Ok(ImageRgb {
            width,
            height,
            planes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Channel plane (0 = R, 1 = G, 2 = B).
    pub fn channel(&self, c: usize) -> &Mat {
        &self.planes[c]
    }
}

/// One labeled sample: where it lives, what class it is, and an opaque id.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub label: usize,
}

/// A labeled dataset listing.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub class_names: Vec<String>,
}

impl DatasetManifest {
    /// Validates the manifest invariants: at least two classes, every
    /// label in range, ids unique.
    pub fn validate(&self) -> Result<()> {
        let k = self.class_names.len();
        if k < 2 {
            return Err(Error::InvalidParameter("need at least 2 classes"));
        }
        for e in &self.entries {
            if e.label >= k {
                return Err(Error::LabelOutOfRange { label: e.label, k });
            }
        }
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("sample ids must be unique"));
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }
}

/// Stratified split parameters. The same seed always yields the same split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Splits a manifest into train and test parts, stratified by class.
///
/// Per-class train counts equal `round(train_fraction * class_size)`,
/// clamped so neither side is empty; this keeps every class within one
/// sample of the exact fraction. Entries keep their original manifest
/// order inside each part.
pub fn stratified_split(
    manifest: &DatasetManifest,
    spec: &SplitSpec,
) -> Result<(DatasetManifest, DatasetManifest)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidParameter("train_fraction must be in (0, 1)"));
    }
    manifest.validate()?;
    let k = manifest.class_count();
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    for (i, e) in manifest.entries.iter().enumerate() {
        by_class[e.label].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = alloc::vec![false; manifest.entries.len()];
    for members in &mut by_class {
        let size = members.len();
        let want = libm::round(spec.train_fraction * size as f64) as usize;
        let take = want.clamp(1, size - 1);
        members.shuffle(&mut rng);
        for &idx in members.iter().take(take) {
            in_train[idx] = true;
        }
    }

    let pick = |keep: bool| DatasetManifest {
        entries: manifest
            .entries
            .iter()
            .enumerate()
            .filter(|(i, _)| in_train[*i] == keep)
            .map(|(_, e)| e.clone())
            .collect(),
        class_names: manifest.class_names.clone(),
    };
    Ok((pick(true), pick(false)))
}

/// The four half-size crops spanning from the image center to each corner
/// (top-left, top-right, bottom-left, bottom-right), plus the original
/// when `include_original` is set.
pub fn augment_quadrant_crops(image: &ImageRgb, include_original: bool) -> Result<Vec<ImageRgb>> {
    let (h, w) = (image.height(), image.width());
    if h < 2 * MIN_DIMENSION || w < 2 * MIN_DIMENSION {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 2 * MIN_DIMENSION,
        });
    }
    let (ch, cw) = (h / 2, w / 2);
    let corners = [(0, 0), (0, w - cw), (h - ch, 0), (h - ch, w - cw)];
    let mut out = Vec::with_capacity(if include_original { 5 } else { 4 });
    for (r0, c0) in corners {
        let planes = [0, 1, 2].map(|p| {
            let src = image.channel(p);
            Mat::from_fn(ch, cw, |r, c| src.get(r0 + r, c0 + c))
        });
        out.push(ImageRgb::new(planes)?);
    }
    if include_original {
        out.push(image.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;

    fn manifest(classes: usize, per_class: usize) -> DatasetManifest {
        let mut entries = Vec::new();
        for c in 0..classes {
            for i in 0..per_class {
                entries.push(ManifestEntry {
                    id: format!("c{c}_{i}"),
                    path: format!("img/c{c}_{i}.png"),
                    label: c,
                });
            }
        }
        DatasetManifest {
            entries,
            class_names: (0..classes).map(|c| format!("cam{c}")).collect(),
        }
    }

    fn gray(h: usize, w: usize, v: f64) -> ImageRgb {
        ImageRgb::new([
            Mat::from_fn(h, w, |_, _| v),
            Mat::from_fn(h, w, |_, _| v),
            Mat::from_fn(h, w, |_, _| v),
        ])
        .unwrap()
    }

    #[test]
    fn split_matches_protocol_counts() {
        let m = manifest(10, 275);
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 7,
        };
        let (train, test) = stratified_split(&m, &spec).unwrap();
        assert_eq!(train.entries.len(), 2200);
        assert_eq!(test.entries.len(), 550);
        for c in 0..10 {
            assert_eq!(train.entries.iter().filter(|e| e.label == c).count(), 220);
            assert_eq!(test.entries.iter().filter(|e| e.label == c).count(), 55);
        }
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let m = manifest(2, 10);
        let spec = SplitSpec {
            train_fraction: 0.5,
            seed: 99,
        };
        let (tr1, te1) = stratified_split(&m, &spec).unwrap();
        let (tr2, te2) = stratified_split(&m, &spec).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        for c in 0..2 {
            assert_eq!(tr1.entries.iter().filter(|e| e.label == c).count(), 5);
        }
        let mut all: Vec<&str> = tr1
            .entries
            .iter()
            .chain(te1.entries.iter())
            .map(|e| e.id.as_str())
            .collect();
        all.sort_unstable();
        assert_eq!(all.len(), m.entries.len());
        assert!(all.windows(2).all(|w| w[0] != w[1]));

        let other = stratified_split(
            &m,
            &SplitSpec {
                train_fraction: 0.5,
                seed: 100,
            },
        )
        .unwrap();
        assert_ne!(other.0, tr1, "different seeds should differ");
    }

    #[test]
    fn split_rejects_tiny_classes() {
        let mut m = manifest(2, 3);
        m.entries.retain(|e| e.label == 0 || e.id == "c1_0");
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 1,
        };
        assert!(matches!(
            stratified_split(&m, &spec),
            Err(Error::ClassTooSmall { class: 1, count: 1 })
        ));
    }

    #[test]
    fn quadrant_crops_are_pixel_exact() {
        let img = ImageRgb::new([
            Mat::from_fn(100, 100, |r, c| ((r * 100 + c) % 256) as f64),
            Mat::from_fn(100, 100, |r, c| ((r + c) % 256) as f64),
            Mat::from_fn(100, 100, |r, c| ((r * 3 + c * 7) % 256) as f64),
        ])
        .unwrap();
        let crops = augment_quadrant_crops(&img, false).unwrap();
        assert_eq!(crops.len(), 4);
        let offsets = [(0, 0), (0, 50), (50, 0), (50, 50)];
        for (crop, (r0, c0)) in crops.iter().zip(offsets) {
            assert_eq!((crop.height(), crop.width()), (50, 50));
            for p in 0..3 {
                for r in (0..50).step_by(7) {
                    for c in (0..50).step_by(7) {
                        assert_eq!(
                            crop.channel(p).get(r, c),
                            img.channel(p).get(r0 + r, c0 + c)
                        );
                    }
                }
            }
        }
        let with_orig = augment_quadrant_crops(&img, true).unwrap();
        assert_eq!(with_orig.len(), 5);
        assert_eq!(&with_orig[4], &img);
    }

    #[test]
    fn augmentation_cardinality_matches_protocol() {
        // 2750 originals -> 11000 crops (or 13750 keeping originals)
        let per_image_off = augment_quadrant_crops(&gray(64, 64, 128.0), false)
            .unwrap()
            .len();
        let per_image_on = augment_quadrant_crops(&gray(64, 64, 128.0), true)
            .unwrap()
            .len();
        assert_eq!(2750 * per_image_off, 11000);
        assert_eq!(2750 * per_image_on, 13750);
    }

    #[test]
    fn crops_require_64px() {
        let img = gray(63, 100, 1.0);
        assert!(matches!(
            augment_quadrant_crops(&img, false),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn image_invariants_enforced() {
        assert!(matches!(
            ImageRgb::new([Mat::zeros(2, 2), Mat::zeros(2, 2), Mat::zeros(2, 2)]),
            Err(Error::ImageTooSmall { .. })
        ));
        let bad = Mat::from_fn(32, 32, |_, _| 300.0);
        assert!(ImageRgb::new([Mat::zeros(32, 32), Mat::zeros(32, 32), bad]).is_err());
        let mismatched = Mat::zeros(32, 33);
        assert!(matches!(
            ImageRgb::new([Mat::zeros(32, 32), Mat::zeros(32, 32), mismatched]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn manifest_validation() {
        let mut m = manifest(3, 2);
        m.entries[0].id = m.entries[1].id.to_string();
        assert!(m.validate().is_err());
        let mut m = manifest(3, 2);
        m.entries[0].label = 9;
        assert!(matches!(
            m.validate(),
            Err(Error::LabelOutOfRange { label: 9, k: 3 })
        ));
    }
}
