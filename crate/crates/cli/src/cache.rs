//! Feature cache file: a JSON header line describing what was extracted
//! and how, followed by CSV rows `id,label,v0,...`.
//!
//! Values are written with Rust's shortest round-trip float formatting,
//! so write-then-read reproduces every value exactly. The header records
//! the extraction parameters; prediction refuses caches whose parameters
//! disagree with what the model was trained on.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Which feature family a cache holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Dwd,
    Lbp,
}

impl FeatureSet {
    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Dwd => "dwd",
            FeatureSet::Lbp => "lbp",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            FeatureSet::Dwd => camid_core::dwd::DWD_DIM,
            FeatureSet::Lbp => camid_core::lbp::LBP_DIM,
        }
    }
}

/// Everything needed to reproduce the extraction bit-identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionParams {
    /// Denoising threshold; `None` means the per-image universal threshold.
    pub tau: Option<f64>,
    /// Wavelet decomposition depth.
    pub levels: usize,
    /// Co-occurrence quantization depth (DWD only; recorded always).
    pub gray_levels: usize,
    /// Co-occurrence offset (DWD only; recorded always).
    pub offset: (isize, isize),
    /// Quadrant-crop augmentation applied during extraction.
    pub augmented: bool,
    /// Originals kept alongside the four crops.
    pub include_original: bool,
}

/// Cache header (first line of the file, as JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    pub feature_set: FeatureSet,
    pub dimension: usize,
    pub params: ExtractionParams,
    pub class_names: Vec<String>,
}

impl CacheHeader {
    /// Parameters that change the meaning of a feature vector (the
    /// augmentation flags only change which rows exist, so a model
    /// trained on an augmented cache may score an unaugmented one).
    pub fn compatible_with(&self, other: &CacheHeader) -> std::result::Result<(), String> {
        if self.feature_set != other.feature_set {
            return Err(format!(
                "feature set {} vs {}",
                self.feature_set.name(),
                other.feature_set.name()
            ));
        }
        if self.dimension != other.dimension {
            return Err(format!("dimension {} vs {}", self.dimension, other.dimension));
        }
        if self.params.tau != other.params.tau {
            return Err(format!("tau {:?} vs {:?}", self.params.tau, other.params.tau));
        }
        if self.params.levels != other.params.levels {
            return Err(format!(
                "levels {} vs {}",
                self.params.levels, other.params.levels
            ));
        }
        if self.params.gray_levels != other.params.gray_levels {
            return Err(format!(
                "gray levels {} vs {}",
                self.params.gray_levels, other.params.gray_levels
            ));
        }
        if self.params.offset != other.params.offset {
            return Err(format!(
                "offset {:?} vs {:?}",
                self.params.offset, other.params.offset
            ));
        }
        Ok(())
    }
}

/// One cached sample; `label` is `None` for unlabeled rows (written `?`).
#[derive(Clone, Debug, PartialEq)]
pub struct CacheRow {
    pub id: String,
    pub label: Option<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureCache {
    pub header: CacheHeader,
    pub rows: Vec<CacheRow>,
}

impl FeatureCache {
    /// Splits into a feature matrix over the labeled rows plus their
    /// labels and ids.
    pub fn labeled_matrix(&self) -> (camid_core::Mat, Vec<usize>, Vec<String>) {
        let labeled: Vec<&CacheRow> = self.rows.iter().filter(|r| r.label.is_some()).collect();
        let mut x = camid_core::Mat::zeros(labeled.len(), self.header.dimension);
        let mut y = Vec::with_capacity(labeled.len());
        let mut ids = Vec::with_capacity(labeled.len());
        for (i, row) in labeled.iter().enumerate() {
            x.row_mut(i).copy_from_slice(&row.values);
            y.push(row.label.unwrap());
            ids.push(row.id.clone());
        }
        (x, y, ids)
    }
}

pub fn save_cache(cache: &FeatureCache, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string(&cache.header).expect("header serializes");
    text.push('\n');
    for row in &cache.rows {
        write!(text, "{}", csv_escape(&row.id)).unwrap();
        match row.label {
            Some(l) => write!(text, ",{l}").unwrap(),
            None => text.push_str(",?"),
        }
        for v in &row.values {
            write!(text, ",{v}").unwrap();
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn load_cache(path: &Path) -> Result<FeatureCache> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let mut lines = text.lines();
    let header_line = lines.next().ok_or_else(|| CliError::BadInput {
        what: "feature cache",
        message: format!("{}: empty file", path.display()),
    })?;
    let header: CacheHeader = serde_json::from_str(header_line).map_err(|e| CliError::BadInput {
        what: "feature cache",
        message: format!("{}: bad header: {e}", path.display()),
    })?;
    if header.format_version != CACHE_FORMAT_VERSION {
        return Err(CliError::BadInput {
            what: "feature cache",
            message: format!(
                "{}: format version {} (expected {})",
                path.display(),
                header.format_version,
                CACHE_FORMAT_VERSION
            ),
        });
    }

    let mut rows = Vec::new();
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(body.as_bytes());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::BadInput {
            what: "feature cache",
            message: format!("{}: {e}", path.display()),
        })?;
        if record.len() != header.dimension + 2 {
            return Err(CliError::BadInput {
                what: "feature cache",
                message: format!(
                    "{}: row `{}` has {} values (expected {})",
                    path.display(),
                    &record[0],
                    record.len().saturating_sub(2),
                    header.dimension
                ),
            });
        }
        let label = match record[1].trim() {
            "?" => None,
            s => Some(s.parse::<usize>().map_err(|_| CliError::BadInput {
                what: "feature cache",
                message: format!("{}: bad label `{s}`", path.display()),
            })?),
        };
        let values = (2..record.len())
            .map(|i| {
                record[i].parse::<f64>().map_err(|_| CliError::BadInput {
                    what: "feature cache",
                    message: format!("{}: bad value `{}`", path.display(), &record[i]),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(CacheRow {
            id: record[0].to_string(),
            label,
            values,
        });
    }
    Ok(FeatureCache { header, rows })
}

/// Quotes an id only when CSV requires it.
fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(set: FeatureSet) -> CacheHeader {
        CacheHeader {
            format_version: CACHE_FORMAT_VERSION,
            feature_set: set,
            dimension: 3,
            params: ExtractionParams {
                tau: None,
                levels: 4,
                gray_levels: 16,
                offset: (0, 1),
                augmented: false,
                include_original: false,
            },
            class_names: vec!["a".into(), "b".into()],
        }
    }

    #[test]
    fn roundtrip_preserves_values_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");
        let cache = FeatureCache {
            header: header(FeatureSet::Lbp),
            rows: vec![
                CacheRow {
                    id: "one".into(),
                    label: Some(0),
                    values: vec![0.1, 1.0 / 3.0, 2.5e-17],
                },
                CacheRow {
                    id: "two".into(),
                    label: None,
                    values: vec![f64::MIN_POSITIVE, -0.0, 123456789.12345679],
                },
            ],
        };
        save_cache(&cache, &path).unwrap();
        let back = load_cache(&path).unwrap();
        assert_eq!(cache.header, back.header);
        for (a, b) in cache.rows.iter().zip(&back.rows) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.label, b.label);
            for (x, y) in a.values.iter().zip(&b.values) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn wrong_row_width_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");
        let mut cache = FeatureCache {
            header: header(FeatureSet::Lbp),
            rows: vec![CacheRow {
                id: "x".into(),
                label: Some(1),
                values: vec![1.0, 2.0, 3.0],
            }],
        };
        cache.header.dimension = 4;
        save_cache(&cache, &path).unwrap();
        assert!(matches!(
            load_cache(&path),
            Err(CliError::BadInput { .. })
        ));
    }

    #[test]
    fn compatibility_ignores_augmentation_flags() {
        let a = header(FeatureSet::Lbp);
        let mut b = a.clone();
        b.params.augmented = true;
        b.params.include_original = true;
        assert!(a.compatible_with(&b).is_ok());
        let mut c = a.clone();
        c.params.tau = Some(3.0);
        assert!(a.compatible_with(&c).is_err());
        let mut d = a.clone();
        d.feature_set = FeatureSet::Dwd;
        assert!(a.compatible_with(&d).is_err());
    }
}
