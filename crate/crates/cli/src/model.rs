//! Versioned JSON model file: extraction header, raw-feature
//! standardizer, optional PCA block, and the classifier weights.

use std::path::Path;

use camid_core::classify::{
    knn_predict, logreg_predict, logreg_predict_proba, mlp_predict, mlp_predict_proba, KnnModel,
    LogRegModel, MlpModel, Standardizer,
};
use camid_core::pca::PcaModel;
use serde::{Deserialize, Serialize};

use crate::cache::CacheHeader;
use crate::error::{CliError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Classifier weights, tagged by type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "lowercase")]
pub enum ClassifierModel {
    Logreg(LogRegModel),
    Knn(KnnModel),
    Mlp(MlpModel),
}

impl ClassifierModel {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierModel::Logreg(_) => "logreg",
            ClassifierModel::Knn(_) => "knn",
            ClassifierModel::Mlp(_) => "mlp",
        }
    }
}

/// The full inference pipeline persisted to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    /// Header of the cache the model was trained from; predict-time
    /// caches must be parameter-compatible.
    pub extraction: CacheHeader,
    /// Raw-feature standardizer applied before the optional PCA.
    pub standardizer: Standardizer,
    pub pca: Option<PcaModel>,
    pub classifier: ClassifierModel,
    pub class_names: Vec<String>,
}

impl ModelFile {
    /// Raw cache row -> classifier input features.
    fn project(&self, raw: &[f64]) -> Result<Vec<f64>> {
        let z = self.standardizer.transform(raw)?;
        Ok(match &self.pca {
            Some(p) => p.transform(&z)?,
            None => z,
        })
    }

    /// Predicted class index for one raw feature vector.
    pub fn predict(&self, raw: &[f64]) -> Result<usize> {
        let x = self.project(raw)?;
        Ok(match &self.classifier {
            ClassifierModel::Logreg(m) => logreg_predict(m, &x)?,
            ClassifierModel::Knn(m) => knn_predict(m, &x)?,
            ClassifierModel::Mlp(m) => mlp_predict(m, &x)?,
        })
    }

    /// Class probabilities; k-NN has none.
    pub fn predict_proba(&self, raw: &[f64]) -> Result<Option<Vec<f64>>> {
        let x = self.project(raw)?;
        Ok(match &self.classifier {
            ClassifierModel::Logreg(m) => Some(logreg_predict_proba(m, &x)?),
            ClassifierModel::Mlp(m) => Some(mlp_predict_proba(m, &x)?),
            ClassifierModel::Knn(_) => None,
        })
    }
}

pub fn save_model(model: &ModelFile, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(model).expect("model serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let model: ModelFile = serde_json::from_str(&text).map_err(|e| CliError::BadInput {
        what: "model file",
        message: format!("{}: {e}", path.display()),
    })?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(CliError::BadInput {
            what: "model file",
            message: format!(
                "{}: format version {} (expected {})",
                path.display(),
                model.format_version,
                MODEL_FORMAT_VERSION
            ),
        });
    }
    Ok(model)
}
