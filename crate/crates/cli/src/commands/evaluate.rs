//! `camid eval`: join predictions with ground truth and render the
//! confusion matrix.

use std::collections::HashMap;
use std::path::Path;

use camid_core::eval::ConfusionMatrix;

use crate::cli::EvalArgs;
use crate::error::{CliError, Result};
use crate::manifest::load_manifest;
use crate::report::{render_csv, render_text};

/// Reads `fname,camera` rows (extra probability columns are ignored).
pub fn read_predictions(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::BadInput {
            what: "predictions",
            message: format!("{}: {e}", path.display()),
        })?;
    {
        let headers = reader.headers().map_err(|e| CliError::BadInput {
            what: "predictions",
            message: format!("{}: {e}", path.display()),
        })?;
        if headers.len() < 2 || &headers[0] != "fname" || &headers[1] != "camera" {
            return Err(CliError::BadInput {
                what: "predictions",
                message: format!("{}: header must start with `fname,camera`", path.display()),
            });
        }
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::BadInput {
            what: "predictions",
            message: format!("{}: {e}", path.display()),
        })?;
        rows.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(rows)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let manifest = load_manifest(&args.manifest)?;
    let predictions = read_predictions(&args.predictions)?;

    let truth: HashMap<&str, usize> = manifest
        .entries
        .iter()
        .map(|e| (e.id.as_str(), e.label))
        .collect();
    let class_index: HashMap<&str, usize> = manifest
        .class_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();

    let k = manifest.class_names.len();
    let mut cm = ConfusionMatrix::new(k).with_class_names(manifest.class_names.clone());
    for (fname, camera) in &predictions {
        // augmented rows carry an `#` suffix after the source id
        let source_id = fname.split('#').next().unwrap_or(fname);
        let &label = truth.get(source_id).ok_or_else(|| CliError::BadInput {
            what: "predictions",
            message: format!("sample `{fname}` is not in the manifest"),
        })?;
        let &pred = class_index
            .get(camera.as_str())
            .ok_or_else(|| CliError::BadInput {
                what: "predictions",
                message: format!("unknown class name `{camera}`"),
            })?;
        cm.add(label, pred)?;
    }

    print!("{}", render_text(&cm)?);
    if let Some(out) = &args.out {
        std::fs::write(out, render_csv(&cm)?)
            .map_err(|e| CliError::io(format!("writing {}", out.display()), e))?;
        println!("wrote report to {}", out.display());
    }
    Ok(())
}
