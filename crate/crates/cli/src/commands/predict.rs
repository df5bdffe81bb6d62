//! `camid predict`: classify every cache row with a trained model and
//! write the submission-style CSV.

use std::fmt::Write as _;

use crate::cache::load_cache;
use crate::cli::PredictArgs;
use crate::error::{CliError, Result};
use crate::model::{load_model, ClassifierModel};

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let cache = load_cache(&args.cache)?;
    model
        .extraction
        .compatible_with(&cache.header)
        .map_err(CliError::FeatureModelMismatch)?;
    if args.proba && matches!(model.classifier, ClassifierModel::Knn(_)) {
        return Err(CliError::BadInput {
            what: "--proba",
            message: "k-NN has no class probabilities".into(),
        });
    }

    let mut out = String::from("fname,camera");
    if args.proba {
        for name in &model.class_names {
            write!(out, ",p_{name}").unwrap();
        }
    }
    out.push('\n');

    for row in &cache.rows {
        let class = model.predict(&row.values)?;
        let name = model
            .class_names
            .get(class)
            .cloned()
            .unwrap_or_else(|| format!("class{class}"));
        write!(out, "{},{}", csv_field(&row.id), csv_field(&name)).unwrap();
        if args.proba {
            let proba = model
                .predict_proba(&row.values)?
                .expect("checked non-knn above");
            for p in proba {
                write!(out, ",{p}").unwrap();
            }
        }
        out.push('\n');
    }
    std::fs::write(&args.out, out)
        .map_err(|e| CliError::io(format!("writing {}", args.out.display()), e))?;
    println!(
        "wrote {} predictions to {}",
        cache.rows.len(),
        args.out.display()
    );
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
