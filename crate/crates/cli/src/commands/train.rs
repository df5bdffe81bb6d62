//! `camid train`: stratified split, standardizer, optional PCA, and one
//! of the three classifiers; writes the model file and (for grid runs) a
//! selection report.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use camid_core::classify::{
    knn_fit, knn_predict, logreg_predict, logreg_train_opts, mlp_predict, mlp_train, Standardizer,
    TrainConfig,
};
use camid_core::dataset::{stratified_split, DatasetManifest, ManifestEntry, SplitSpec};
use camid_core::eval::{accuracies, confusion, grid_select, GridRow};
use camid_core::pca::{pca_fit_with, PcaModel, PcaTarget};
use camid_core::Mat;

use crate::cache::{load_cache, FeatureSet};
use crate::cli::{ModelKindArg, PcaArg, TrainArgs};
use crate::error::{CliError, Result};
use crate::model::{save_model, ClassifierModel, ModelFile, MODEL_FORMAT_VERSION};
use crate::report::summary_line;

/// The seven-point regularization grid used for selection.
pub const PAPER_LAMBDA_GRID: [f64; 7] = [10.0, 1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5];

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cache = load_cache(&args.cache)?;
    let (x_all, y_all, ids) = cache.labeled_matrix();
    if x_all.rows() < 4 {
        return Err(CliError::BadInput {
            what: "--cache",
            message: format!("only {} labeled rows", x_all.rows()),
        });
    }

    // class names may be shorter than the labels actually present
    let mut class_names = cache.header.class_names.clone();
    let max_label = *y_all.iter().max().expect("nonempty");
    while class_names.len() <= max_label {
        class_names.push(format!("class{}", class_names.len()));
    }
    let k_classes = class_names.len();

    // stratified split over the cache rows
    let synth = DatasetManifest {
        entries: ids
            .iter()
            .zip(&y_all)
            .map(|(id, &label)| ManifestEntry {
                id: id.clone(),
                path: String::new(),
                label,
            })
            .collect(),
        class_names: class_names.clone(),
    };
    let (train_m, holdout_m) = stratified_split(
        &synth,
        &SplitSpec {
            train_fraction: args.split,
            seed: args.seed,
        },
    )?;
    let index_of: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let take = |part: &DatasetManifest| -> (Mat, Vec<usize>) {
        let rows: Vec<usize> = part
            .entries
            .iter()
            .map(|e| index_of[e.id.as_str()])
            .collect();
        let mut x = Mat::zeros(rows.len(), x_all.cols());
        let mut y = Vec::with_capacity(rows.len());
        for (out_r, &src_r) in rows.iter().enumerate() {
            x.row_mut(out_r).copy_from_slice(x_all.row(src_r));
            y.push(y_all[src_r]);
        }
        (x, y)
    };
    let (x_tr, y_tr) = take(&train_m);
    let (x_ho, y_ho) = take(&holdout_m);
    println!(
        "training on {} rows, holding out {} rows ({} classes)",
        x_tr.rows(),
        x_ho.rows(),
        k_classes
    );

    // raw-feature standardizer, then optional PCA
    let standardizer = Standardizer::fit(&x_tr)?;
    if !standardizer.dropped().is_empty() {
        println!(
            "dropped {} constant feature(s): {:?}",
            standardizer.dropped().len(),
            standardizer.dropped()
        );
    }
    let z_tr = standardizer.transform_matrix(&x_tr)?;
    let z_ho = standardizer.transform_matrix(&x_ho)?;

    let pca: Option<PcaModel> = match args.pca {
        None => None,
        Some(spec) => {
            let target = match spec {
                PcaArg::Components(k) => PcaTarget::Components(k),
                PcaArg::Tolerance(t) => PcaTarget::NormalizedTolerance(t),
            };
            let model = pca_fit_with(&z_tr, target, !args.no_center)?;
            let pe = model.projection_error(&z_tr)?;
            println!(
                "pca kept {} components (projection error {:.3e}, eigenvalue tail {:.3e})",
                model.k, pe.direct, pe.eigenvalue_tail
            );
            Some(model)
        }
    };
    let project = |m: &Mat| -> Result<Mat> {
        Ok(match &pca {
            Some(p) => p.transform_matrix(m)?,
            None => m.clone(),
        })
    };
    let w_tr = project(&z_tr)?;
    let w_ho = project(&z_ho)?;

    let cfg = TrainConfig {
        learning_rate: args.learning_rate,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
        grad_check_every: args.grad_check_every,
    };

    if args.lambda_grid.is_some() && args.model != ModelKindArg::Logreg {
        return Err(CliError::BadInput {
            what: "--lambda-grid",
            message: "grid selection is wired to logreg".into(),
        });
    }

    let mut selection_report: Option<Vec<GridRow<f64>>> = None;
    let classifier = match args.model {
        ModelKindArg::Logreg => {
            let grid: Vec<f64> = match (&args.lambda, &args.lambda_grid) {
                (Some(l), _) => vec![*l],
                (None, Some(spec)) => parse_lambda_grid(spec)?,
                (None, None) => PAPER_LAMBDA_GRID.to_vec(),
            };
            let intercept = !args.no_intercept;
            if grid.len() == 1 {
                ClassifierModel::Logreg(logreg_train_opts(
                    &w_tr, &y_tr, k_classes, grid[0], &cfg, intercept,
                )?)
            } else {
                let (best, model, report) = grid_select(
                    &grid,
                    &w_tr,
                    &y_tr,
                    &w_ho,
                    &y_ho,
                    k_classes,
                    |&lambda, x, y| logreg_train_opts(x, y, k_classes, lambda, &cfg, intercept),
                    logreg_predict,
                )
                .map_err(CliError::Core)?;
                println!("selected lambda = {best:e} from {} grid points", report.len());
                for row in &report {
                    println!(
                        "  lambda {:>9.0e}: mean per-class accuracy {:.4}",
                        row.params, row.mean_per_class_accuracy
                    );
                }
                selection_report = Some(report);
                ClassifierModel::Logreg(model)
            }
        }
        ModelKindArg::Knn => {
            let k = args.k.unwrap_or(match cache.header.feature_set {
                FeatureSet::Lbp => 8,
                FeatureSet::Dwd => 15,
            });
            let k = k.min(w_tr.rows());
            ClassifierModel::Knn(knn_fit(&w_tr, &y_tr, k_classes, k)?)
        }
        ModelKindArg::Mlp => {
            let hidden = args.hidden.unwrap_or(match cache.header.feature_set {
                FeatureSet::Lbp => 60,
                FeatureSet::Dwd => 90,
            });
            let lambda = args.lambda.unwrap_or(match cache.header.feature_set {
                FeatureSet::Lbp => 7e-5,
                FeatureSet::Dwd => 5e-5,
            });
            ClassifierModel::Mlp(mlp_train(&w_tr, &y_tr, k_classes, hidden, lambda, &cfg)?)
        }
    };

    // holdout evaluation
    let mut y_pred = Vec::with_capacity(y_ho.len());
    for r in 0..w_ho.rows() {
        let row = w_ho.row(r);
        let p = match &classifier {
            ClassifierModel::Logreg(m) => logreg_predict(m, row)?,
            ClassifierModel::Knn(m) => knn_predict(m, row)?,
            ClassifierModel::Mlp(m) => mlp_predict(m, row)?,
        };
        y_pred.push(p);
    }
    let cm = confusion(&y_ho, &y_pred, k_classes)?.with_class_names(class_names.clone());
    match accuracies(&cm) {
        Ok(acc) => println!("holdout: {}", summary_line(&acc)),
        Err(e) => println!("holdout accuracy unavailable: {e}"),
    }

    let model_file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        extraction: cache.header.clone(),
        standardizer,
        pca,
        classifier,
        class_names,
    };
    save_model(&model_file, &args.out)?;
    println!("wrote model to {}", args.out.display());

    if let Some(report) = selection_report {
        let path = args
            .report
            .clone()
            .unwrap_or_else(|| default_report_path(&args.out));
        let mut text = String::from("lambda,mean_per_class_accuracy\n");
        for row in &report {
            writeln!(text, "{},{}", row.params, row.mean_per_class_accuracy).unwrap();
        }
        std::fs::write(&path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        println!("wrote selection report to {}", path.display());
    }
    Ok(())
}

fn default_report_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".selection.csv");
    PathBuf::from(s)
}

/// `paper` or comma-separated values.
fn parse_lambda_grid(spec: &str) -> Result<Vec<f64>> {
    if spec.eq_ignore_ascii_case("paper") {
        return Ok(PAPER_LAMBDA_GRID.to_vec());
    }
    let values: std::result::Result<Vec<f64>, _> =
        spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite() && *x >= 0.0) => Ok(v),
        _ => Err(CliError::BadInput {
            what: "--lambda-grid",
            message: format!("`{spec}` is neither `paper` nor a list of nonnegative values"),
        }),
    }
}
