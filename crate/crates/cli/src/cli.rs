//! Argument definitions for the `camid` binary.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cache::FeatureSet;

#[derive(Parser, Debug)]
#[command(
    name = "camid",
    version,
    about = "Camera-model identification from photo content: wavelet and noise-residual features with softmax regression, k-NN, and neural-network classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract features for every image of a manifest into a cache file
    Extract(ExtractArgs),
    /// Train a classifier on a labeled feature cache
    Train(TrainArgs),
    /// Predict classes for the rows of a feature cache
    Predict(PredictArgs),
    /// Score a prediction file against a ground-truth manifest
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FeatureSetArg {
    Dwd,
    Lbp,
}

impl From<FeatureSetArg> for FeatureSet {
    fn from(v: FeatureSetArg) -> FeatureSet {
        match v {
            FeatureSetArg::Dwd => FeatureSet::Dwd,
            FeatureSetArg::Lbp => FeatureSet::Lbp,
        }
    }
}

/// `auto` or a nonnegative number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauArg(pub Option<f64>);

impl FromStr for TauArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TauArg(None));
        }
        let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a threshold"))?;
        if v < 0.0 || !v.is_finite() {
            return Err(format!("tau must be nonnegative, got {s}"));
        }
        Ok(TauArg(Some(v)))
    }
}

/// Co-occurrence offset written `dr,dc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OffsetArg(pub isize, pub isize);

impl FromStr for OffsetArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("offset `{s}` must be `dr,dc`"))?;
        let dr = a.trim().parse().map_err(|_| format!("bad offset row `{a}`"))?;
        let dc = b.trim().parse().map_err(|_| format!("bad offset col `{b}`"))?;
        if (dr, dc) == (0, 0) {
            return Err("offset must be nonzero".into());
        }
        Ok(OffsetArg(dr, dc))
    }
}

/// Integer component count, or a fractional tolerance in (0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PcaArg {
    Components(usize),
    Tolerance(f64),
}

impl FromStr for PcaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Ok(k) = s.parse::<usize>() {
            return Ok(PcaArg::Components(k));
        }
        let t: f64 = s
            .parse()
            .map_err(|_| format!("`{s}` is neither a component count nor a tolerance"))?;
        if !(0.0..1.0).contains(&t) {
            return Err(format!("tolerance must be in [0, 1), got {s}"));
        }
        Ok(PcaArg::Tolerance(t))
    }
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Manifest CSV with header `id,path,label`
    #[arg(long, required_unless_present = "describe_features")]
    pub manifest: Option<PathBuf>,
    /// Feature family to extract
    #[arg(long, value_enum)]
    pub features: FeatureSetArg,
    /// Output cache path
    #[arg(long, required_unless_present = "describe_features")]
    pub out: Option<PathBuf>,
    /// Denoising threshold for the noise residual: `auto` or a number
    #[arg(long, default_value = "auto")]
    pub tau: TauArg,
    /// Wavelet decomposition depth
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Co-occurrence quantization depth
    #[arg(long, default_value_t = 16)]
    pub gray_levels: usize,
    /// Co-occurrence offset `dr,dc`
    #[arg(long, default_value = "0,1")]
    pub offset: OffsetArg,
    /// Expand every image into its four center-to-corner crops
    #[arg(long)]
    pub augment: bool,
    /// Keep the original image alongside the crops
    #[arg(long, requires = "augment")]
    pub include_original: bool,
    /// Worker threads for extraction (0 = one per core); output does not
    /// depend on this
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Print the slot name of every feature index and exit
    #[arg(long)]
    pub describe_features: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKindArg {
    Logreg,
    Knn,
    Mlp,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labeled feature cache from `extract`
    #[arg(long)]
    pub cache: PathBuf,
    /// Classifier to train
    #[arg(long, value_enum)]
    pub model: ModelKindArg,
    /// Fixed regularization weight
    #[arg(long, conflicts_with = "lambda_grid")]
    pub lambda: Option<f64>,
    /// `paper` (10^1 .. 10^-5) or a comma-separated list; selects the
    /// best value on the held-out split (logreg only)
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Neighbor count for knn (default 8 for lbp, 15 for dwd)
    #[arg(long)]
    pub k: Option<usize>,
    /// Hidden units for mlp (default 60 for lbp, 90 for dwd)
    #[arg(long)]
    pub hidden: Option<usize>,
    /// PCA before the classifier: component count or tolerance
    #[arg(long)]
    pub pca: Option<PcaArg>,
    /// Skip mean centering in PCA (literal scatter around the origin)
    #[arg(long)]
    pub no_center: bool,
    /// Drop the intercept column from softmax regression
    #[arg(long)]
    pub no_intercept: bool,
    /// Training fraction of the stratified split
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
    /// Seed for the split, weight init, and gradient-check sampling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial gradient-descent step size
    #[arg(long, default_value_t = 0.5)]
    pub learning_rate: f64,
    /// Gradient-descent iteration budget
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Gradient max-norm stopping threshold
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Verify backpropagation against central differences every N
    /// iterations (0 = off)
    #[arg(long, default_value_t = 0)]
    pub grad_check_every: usize,
    /// Output model path
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the grid-selection score table (defaults to
    /// `<out>.selection.csv` when a grid is evaluated)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Trained model file
    #[arg(long)]
    pub model: PathBuf,
    /// Feature cache to classify
    #[arg(long)]
    pub cache: PathBuf,
    /// Output CSV (`fname,camera`)
    #[arg(long)]
    pub out: PathBuf,
    /// Also emit per-class probabilities (logreg and mlp only)
    #[arg(long)]
    pub proba: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Prediction CSV from `predict`
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ground-truth manifest
    #[arg(long)]
    pub manifest: PathBuf,
    /// Optional CSV report path (text table always goes to stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
