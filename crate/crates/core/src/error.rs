//! Error type shared by all core modules.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by the core pipeline.
///
/// Variants map one-to-one onto the failure modes of the individual
/// operations; callers that can recover (e.g. degenerate-band
/// substitution during feature extraction) match on the variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Image or matrix smaller than the minimum the operation supports.
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    /// A class in the manifest has too few entries to split.
    ClassTooSmall { class: usize, count: usize },
    /// Requested more decomposition levels than the input admits.
    TooManyLevels { levels: usize, min_dim: usize },
    /// Matrix/band dimensions are mutually inconsistent.
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// Vector length differs from what the model was fit on.
    DimensionMismatch { expected: usize, got: usize },
    /// Band is (numerically) constant; higher moments or correlation are
    /// undefined.
    DegenerateBand,
    /// Too few samples to fit the requested statistic.
    InsufficientSamples { got: usize, need: usize },
    /// All rows of the matrix are identical; no principal directions.
    DegenerateData,
    /// A label is outside `0..k`.
    LabelOutOfRange { label: usize, k: usize },
    /// A class has no true samples in the evaluated set.
    EmptyClass { class: usize },
    /// Optimization produced a non-finite cost or gradient.
    NonFiniteCost { iteration: usize },
    /// Analytic and numerical gradients disagree beyond tolerance.
    GradientCheckFailed {
        iteration: usize,
        relative_error: f64,
    },
    /// A parameter violates its documented precondition.
    InvalidParameter(&'static str),
}

impl core::error::Error for Error {}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ImageTooSmall { width, height, min } => write!(
                f,
                "image {width}x{height} is below the {min}x{min} minimum"
            ),
            Error::ClassTooSmall { class, count } => {
                write!(f, "class {class} has only {count} entries (need >= 2)")
            }
            Error::TooManyLevels { levels, min_dim } => write!(
                f,
                "{levels} decomposition levels exceed what a minimum dimension of {min_dim} admits"
            ),
            Error::ShapeMismatch { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegenerateBand => write!(f, "band is constant; statistic undefined"),
            Error::InsufficientSamples { got, need } => {
                write!(f, "insufficient samples: {got} (need >= {need})")
            }
            Error::DegenerateData => write!(f, "all rows identical; nothing to decompose"),
            Error::LabelOutOfRange { label, k } => {
                write!(f, "label {label} out of range for {k} classes")
            }
            Error::EmptyClass { class } => {
                write!(f, "class {class} has no true samples")
            }
            Error::NonFiniteCost { iteration } => {
                write!(f, "cost became non-finite at iteration {iteration}")
            }
            Error::GradientCheckFailed {
                iteration,
                relative_error,
            } => write!(
                f,
                "gradient check failed at iteration {iteration}: relative error {relative_error:.3e}"
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}
