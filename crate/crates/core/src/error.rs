//! Crate-wide error type.

use crate::boxcox::LambdaEstimate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside the Box-Cox domain (x > 0) was supplied.
    #[error("value must be strictly positive and finite, got {0}")]
    NonPositiveInput(f64),

    /// Weights are missing, mismatched in length, negative, or sum to zero.
    #[error("weights must match values in length, be non-negative and have a positive sum")]
    InvalidWeights,

    /// The data is constant (zero variance after transformation), so the
    /// Box-Cox likelihood is undefined.
    #[error("degenerate sample: transformed values have zero variance")]
    DegenerateSample,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid search range: lo={lo}, hi={hi}, tol={tol}")]
    InvalidSearchRange { lo: f64, hi: f64, tol: f64 },

    /// The likelihood maximizer sits on the search boundary. The boundary
    /// estimate is attached so callers can decide whether to clamp.
    #[error("likelihood maximum sits at the search boundary lambda = {}", estimate.lambda)]
    NoMaximumInRange { estimate: Box<LambdaEstimate> },

    #[error("expected an image with {expected} channels, got {got}")]
    WrongChannelCount { expected: usize, got: usize },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    /// Shapes are (width, height, channels).
    #[error("image shapes do not match: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize, usize), (usize, usize, usize)),

    #[error("all values are zero")]
    AllZero,

    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),

    /// The requested estimation mode does not operate on a histogram.
    #[error("estimation mode {0} does not operate on a histogram")]
    NotAHistogramMode(&'static str),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image file: {0}")]
    CorruptFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
