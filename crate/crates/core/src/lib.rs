//! Box-Cox image enhancement.
//!
//! Estimates the Box-Cox power parameter lambda by maximum likelihood —
//! either from an image's full pixel vector or from its 256-bin tonal
//! histogram, a compressed proxy that makes the search effectively
//! size-independent — applies the resulting power transform with min-max
//! rescaling, and evaluates outcomes with distribution-shape and reference
//! metrics.
//!
//! The pieces:
//!
//! * [`boxcox`] — the transform, its profile log-likelihood, and lambda
//!   estimation for plain and frequency-weighted data.
//! * [`image`] — raster model, luma projection, tonal histogram, and
//!   histogram-proxy estimation.
//! * [`enhance`] — the enhancement pipeline and a fixed-gamma baseline.
//! * [`metrics`] — skewness/kurtosis, Rayleigh QQ fit, PSNR, correlation.
//! * [`synth`] — deterministic synthetic fixtures.
//! * [`io`] — lossless PNG and binary PGM/PPM reading and writing.

pub mod boxcox;
pub mod enhance;
pub mod error;
pub mod image;
pub mod io;
pub mod metrics;
pub mod synth;

pub use boxcox::{
    boxcox_loglik, boxcox_transform, estimate_lambda, EstimationMode, LambdaEstimate,
    PositiveSample,
};
pub use enhance::{apply_bci, apply_gamma, normalize_positive, EnhancementResult, StageTimings};
pub use error::{Error, Result};
pub use image::{compute_histogram, lambda_from_histogram, luma, Histogram, ImageBuffer};
pub use metrics::{psnr, pearson, qq_rayleigh, quality_report, rayleigh_fit, QualityReport};
