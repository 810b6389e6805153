//! The BCI enhancement pipeline: estimate lambda from the luma histogram,
//! normalize onto the positive unit range, apply the Box-Cox transform, and
//! rescale the result to full range.

use std::time::{Duration, Instant};

use crate::boxcox::{
    boxcox_transform, estimate_lambda, EstimationMode, LambdaEstimate, PositiveSample,
};
use crate::error::{Error, Result};
use crate::image::{compute_histogram, lambda_from_histogram, luma, quantize_to_bin_centers, ImageBuffer};

/// Lower end of the positive range the Box-Cox input is mapped onto.
pub const POSITIVE_FLOOR: f64 = 1.0 / 255.0;

/// Wall-clock duration of each pipeline stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    /// Histogram construction (or data preparation in full-data mode).
    pub histogram: Duration,
    /// Lambda search.
    pub lambda_search: Duration,
    /// Per-sample transform plus rescale.
    pub transform: Duration,
}

/// Output of [`apply_bci`].
#[derive(Debug, Clone)]
pub struct EnhancementResult {
    pub output: ImageBuffer,
    pub lambda: LambdaEstimate,
    /// Min and max of the transformed samples before the final rescale.
    pub pre_min: f64,
    pub pre_max: f64,
    /// The input was constant; the output is the input and lambda is 1.
    pub degenerate: bool,
    /// Lambda estimation hit degenerate histogram data and fell back to 1.
    pub lambda_fallback: bool,
    /// The likelihood maximizer sat on the search boundary and was clamped.
    pub lambda_clamped: bool,
    pub timings: StageTimings,
}

/// Affine map of `values` onto `[1/255, 1]` using their own min/max.
/// `None` when the values are constant.
pub fn normalize_positive_values(values: &[f64]) -> Option<Vec<f64>> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    if max <= min {
        return None;
    }
    let scale = (1.0 - POSITIVE_FLOOR) / (max - min);
    Some(
        values
            .iter()
            .map(|&v| POSITIVE_FLOOR + (v - min) * scale)
            .collect(),
    )
}

/// Affine map of all samples (jointly over channels, so channel ratios are
/// preserved) onto `[1/255, 1]`. `None` signals a constant image.
pub fn normalize_positive(img: &ImageBuffer) -> Option<ImageBuffer> {
    let data = normalize_positive_values(img.samples())?;
    Some(img.with_samples(data).expect("same geometry, samples in range"))
}

/// Plain power-law adjustment `s -> s^gamma`, the fixed-gamma baseline.
pub fn apply_gamma(img: &ImageBuffer, gamma: f64) -> Result<ImageBuffer> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::NonPositiveGamma(gamma));
    }
    let data = img.samples().iter().map(|&s| s.powf(gamma)).collect();
    img.with_samples(data)
}

fn identity_estimate(mode: EstimationMode, lo: f64, hi: f64) -> LambdaEstimate {
    LambdaEstimate {
        lambda: 1.0,
        loglik: f64::NAN,
        search_lo: lo,
        search_hi: hi,
        mode,
        profile: None,
    }
}

/// The full enhancement pipeline.
///
/// Stages: luma projection (for color input), histogram, lambda estimation
/// in the requested mode, normalization of all samples onto `[1/255, 1]`,
/// the Box-Cox transform at the estimated lambda, and a global min-max
/// rescale to `[0, 1]`. One monotone scalar map with one global min/max is
/// applied to every channel, so sample ordering and per-pixel channel
/// ordering survive end to end.
///
/// Degeneracies never fail: a constant image comes back unchanged with the
/// `degenerate` flag, degenerate histogram data falls back to `lambda = 1`
/// with `lambda_fallback`, and a boundary maximizer is clamped with
/// `lambda_clamped`.
pub fn apply_bci(
    img: &ImageBuffer,
    mode: EstimationMode,
    lo: f64,
    hi: f64,
    tol: f64,
) -> EnhancementResult {
    let gray_owned;
    let gray = if img.channels() == 3 {
        gray_owned = luma(img).expect("3-channel input");
        &gray_owned
    } else {
        img
    };

    let hist_start = Instant::now();
    let prep = match mode {
        EstimationMode::FullData => {
            let quantized = quantize_to_bin_centers(gray);
            FullDataPrep::Vector(normalize_positive_values(&quantized))
        }
        _ => FullDataPrep::Histogram(Box::new(compute_histogram(gray))),
    };
    let hist_elapsed = hist_start.elapsed();

    let search_start = Instant::now();
    let estimated = match &prep {
        FullDataPrep::Histogram(hist) => lambda_from_histogram(hist, mode, lo, hi, tol),
        FullDataPrep::Vector(None) => Err(Error::DegenerateSample),
        FullDataPrep::Vector(Some(values)) => PositiveSample::new(values.clone())
            .and_then(|sample| estimate_lambda(&sample, lo, hi, tol)),
    };
    let (lambda, lambda_fallback, lambda_clamped) = match estimated {
        Ok(est) => (est, false, false),
        Err(Error::NoMaximumInRange { mut estimate }) => {
            estimate.mode = mode;
            (*estimate, false, true)
        }
        Err(_) => (identity_estimate(mode, lo, hi), true, false),
    };
    let search_elapsed = search_start.elapsed();

    let transform_start = Instant::now();
    let Some(normalized) = normalize_positive(img) else {
        // constant image: identity output, flagged
        return EnhancementResult {
            output: img.clone(),
            lambda: identity_estimate(mode, lo, hi),
            pre_min: f64::NAN,
            pre_max: f64::NAN,
            degenerate: true,
            lambda_fallback,
            lambda_clamped,
            timings: StageTimings {
                histogram: hist_elapsed,
                lambda_search: search_elapsed,
                transform: transform_start.elapsed(),
            },
        };
    };

    let transformed: Vec<f64> = normalized
        .samples()
        .iter()
        .map(|&s| boxcox_transform(s, lambda.lambda).expect("normalized samples are positive"))
        .collect();
    let mut pre_min = f64::INFINITY;
    let mut pre_max = f64::NEG_INFINITY;
    for &t in &transformed {
        if t < pre_min {
            pre_min = t;
        }
        if t > pre_max {
            pre_max = t;
        }
    }
    debug_assert!(pre_max > pre_min, "monotone transform of non-constant data");
    let span = pre_max - pre_min;
    let data: Vec<f64> = transformed
        .iter()
        .map(|&t| ((t - pre_min) / span).clamp(0.0, 1.0))
        .collect();
    let output = img.with_samples(data).expect("rescaled into [0, 1]");
    let transform_elapsed = transform_start.elapsed();

    EnhancementResult {
        output,
        lambda,
        pre_min,
        pre_max,
        degenerate: false,
        lambda_fallback,
        lambda_clamped,
        timings: StageTimings {
            histogram: hist_elapsed,
            lambda_search: search_elapsed,
            transform: transform_elapsed,
        },
    }
}

enum FullDataPrep {
    Histogram(Box<crate::image::Histogram>),
    Vector(Option<Vec<f64>>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gradient_image, lognormal_image};
    use approx::assert_relative_eq;

    #[test]
    fn normalize_endpoints() {
        let img = ImageBuffer::new(1, 3, 1, 8, vec![0.0, 0.5, 1.0]).unwrap();
        let n = normalize_positive(&img).unwrap();
        assert_relative_eq!(n.samples()[0], 1.0 / 255.0, max_relative = 1e-12);
        assert_relative_eq!(n.samples()[2], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn normalize_is_affine() {
        let img = ImageBuffer::new(1, 3, 1, 8, vec![0.2, 0.4, 0.6]).unwrap();
        let n = normalize_positive(&img).unwrap();
        assert_relative_eq!(n.samples()[0], 1.0 / 255.0, max_relative = 1e-12);
        assert_relative_eq!(n.samples()[2], 1.0, max_relative = 1e-12);
        // 0.4 is the midpoint of [0.2, 0.6], so it maps to the midpoint
        assert_relative_eq!(
            n.samples()[1],
            (1.0 / 255.0 + 1.0) / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn normalize_flags_constant_image() {
        let img = ImageBuffer::new(2, 2, 1, 8, vec![0.7; 4]).unwrap();
        assert!(normalize_positive(&img).is_none());
    }

    #[test]
    fn gamma_identities() {
        let img = ImageBuffer::new(1, 4, 1, 8, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let same = apply_gamma(&img, 1.0).unwrap();
        assert_eq!(same.samples(), img.samples());
        let g = apply_gamma(&img, 0.5).unwrap();
        assert_relative_eq!(g.samples()[1], 0.5, max_relative = 1e-12);
        assert_eq!(g.samples()[0], 0.0);
        assert_eq!(g.samples()[3], 1.0);
        assert!(matches!(
            apply_gamma(&img, 0.0),
            Err(Error::NonPositiveGamma(_))
        ));
    }

    #[test]
    fn bci_constant_image_is_identity() {
        let img = ImageBuffer::new(3, 3, 1, 8, vec![0.42; 9]).unwrap();
        let res = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        assert!(res.degenerate);
        assert_eq!(res.lambda.lambda, 1.0);
        assert_eq!(res.output.samples(), img.samples());
    }

    #[test]
    fn bci_output_attains_full_range() {
        let img = lognormal_image(64, 64, 0.0, 1.0, 7);
        let res = apply_bci(&img, EstimationMode::HistogramWeighted, -5.0, 5.0, 1e-3);
        assert!(!res.degenerate);
        let min = res.output.samples().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = res
            .output
            .samples()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, 0.0);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn bci_gradient_brightens_and_clamps() {
        // counts mode on the gradient maximizes the likelihood at the lower
        // search bound; the pipeline clamps and proceeds
        let img = gradient_image(257, 8);
        let res = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        assert!(res.lambda_clamped);
        assert_eq!(res.lambda.lambda, -5.0);
        let mean_in: f64 =
            img.samples().iter().sum::<f64>() / img.samples().len() as f64;
        let mean_out: f64 =
            res.output.samples().iter().sum::<f64>() / res.output.samples().len() as f64;
        assert!(mean_out > mean_in);
    }

    #[test]
    fn bci_preserves_rank_order() {
        let img = lognormal_image(48, 48, 0.0, 1.2, 11);
        let res = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        let input = img.samples();
        let output = res.output.samples();
        let mut idx: Vec<usize> = (0..input.len()).collect();
        idx.sort_by(|&a, &b| input[a].total_cmp(&input[b]));
        for w in idx.windows(2) {
            assert!(output[w[0]] <= output[w[1]]);
            if input[w[0]] == input[w[1]] {
                assert_eq!(output[w[0]], output[w[1]]);
            }
        }
    }

    #[test]
    fn bci_lambda_one_is_minmax_stretch() {
        // with lambda pinned to 1 by a fallback, output == stretched input
        let img = ImageBuffer::new(1, 4, 1, 8, vec![0.2, 0.2, 0.6, 0.6]).unwrap();
        // two distinct values -> counts [2, 2] are constant -> fallback
        let res = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        assert!(res.lambda_fallback);
        assert_eq!(res.lambda.lambda, 1.0);
        assert!(!res.degenerate);
        let expected = [0.0, 0.0, 1.0, 1.0];
        for (o, e) in res.output.samples().iter().zip(expected) {
            assert_relative_eq!(*o, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn bci_color_preserves_channel_order() {
        let img = lognormal_image(32, 32, 0.0, 1.0, 3);
        let mut rgb = Vec::with_capacity(img.samples().len() * 3);
        for &s in img.samples() {
            rgb.push(s);
            rgb.push((s * 0.8).clamp(0.0, 1.0));
            rgb.push((s * 0.5).clamp(0.0, 1.0));
        }
        let color = ImageBuffer::new(32, 32, 3, 8, rgb).unwrap();
        let res = apply_bci(&color, EstimationMode::HistogramWeighted, -5.0, 5.0, 1e-3);
        for px in res.output.samples().chunks_exact(3) {
            assert!(px[0] >= px[1] && px[1] >= px[2]);
        }
    }

    #[test]
    fn bci_is_deterministic() {
        let img = lognormal_image(64, 64, 0.0, 1.0, 5);
        let a = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        let b = apply_bci(&img, EstimationMode::HistogramCounts, -5.0, 5.0, 1e-3);
        assert_eq!(a.output.samples(), b.output.samples());
        assert_eq!(a.lambda.lambda, b.lambda.lambda);
    }
}
