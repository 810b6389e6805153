//! Image data model, luma projection, tonal histogram, and histogram-proxy
//! lambda estimation.

use crate::boxcox::{estimate_lambda, EstimationMode, LambdaEstimate, PositiveSample};
use crate::error::{Error, Result};

/// Number of tonal bins; 16-bit images are histogrammed at this resolution
/// too (the histogram is a tonal proxy, not an exact inventory).
pub const HISTOGRAM_BINS: usize = 256;

/// Rec. 601 luma weights.
const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// A raster of normalized intensities in `[0, 1]`, row-major, with the bit
/// depth of the source it was decoded from (8 or 16).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    source_depth: u8,
    data: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        source_depth: u8,
        data: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero-sized image".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if source_depth != 8 && source_depth != 16 {
            return Err(Error::InvalidImage(format!(
                "source depth must be 8 or 16 bits, got {source_depth}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidImage(format!(
                "sample {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            source_depth,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn source_depth(&self) -> u8 {
        self.source_depth
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// All samples, row-major, channels interleaved.
    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    /// Rebuild with the same geometry but new samples.
    pub fn with_samples(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.width, self.height, self.channels, self.source_depth, data)
    }
}

/// 256-bin tonal histogram of a single-channel image.
#[derive(Debug, Clone)]
pub struct Histogram {
    counts: [u64; HISTOGRAM_BINS],
    total: u64,
}

impl Histogram {
    pub fn counts(&self) -> &[u64; HISTOGRAM_BINS] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Center of bin `i`, `(i + 0.5) / 256`.
    pub fn bin_center(i: usize) -> f64 {
        (i as f64 + 0.5) / HISTOGRAM_BINS as f64
    }
}

/// Grayscale projection `0.299 R + 0.587 G + 0.114 B` (the Y of YCbCr).
///
/// The weights sum to one, so the output stays in `[0, 1]`.
pub fn luma(img: &ImageBuffer) -> Result<ImageBuffer> {
    if img.channels != 3 {
        return Err(Error::WrongChannelCount {
            expected: 3,
            got: img.channels,
        });
    }
    let data: Vec<f64> = img
        .data
        .chunks_exact(3)
        .map(|px| {
            (LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2])
                .clamp(0.0, 1.0)
        })
        .collect();
    ImageBuffer::new(img.width, img.height, 1, img.source_depth, data)
}

/// Bin index of a sample: `floor(s * 256)` clamped to 255 so `s = 1` lands
/// in the top bin.
#[inline]
pub fn bin_index(sample: f64) -> usize {
    ((sample * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
}

/// Tonal histogram of a single-channel image. Counts sum to the pixel count.
pub fn compute_histogram(img: &ImageBuffer) -> Histogram {
    assert_eq!(img.channels, 1, "compute_histogram takes a gray image");
    let mut counts = [0u64; HISTOGRAM_BINS];
    for &s in &img.data {
        counts[bin_index(s)] += 1;
    }
    Histogram {
        counts,
        total: img.pixel_count() as u64,
    }
}

/// Each sample replaced by the center of its histogram bin. This is the
/// per-pixel vector whose multiset the count-weighted histogram encodes
/// losslessly, used by the full-data estimation route so that histogram and
/// full-data modes estimate the same quantity.
pub fn quantize_to_bin_centers(img: &ImageBuffer) -> Vec<f64> {
    assert_eq!(img.channels, 1, "quantization takes a gray image");
    img.data
        .iter()
        .map(|&s| Histogram::bin_center(bin_index(s)))
        .collect()
}

/// Estimate lambda from a histogram.
///
/// * `HistogramCounts` — the vector of nonzero counts is the sample
///   (zero-count bins are dropped; the Box-Cox domain is positive).
/// * `HistogramWeighted` — bin centers of nonzero bins, mapped onto the
///   positive unit range the enhancement pipeline uses, weighted by counts.
///   This is exactly the full-data likelihood of the quantized image.
///
/// A degenerate selection (e.g. all nonzero counts equal) surfaces as
/// [`Error::DegenerateSample`]; callers typically fall back to `lambda = 1`.
pub fn lambda_from_histogram(
    hist: &Histogram,
    mode: EstimationMode,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<LambdaEstimate> {
    let sample = match mode {
        EstimationMode::HistogramCounts => {
            let counts: Vec<f64> = hist
                .counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| c as f64)
                .collect();
            if counts.len() < 2 {
                return Err(Error::DegenerateSample);
            }
            PositiveSample::new(counts)?
        }
        EstimationMode::HistogramWeighted => {
            let mut centers = Vec::new();
            let mut weights = Vec::new();
            for (i, &c) in hist.counts.iter().enumerate() {
                if c > 0 {
                    centers.push(Histogram::bin_center(i));
                    weights.push(c as f64);
                }
            }
            if centers.len() < 2 {
                return Err(Error::DegenerateSample);
            }
            let centers = crate::enhance::normalize_positive_values(&centers)
                .ok_or(Error::DegenerateSample)?;
            PositiveSample::weighted(centers, weights)?
        }
        EstimationMode::FullData => return Err(Error::NotAHistogramMode(mode.name())),
    };
    match estimate_lambda(&sample, lo, hi, tol) {
        Ok(mut est) => {
            est.mode = mode;
            Ok(est)
        }
        Err(Error::NoMaximumInRange { mut estimate }) => {
            estimate.mode = mode;
            Err(Error::NoMaximumInRange { estimate })
        }
        Err(e) => Err(e),
    }
}
