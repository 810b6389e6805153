//! Distribution-shape and reference-based quality metrics: skewness and
//! kurtosis (raw and small-sample adjusted), Rayleigh scale fitting with a
//! QQ goodness-of-fit correlation, PSNR, and Pearson correlation.

use crate::error::{Error, Result};
use crate::image::{luma, ImageBuffer};

/// Per-image quality summary.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub skew: f64,
    pub skew_adj: f64,
    pub kurt: f64,
    pub kurt_adj: f64,
    /// Maximum-likelihood Rayleigh scale of the intensity distribution.
    pub rayleigh_sigma: f64,
    /// Pearson correlation of empirical vs. theoretical Rayleigh quantiles.
    pub qq_corr: f64,
    /// Present only when a reference image was supplied.
    pub psnr_db: Option<f64>,
    pub pearson: Option<f64>,
}

struct Moments {
    n: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

fn central_moments(v: &[f64], needed: usize) -> Result<Moments> {
    if v.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: v.len(),
        });
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in v {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 || m2.is_nan() {
        return Err(Error::DegenerateSample);
    }
    Ok(Moments { n, m2, m3, m4 })
}

/// Population skewness `g1 = m3 / m2^(3/2)`.
pub fn skewness(v: &[f64]) -> Result<f64> {
    let m = central_moments(v, 3)?;
    Ok(m.m3 / m.m2.powf(1.5))
}

/// Population kurtosis `g2 = m4 / m2^2`, non-excess (normal data gives 3).
pub fn kurtosis(v: &[f64]) -> Result<f64> {
    let m = central_moments(v, 4)?;
    Ok(m.m4 / (m.m2 * m.m2))
}

/// Small-sample adjusted skewness `G1 = g1 * sqrt(n(n-1)) / (n-2)`.
pub fn skewness_adjusted(v: &[f64]) -> Result<f64> {
    let m = central_moments(v, 3)?;
    let g1 = m.m3 / m.m2.powf(1.5);
    let n = m.n;
    Ok(g1 * (n * (n - 1.0)).sqrt() / (n - 2.0))
}

/// Small-sample adjusted kurtosis, still non-excess:
/// `G2 = 3 + (n-1)/((n-2)(n-3)) * ((n+1)(g2 - 3) + 6)`.
pub fn kurtosis_adjusted(v: &[f64]) -> Result<f64> {
    let m = central_moments(v, 4)?;
    let g2 = m.m4 / (m.m2 * m.m2);
    let n = m.n;
    Ok(3.0 + ((n - 1.0) / ((n - 2.0) * (n - 3.0))) * ((n + 1.0) * (g2 - 3.0) + 6.0))
}

/// Maximum-likelihood Rayleigh scale `sqrt(sum(x_i^2) / (2n))`.
pub fn rayleigh_fit(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut sum_sq = 0.0;
    for &x in v {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NonPositiveInput(x));
        }
        sum_sq += x * x;
    }
    if sum_sq == 0.0 {
        return Err(Error::AllZero);
    }
    Ok((sum_sq / (2.0 * v.len() as f64)).sqrt())
}

/// Rayleigh QQ data: sorted empirical values paired with theoretical
/// quantiles `sigma * sqrt(-2 ln(1 - (i - 0.5)/n))`, plus their Pearson
/// correlation as the scalar goodness-of-fit summary.
pub fn qq_rayleigh(v: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
    if v.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: v.len(),
        });
    }
    let sigma = rayleigh_fit(v)?;
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let p = (i as f64 + 0.5) / n;
            (e, sigma * (-2.0 * (1.0 - p).ln()).sqrt())
        })
        .collect();
    let empirical: Vec<f64> = points.iter().map(|p| p.0).collect();
    let theoretical: Vec<f64> = points.iter().map(|p| p.1).collect();
    let corr = pearson_slices(&empirical, &theoretical)?;
    Ok((corr, points))
}

fn pearson_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a <= 0.0 || var_b <= 0.0 || var_a.is_nan() || var_b.is_nan() {
        return Err(Error::DegenerateSample);
    }
    Ok((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Peak signal-to-noise ratio in dB on the `[0, 1]` scale:
/// `10 log10(1 / MSE)`. Identical images return `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape(), b.shape()));
    }
    let n = a.samples().len() as f64;
    let mse = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Pearson correlation over the flattened sample vectors.
pub fn pearson(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape(), b.shape()));
    }
    pearson_slices(a.samples(), b.samples())
}

/// Assemble the full report for one image: shape statistics of the gray
/// intensity distribution, the Rayleigh fit, and (when a reference is
/// supplied) PSNR and Pearson correlation against it.
pub fn quality_report(
    img: &ImageBuffer,
    reference: Option<&ImageBuffer>,
) -> Result<QualityReport> {
    let gray_owned;
    let gray = if img.channels() == 3 {
        gray_owned = luma(img)?;
        &gray_owned
    } else {
        img
    };
    let v = gray.samples();
    let (qq_corr, _) = qq_rayleigh(v)?;
    let (psnr_db, pearson_corr) = match reference {
        Some(r) => (Some(psnr(img, r)?), Some(pearson(img, r)?)),
        None => (None, None),
    };
    Ok(QualityReport {
        skew: skewness(v)?,
        skew_adj: skewness_adjusted(v)?,
        kurt: kurtosis(v)?,
        kurt_adj: kurtosis_adjusted(v)?,
        rayleigh_sigma: rayleigh_fit(v)?,
        qq_corr,
        psnr_db,
        pearson: pearson_corr,
    })
}
