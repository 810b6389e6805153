//! The Box-Cox power transform, its profile log-likelihood, and maximum-
//! likelihood estimation of the power parameter lambda.
//!
//! The transform maps strictly positive data through
//! `(x^λ - 1) / λ` (natural log for λ near zero), and lambda is chosen to
//! maximize the profile log-likelihood
//!
//! ```text
//! L(λ) = -n/2 · ln( (1/n) Σ wⱼ (yⱼ - ȳ)² ) + (λ - 1) Σ wⱼ ln xⱼ
//! ```
//!
//! where `yⱼ` is the transformed sample and weights act as multiplicities
//! (all-ones in the unweighted case). Estimation runs a coarse grid scan
//! followed by golden-section refinement inside the best bracket.

use crate::error::{Error, Result};

/// `|λ|` at or below this uses the natural-log branch of [`boxcox_transform`].
pub const LN_BRANCH_THRESHOLD: f64 = 0.01;

/// Default lambda search interval, the wider of the two ranges in common use.
pub const DEFAULT_SEARCH_LO: f64 = -5.0;
pub const DEFAULT_SEARCH_HI: f64 = 5.0;
/// Default width of the final bracketing interval around the maximizer.
pub const DEFAULT_TOL: f64 = 1e-3;
/// Step of the coarse likelihood grid scanned before refinement.
pub const GRID_STEP: f64 = 0.05;

/// Where the data for a lambda estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMode {
    /// The full (per-pixel) data vector.
    FullData,
    /// The vector of nonzero histogram counts, treated as the sample itself.
    HistogramCounts,
    /// Histogram bin centers weighted by their counts — equivalent to the
    /// full quantized data vector.
    HistogramWeighted,
}

impl EstimationMode {
    pub fn name(self) -> &'static str {
        match self {
            EstimationMode::FullData => "full_data",
            EstimationMode::HistogramCounts => "histogram_counts",
            EstimationMode::HistogramWeighted => "histogram_weighted",
        }
    }
}

/// Strictly positive data with optional non-negative multiplicity weights.
#[derive(Debug, Clone)]
pub struct PositiveSample {
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl PositiveSample {
    /// Unweighted sample. Every value must be finite and > 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::NonPositiveInput(v));
            }
        }
        Ok(Self {
            values,
            weights: None,
        })
    }

    /// Weighted sample; weights are multiplicities (frequencies) and must be
    /// non-negative with a positive sum.
    pub fn weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::NonPositiveInput(v));
            }
        }
        if weights.len() != values.len() {
            return Err(Error::InvalidWeights);
        }
        let mut total = 0.0;
        for &w in &weights {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidWeights);
            }
            total += w;
        }
        if total <= 0.0 || total.is_nan() {
            return Err(Error::InvalidWeights);
        }
        Ok(Self {
            values,
            weights: Some(weights),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Number of observations counting multiplicity.
    pub fn total_weight(&self) -> f64 {
        match &self.weights {
            Some(w) => w.iter().sum(),
            None => self.values.len() as f64,
        }
    }
}

/// Result of a lambda search.
#[derive(Debug, Clone)]
pub struct LambdaEstimate {
    /// The maximizing power parameter.
    pub lambda: f64,
    /// Log-likelihood at `lambda` (nats, up to an additive constant).
    pub loglik: f64,
    pub search_lo: f64,
    pub search_hi: f64,
    pub mode: EstimationMode,
    /// Coarse-grid `(lambda, loglik)` evaluations, ascending in lambda.
    pub profile: Option<Vec<(f64, f64)>>,
}

/// The Box-Cox transform of a single strictly positive value.
///
/// Returns `(x^λ - 1) / λ` for `|λ| > 0.01` and `ln x` otherwise; the power
/// is evaluated in the log domain so large inputs survive `|λ|` near 5. The
/// map is strictly increasing in `x` for every fixed `λ`.
pub fn boxcox_transform(x: f64, lambda: f64) -> Result<f64> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::NonPositiveInput(x));
    }
    if lambda.abs() <= LN_BRANCH_THRESHOLD {
        Ok(x.ln())
    } else {
        Ok((lambda * x.ln()).exp_m1() / lambda)
    }
}

/// Exact power-form transform used inside the likelihood.
///
/// The `ln` shortcut of [`boxcox_transform`] is deliberately not applied
/// here: substituting `ln x` while the Jacobian term keeps `(λ-1)` would
/// bias L(λ) by `λ·Σ w ln x` across the shortcut window, which is enough to
/// relocate the maximizer on large samples. `exp_m1` keeps the power form
/// numerically exact arbitrarily close to zero.
#[inline]
fn transform_exact(ln_x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        ln_x
    } else {
        (lambda * ln_x).exp_m1() / lambda
    }
}

struct PreparedSample {
    ln_values: Vec<f64>,
    weights: Option<Vec<f64>>,
    total_weight: f64,
    weighted_ln_sum: f64,
}

impl PreparedSample {
    fn from(sample: &PositiveSample) -> Result<Self> {
        if sample.values.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: sample.values.len(),
            });
        }
        let ln_values: Vec<f64> = sample.values.iter().map(|&v| v.ln()).collect();
        let total_weight = sample.total_weight();
        let weighted_ln_sum = match &sample.weights {
            Some(w) => ln_values.iter().zip(w).map(|(&l, &wi)| wi * l).sum(),
            None => ln_values.iter().sum(),
        };
        Ok(Self {
            ln_values,
            weights: sample.weights.clone(),
            total_weight,
            weighted_ln_sum,
        })
    }

    /// Profile log-likelihood at `lambda`; `Err(DegenerateSample)` when the
    /// transformed values carry no variance (tested on their spread, so
    /// rounding in the mean cannot fake a nonzero variance). `scratch` holds
    /// the transformed values so repeated evaluations pay one transcendental
    /// per point.
    fn loglik_with(&self, lambda: f64, scratch: &mut Vec<f64>) -> Result<f64> {
        let n = self.total_weight;
        scratch.clear();
        scratch.extend(self.ln_values.iter().map(|&l| transform_exact(l, lambda)));
        let mut sum = 0.0;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        match &self.weights {
            Some(w) => {
                for (&y, &wi) in scratch.iter().zip(w) {
                    sum += wi * y;
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
            None => {
                for &y in scratch.iter() {
                    sum += y;
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        if y_max <= y_min {
            return Err(Error::DegenerateSample);
        }
        let mean = sum / n;
        let mut ss = 0.0;
        match &self.weights {
            Some(w) => {
                for (&y, &wi) in scratch.iter().zip(w) {
                    let d = y - mean;
                    ss += wi * d * d;
                }
            }
            None => {
                for &y in scratch.iter() {
                    let d = y - mean;
                    ss += d * d;
                }
            }
        }
        let var = ss / n;
        if var <= 0.0 || !var.is_finite() {
            return Err(Error::DegenerateSample);
        }
        Ok(-0.5 * n * var.ln() + (lambda - 1.0) * self.weighted_ln_sum)
    }
}

/// The profile log-likelihood L(λ) of the sample.
///
/// The variance term uses the (weighted) mean of the transformed values and
/// the Jacobian term is `(λ-1) Σ wⱼ ln xⱼ`; the unweighted case is the
/// all-weights-one case, so integer weights reproduce the expanded multiset
/// exactly.
pub fn boxcox_loglik(sample: &PositiveSample, lambda: f64) -> Result<f64> {
    PreparedSample::from(sample)?.loglik_with(lambda, &mut Vec::new())
}

/// Maximize the Box-Cox log-likelihood over `[lo, hi]`.
///
/// A coarse grid (step [`GRID_STEP`]) guards against local maxima, then
/// golden-section refinement narrows the bracketing interval around the best
/// grid point to width `tol`. The reported lambda is the best point ever
/// evaluated, so its likelihood dominates the whole coarse grid.
///
/// If the grid maximum lands on `lo` or `hi` the boundary estimate is
/// reported via [`Error::NoMaximumInRange`] rather than silently clamped.
pub fn estimate_lambda(
    sample: &PositiveSample,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<LambdaEstimate> {
    if lo >= hi || tol <= 0.0 || tol.is_nan() || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidSearchRange { lo, hi, tol });
    }
    let prepared = PreparedSample::from(sample)?;

    let mut scratch = Vec::new();
    let steps = (((hi - lo) / GRID_STEP).ceil() as usize).max(1);
    let mut profile: Vec<(f64, f64)> = Vec::with_capacity(steps + 1);
    let mut best_idx = None;
    let mut degenerate_everywhere = true;
    for i in 0..=steps {
        let lambda = lo + (hi - lo) * i as f64 / steps as f64;
        let ll = match prepared.loglik_with(lambda, &mut scratch) {
            Ok(ll) => {
                degenerate_everywhere = false;
                ll
            }
            Err(Error::DegenerateSample) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        if best_idx.is_none_or(|b: usize| ll > profile[b].1) {
            best_idx = Some(i);
        }
        profile.push((lambda, ll));
    }
    if degenerate_everywhere {
        return Err(Error::DegenerateSample);
    }
    let best_idx = best_idx.expect("grid is non-empty");

    let (mut best_lambda, mut best_ll) = profile[best_idx];
    if best_idx == 0 || best_idx == steps {
        let estimate = LambdaEstimate {
            lambda: best_lambda,
            loglik: best_ll,
            search_lo: lo,
            search_hi: hi,
            mode: EstimationMode::FullData,
            profile: Some(profile),
        };
        return Err(Error::NoMaximumInRange {
            estimate: Box::new(estimate),
        });
    }

    // Golden-section maximization inside the bracketing triple, keeping
    // track of the best point ever seen.
    const INV_PHI_COMP: f64 = 0.381_966_011_250_105_1; // (3 - sqrt(5)) / 2
    let mut a = profile[best_idx - 1].0;
    let mut b = profile[best_idx + 1].0;
    let mut eval = |lambda: f64, best: &mut (f64, f64)| -> f64 {
        let ll = prepared
            .loglik_with(lambda, &mut scratch)
            .unwrap_or(f64::NEG_INFINITY);
        if ll > best.1 {
            *best = (lambda, ll);
        }
        ll
    };
    let mut best = (best_lambda, best_ll);
    let mut x1 = a + INV_PHI_COMP * (b - a);
    let mut x2 = b - INV_PHI_COMP * (b - a);
    let mut f1 = eval(x1, &mut best);
    let mut f2 = eval(x2, &mut best);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_PHI_COMP * (b - a);
            f1 = eval(x1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_PHI_COMP * (b - a);
            f2 = eval(x2, &mut best);
        }
    }
    (best_lambda, best_ll) = best;

    Ok(LambdaEstimate {
        lambda: best_lambda,
        loglik: best_ll,
        search_lo: lo,
        search_hi: hi,
        mode: EstimationMode::FullData,
        profile: Some(profile),
    })
}
