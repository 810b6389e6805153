//! Wall-clock benchmark of lambda estimation: full quantized pixel vector
//! versus the two histogram modes, at identical search settings.

use std::time::Instant;

use bci_core::boxcox::{estimate_lambda, EstimationMode, LambdaEstimate, PositiveSample};
use bci_core::enhance::normalize_positive_values;
use bci_core::image::{compute_histogram, lambda_from_histogram, quantize_to_bin_centers};
use bci_core::synth::lognormal_image;
use bci_core::Error;

use crate::SearchSettings;

pub const DEFAULT_SIZES: [usize; 4] = [256, 512, 1024, 2048];
const REPS: usize = 5;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub size: usize,
    pub method: &'static str,
    /// Data preparation: histogram build, or quantize + normalize for the
    /// full-data route.
    pub build_s: f64,
    /// The lambda search itself.
    pub search_s: f64,
    pub total_s: f64,
    pub speedup_vs_full: f64,
    pub lambda: f64,
}

fn unclamp(result: Result<LambdaEstimate, Error>) -> LambdaEstimate {
    match result {
        Ok(est) => est,
        Err(Error::NoMaximumInRange { estimate }) => *estimate,
        Err(e) => panic!("benchmark fixture failed to estimate: {e}"),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Run the benchmark over square images of the given sizes. Each (size,
/// method) cell reports the median over five runs, stage by stage.
pub fn run_bench(sizes: &[usize], seed: u64, settings: &SearchSettings) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &size in sizes {
        let img = lognormal_image(size, size, 0.0, 1.0, seed);
        let mut cells: Vec<(&'static str, Vec<f64>, Vec<f64>, f64)> = Vec::new();

        let (mut builds, mut searches) = (Vec::new(), Vec::new());
        let mut lambda = f64::NAN;
        for _ in 0..REPS {
            let t0 = Instant::now();
            let quantized = quantize_to_bin_centers(&img);
            let values =
                normalize_positive_values(&quantized).expect("fixture is not constant");
            let sample = PositiveSample::new(values).expect("normalized values are positive");
            let t1 = Instant::now();
            let est = unclamp(estimate_lambda(
                &sample,
                settings.lo,
                settings.hi,
                settings.tol,
            ));
            lambda = est.lambda;
            builds.push(t1.duration_since(t0).as_secs_f64());
            searches.push(t1.elapsed().as_secs_f64());
        }
        cells.push(("full", builds, searches, lambda));

        for mode in [
            EstimationMode::HistogramCounts,
            EstimationMode::HistogramWeighted,
        ] {
            let (mut builds, mut searches) = (Vec::new(), Vec::new());
            let mut lambda = f64::NAN;
            for _ in 0..REPS {
                let t0 = Instant::now();
                let hist = compute_histogram(&img);
                let t1 = Instant::now();
                let est = unclamp(lambda_from_histogram(
                    &hist,
                    mode,
                    settings.lo,
                    settings.hi,
                    settings.tol,
                ));
                lambda = est.lambda;
                builds.push(t1.duration_since(t0).as_secs_f64());
                searches.push(t1.elapsed().as_secs_f64());
            }
            let name = match mode {
                EstimationMode::HistogramCounts => "hist_counts",
                _ => "hist_weighted",
            };
            cells.push((name, builds, searches, lambda));
        }

        let full_total = {
            let (_, builds, searches, _) = &cells[0];
            median(
                builds
                    .iter()
                    .zip(searches)
                    .map(|(b, s)| b + s)
                    .collect(),
            )
        };
        for (method, builds, searches, lambda) in cells {
            let total = median(builds.iter().zip(&searches).map(|(b, s)| b + s).collect());
            rows.push(BenchRow {
                size,
                method,
                build_s: median(builds),
                search_s: median(searches),
                total_s: total,
                speedup_vs_full: full_total / total,
                lambda,
            });
        }
    }
    rows
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "size",
        "method",
        "build_s",
        "search_s",
        "total_s",
        "speedup_vs_full",
        "lambda",
    ])?;
    for r in rows {
        wtr.write_record([
            r.size.to_string(),
            r.method.to_string(),
            format!("{:.6}", r.build_s),
            format!("{:.6}", r.search_s),
            format!("{:.6}", r.total_s),
            format!("{:.2}", r.speedup_vs_full),
            format!("{}", r.lambda),
        ])?;
    }
    wtr.flush()
}
