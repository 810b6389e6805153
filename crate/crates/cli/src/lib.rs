//! Batch drivers behind the `bci` binary: enhance, analyze, bench, and QQ
//! export. Everything here is also callable as a library so the test suites
//! can drive it directly.

pub mod bench;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use bci_core::boxcox::{EstimationMode, DEFAULT_SEARCH_HI, DEFAULT_SEARCH_LO, DEFAULT_TOL};
use bci_core::enhance::apply_bci;
use bci_core::image::ImageBuffer;
use bci_core::io::{read_image, write_image};
use bci_core::metrics::{qq_rayleigh, quality_report};
use bci_core::{luma, Error};

use report::{AnalyzeRecord, EnhanceRecord, ReportRecord, TimingsRecord, ANALYZE_CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_IO_FAILURE: i32 = 3;

#[derive(Debug, Clone, Copy)]
pub struct SearchSettings {
    pub mode: EstimationMode,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            mode: EstimationMode::HistogramCounts,
            lo: DEFAULT_SEARCH_LO,
            hi: DEFAULT_SEARCH_HI,
            tol: DEFAULT_TOL,
        }
    }
}

impl SearchSettings {
    pub fn validate(&self) -> Result<(), String> {
        if self.lo >= self.hi || self.lo.is_nan() || self.hi.is_nan() {
            return Err(format!("--lo ({}) must be below --hi ({})", self.lo, self.hi));
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(format!("--tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Build a thread pool with `workers` threads; results are identical to the
/// serial run because every image is processed independently and rows are
/// sorted before writing.
fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// Deterministic output names: `<stem>_bci.png` / `<stem>_bci.json`, with a
/// numeric suffix when two inputs share a stem.
fn output_names(inputs: &[PathBuf], out_dir: &Path) -> Vec<(PathBuf, PathBuf)> {
    let mut seen = std::collections::HashMap::new();
    inputs
        .iter()
        .map(|input| {
            let stem = input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("image")
                .to_string();
            let n = seen.entry(stem.clone()).or_insert(0usize);
            *n += 1;
            let base = if *n == 1 {
                format!("{stem}_bci")
            } else {
                format!("{stem}_bci-{n}")
            };
            (
                out_dir.join(format!("{base}.png")),
                out_dir.join(format!("{base}.json")),
            )
        })
        .collect()
}

/// Enhance a batch of images, writing each output PNG and its JSON record
/// into `out_dir`. Per-image degeneracies are recorded, not fatal; the exit
/// code is nonzero only when reading or writing fails.
pub fn run_enhance(
    inputs: &[PathBuf],
    out_dir: &Path,
    settings: &SearchSettings,
    workers: usize,
) -> i32 {
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("bci: cannot create {}: {e}", out_dir.display());
        return EXIT_IO_FAILURE;
    }
    let mut inputs: Vec<PathBuf> = inputs.to_vec();
    inputs.sort();
    let names = output_names(&inputs, out_dir);

    let results: Vec<Result<(), String>> = pool(workers).install(|| {
        inputs
            .par_iter()
            .zip(&names)
            .map(|(input, (out_img, out_json))| {
                enhance_one(input, out_img, out_json, settings)
                    .map_err(|e| format!("{}: {e}", input.display()))
            })
            .collect()
    });

    let mut code = EXIT_OK;
    for r in &results {
        if let Err(msg) = r {
            eprintln!("bci: {msg}");
            code = EXIT_IO_FAILURE;
        }
    }
    code
}

fn enhance_one(
    input: &Path,
    out_img: &Path,
    out_json: &Path,
    settings: &SearchSettings,
) -> Result<(), Error> {
    let img = read_image(input)?;
    let res = apply_bci(&img, settings.mode, settings.lo, settings.hi, settings.tol);
    write_image(&res.output, out_img)?;

    let finite = |v: f64| v.is_finite().then_some(v);
    let record = EnhanceRecord {
        input: input.display().to_string(),
        output: out_img.display().to_string(),
        mode: settings.mode.name(),
        lambda: res.lambda.lambda,
        loglik: finite(res.lambda.loglik),
        search_lo: res.lambda.search_lo,
        search_hi: res.lambda.search_hi,
        degenerate: res.degenerate,
        lambda_fallback: res.lambda_fallback,
        lambda_clamped: res.lambda_clamped,
        pre_min: finite(res.pre_min),
        pre_max: finite(res.pre_max),
        mean_in: mean(img.samples()),
        mean_out: mean(res.output.samples()),
        report_in: quality_report(&img, None).ok().map(|r| ReportRecord::from(&r)),
        report_out: quality_report(&res.output, None)
            .ok()
            .map(|r| ReportRecord::from(&r)),
        timings: TimingsRecord::from(&res.timings),
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    fs::write(out_json, json + "\n")?;
    Ok(())
}

/// Analyze a batch of images into one report row each (CSV or JSON), to
/// stdout or to `out`. A single reference image, when given, enables the
/// PSNR and Pearson columns for every input.
pub fn run_analyze(
    inputs: &[PathBuf],
    reference: Option<&Path>,
    format: ReportFormat,
    out: Option<&Path>,
    workers: usize,
) -> i32 {
    let reference_img = match reference {
        Some(path) => match read_image(path) {
            Ok(img) => Some(img),
            Err(e) => {
                eprintln!("bci: reference {}: {e}", path.display());
                return EXIT_IO_FAILURE;
            }
        },
        None => None,
    };
    let mut inputs: Vec<PathBuf> = inputs.to_vec();
    inputs.sort();

    let rows: Vec<Result<AnalyzeRecord, String>> = pool(workers).install(|| {
        inputs
            .par_iter()
            .map(|input| analyze_one(input, reference_img.as_ref()))
            .collect()
    });

    let mut code = EXIT_OK;
    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        match row {
            Ok(rec) => records.push(rec),
            Err(msg) => {
                eprintln!("bci: {msg}");
                code = EXIT_IO_FAILURE;
            }
        }
    }

    let rendered = render_analyze(&records, format);
    if let Err(e) = write_output(out, rendered.as_bytes()) {
        eprintln!("bci: writing report: {e}");
        return EXIT_IO_FAILURE;
    }
    code
}

fn analyze_one(input: &Path, reference: Option<&ImageBuffer>) -> Result<AnalyzeRecord, String> {
    let img = read_image(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let (report, error) = match quality_report(&img, reference) {
        Ok(r) => (Some(ReportRecord::from(&r)), None),
        // shape statistics are undefined for degenerate images; that is a
        // property of the input, not a batch failure
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(AnalyzeRecord {
        path: input.display().to_string(),
        width: img.width(),
        height: img.height(),
        channels: img.channels(),
        report,
        error,
    })
}

fn render_analyze(records: &[AnalyzeRecord], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(records).expect("records serialize") + "\n"
        }
        ReportFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(ANALYZE_CSV_HEADER).expect("csv header");
            for rec in records {
                wtr.write_record(report::analyze_csv_row(rec)).expect("csv row");
            }
            String::from_utf8(wtr.into_inner().expect("csv buffer")).expect("utf8 csv")
        }
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => std::io::stdout().write_all(bytes),
    }
}

/// Export Rayleigh QQ data for one image as TSV: a `#` header line carrying
/// the fitted scale and the QQ correlation, a column header, then one
/// `empirical<TAB>theoretical` pair per sample.
pub fn run_qq(input: &Path, out: Option<&Path>) -> i32 {
    let img = match read_image(input) {
        Ok(img) => img,
        Err(e) => {
            eprintln!("bci: {}: {e}", input.display());
            return EXIT_IO_FAILURE;
        }
    };
    let gray = if img.channels() == 3 {
        luma(&img).expect("3-channel image")
    } else {
        img
    };
    let (corr, points) = match qq_rayleigh(gray.samples()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("bci: {}: {e}", input.display());
            return EXIT_BAD_ARGS;
        }
    };
    let sigma = bci_core::rayleigh_fit(gray.samples()).expect("qq implies a valid fit");
    let mut text = format!("# rayleigh_sigma={sigma} qq_corr={corr}\nempirical\ttheoretical\n");
    for (e, t) in &points {
        text.push_str(&format!("{e}\t{t}\n"));
    }
    if let Err(e) = write_output(out, text.as_bytes()) {
        eprintln!("bci: writing qq data: {e}");
        return EXIT_IO_FAILURE;
    }
    EXIT_OK
}

/// Run the lambda-estimation benchmark and write its CSV.
pub fn run_bench_cmd(
    sizes: &[usize],
    seed: u64,
    settings: &SearchSettings,
    out: Option<&Path>,
) -> i32 {
    let rows = bench::run_bench(sizes, seed, settings);
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).expect("csv into memory");
    if let Err(e) = write_output(out, &buf) {
        eprintln!("bci: writing benchmark: {e}");
        return EXIT_IO_FAILURE;
    }
    EXIT_OK
}
