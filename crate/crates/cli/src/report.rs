//! Serializable report records. Timings live in their own sub-object so
//! content can be diffed exactly across runs.

use serde::{Serialize, Serializer};

use bci_core::enhance::StageTimings;
use bci_core::QualityReport;

/// `+inf` PSNR (identical images) is encoded as the string `"inf"` in JSON
/// and as `inf` in CSV; JSON numbers cannot carry infinities.
fn serialize_psnr<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub skew: f64,
    pub skew_adj: f64,
    pub kurt: f64,
    pub kurt_adj: f64,
    pub rayleigh_sigma: f64,
    pub qq_corr: f64,
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: Option<f64>,
    pub pearson: Option<f64>,
}

impl From<&QualityReport> for ReportRecord {
    fn from(r: &QualityReport) -> Self {
        Self {
            skew: r.skew,
            skew_adj: r.skew_adj,
            kurt: r.kurt,
            kurt_adj: r.kurt_adj,
            rayleigh_sigma: r.rayleigh_sigma,
            qq_corr: r.qq_corr,
            psnr_db: r.psnr_db,
            pearson: r.pearson,
        }
    }
}

pub fn psnr_cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_infinite() => "inf".into(),
        Some(x) => format!("{x}"),
    }
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingsRecord {
    pub histogram_s: f64,
    pub lambda_search_s: f64,
    pub transform_s: f64,
}

impl From<&StageTimings> for TimingsRecord {
    fn from(t: &StageTimings) -> Self {
        Self {
            histogram_s: t.histogram.as_secs_f64(),
            lambda_search_s: t.lambda_search.as_secs_f64(),
            transform_s: t.transform.as_secs_f64(),
        }
    }
}

/// Per-image record written by `enhance` next to the output image.
#[derive(Debug, Clone, Serialize)]
pub struct EnhanceRecord {
    pub input: String,
    pub output: String,
    pub mode: &'static str,
    pub lambda: f64,
    pub loglik: Option<f64>,
    pub search_lo: f64,
    pub search_hi: f64,
    pub degenerate: bool,
    pub lambda_fallback: bool,
    pub lambda_clamped: bool,
    pub pre_min: Option<f64>,
    pub pre_max: Option<f64>,
    pub mean_in: f64,
    pub mean_out: f64,
    pub report_in: Option<ReportRecord>,
    pub report_out: Option<ReportRecord>,
    pub timings: TimingsRecord,
}

/// One `analyze` row.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeRecord {
    pub path: String,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub const ANALYZE_CSV_HEADER: [&str; 13] = [
    "path",
    "width",
    "height",
    "channels",
    "skew",
    "skew_adj",
    "kurt",
    "kurt_adj",
    "rayleigh_sigma",
    "qq_corr",
    "psnr_db",
    "pearson",
    "error",
];

pub fn analyze_csv_row(rec: &AnalyzeRecord) -> Vec<String> {
    let mut row = vec![
        rec.path.clone(),
        rec.width.to_string(),
        rec.height.to_string(),
        rec.channels.to_string(),
    ];
    match &rec.report {
        Some(r) => {
            row.push(format!("{}", r.skew));
            row.push(format!("{}", r.skew_adj));
            row.push(format!("{}", r.kurt));
            row.push(format!("{}", r.kurt_adj));
            row.push(format!("{}", r.rayleigh_sigma));
            row.push(format!("{}", r.qq_corr));
            row.push(psnr_cell(r.psnr_db));
            row.push(opt_cell(r.pearson));
        }
        None => row.extend(std::iter::repeat_n(String::new(), 8)),
    }
    row.push(rec.error.clone().unwrap_or_default());
    row
}
