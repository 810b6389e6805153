use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bci_cli::{
    bench::DEFAULT_SIZES, run_analyze, run_bench_cmd, run_enhance, run_qq, ReportFormat,
    SearchSettings, EXIT_BAD_ARGS,
};
use bci_core::boxcox::EstimationMode;

/// Box-Cox image enhancement: lambda estimated by maximum likelihood from
/// the image's tonal histogram (or full pixel data), applied as a power
/// transform with min-max rescaling.
#[derive(Parser)]
#[command(name = "bci", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Estimate from the vector of nonzero histogram counts (default).
    Counts,
    /// Estimate from count-weighted histogram bin centers (exact proxy).
    Weighted,
    /// Estimate from the full quantized pixel vector (slow; for comparison).
    FullData,
}

impl From<ModeArg> for EstimationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Counts => EstimationMode::HistogramCounts,
            ModeArg::Weighted => EstimationMode::HistogramWeighted,
            ModeArg::FullData => EstimationMode::FullData,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Lambda estimation mode.
    #[arg(long, value_enum, default_value = "counts")]
    mode: ModeArg,
    /// Lower end of the lambda search interval.
    #[arg(long, default_value_t = -5.0)]
    lo: f64,
    /// Upper end of the lambda search interval.
    #[arg(long, default_value_t = 5.0)]
    hi: f64,
    /// Width of the final bracketing interval around the maximizer.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

impl SearchArgs {
    fn settings(&self) -> SearchSettings {
        SearchSettings {
            mode: self.mode.into(),
            lo: self.lo,
            hi: self.hi,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance images; each input gets an output PNG and a JSON record.
    Enhance {
        /// Input images (PNG, PGM, or PPM).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Number of images processed concurrently.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Write one quality-report row per image (CSV or JSON).
    Analyze {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Reference image enabling the PSNR and Pearson columns.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Benchmark lambda estimation: full pixel vector vs. histogram modes.
    Bench {
        /// Square image sizes to benchmark.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        /// Seed of the synthetic benchmark fixture.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        search: SearchArgs,
        /// CSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export Rayleigh QQ pairs for an image as TSV.
    Qq {
        input: PathBuf,
        /// TSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Enhance {
            inputs,
            out,
            search,
            workers,
        } => {
            let settings = search.settings();
            if let Err(msg) = validate(&settings, workers) {
                eprintln!("bci: {msg}");
                return ExitCode::from(EXIT_BAD_ARGS as u8);
            }
            run_enhance(&inputs, &out, &settings, workers)
        }
        Command::Analyze {
            inputs,
            reference,
            format,
            out,
            workers,
        } => {
            if workers == 0 {
                eprintln!("bci: --workers must be at least 1");
                return ExitCode::from(EXIT_BAD_ARGS as u8);
            }
            let format = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            run_analyze(&inputs, reference.as_deref(), format, out.as_deref(), workers)
        }
        Command::Bench {
            sizes,
            seed,
            search,
            out,
        } => {
            let settings = search.settings();
            if let Err(msg) = validate(&settings, 1) {
                eprintln!("bci: {msg}");
                return ExitCode::from(EXIT_BAD_ARGS as u8);
            }
            if sizes.is_empty() || sizes.contains(&0) {
                eprintln!("bci: --sizes must list positive image sizes");
                return ExitCode::from(EXIT_BAD_ARGS as u8);
            }
            run_bench_cmd(&sizes, seed, &settings, out.as_deref())
        }
        Command::Qq { input, out } => run_qq(&input, out.as_deref()),
    };
    ExitCode::from(code as u8)
}

fn validate(settings: &SearchSettings, workers: usize) -> Result<(), String> {
    settings.validate()?;
    if workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    Ok(())
}
