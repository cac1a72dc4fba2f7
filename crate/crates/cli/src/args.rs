use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use urbtex_core::io::{MapFormat, ReportFormat};
use urbtex_core::metrics::{
    DEFAULT_PROMINENCE_FRACTION, DEFAULT_SMOOTHING_WINDOW, DEFAULT_THRESHOLD,
};
use urbtex_core::{AnalysisParams, ModalityParams, NormalizationMode, DEFAULT_BLOCK_SIZE};

#[derive(Debug, Parser)]
#[command(name = "urbtex", version, about = "Block texture maps and urbanization metrics for aerial imagery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map and measure each input image independently.
    Analyze(RunArgs),
    /// Treat the inputs as an ordered sequence and emit a transition profile.
    Sequence(RunArgs),
    /// Write a synthetic fixture raster.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalization {
    PerImage,
    Shared,
}

impl From<Normalization> for NormalizationMode {
    fn from(n: Normalization) -> Self {
        match n {
            Normalization::PerImage => NormalizationMode::PerImage,
            Normalization::Shared => NormalizationMode::Shared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Emit {
    Maps,
    Histograms,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapFormatArg {
    Png,
    Pgm,
}

impl From<MapFormatArg> for MapFormat {
    fn from(f: MapFormatArg) -> Self {
        match f {
            MapFormatArg::Png => MapFormat::Png,
            MapFormatArg::Pgm => MapFormat::Pgm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormatArg {
    Csv,
    Json,
}

impl From<ReportFormatArg> for ReportFormat {
    fn from(f: ReportFormatArg) -> Self {
        match f {
            ReportFormatArg::Csv => ReportFormat::Csv,
            ReportFormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Image files or directories (directories expand to their PNG/PPM/PGM
    /// files in lexicographic order).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Block edge length in pixels.
    #[arg(short = 'P', long, default_value_t = DEFAULT_BLOCK_SIZE, value_parser = positive)]
    pub block_size: usize,

    /// Minimum tone of a bright (urban) block.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: u8,

    #[arg(long, value_enum, default_value_t = Normalization::PerImage)]
    pub normalization: Normalization,

    /// Artifacts to write.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Maps, Emit::Histograms, Emit::Report])]
    pub emit: Vec<Emit>,

    #[arg(long, default_value = "urbtex-out")]
    pub out_dir: PathBuf,

    /// Worker threads; defaults to the number of logical CPUs.
    #[arg(long, value_parser = positive)]
    pub jobs: Option<usize>,

    /// Map image format.
    #[arg(long, value_enum, default_value_t = MapFormatArg::Png)]
    pub format: MapFormatArg,

    #[arg(long, value_enum, default_value_t = ReportFormatArg::Csv)]
    pub report_format: ReportFormatArg,

    /// Leave the report timestamp column empty.
    #[arg(long)]
    pub no_timestamp: bool,

    /// Moving-average window (bins) applied before peak detection.
    #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW, value_parser = positive)]
    pub smoothing_window: usize,

    /// Minimum peak prominence, as a fraction of the block count.
    #[arg(long, default_value_t = DEFAULT_PROMINENCE_FRACTION)]
    pub min_prominence: f64,
}

impl RunArgs {
    pub fn params(&self) -> AnalysisParams {
        AnalysisParams {
            block_size: self.block_size,
            threshold: self.threshold,
            modality: ModalityParams {
                window: self.smoothing_window,
                prominence_fraction: self.min_prominence,
            },
        }
    }

    pub fn emits(&self, what: Emit) -> bool {
        self.emit.contains(&what)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKindArgs,

    /// Output raster; `.png` or `.pgm` selects the format.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Also write the block statistics next to the raster as
    /// `<output>.stats.json`.
    #[arg(long, global = true)]
    pub golden: bool,

    /// Block size used for `--golden`.
    #[arg(short = 'P', long, global = true, default_value_t = DEFAULT_BLOCK_SIZE, value_parser = positive)]
    pub block_size: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Dims {
    #[arg(default_value_t = 64)]
    pub width: usize,
    #[arg(default_value_t = 64)]
    pub height: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SynthKindArgs {
    Uniform {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 128.0)]
        level: f64,
    },
    Checkerboard {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 1)]
        cell: usize,
        #[arg(long, default_value_t = 0.0)]
        low: f64,
        #[arg(long, default_value_t = 255.0)]
        high: f64,
    },
    SaltPepper {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        low: f64,
        #[arg(long, default_value_t = 255.0)]
        high: f64,
    },
    /// Any fixture described by a JSON spec file.
    Composite {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}
