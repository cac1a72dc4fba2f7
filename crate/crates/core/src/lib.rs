//! Block-statistics texture maps for aerial and satellite imagery.
//!
//! An image is reduced to grayscale, cut into disjoint `P x P` squares, and
//! each square is scored by its coefficient of variation `std / mean`. The
//! scores are rescaled so the most textured square gets tone 255, which turns
//! built-up areas (houses, streets) bright and homogeneous fields dark.
//! [`metrics`] derives the urbanization index, tone histograms and modality
//! labels from those maps, and [`io`] moves rasters and reports to and from
//! disk.

pub mod error;
pub mod io;
pub mod metrics;
pub mod raster;
pub mod synth;
pub mod texture;

pub use error::{Error, Result};
pub use metrics::{
    analyze_image, analyze_sequence, analyze_stats, image_stats, classify_modality, tone_histogram, transition_profile,
    urbanization_index, AnalysisParams, BrightCount, ImageAnalysis, Modality, ModalityParams,
    NormalizationMode, ToneHistogram, TransitionEntry, TransitionProfile, UrbanReport,
};
pub use raster::{to_grayscale, GrayRaster, RgbRaster};
pub use synth::{generate, Region, SplitMix64, SynthKind, SynthSpec};
pub use texture::{
    block_stats_fast, block_stats_naive, compute_map, normalize_tones, normalize_tones_by,
    render_map, BlockSpec, BlockStatGrid, ToneMap, DEFAULT_BLOCK_SIZE,
};
