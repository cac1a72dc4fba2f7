//! Urbanization and texture-transition measurements over tone maps.
//!
//! Bright squares mark built-up texture, so the share of blocks at or above a
//! tone threshold is the urbanization index. The tone histogram separates the
//! two textures: rural maps pile up near tone 0, urban maps add a second,
//! broad mode at high tones.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::GrayRaster;
use crate::texture::{
    block_stats_fast, normalize_tones_by, BlockSpec, BlockStatGrid, ToneMap, DEFAULT_BLOCK_SIZE,
};

pub const DEFAULT_THRESHOLD: u8 = 128;
pub const DEFAULT_SMOOTHING_WINDOW: usize = 9;
pub const DEFAULT_PROMINENCE_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Degenerate,
    Unimodal,
    Bimodal,
    Multimodal,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Degenerate => "degenerate",
            Modality::Unimodal => "unimodal",
            Modality::Bimodal => "bimodal",
            Modality::Multimodal => "multimodal",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How tone maps in a sequence are scaled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Every image is scaled by its own largest ratio.
    #[default]
    PerImage,
    /// Every image is scaled by the largest ratio found anywhere in the
    /// sequence, so tones are comparable between images.
    Shared,
}

impl NormalizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationMode::PerImage => "per_image",
            NormalizationMode::Shared => "shared",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "per_image" | "per-image" => Ok(NormalizationMode::PerImage),
            "shared" => Ok(NormalizationMode::Shared),
            other => Err(format!("unknown normalization mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrightCount {
    pub blocks_total: usize,
    pub blocks_bright: usize,
}

impl BrightCount {
    pub fn index(&self) -> f64 {
        self.blocks_bright as f64 / self.blocks_total as f64
    }
}

/// Counts blocks whose tone is at least `threshold`.
pub fn urbanization_index(map: &ToneMap, threshold: u8) -> BrightCount {
    BrightCount {
        blocks_total: map.block_count(),
        blocks_bright: map.tones.iter().filter(|&&t| t >= threshold).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalityParams {
    /// Width of the centered moving average; odd.
    pub window: usize,
    /// Minimum peak prominence as a fraction of the block count.
    pub prominence_fraction: f64,
}

impl Default for ModalityParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_SMOOTHING_WINDOW,
            prominence_fraction: DEFAULT_PROMINENCE_FRACTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub tone: u8,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToneHistogram {
    pub bins: [u64; 256],
    pub smoothed: [f64; 256],
    pub peaks: Vec<Peak>,
}

impl ToneHistogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }
}

pub fn tone_histogram(map: &ToneMap) -> ToneHistogram {
    tone_histogram_with(map, &ModalityParams::default())
}

/// Tone counts, their moving average, and the prominent peaks of the average.
///
/// The moving average window shrinks at both ends of the tone range. Peaks
/// are local maxima (the middle of a plateau) whose prominence, measured with
/// zero padding outside `[0, 255]`, reaches `prominence_fraction` of the block
/// count.
pub fn tone_histogram_with(map: &ToneMap, params: &ModalityParams) -> ToneHistogram {
    let mut bins = [0u64; 256];
    for &t in &map.tones {
        bins[usize::from(t)] += 1;
    }
    let smoothed = moving_average(&bins, params.window.max(1));
    let min_prominence = params.prominence_fraction * map.block_count() as f64;
    let peaks = find_peaks(&smoothed)
        .into_iter()
        .filter(|p| p.prominence >= min_prominence)
        .collect();
    ToneHistogram {
        bins,
        smoothed,
        peaks,
    }
}

fn moving_average(bins: &[u64; 256], window: usize) -> [f64; 256] {
    let half = window / 2;
    let mut prefix = [0u64; 257];
    for (i, &b) in bins.iter().enumerate() {
        prefix[i + 1] = prefix[i] + b;
    }
    let mut out = [0.0; 256];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(255);
        *o = (prefix[hi + 1] - prefix[lo]) as f64 / (hi + 1 - lo) as f64;
    }
    out
}

fn find_peaks(values: &[f64]) -> Vec<Peak> {
    let n = values.len();
    let at = |i: isize| {
        if i < 0 || i as usize >= n {
            0.0
        } else {
            values[i as usize]
        }
    };
    let mut peaks = Vec::new();
    let mut start = 0;
    while start < n {
        let v = values[start];
        let mut end = start;
        while end + 1 < n && values[end + 1] == v {
            end += 1;
        }
        if v > at(start as isize - 1) && v > at(end as isize + 1) {
            let left_base = side_minimum(v, (0..start).rev().map(|i| values[i]));
            let right_base = side_minimum(v, (end + 1..n).map(|i| values[i]));
            peaks.push(Peak {
                tone: ((start + end) / 2) as u8,
                prominence: v - left_base.max(right_base),
            });
        }
        start = end + 1;
    }
    peaks
}

// Lowest value met walking away from a peak before something higher appears;
// running off the end reaches the zero padding.
fn side_minimum(peak: f64, walk: impl Iterator<Item = f64>) -> f64 {
    let mut low = peak;
    for v in walk {
        if v > peak {
            return low;
        }
        low = low.min(v);
    }
    0.0
}

/// Degenerate when every block sits at tone 0, otherwise labelled by how many
/// prominent peaks the smoothed histogram has. A histogram too flat to show
/// any prominent peak counts as unimodal.
pub fn classify_modality(hist: &ToneHistogram) -> Modality {
    let total = hist.total();
    if total == 0 || hist.bins[0] == total {
        return Modality::Degenerate;
    }
    match hist.peaks.len() {
        0 | 1 => Modality::Unimodal,
        2 => Modality::Bimodal,
        _ => Modality::Multimodal,
    }
}

/// Per-image metrics record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrbanReport {
    pub image_id: String,
    pub block_size: usize,
    pub threshold: u8,
    pub blocks_total: usize,
    pub blocks_bright: usize,
    pub urbanization_index: f64,
    /// Normalizer the tones were scaled by.
    pub ximax: f64,
    pub modality: Modality,
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub block_size: usize,
    pub threshold: u8,
    pub modality: ModalityParams,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            block_size: DEFAULT_BLOCK_SIZE,
            threshold: DEFAULT_THRESHOLD,
            modality: ModalityParams::default(),
        }
    }
}

/// Everything computed for one image.
#[derive(Debug, Clone)]
pub struct ImageAnalysis {
    pub stats: BlockStatGrid,
    pub map: ToneMap,
    pub histogram: ToneHistogram,
    pub report: UrbanReport,
}

/// Block statistics of one image; errors name the image.
pub fn image_stats(image_id: &str, gray: &GrayRaster, block_size: usize) -> Result<BlockStatGrid> {
    BlockSpec::for_raster(gray, block_size)
        .and_then(|spec| block_stats_fast(gray, &spec))
        .map_err(|e| Error::in_image(image_id, e))
}

/// Tone map, histogram and report for precomputed statistics scaled by
/// `xi_max`.
pub fn analyze_stats(
    image_id: &str,
    stats: BlockStatGrid,
    xi_max: f64,
    params: &AnalysisParams,
) -> ImageAnalysis {
    let map = normalize_tones_by(&stats, xi_max);
    let histogram = tone_histogram_with(&map, &params.modality);
    let count = urbanization_index(&map, params.threshold);
    let report = UrbanReport {
        image_id: image_id.to_owned(),
        block_size: stats.spec.block_size,
        threshold: params.threshold,
        blocks_total: count.blocks_total,
        blocks_bright: count.blocks_bright,
        urbanization_index: count.index(),
        ximax: xi_max,
        modality: classify_modality(&histogram),
        coverage: stats.spec.coverage(),
    };
    ImageAnalysis {
        stats,
        map,
        histogram,
        report,
    }
}

/// Full single-image pipeline with the image's own normalizer.
pub fn analyze_image(image_id: &str, gray: &GrayRaster, params: &AnalysisParams) -> Result<ImageAnalysis> {
    let stats = image_stats(image_id, gray, params.block_size)?;
    let xi_max = stats.xi_max;
    Ok(analyze_stats(image_id, stats, xi_max, params))
}

/// Analyzes an ordered sequence, in parallel across images.
///
/// Block statistics for all images are computed first; under
/// [`NormalizationMode::Shared`] the largest ratio over the whole sequence then
/// scales every map. Output order always matches input order.
pub fn analyze_sequence(
    sequence: &[(String, GrayRaster)],
    params: &AnalysisParams,
    mode: NormalizationMode,
) -> Result<Vec<ImageAnalysis>> {
    let stats = sequence
        .par_iter()
        .map(|(id, gray)| image_stats(id, gray, params.block_size))
        .collect::<Result<Vec<_>>>()?;
    let shared = stats.iter().map(|s| s.xi_max).fold(0.0, f64::max);
    Ok(sequence
        .par_iter()
        .zip(stats)
        .map(|((id, _), s)| {
            let xi_max = match mode {
                NormalizationMode::PerImage => s.xi_max,
                NormalizationMode::Shared => shared,
            };
            analyze_stats(id, s, xi_max, params)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub image_id: String,
    pub urbanization_index: f64,
    pub modality: Modality,
    pub mean_tone: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionProfile {
    pub normalization_mode: NormalizationMode,
    pub entries: Vec<TransitionEntry>,
}

impl TransitionProfile {
    pub fn from_analyses(analyses: &[ImageAnalysis], mode: NormalizationMode) -> Self {
        let entries = analyses
            .iter()
            .map(|a| TransitionEntry {
                image_id: a.report.image_id.clone(),
                urbanization_index: a.report.urbanization_index,
                modality: a.report.modality,
                mean_tone: a.map.mean_tone(),
            })
            .collect();
        Self {
            normalization_mode: mode,
            entries,
        }
    }

    pub fn indices(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.urbanization_index).collect()
    }
}

/// Texture-transition profile of an image sequence.
pub fn transition_profile(
    sequence: &[(String, GrayRaster)],
    block_size: usize,
    threshold: u8,
    mode: NormalizationMode,
) -> Result<TransitionProfile> {
    if sequence.is_empty() {
        return Err(Error::InvalidRaster("image sequence is empty".into()));
    }
    let params = AnalysisParams {
        block_size,
        threshold,
        ..AnalysisParams::default()
    };
    let analyses = analyze_sequence(sequence, &params, mode)?;
    Ok(TransitionProfile::from_analyses(&analyses, mode))
}
