//! Reading input imagery and writing maps, histograms and reports.

mod png_codec;
mod pnm;
mod report;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ToneHistogram;
use crate::raster::{GrayRaster, RgbRaster};

pub use report::{
    read_report_csv, write_profile, write_report, ReportFormat, ReportRow,
};

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFormat {
    Pgm,
    Png,
}

impl MapFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            MapFormat::Pgm => "pgm",
            MapFormat::Png => "png",
        }
    }
}

/// Decodes PNG, PPM (P3/P6) or PGM (P2/P5) bytes, sniffing the format from
/// the leading magic bytes. Gray inputs load with R = G = B.
pub fn decode_raster(bytes: &[u8]) -> Result<RgbRaster> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        png_codec::decode(bytes)
    } else if bytes.first() == Some(&b'P') {
        pnm::decode(bytes)
    } else if bytes.is_empty() {
        Err(Error::corrupt(0, "empty file"))
    } else {
        Err(Error::UnsupportedFormat(
            "expected a PNG, PPM or PGM file".into(),
        ))
    }
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<RgbRaster> {
    decode_raster(&fs::read(path)?)
}

/// Encodes a map raster, rounding samples to the nearest integer tone.
pub fn encode_map(map: &GrayRaster, format: MapFormat) -> Result<Vec<u8>> {
    let luma = map.to_u8();
    match format {
        MapFormat::Pgm => Ok(pnm::encode_pgm(map.width(), map.height(), &luma)),
        MapFormat::Png => png_codec::encode_gray(map.width(), map.height(), &luma),
    }
}

pub fn save_map(map: &GrayRaster, path: impl AsRef<Path>, format: MapFormat) -> Result<()> {
    fs::write(path, encode_map(map, format)?)?;
    Ok(())
}

/// Writes 256 `tone,count,smoothed` rows after a header line, then a comment
/// line listing the detected peaks as `tone:prominence`.
pub fn export_histogram(hist: &ToneHistogram, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("tone,count,smoothed\n");
    for (tone, (count, smoothed)) in hist.bins.iter().zip(&hist.smoothed).enumerate() {
        out.push_str(&format!("{tone},{count},{smoothed}\n"));
    }
    out.push_str("# peaks:");
    for p in &hist.peaks {
        out.push_str(&format!(" {}:{}", p.tone, p.prominence));
    }
    out.push('\n');
    fs::write(path, out)?;
    Ok(())
}
