//! In-memory rasters: 8-bit RGB input and real-valued grayscale.

use crate::error::{Error, Result};

/// An 8-bit RGB image stored row-major as interleaved `R, G, B` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbRaster {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl RgbRaster {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Error::InvalidRaster("dimensions overflow".into()))?;
        if samples.len() != expected {
            return Err(Error::InvalidRaster(format!(
                "expected {expected} channel samples for {width}x{height}, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Builds an RGB raster whose three channels all equal `gray`.
    pub fn from_luma(width: usize, height: usize, gray: &[u8]) -> Result<Self> {
        let samples = gray.iter().flat_map(|&v| [v, v, v]).collect();
        Self::new(width, height, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.samples[i], self.samples[i + 1], self.samples[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.samples.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

/// A grayscale image with real-valued luminance in `[0, 255]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl GrayRaster {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidRaster("dimensions overflow".into()))?;
        if samples.len() != expected {
            return Err(Error::InvalidRaster(format!(
                "expected {expected} samples for {width}x{height}, got {}",
                samples.len()
            )));
        }
        if let Some((i, v)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=255.0).contains(*v))
        {
            return Err(Error::InvalidRaster(format!(
                "sample {i} = {v} lies outside [0, 255]"
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, level: f64) -> Result<Self> {
        Self::new(width, height, vec![level; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    /// Multiplies every sample by `factor`, which must lie in `[0, 1]`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidRaster(format!(
                "scale factor {factor} outside [0, 1]"
            )));
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|v| v * factor).collect(),
        })
    }

    /// Samples rounded to the nearest integer and clamped to `[0, 255]`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.samples
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Averages the three channels of every pixel without integer truncation.
pub fn to_grayscale(rgb: &RgbRaster) -> GrayRaster {
    let samples = rgb
        .pixels()
        .map(|[r, g, b]| (f64::from(r) + f64::from(g) + f64::from(b)) / 3.0)
        .collect();
    GrayRaster {
        width: rgb.width,
        height: rgb.height,
        samples,
    }
}
