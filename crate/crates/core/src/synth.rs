//! Deterministic synthetic rasters with known texture statistics.
//!
//! Random fixtures use SplitMix64 (Steele, Lea and Flood, 2014) seeded with
//! the raw seed as its state. Each pixel, in row-major order, draws one
//! 64-bit output `z` and becomes the high level when
//! `(z >> 11) * 2^-53 < density`, so a fixture is byte-stable on every
//! platform and easy to reproduce in other languages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::GrayRaster;

/// The SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits of the next output.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    Uniform {
        level: f64,
    },
    /// Square cells of `cell` pixels alternating between two levels, starting
    /// with `low` at the top-left corner.
    Checkerboard {
        cell: usize,
        low: f64,
        high: f64,
    },
    /// Each pixel is `high` with probability `density`, else `low`.
    SaltPepper {
        density: f64,
        low: f64,
        high: f64,
        seed: u64,
    },
    /// Rectangles that tile the raster exactly, each filled by its own kind in
    /// region-local coordinates.
    Composite {
        regions: Vec<Region>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub fill: SynthKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    #[serde(flatten)]
    pub kind: SynthKind,
}

impl SynthSpec {
    pub fn uniform(width: usize, height: usize, level: f64) -> Self {
        Self {
            width,
            height,
            kind: SynthKind::Uniform { level },
        }
    }

    pub fn checkerboard(width: usize, height: usize, cell: usize, low: f64, high: f64) -> Self {
        Self {
            width,
            height,
            kind: SynthKind::Checkerboard { cell, low, high },
        }
    }

    pub fn salt_pepper(width: usize, height: usize, density: f64, seed: u64) -> Self {
        Self {
            width,
            height,
            kind: SynthKind::SaltPepper {
                density,
                low: 0.0,
                high: 255.0,
                seed,
            },
        }
    }

    pub fn composite(width: usize, height: usize, regions: Vec<Region>) -> Self {
        Self {
            width,
            height,
            kind: SynthKind::Composite { regions },
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if (0.0..=255.0).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("level {level} outside [0, 255]")))
    }
}

fn validate(kind: &SynthKind, width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidSpec(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    match kind {
        SynthKind::Uniform { level } => check_level(*level),
        SynthKind::Checkerboard { cell, low, high } => {
            if *cell == 0 {
                return Err(Error::InvalidSpec("checker cell must be at least 1".into()));
            }
            check_level(*low)?;
            check_level(*high)
        }
        SynthKind::SaltPepper {
            density, low, high, ..
        } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::InvalidSpec(format!(
                    "density {density} outside [0, 1]"
                )));
            }
            check_level(*low)?;
            check_level(*high)
        }
        SynthKind::Composite { regions } => {
            let mut area = 0usize;
            for (i, r) in regions.iter().enumerate() {
                if r.x + r.width > width || r.y + r.height > height {
                    return Err(Error::InvalidSpec(format!(
                        "region {i} extends past the {width}x{height} raster"
                    )));
                }
                for (j, o) in regions[..i].iter().enumerate() {
                    let overlap = r.x < o.x + o.width
                        && o.x < r.x + r.width
                        && r.y < o.y + o.height
                        && o.y < r.y + r.height;
                    if overlap {
                        return Err(Error::InvalidSpec(format!(
                            "regions {j} and {i} overlap"
                        )));
                    }
                }
                validate(&r.fill, r.width, r.height)?;
                area += r.width * r.height;
            }
            if area != width * height {
                return Err(Error::InvalidSpec(format!(
                    "regions cover {area} of {} pixels",
                    width * height
                )));
            }
            Ok(())
        }
    }
}

fn fill(kind: &SynthKind, width: usize, height: usize, put: &mut dyn FnMut(usize, usize, f64)) {
    match kind {
        SynthKind::Uniform { level } => {
            for y in 0..height {
                for x in 0..width {
                    put(x, y, *level);
                }
            }
        }
        SynthKind::Checkerboard { cell, low, high } => {
            for y in 0..height {
                for x in 0..width {
                    let odd = (x / cell + y / cell) % 2 == 1;
                    put(x, y, if odd { *high } else { *low });
                }
            }
        }
        SynthKind::SaltPepper {
            density,
            low,
            high,
            seed,
        } => {
            let mut rng = SplitMix64::new(*seed);
            for y in 0..height {
                for x in 0..width {
                    let v = if rng.next_f64() < *density { *high } else { *low };
                    put(x, y, v);
                }
            }
        }
        SynthKind::Composite { regions } => {
            for r in regions {
                fill(&r.fill, r.width, r.height, &mut |x, y, v| {
                    put(r.x + x, r.y + y, v)
                });
            }
        }
    }
}

pub fn generate(spec: &SynthSpec) -> Result<GrayRaster> {
    validate(&spec.kind, spec.width, spec.height)?;
    let mut samples = vec![0.0; spec.width * spec.height];
    fill(&spec.kind, spec.width, spec.height, &mut |x, y, v| {
        samples[y * spec.width + x] = v
    });
    GrayRaster::new(spec.width, spec.height, samples)
}

/// Ready-made fixtures with known texture content.
///
/// "Rural" ground is a flat field at level 100, which scores zero in every
/// block. "Urban" ground is dense salt-and-pepper noise between 220 and 255;
/// its blocks all score close to the maximum, so at block sizes around 8 they
/// land in a narrow band just below tone 255.
pub mod presets {
    use super::{Region, SynthKind, SynthSpec};

    pub const RURAL_LEVEL: f64 = 100.0;

    pub fn urban_noise(seed: u64) -> SynthKind {
        SynthKind::SaltPepper {
            density: 0.5,
            low: 220.0,
            high: 255.0,
            seed,
        }
    }

    /// Flat rural field with an urban strip `urban_width` pixels wide along
    /// the right edge.
    pub fn urban_strip(width: usize, height: usize, urban_width: usize, seed: u64) -> SynthSpec {
        let urban_width = urban_width.min(width);
        let rural_width = width - urban_width;
        let mut regions = Vec::with_capacity(2);
        if rural_width > 0 {
            regions.push(Region {
                x: 0,
                y: 0,
                width: rural_width,
                height,
                fill: SynthKind::Uniform { level: RURAL_LEVEL },
            });
        }
        if urban_width > 0 {
            regions.push(Region {
                x: rural_width,
                y: 0,
                width: urban_width,
                height,
                fill: urban_noise(seed),
            });
        }
        SynthSpec::composite(width, height, regions)
    }

    /// Left half rural, right half urban.
    pub fn half_urban(width: usize, height: usize, seed: u64) -> SynthSpec {
        urban_strip(width, height, width - width / 2, seed)
    }

    /// A single low-contrast noise texture (levels 100 and 104) covering the
    /// whole raster.
    pub fn low_noise(width: usize, height: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            width,
            height,
            kind: SynthKind::SaltPepper {
                density: 0.5,
                low: 100.0,
                high: 104.0,
                seed,
            },
        }
    }

    /// Rural, mixed and urban 160x160 scenes whose urban strips cover 1, 9
    /// and 17 of the 20 block columns at block size 8 (fractions 0.05, 0.45
    /// and 0.85).
    pub fn transition_triple(seed: u64) -> [(String, SynthSpec); 3] {
        [("a_rural", 8), ("b_mixed", 72), ("c_urban", 136)]
            .map(|(id, w)| (id.to_string(), urban_strip(160, 160, w, seed)))
    }
}
