//! Raster fixtures shared by the criterion benches.

use urbtex_core::synth::presets;
use urbtex_core::{generate, GrayRaster};

/// Square raster, left half flat field and right half seeded noise.
pub fn half_urban(side: usize, seed: u64) -> GrayRaster {
    generate(&presets::half_urban(side, side, seed)).expect("valid fixture spec")
}
