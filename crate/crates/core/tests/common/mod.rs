#![allow(dead_code)]

use proptest::prelude::*;
use urbtex_core::GrayRaster;

/// Textbook per-block statistics, written independently of the library:
/// every block re-indexes the raster from scratch.
pub fn brute_force_block(gray: &GrayRaster, p: usize, r: usize, c: usize) -> (f64, f64, f64) {
    let mut values = Vec::with_capacity(p * p);
    for mu in 0..p {
        for nu in 0..p {
            values.push(gray.samples()[(r * p + mu) * gray.width() + c * p + nu]);
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let xi = if mean > 0.0 { std / mean } else { 0.0 };
    (mean, std, xi)
}

/// A raster of `w x h` random real samples with a block size that fits.
pub fn raster_and_block(max_side: usize, max_p: usize) -> impl Strategy<Value = (GrayRaster, usize)> {
    (1..=max_p)
        .prop_flat_map(move |p| (Just(p), p..=max_side.max(p), p..=max_side.max(p)))
        .prop_flat_map(|(p, w, h)| {
            (
                Just(p),
                Just(w),
                Just(h),
                prop::collection::vec(0.0f64..=255.0, w * h),
            )
        })
        .prop_map(|(p, w, h, v)| (GrayRaster::new(w, h, v).unwrap(), p))
}
