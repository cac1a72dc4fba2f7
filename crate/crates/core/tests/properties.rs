mod common;

use common::{brute_force_block, raster_and_block};
use proptest::prelude::*;
use urbtex_core::metrics::DEFAULT_THRESHOLD;
use urbtex_core::{
    analyze_sequence, block_stats_fast, block_stats_naive, compute_map, normalize_tones,
    tone_histogram, urbanization_index, AnalysisParams, BlockSpec, GrayRaster, NormalizationMode,
    ToneMap,
};

fn tone_map() -> impl Strategy<Value = ToneMap> {
    (1usize..12, 1usize..12).prop_flat_map(|(cols, rows)| {
        prop::collection::vec(any::<u8>(), cols * rows).prop_map(move |tones| {
            let spec = BlockSpec::new(cols, rows, 1).unwrap();
            let degenerate = tones.iter().all(|&t| t == 0);
            ToneMap::new(spec, tones, degenerate).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn naive_matches_brute_force((gray, p) in raster_and_block(40, 8)) {
        let spec = BlockSpec::for_raster(&gray, p).unwrap();
        let grid = block_stats_naive(&gray, &spec).unwrap();
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                let (m, s, xi) = grid.block(r, c);
                let (bm, bs, bxi) = brute_force_block(&gray, p, r, c);
                prop_assert!((m - bm).abs() <= 1e-9);
                prop_assert!((s - bs).abs() <= 1e-9);
                prop_assert!((xi - bxi).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn fast_matches_naive((gray, p) in raster_and_block(96, 16)) {
        let spec = BlockSpec::for_raster(&gray, p).unwrap();
        let naive = block_stats_naive(&gray, &spec).unwrap();
        let fast = block_stats_fast(&gray, &spec).unwrap();
        for (a, b) in naive.mean.iter().chain(&naive.std).chain(&naive.xi)
            .zip(fast.mean.iter().chain(&fast.std).chain(&fast.xi)) {
            prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn ratio_ignores_brightness_scale((gray, p) in raster_and_block(48, 8), alpha in 0.01f64..=1.0) {
        let scaled = gray.scaled(alpha).unwrap();
        let (a, _) = compute_map(&gray, p).unwrap();
        let (b, _) = compute_map(&scaled, p).unwrap();
        for i in 0..a.xi.len() {
            if a.mean[i] > 1.0 {
                prop_assert!((a.xi[i] - b.xi[i]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn permuting_inside_a_block_changes_nothing(
        (gray, p) in raster_and_block(24, 6),
        seed in any::<u64>(),
    ) {
        // Reverse, then rotate, the samples of block (0, 0).
        let w = gray.width();
        let mut samples = gray.samples().to_vec();
        let idx: Vec<usize> = (0..p).flat_map(|y| (0..p).map(move |x| y * w + x)).collect();
        let mut vals: Vec<f64> = idx.iter().map(|&i| samples[i]).collect();
        vals.reverse();
        let k = (seed as usize) % vals.len();
        vals.rotate_left(k);
        for (&i, v) in idx.iter().zip(vals) {
            samples[i] = v;
        }
        let permuted = GrayRaster::new(w, gray.height(), samples).unwrap();
        let spec = BlockSpec::for_raster(&gray, p).unwrap();
        let a = block_stats_fast(&gray, &spec).unwrap();
        let b = block_stats_fast(&permuted, &spec).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stats_and_tones_stay_in_range((gray, p) in raster_and_block(48, 8)) {
        let (grid, map) = compute_map(&gray, p).unwrap();
        prop_assert!(grid.std.iter().all(|&s| s >= 0.0));
        prop_assert!(grid.xi.iter().all(|&x| x >= 0.0));
        let max = map.tones.iter().copied().max().unwrap();
        prop_assert_eq!(max == 255, grid.xi_max > 0.0);
        prop_assert_eq!(map.degenerate, grid.xi_max == 0.0);
        if map.degenerate {
            prop_assert!(map.tones.iter().all(|&t| t == 0));
        }
    }

    #[test]
    fn std_is_zero_exactly_for_uniform_blocks((gray, p) in raster_and_block(32, 6), level in 0.0f64..=255.0) {
        // Flatten every other block.
        let spec = BlockSpec::for_raster(&gray, p).unwrap();
        let w = gray.width();
        let mut samples = gray.samples().to_vec();
        for r in 0..spec.rows {
            for c in (r % 2..spec.cols).step_by(2) {
                for y in r * p..(r + 1) * p {
                    samples[y * w + c * p..y * w + (c + 1) * p].fill(level);
                }
            }
        }
        let flat = GrayRaster::new(w, gray.height(), samples).unwrap();
        for grid in [block_stats_naive(&flat, &spec).unwrap(), block_stats_fast(&flat, &spec).unwrap()] {
            for r in 0..spec.rows {
                for c in 0..spec.cols {
                    let (_, s, _) = grid.block(r, c);
                    if (c + r) % 2 == 0 {
                        prop_assert_eq!(s, 0.0);
                    } else if p > 1 {
                        prop_assert!(s > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_monotonicity(map in tone_map(), t1 in any::<u8>(), t2 in any::<u8>()) {
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        prop_assert!(urbanization_index(&map, lo).index() >= urbanization_index(&map, hi).index());
    }

    #[test]
    fn histogram_conserves_mass(map in tone_map()) {
        let h = tone_histogram(&map);
        prop_assert_eq!(h.total() as usize, map.block_count());
        prop_assert!(h.peaks.iter().all(|p| p.prominence >= 0.0));
    }

    #[test]
    fn block_positions_do_not_matter(map in tone_map(), k in any::<usize>(), t in any::<u8>()) {
        let mut shuffled = map.clone();
        let n = shuffled.tones.len();
        shuffled.tones.reverse();
        shuffled.tones.rotate_left(k % n);
        prop_assert_eq!(urbanization_index(&map, t), urbanization_index(&shuffled, t));
        prop_assert_eq!(tone_histogram(&map), tone_histogram(&shuffled));
    }

    #[test]
    fn identical_images_agree_across_modes((gray, p) in raster_and_block(40, 8), copies in 1usize..4) {
        let seq: Vec<(String, GrayRaster)> = (0..copies).map(|i| (format!("img{i}"), gray.clone())).collect();
        let params = AnalysisParams { block_size: p, threshold: DEFAULT_THRESHOLD, ..Default::default() };
        let per = analyze_sequence(&seq, &params, NormalizationMode::PerImage).unwrap();
        let shared = analyze_sequence(&seq, &params, NormalizationMode::Shared).unwrap();
        for (a, b) in per.iter().zip(&shared) {
            prop_assert_eq!(&a.map, &b.map);
            prop_assert_eq!(&a.report, &b.report);
        }
    }

    #[test]
    fn compute_map_is_fast_path_then_normalize((gray, p) in raster_and_block(48, 8)) {
        let spec = BlockSpec::for_raster(&gray, p).unwrap();
        let (grid, map) = compute_map(&gray, p).unwrap();
        prop_assert_eq!(&grid, &block_stats_fast(&gray, &spec).unwrap());
        prop_assert_eq!(map, normalize_tones(&grid));
    }
}

#[test]
fn map_is_deterministic_across_thread_pools() {
    let gray = urbtex_core::generate(&urbtex_core::synth::presets::half_urban(256, 256, 9)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| compute_map(&gray, 8).unwrap().1)
    };
    assert_eq!(run(1), run(4));
}
