use proptest::prelude::*;
use urbtex_core::io::{
    decode_raster, encode_map, export_histogram, load_raster, read_report_csv, save_map,
    write_profile, write_report, MapFormat, ReportFormat, ReportRow,
};
use urbtex_core::synth::presets;
use urbtex_core::{
    analyze_image, compute_map, generate, to_grayscale, tone_histogram, transition_profile,
    AnalysisParams, BlockSpec, Error, GrayRaster, NormalizationMode, ToneMap,
};

fn read_histogram(path: &std::path::Path) -> (Vec<(u16, u64, f64)>, String) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tone,count,smoothed"));
    let rows: Vec<(u16, u64, f64)> = lines
        .by_ref()
        .take(256)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let comment = lines.next().unwrap().to_string();
    assert!(lines.next().is_none());
    (rows, comment)
}

#[test]
fn degenerate_histogram_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = BlockSpec::new(4, 4, 1).unwrap();
    let hist = tone_histogram(&ToneMap::new(spec, vec![0; 16], true).unwrap());
    let path = dir.path().join("h.csv");
    export_histogram(&hist, &path).unwrap();
    let (rows, comment) = read_histogram(&path);
    assert_eq!(rows.len(), 256);
    assert_eq!((rows[0].0, rows[0].1), (0, 16));
    assert!(rows[1..].iter().all(|r| r.1 == 0));
    assert_eq!(rows[0].2, 3.2);
    assert_eq!(comment, "# peaks: 0:3.2");
}

#[test]
fn bimodal_histogram_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(&presets::half_urban(256, 256, 42)).unwrap();
    let (_, map) = compute_map(&g, 8).unwrap();
    let hist = tone_histogram(&map);
    let path = dir.path().join("h.csv");
    export_histogram(&hist, &path).unwrap();
    let (rows, comment) = read_histogram(&path);
    assert_eq!(rows.iter().map(|r| r.1).sum::<u64>(), 1024);
    for (row, (b, s)) in rows.iter().zip(hist.bins.iter().zip(&hist.smoothed)) {
        assert_eq!((row.1, row.2), (*b, *s));
    }
    let peaks: Vec<&str> = comment.trim_start_matches("# peaks:").split_whitespace().collect();
    assert_eq!(peaks.len(), 2, "{comment}");
}

#[test]
fn load_from_disk_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.ppm");
    std::fs::write(&path, "P3\n2 1\n255\n255 0 0  0 0 255\n").unwrap();
    let rgb = load_raster(&path).unwrap();
    assert_eq!(rgb.samples(), &[255, 0, 0, 0, 0, 255]);
    assert!(matches!(load_raster(dir.path().join("nope.png")), Err(Error::Io(_))));
}

#[test]
fn png_alpha_and_sixteen_bit() {
    fn png(color: png::ColorType, depth: png::BitDepth, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, 1, 1);
        enc.set_color(color);
        enc.set_depth(depth);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(data).unwrap();
        w.finish().unwrap();
        out
    }
    let rgba = png(png::ColorType::Rgba, png::BitDepth::Eight, &[10, 20, 30, 0]);
    assert_eq!(decode_raster(&rgba).unwrap().samples(), &[10, 20, 30]);
    let rgb = png(png::ColorType::Rgb, png::BitDepth::Eight, &[1, 2, 3]);
    assert_eq!(decode_raster(&rgb).unwrap().samples(), &[1, 2, 3]);
    let ga = png(png::ColorType::GrayscaleAlpha, png::BitDepth::Eight, &[77, 255]);
    assert_eq!(decode_raster(&ga).unwrap().samples(), &[77, 77, 77]);
    let wide = png(png::ColorType::Grayscale, png::BitDepth::Sixteen, &[1, 0]);
    assert!(matches!(decode_raster(&wide), Err(Error::BitDepthUnsupported(16))));
}

#[test]
fn profile_csv_keeps_order() {
    let dir = tempfile::tempdir().unwrap();
    let seq: Vec<(String, GrayRaster)> = presets::transition_triple(7)
        .into_iter()
        .map(|(id, s)| (id, generate(&s).unwrap()))
        .collect();
    let profile = transition_profile(&seq, 8, 128, NormalizationMode::Shared).unwrap();
    let path = dir.path().join("p.csv");
    write_profile(&profile, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "position,image_id,urbanization_index,modality,mean_tone,normalization_mode"
    );
    assert!(lines[1].starts_with("0,a_rural,0.05,unimodal,"));
    assert!(lines[2].starts_with("1,b_mixed,0.45,bimodal,"));
    assert!(lines[3].starts_with("2,c_urban,0.85,"));
    assert!(lines[3].ends_with(",shared"));
}

fn integer_raster() -> impl Strategy<Value = GrayRaster> {
    (1usize..40, 1usize..40).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h).prop_map(move |v| {
            GrayRaster::new(w, h, v.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_files_round_trip(g in integer_raster()) {
        for format in [MapFormat::Pgm, MapFormat::Png] {
            let back = to_grayscale(&decode_raster(&encode_map(&g, format).unwrap()).unwrap());
            prop_assert_eq!(&back, &g);
        }
    }

    #[test]
    fn report_csv_round_trips(
        index in 0.0f64..=1.0,
        ximax in 0.0f64..1e6,
        coverage in 0.0f64..=1.0,
        id in "[a-z,\" ]{1,12}",
    ) {
        let dir = tempfile::tempdir().unwrap();
        let g = generate(&presets::half_urban(32, 32, 1)).unwrap();
        let report = analyze_image(&id, &g, &AnalysisParams::default()).unwrap().report;
        let mut row = ReportRow::from_report(&report, format!("dir/{id}.png"), NormalizationMode::Shared, Some("t".into()));
        row.urbanization_index = index;
        row.ximax = ximax;
        row.coverage = coverage;
        let path = dir.path().join("r.csv");
        write_report(std::slice::from_ref(&row), &path, ReportFormat::Csv).unwrap();
        prop_assert_eq!(read_report_csv(&path).unwrap(), vec![row]);
    }
}

#[test]
fn saved_map_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(&presets::half_urban(64, 64, 2)).unwrap();
    let (_, map) = compute_map(&g, 8).unwrap();
    let rendered = urbtex_core::render_map(&map);
    for format in [MapFormat::Pgm, MapFormat::Png] {
        let path = dir.path().join(format!("m.{}", format.extension()));
        save_map(&rendered, &path, format).unwrap();
        assert_eq!(to_grayscale(&load_raster(&path).unwrap()), rendered);
    }
}
