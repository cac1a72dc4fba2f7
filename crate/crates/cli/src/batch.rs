//! `analyze` and `sequence`: load, map and measure a list of images.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use log::error;
use rayon::prelude::*;
use urbtex_core::io::{
    export_histogram, load_raster, save_map, write_profile, write_report, MapFormat, ReportFormat,
    ReportRow,
};
use urbtex_core::{
    analyze_stats, image_stats, render_map, to_grayscale, BlockStatGrid, ImageAnalysis,
    NormalizationMode, TransitionProfile,
};

use crate::args::{Emit, RunArgs};
use crate::Status;

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "ppm", "pgm", "pnm"];

#[derive(Debug, Clone)]
struct Input {
    id: String,
    path: PathBuf,
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Expands directories (sorted by file name) and assigns each image a unique
/// id: its file stem, or its whole file name when stems collide.
fn resolve_inputs(paths: &[PathBuf]) -> Result<Vec<Input>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("listing {}", path.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()
                .with_context(|| format!("listing {}", path.display()))?;
            entries.retain(|p| p.is_file() && has_image_extension(p));
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    let mut seen = HashSet::new();
    Ok(files
        .into_iter()
        .map(|path| {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let id = if seen.insert(stem.clone()) {
                stem
            } else {
                path.file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or(stem)
            };
            seen.insert(id.clone());
            Input { id, path }
        })
        .collect())
}

fn load_stats(input: &Input, block_size: usize) -> Result<BlockStatGrid> {
    let rgb = load_raster(&input.path)?;
    Ok(image_stats(&input.id, &to_grayscale(&rgb), block_size)?)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

fn timestamp(args: &RunArgs) -> Option<String> {
    (!args.no_timestamp)
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn write_artifacts(args: &RunArgs, analysis: &ImageAnalysis) -> Result<()> {
    let id = &analysis.report.image_id;
    if args.emits(Emit::Maps) {
        let format = MapFormat::from(args.format);
        let path = args.out_dir.join(format!("{id}.map.{}", format.extension()));
        save_map(&render_map(&analysis.map), &path, format)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if args.emits(Emit::Histograms) {
        let path = args.out_dir.join(format!("{id}.hist.csv"));
        export_histogram(&analysis.histogram, &path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn report_rows(
    done: &[(Input, ImageAnalysis)],
    mode: NormalizationMode,
    timestamp: Option<String>,
) -> Vec<ReportRow> {
    done.iter()
        .map(|(input, a)| {
            ReportRow::from_report(
                &a.report,
                input.path.display().to_string(),
                mode,
                timestamp.clone(),
            )
        })
        .collect()
}

fn emit_report(args: &RunArgs, rows: &[ReportRow]) -> Result<Option<PathBuf>> {
    if !args.emits(Emit::Report) {
        return Ok(None);
    }
    let format = ReportFormat::from(args.report_format);
    let path = args.out_dir.join(format!("report.{}", format.extension()));
    write_report(rows, &path, format).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path))
}

fn normalizer(mode: NormalizationMode, stats: &BlockStatGrid, shared: f64) -> f64 {
    match mode {
        NormalizationMode::PerImage => stats.xi_max,
        NormalizationMode::Shared => shared,
    }
}

/// Every image is processed on its own; failures are reported and skipped.
pub fn analyze(args: &RunArgs) -> Status {
    match run_analyze(args) {
        Ok(status) => status,
        Err(err) => {
            error!("{err:#}");
            Status::Failure
        }
    }
}

fn run_analyze(args: &RunArgs) -> Result<Status> {
    let inputs = resolve_inputs(&args.inputs)?;
    if inputs.is_empty() {
        return Err(anyhow!("no input images found"));
    }
    let pool = pool(args.jobs)?;
    let params = args.params();
    let mode = NormalizationMode::from(args.normalization);
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let loaded: Vec<Result<BlockStatGrid>> = pool.install(|| {
        inputs
            .par_iter()
            .map(|input| load_stats(input, params.block_size))
            .collect()
    });
    let shared = loaded
        .iter()
        .flatten()
        .map(|s| s.xi_max)
        .fold(0.0, f64::max);

    let outcomes: Vec<Result<(Input, ImageAnalysis)>> = pool.install(|| {
        inputs
            .par_iter()
            .zip(loaded)
            .map(|(input, stats)| {
                let stats = stats?;
                let xi_max = normalizer(mode, &stats, shared);
                let analysis = analyze_stats(&input.id, stats, xi_max, &params);
                write_artifacts(args, &analysis)?;
                Ok((input.clone(), analysis))
            })
            .collect()
    });

    let mut done = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for (input, outcome) in inputs.iter().zip(outcomes) {
        match outcome {
            Ok(ok) => done.push(ok),
            Err(err) => {
                failed += 1;
                error!("{}: {err:#}", input.path.display());
            }
        }
    }
    if done.is_empty() {
        return Err(anyhow!("all {failed} input images failed"));
    }
    if let Some(path) = emit_report(args, &report_rows(&done, mode, timestamp(args)))? {
        println!("{}", path.display());
    }
    Ok(if failed == 0 {
        Status::Success
    } else {
        Status::Partial
    })
}

/// All images must succeed; nothing is written otherwise.
pub fn sequence(args: &RunArgs) -> Status {
    match run_sequence(args) {
        Ok(()) => Status::Success,
        Err(err) => {
            error!("{err:#}");
            Status::Failure
        }
    }
}

fn run_sequence(args: &RunArgs) -> Result<()> {
    let inputs = resolve_inputs(&args.inputs)?;
    if inputs.is_empty() {
        return Err(anyhow!("no input images found"));
    }
    let pool = pool(args.jobs)?;
    let params = args.params();
    let mode = NormalizationMode::from(args.normalization);

    let loaded: Vec<Result<BlockStatGrid>> = pool.install(|| {
        inputs
            .par_iter()
            .map(|input| load_stats(input, params.block_size))
            .collect()
    });
    let mut stats = Vec::with_capacity(loaded.len());
    let mut failures = Vec::new();
    for (input, s) in inputs.iter().zip(loaded) {
        match s {
            Ok(s) => stats.push(s),
            Err(err) => failures.push(format!("{}: {err:#}", input.path.display())),
        }
    }
    if !failures.is_empty() {
        for f in &failures {
            error!("{f}");
        }
        return Err(anyhow!(
            "{} of {} sequence images failed; no profile written",
            failures.len(),
            inputs.len()
        ));
    }

    let shared = stats.iter().map(|s| s.xi_max).fold(0.0, f64::max);
    let analyses: Vec<ImageAnalysis> = pool.install(|| {
        inputs
            .par_iter()
            .zip(stats)
            .map(|(input, s)| {
                let xi_max = normalizer(mode, &s, shared);
                analyze_stats(&input.id, s, xi_max, &params)
            })
            .collect()
    });

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    pool.install(|| analyses.par_iter().try_for_each(|a| write_artifacts(args, a)))?;

    let profile = TransitionProfile::from_analyses(&analyses, mode);
    let profile_path = args.out_dir.join("profile.csv");
    write_profile(&profile, &profile_path)
        .with_context(|| format!("writing {}", profile_path.display()))?;
    println!("{}", profile_path.display());

    let done: Vec<(Input, ImageAnalysis)> = inputs.into_iter().zip(analyses).collect();
    if let Some(path) = emit_report(args, &report_rows(&done, mode, timestamp(args)))? {
        println!("{}", path.display());
    }
    Ok(())
}
