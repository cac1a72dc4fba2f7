use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::error;
use urbtex_core::io::{save_map, MapFormat};
use urbtex_core::{block_stats_naive, generate, BlockSpec, SynthKind, SynthSpec};

use crate::args::{SynthArgs, SynthKindArgs};
use crate::Status;

pub fn run(args: &SynthArgs) -> Status {
    match write_fixture(args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            Status::Success
        }
        Err(err) => {
            error!("{err:#}");
            Status::Failure
        }
    }
}

fn spec_of(kind: &SynthKindArgs) -> Result<(SynthSpec, &'static str)> {
    Ok(match kind {
        SynthKindArgs::Uniform { dims, level } => {
            (SynthSpec::uniform(dims.width, dims.height, *level), "uniform")
        }
        SynthKindArgs::Checkerboard {
            dims,
            cell,
            low,
            high,
        } => (
            SynthSpec::checkerboard(dims.width, dims.height, *cell, *low, *high),
            "checkerboard",
        ),
        SynthKindArgs::SaltPepper {
            dims,
            density,
            seed,
            low,
            high,
        } => (
            SynthSpec {
                width: dims.width,
                height: dims.height,
                kind: SynthKind::SaltPepper {
                    density: *density,
                    low: *low,
                    high: *high,
                    seed: *seed,
                },
            },
            "salt-pepper",
        ),
        SynthKindArgs::Composite { spec } => {
            let text = fs::read_to_string(spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let parsed = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", spec.display()))?;
            (parsed, "composite")
        }
    })
}

fn format_for(path: &Path) -> MapFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => MapFormat::Pgm,
        _ => MapFormat::Png,
    }
}

fn write_fixture(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let (spec, name) = spec_of(&args.kind)?;
    let raster = generate(&spec)?;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.pgm")));
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    save_map(&raster, &output, format_for(&output))
        .with_context(|| format!("writing {}", output.display()))?;
    let mut written = vec![output.clone()];

    if args.golden {
        let block = BlockSpec::for_raster(&raster, args.block_size)?;
        let grid = block_stats_naive(&raster, &block)?;
        let mut golden = output.into_os_string();
        golden.push(".stats.json");
        let golden = PathBuf::from(golden);
        fs::write(&golden, serde_json::to_string_pretty(&grid)? + "\n")
            .with_context(|| format!("writing {}", golden.display()))?;
        written.push(golden);
    }
    Ok(written)
}
