use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Modality, NormalizationMode, TransitionProfile, UrbanReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// One report line per processed image. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub image_id: String,
    pub source_path: String,
    #[serde(rename = "P")]
    pub block_size: usize,
    pub threshold: u8,
    pub normalization_mode: NormalizationMode,
    pub blocks_total: usize,
    pub blocks_bright: usize,
    pub urbanization_index: f64,
    pub ximax: f64,
    pub modality: Modality,
    pub coverage: f64,
    pub timestamp: Option<String>,
}

impl ReportRow {
    pub fn from_report(
        report: &UrbanReport,
        source_path: impl Into<String>,
        normalization_mode: NormalizationMode,
        timestamp: Option<String>,
    ) -> Self {
        Self {
            image_id: report.image_id.clone(),
            source_path: source_path.into(),
            block_size: report.block_size,
            threshold: report.threshold,
            normalization_mode,
            blocks_total: report.blocks_total,
            blocks_bright: report.blocks_bright,
            urbanization_index: report.urbanization_index,
            ximax: report.ximax,
            modality: report.modality,
            coverage: report.coverage,
            timestamp,
        }
    }
}

/// CSV with a header row, or a JSON array of objects with the same keys.
/// Floats are written in shortest round-trip form.
pub fn write_report(rows: &[ReportRow], path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let file = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, rows)?;
            file.write_all(b"\n")?;
            file.flush()?;
        }
    }
    Ok(())
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    position: usize,
    image_id: &'a str,
    urbanization_index: f64,
    modality: Modality,
    mean_tone: f64,
    normalization_mode: NormalizationMode,
}

/// Transition profile as CSV, one row per image in sequence order.
pub fn write_profile(profile: &TransitionProfile, path: impl AsRef<Path>) -> Result<()> {
    if profile.entries.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut w = csv::Writer::from_path(path)?;
    for (position, e) in profile.entries.iter().enumerate() {
        w.serialize(ProfileRow {
            position,
            image_id: &e.image_id,
            urbanization_index: e.urbanization_index,
            modality: e.modality,
            mean_tone: e.mean_tone,
            normalization_mode: profile.normalization_mode,
        })?;
    }
    w.flush()?;
    Ok(())
}



#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, index: f64) -> ReportRow {
        ReportRow {
            image_id: id.into(),
            source_path: format!("in/{id}, \"quoted\".png"),
            block_size: 8,
            threshold: 128,
            normalization_mode: NormalizationMode::PerImage,
            blocks_total: 64,
            blocks_bright: 32,
            urbanization_index: index,
            ximax: 0.1 + 0.2,
            modality: Modality::Bimodal,
            coverage: 1.0 / 3.0,
            timestamp: None,
        }
    }

    #[test]
    fn csv_header_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![row("a", 0.5)];
        write_report(&rows, &path, ReportFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "image_id,source_path,P,threshold,normalization_mode,blocks_total,blocks_bright,\
             urbanization_index,ximax,modality,coverage,timestamp"
        );
        assert!(lines[1].contains(",0.5,"));
        assert!(lines[1].contains("\"in/a, \"\"quoted\"\".png\""));
        assert_eq!(read_report_csv(&path).unwrap(), rows);
    }

    #[test]
    fn json_has_same_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let rows = vec![row("a", 0.5), row("b", 0.25)];
        write_report(&rows, &path, ReportFormat::Json).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let obj = value[0].as_object().unwrap();
        assert_eq!(obj.len(), 12);
        assert!(obj.contains_key("P"));
        assert_eq!(value[0]["urbanization_index"].as_f64(), Some(0.5));
        assert_eq!(value[1]["modality"], "bimodal");
        let back: Vec<ReportRow> =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn empty_report_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_report(&[], dir.path().join("r.csv"), ReportFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::EmptyReport));
    }
}
