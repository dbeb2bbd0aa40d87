//! Ingestion and emission of the recording file format.
//!
//! A recording is a pair of files sharing a stem:
//!
//! * `<stem>.csv` — header `time,<ch1>,...,<chN>`, one row per sample,
//!   values as 64-bit decimal text (shortest round-trip form on write, so
//!   load(write(x)) == x bit for bit).
//! * `<stem>.json` — sidecar
//!   `{"sampling_rate_hz": <real>, "onsets": [<int>...], "labels": [<0|1>...]}`.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::{Recording, StimulusLog};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    sampling_rate_hz: f64,
    onsets: Vec<usize>,
    labels: Vec<usize>,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Loads `<path>` (CSV) plus its `.json` sidecar.
///
/// Validates the full data-model contract: unique channel names, strictly
/// increasing onsets, binary labels, and room for a one-second window after
/// every onset.
pub fn load_recording(path: &Path) -> Result<(Recording, StimulusLog)> {
    load_recording_selecting(path, None)
}

/// As [`load_recording`], optionally keeping only the named channels.
pub fn load_recording_selecting(
    path: &Path,
    channels: Option<&[String]>,
) -> Result<(Recording, StimulusLog)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("time") {
        return Err(Error::Parse(format!(
            "{}: first header column must be 'time'",
            path.display()
        )));
    }
    let names: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    if names.is_empty() {
        return Err(Error::Parse(format!("{}: no channel columns", path.display())));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != names.len() + 1 {
            return Err(Error::Parse(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row_idx + 2,
                record.len(),
                names.len() + 1
            )));
        }
        for (ch, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "{}: row {}, column '{}': invalid number '{}'",
                    path.display(),
                    row_idx + 2,
                    names[ch],
                    field
                ))
            })?;
            columns[ch].push(v);
        }
    }
    let n_t = columns[0].len();
    if n_t == 0 {
        return Err(Error::Parse(format!("{}: no sample rows", path.display())));
    }
    let mut samples = Array2::<f64>::zeros((names.len(), n_t));
    for (ch, col) in columns.iter().enumerate() {
        for (t, &v) in col.iter().enumerate() {
            samples[(ch, t)] = v;
        }
    }

    let sidecar = sidecar_path(path);
    let text = std::fs::read_to_string(&sidecar).map_err(|e| {
        Error::Parse(format!("{}: cannot read sidecar: {e}", sidecar.display()))
    })?;
    let meta: Sidecar = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", sidecar.display())))?;
    if !(meta.sampling_rate_hz > 0.0) {
        return Err(Error::Schema(format!(
            "{}: sampling_rate_hz must be positive",
            sidecar.display()
        )));
    }

    let mut rec = Recording::new(samples, meta.sampling_rate_hz, names)?;
    if let Some(keep) = channels {
        rec = rec.select_channels(keep)?;
    }
    let log = StimulusLog::new(meta.onsets, meta.labels)?;
    // The normative window is one second of samples.
    let window = meta.sampling_rate_hz.round() as usize;
    log.validate_against(&rec, window)?;
    Ok((rec, log))
}

/// Writes `<path>` (CSV) and its `.json` sidecar.
pub fn write_recording(path: &Path, rec: &Recording, log: &StimulusLog) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["time".to_string()];
    header.extend(rec.channel_names().iter().cloned());
    writer.write_record(&header)?;
    let fs = rec.sampling_rate_hz();
    let mut row = Vec::with_capacity(rec.n_channels() + 1);
    for t in 0..rec.n_timepoints() {
        row.clear();
        row.push(format!("{}", t as f64 / fs));
        for ch in 0..rec.n_channels() {
            row.push(format!("{}", rec.samples()[(ch, t)]));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;

    let meta = Sidecar {
        sampling_rate_hz: fs,
        onsets: log.onsets().to_vec(),
        labels: log.labels().to_vec(),
    };
    let json = serde_json::to_string_pretty(&meta)?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}
