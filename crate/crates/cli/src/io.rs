//! Spec files and CSV panels.

use std::fs;
use std::path::{Path, PathBuf};

use causalflow::{ARProcessSpec, TimeSeriesPanel};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Row-major matrix, either flat or as a list of rows.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl MatrixJson {
    fn to_matrix(&self, d: usize, what: &str) -> Result<DMatrix<f64>> {
        let flat: Vec<f64> = match self {
            MatrixJson::Flat(v) => v.clone(),
            MatrixJson::Rows(rows) => {
                if rows.iter().any(|r| r.len() != d) {
                    return Err(CliError::Input(format!("{what}: every row needs {d} entries")));
                }
                rows.concat()
            }
        };
        if flat.len() != d * d {
            return Err(CliError::Input(format!(
                "{what}: expected {} entries, found {}",
                d * d,
                flat.len()
            )));
        }
        Ok(DMatrix::from_row_slice(d, d, &flat))
    }

    fn from_matrix(m: &DMatrix<f64>) -> Self {
        MatrixJson::Rows(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub channels: Vec<String>,
    pub coupling: MatrixJson,
    pub noise_cov: MatrixJson,
}

impl SpecFile {
    pub fn into_spec(self) -> Result<ARProcessSpec> {
        let d = self.channels.len();
        let c = self.coupling.to_matrix(d, "coupling")?;
        let w = self.noise_cov.to_matrix(d, "noise_cov")?;
        Ok(ARProcessSpec::new(self.channels, c, w)?)
    }

    pub fn from_spec(spec: &ARProcessSpec) -> Self {
        Self {
            channels: spec.channel_names().to_vec(),
            coupling: MatrixJson::from_matrix(spec.coupling()),
            noise_cov: MatrixJson::from_matrix(spec.noise_cov()),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Reads a spec and rejects non-stationary dynamics.
pub fn read_spec(path: &Path) -> Result<ARProcessSpec> {
    let file: SpecFile = serde_json::from_str(&read(path)?)
        .map_err(|source| CliError::Json { path: path.into(), source })?;
    let spec = file.into_spec()?;
    spec.check_stationary()?;
    Ok(spec)
}

pub fn read_panel(path: &Path) -> Result<TimeSeriesPanel> {
    let csv_err = |source| CliError::Csv { path: PathBuf::from(path), source };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err)?;
    let channels: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut data = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Input(format!("{}: row {}: not a number: {field:?}", path.display(), i + 1))
            })?;
            data.push(v);
        }
    }
    Ok(TimeSeriesPanel::from_row_major(channels, data)?)
}

/// Writes the panel with a header row. Values use the shortest decimal that
/// parses back to the same `f64`.
pub fn write_panel<W: std::io::Write>(panel: &TimeSeriesPanel, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(panel.channels())?;
    for t in 0..panel.sample_count() {
        w.write_record(panel.row(t).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_panel_file(panel: &TimeSeriesPanel, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    write_panel(panel, std::io::BufWriter::new(file)).map_err(|source| CliError::Csv { path: path.into(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}
