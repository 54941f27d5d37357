//! CSV input/output and model dumps.
//!
//! Point files hold one point per row with `d` numeric columns; value files
//! hold a single column. A first row that does not parse as numbers is taken
//! as a header.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{InterpError, Interpolant, KernelKind, PointSet};
use crate::kernel::KernelParams;

fn parse_error(path: &Path, reason: impl Into<String>) -> InterpError {
    InterpError::Parse {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Numeric rows of a CSV document, header skipped.
pub fn parse_table(text: &str, path: &Path) -> Result<Vec<Vec<f64>>, InterpError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(path, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(parse_error(
                            path,
                            format!(
                                "row {} has {} columns, expected {}",
                                line + 1,
                                row.len(),
                                first.len()
                            ),
                        ));
                    }
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(parse_error(
                        path,
                        format!("row {} has a non-finite entry", line + 1),
                    ));
                }
                rows.push(row);
            }
            Err(e) if line == 0 => {
                let _ = e; // header
            }
            Err(e) => return Err(parse_error(path, format!("row {}: {e}", line + 1))),
        }
    }
    Ok(rows)
}

fn read_text(path: &Path) -> Result<String, InterpError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| parse_error(path, e.to_string()))?;
    Ok(text)
}

/// Reads a point file. An empty file yields an empty set of dimension
/// `fallback_dim`.
pub fn read_points(path: &Path, fallback_dim: usize) -> Result<PointSet, InterpError> {
    let rows = parse_table(&read_text(path)?, path)?;
    match rows.first() {
        None => Ok(PointSet::empty(fallback_dim)),
        Some(first) => PointSet::new(first.len(), &rows),
    }
}

pub fn read_values(path: &Path) -> Result<Vec<f64>, InterpError> {
    let rows = parse_table(&read_text(path)?, path)?;
    if let Some(row) = rows.first() {
        if row.len() != 1 {
            return Err(parse_error(
                path,
                format!("expected one column, found {}", row.len()),
            ));
        }
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

/// Writes one value per line under a `value` header, at full precision.
pub fn write_values(path: &Path, values: &[f64]) -> Result<(), InterpError> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    writeln!(out, "value")?;
    for v in values {
        writeln!(out, "{v:?}")?;
    }
    out.flush()?;
    Ok(())
}

/// Serializable form of an [`Interpolant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub kernel: KernelKind,
    pub alpha: f64,
    pub delta: f64,
    pub d: usize,
    pub centers: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
}

impl From<&Interpolant> for ModelDump {
    fn from(m: &Interpolant) -> Self {
        Self {
            kernel: m.kernel,
            alpha: m.params.alpha(),
            delta: m.params.delta(),
            d: m.centers.dim(),
            centers: m.centers.to_rows(),
            coefficients: m.coefficients.clone(),
        }
    }
}

impl TryFrom<ModelDump> for Interpolant {
    type Error = InterpError;
    fn try_from(m: ModelDump) -> Result<Self, InterpError> {
        let centers = PointSet::new(m.d, &m.centers)?;
        if m.coefficients.len() != centers.len() {
            return Err(InterpError::DimensionMismatch {
                expected: centers.len(),
                found: m.coefficients.len(),
            });
        }
        Ok(Interpolant {
            centers,
            coefficients: m.coefficients,
            params: KernelParams::new(m.alpha, m.delta)?,
            kernel: m.kernel,
        })
    }
}

pub fn write_model(path: &Path, model: &Interpolant) -> Result<(), InterpError> {
    let text = serde_json::to_string_pretty(&ModelDump::from(model))
        .map_err(|e| parse_error(path, e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<Interpolant, InterpError> {
    let dump: ModelDump =
        serde_json::from_str(&read_text(path)?).map_err(|e| parse_error(path, e.to_string()))?;
    dump.try_into()
}
