//! CSV ingestion with row-level diagnostics, plus the canonical writer.
//!
//! Schema (UTF-8, comma-separated, `.` decimal, header required):
//!
//! ```text
//! id,source,method,bulk_density_g_cm3,sand_pct,silt_pct,clay_pct,sample_height_cm,sample_diameter_cm,ksat_cm_per_day
//! ```
//!
//! Columns are matched by name; the writer always emits them in the order
//! above. `sample_height_cm`, `sample_diameter_cm`, and `ksat_cm_per_day`
//! cells may be empty. The `ksat_cm_per_day` column may be omitted entirely
//! unless measured values are required (evaluation mode). Unknown columns are
//! a header error unless explicitly ignored. Rows never disappear silently:
//! each input row is either accepted or listed as rejected with a reason.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::soil::{SoilSample, ValidationError, ValidationOptions};

pub const COLUMNS: [&str; 10] = [
    "id",
    "source",
    "method",
    "bulk_density_g_cm3",
    "sand_pct",
    "silt_pct",
    "clay_pct",
    "sample_height_cm",
    "sample_diameter_cm",
    "ksat_cm_per_day",
];

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    /// Texture-sum tolerance passed through to validation.
    pub tolerance: f64,
    /// Renormalize texture triples that are within tolerance.
    pub renormalize: bool,
    /// Evaluation mode: the ksat column must exist and every row must carry
    /// a value.
    pub require_measured: bool,
    /// Accept (and skip) columns outside the schema.
    pub ignore_extra: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            tolerance: 0.5,
            renormalize: false,
            require_measured: false,
            ignore_extra: false,
        }
    }
}

/// Why one data row was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    /// A required cell is empty.
    MissingField { column: &'static str },
    /// A cell failed to parse as a finite number.
    BadField { column: &'static str, value: String },
    /// The record itself is malformed (wrong field count, bad UTF-8, ...).
    Malformed(String),
    /// Field values failed sample validation.
    Validation(ValidationError),
    /// Evaluation mode requires a measured conductivity.
    MissingMeasured,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::MissingField { column } => write!(f, "missing {column}"),
            RejectReason::BadField { column, value } => {
                write!(f, "{column} `{value}` is not a finite number")
            }
            RejectReason::Malformed(msg) => write!(f, "malformed record: {msg}"),
            RejectReason::Validation(e) => write!(f, "{e}"),
            RejectReason::MissingMeasured => write!(f, "missing ksat_cm_per_day value"),
        }
    }
}

/// One rejected row: 1-based data row number (header excluded) and why.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub row: usize,
    pub reason: RejectReason,
}

/// Everything ingestion produced. `accepted.len() + rejected.len()` always
/// equals `total_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestResult {
    pub accepted: Vec<SoilSample<f64>>,
    pub rejected: Vec<RejectedRow>,
    pub path: PathBuf,
    pub total_rows: usize,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}")]
    WriteFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: header mismatch: missing [{}], unknown [{}], duplicate [{}]",
            missing.join(", "), unknown.join(", "), duplicate.join(", "))]
    HeaderMismatch {
        path: PathBuf,
        missing: Vec<String>,
        unknown: Vec<String>,
        duplicate: Vec<String>,
    },
    #[error("{path}: malformed CSV")]
    Csv {
        path: PathBuf,
        source: csv::Error,
    },
}

/// Ingest a CSV file.
pub fn ingest_csv(path: &Path, options: &IngestOptions) -> Result<IngestResult, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::File {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(file, path, options)
}

/// Ingest from any reader; `path` only labels diagnostics.
pub fn ingest_reader<R: Read>(
    reader: R,
    path: &Path,
    options: &IngestOptions,
) -> Result<IngestResult, IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|source| IngestError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();

    // Resolve each schema column to its position by name.
    let mut positions: [Option<usize>; COLUMNS.len()] = [None; COLUMNS.len()];
    let mut unknown = Vec::new();
    let mut duplicate = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        match COLUMNS.iter().position(|c| *c == name) {
            Some(slot) => {
                if positions[slot].is_some() {
                    duplicate.push(name.to_string());
                } else {
                    positions[slot] = Some(i);
                }
            }
            None => unknown.push(name.to_string()),
        }
    }
    let ksat_slot = COLUMNS.len() - 1;
    let missing: Vec<String> = COLUMNS
        .iter()
        .enumerate()
        .filter(|(slot, _)| {
            positions[*slot].is_none() && (*slot != ksat_slot || options.require_measured)
        })
        .map(|(_, c)| c.to_string())
        .collect();
    if options.ignore_extra {
        unknown.clear();
    }
    if !missing.is_empty() || !unknown.is_empty() || !duplicate.is_empty() {
        return Err(IngestError::HeaderMismatch {
            path: path.to_path_buf(),
            missing,
            unknown,
            duplicate,
        });
    }

    let validation = ValidationOptions {
        tolerance: options.tolerance,
        renormalize: options.renormalize,
    };
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut row = 0usize;
    for record in csv_reader.records() {
        row += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RejectedRow {
                    row,
                    reason: RejectReason::Malformed(e.to_string()),
                });
                continue;
            }
        };
        match parse_row(&record, &positions, options) {
            Ok(sample) => match sample.validate(&validation) {
                Ok(sample) => accepted.push(sample),
                Err(e) => rejected.push(RejectedRow {
                    row,
                    reason: RejectReason::Validation(e),
                }),
            },
            Err(reason) => rejected.push(RejectedRow { row, reason }),
        }
    }

    Ok(IngestResult {
        accepted,
        rejected,
        path: path.to_path_buf(),
        total_rows: row,
    })
}

fn parse_row(
    record: &csv::StringRecord,
    positions: &[Option<usize>; COLUMNS.len()],
    options: &IngestOptions,
) -> Result<SoilSample<f64>, RejectReason> {
    let cell = |slot: usize| -> &str {
        positions[slot]
            .and_then(|i| record.get(i))
            .map(str::trim)
            .unwrap_or("")
    };
    let required = |slot: usize| -> Result<f64, RejectReason> {
        let column = COLUMNS[slot];
        let text = cell(slot);
        if text.is_empty() {
            return Err(RejectReason::MissingField { column });
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(RejectReason::BadField {
                column,
                value: text.to_string(),
            }),
        }
    };
    let optional = |slot: usize| -> Result<Option<f64>, RejectReason> {
        let text = cell(slot);
        if text.is_empty() {
            return Ok(None);
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(RejectReason::BadField {
                column: COLUMNS[slot],
                value: text.to_string(),
            }),
        }
    };

    let sample = SoilSample {
        id: cell(0).to_string(),
        source: cell(1).to_string(),
        method: cell(2).to_string(),
        bulk_density: required(3)?,
        sand_pct: required(4)?,
        silt_pct: required(5)?,
        clay_pct: required(6)?,
        height: optional(7)?,
        diameter: optional(8)?,
        ksat_measured: optional(9)?,
    };
    if options.require_measured && sample.ksat_measured.is_none() {
        return Err(RejectReason::MissingMeasured);
    }
    Ok(sample)
}

/// Write samples in the canonical schema; numbers print as the shortest
/// decimal that round-trips, so write-then-ingest reproduces the samples
/// exactly.
pub fn write_samples_csv<W: Write>(
    writer: W,
    samples: &[SoilSample<f64>],
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for s in samples {
        w.write_record([
            s.id.as_str(),
            s.source.as_str(),
            s.method.as_str(),
            &s.bulk_density.to_string(),
            &s.sand_pct.to_string(),
            &s.silt_pct.to_string(),
            &s.clay_pct.to_string(),
            &opt(s.height),
            &opt(s.diameter),
            &opt(s.ksat_measured),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write samples to a file path.
pub fn write_samples_file(path: &Path, samples: &[SoilSample<f64>]) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|source| IngestError::WriteFile {
        path: path.to_path_buf(),
        source,
    })?;
    write_samples_csv(file, samples).map_err(|source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    })
}
