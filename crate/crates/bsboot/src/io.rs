//! CSV ingestion of survival data and prior description files.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use bsboot_core::{Observation, SurvivalDataset};
use thiserror::Error;

/// Days per year used by the `days` time unit.
pub const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("no data rows")]
    Empty,
    #[error(transparent)]
    Model(#[from] bsboot_core::Error),
}

/// How to read a survival CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    /// Multiplier applied to every time value.
    pub time_unit: f64,
    /// Column holding group labels; absent columns mean a single group 0.
    pub group_column: String,
    /// Status value marking an uncensored event. `None` picks 2 when any
    /// row has status 2 (the `survival::pbc` coding, where 1 marks a
    /// transplant and is treated as censored) and 1 otherwise.
    pub event_code: Option<i64>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            time_unit: 1.0,
            group_column: "group".to_string(),
            event_code: None,
        }
    }
}

/// Parse a time unit: a positive number or one of `days` (to years),
/// `years`.
pub fn parse_time_unit(s: &str) -> Result<f64, String> {
    match s.trim() {
        "days" => Ok(1.0 / DAYS_PER_YEAR),
        "years" => Ok(1.0),
        other => {
            let v: f64 = other
                .parse()
                .map_err(|_| format!("expected a positive number, 'days' or 'years', got '{other}'"))?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(format!("time unit must be positive, got {v}"))
            }
        }
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<SurvivalDataset, IngestError> {
    read_csv(open(path.as_ref())?, opts)
}

pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<SurvivalDataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let time_col = col("time").ok_or_else(|| IngestError::MissingColumn("time".into()))?;
    let status_col = col("status").ok_or_else(|| IngestError::MissingColumn("status".into()))?;
    let group_col = col(&opts.group_column);

    // (row number, time, status, group); the header is row 1
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |k: usize, name: &str| {
            rec.get(k)
                .filter(|f| !f.is_empty())
                .ok_or_else(|| IngestError::Row {
                    row,
                    reason: format!("missing {name}"),
                })
        };
        let raw_time = field(time_col, "time")?;
        let time: f64 = raw_time.parse().map_err(|_| IngestError::Row {
            row,
            reason: format!("cannot parse time '{raw_time}'"),
        })?;
        if !(time.is_finite() && time > 0.0) {
            return Err(IngestError::Row {
                row,
                reason: format!("time must be positive, got {time}"),
            });
        }
        let raw_status = field(status_col, "status")?;
        let status: i64 = raw_status.parse().map_err(|_| IngestError::Row {
            row,
            reason: format!("cannot parse status '{raw_status}'"),
        })?;
        let group = match group_col {
            Some(k) => {
                let raw = field(k, &opts.group_column)?;
                raw.parse::<u32>().map_err(|_| IngestError::Row {
                    row,
                    reason: format!("group label must be a small nonnegative integer, got '{raw}'"),
                })?
            }
            None => 0,
        };
        rows.push((row, time * opts.time_unit, status, group));
    }
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }

    let code = opts
        .event_code
        .unwrap_or(if rows.iter().any(|r| r.2 == 2) { 2 } else { 1 });
    let mut obs = Vec::with_capacity(rows.len());
    for (row, time, status, group) in rows {
        let allowed = if code == 2 { (0..=2).contains(&status) } else { status == 0 || status == code };
        if !allowed {
            return Err(IngestError::Row {
                row,
                reason: format!("unexpected status {status} (event code is {code})"),
            });
        }
        obs.push(Observation::with_group(time, status == code, group));
    }
    Ok(SurvivalDataset::new(obs)?)
}

/// Read a two-column numeric CSV with a header, e.g. `time,prob`.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path.as_ref())?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let num = |k: usize| -> Result<f64, IngestError> {
            let raw = rec.get(k).unwrap_or("");
            raw.parse().map_err(|_| IngestError::Row {
                row,
                reason: format!("cannot parse number '{raw}' in column {}", k + 1),
            })
        };
        out.push((num(0)?, num(1)?));
    }
    if out.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(out)
}
