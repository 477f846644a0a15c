use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

use crate::period::DayPeriod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error("minute of day {0} is outside [0, 1440)")]
    OutOfRange(u32),
    #[error("unknown day period name: {0}")]
    UnknownName(String),
}

/// Errors raised while reading or validating input datasets.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unexpected header {found:?}, expected {expected:?}")]
    Header {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("{path}:{line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Document { path: PathBuf, message: String },
    #[error("invalid value: {0}")]
    Invalid(String),
}

impl IngestError {
    pub(crate) fn row(path: &std::path::Path, line: u64, message: impl Into<String>) -> Self {
        IngestError::Row {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Reasons a single door-to-door trip cannot be evaluated.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TripError {
    #[error("segment {0} is cancelled")]
    Cancelled(String),
    #[error("segment {0} has no actual times and on-time mode is off")]
    MissingActuals(String),
    #[error("segment {0} does not arrive after it departs")]
    NonPositiveInVehicle(String),
    #[error("segment {segment} references station {station}, expected {expected}")]
    StationMismatch {
        segment: String,
        station: String,
        expected: String,
    },
    #[error("no ride data from {origin} to {dest} on {date} ({period}) nor daily")]
    NoRideData {
        origin: String,
        dest: String,
        date: NaiveDate,
        period: DayPeriod,
    },
    #[error("no dwell profile for station {0}")]
    NoDwellProfile(String),
    #[error("unknown station {0}")]
    UnknownStation(String),
}

/// Errors from the higher-level analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("linear fit undefined: {0}")]
    FitUndefined(String),
    #[error("delay sensitivity undefined: {0}")]
    SensitivityUndefined(String),
    #[error("segment {0} has no actual arrival time")]
    MissingActualArrival(String),
    #[error("unknown segment {0}")]
    UnknownSegment(String),
    #[error(transparent)]
    Trip(#[from] TripError),
}
