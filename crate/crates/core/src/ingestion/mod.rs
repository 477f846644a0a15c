//! Readers and writers for the canonical input formats.
//!
//! | file | header |
//! |------|--------|
//! | `ride_stats.csv` | `origin_zone,dest_zone,date,period,mean_s,min_s,max_s` |
//! | `segments.csv` | `segment_id,mode_id,dep_station,arr_station,sched_dep,actual_dep,sched_arr,actual_arr,cancelled` |
//! | `weekly_schedule.csv` | `mode_id,dep_station,arr_station,days,dep_time,arr_time` |
//! | `stations.csv` | `station_id,kind,zone_id,lat,lon,tz,t_sec_dep_min,t_arr_min` |
//! | `zones.geojson` | FeatureCollection with `zone_id`, optional `internal_point` and `population_density` properties |
//!
//! Writers emit the canonical form, so parsing a canonical file and writing
//! it back reproduces it byte for byte.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone};
use chrono_tz::Tz;

use crate::error::IngestError;

pub mod ride_stats;
pub mod schedule;
pub mod segments;
pub mod stations;
pub mod zones;

pub use ride_stats::{load_ride_stats, RideStatIndex, ZoneRideStat};
pub use schedule::{expand_weekly_schedule, load_weekly_schedule, WeeklyScheduleRow};
pub use segments::load_segments_actuals;
pub use stations::{load_stations, StationTable};
pub use zones::{load_zones, ZoneSet};

/// Row counts reported by a loader.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub loaded: usize,
    /// Blank lines ignored by the reader.
    pub skipped: usize,
}

pub(crate) fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, IngestError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(text)
}

/// Parsed CSV records with their 1-based line numbers.
#[derive(Debug)]
pub(crate) struct CsvRows {
    pub rows: Vec<(u64, csv::StringRecord)>,
    pub skipped: usize,
}

pub(crate) fn read_csv(text: &str, path: &Path, expected: &[&str]) -> Result<CsvRows, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::row(path, 1, e.to_string()))?
        .clone();
    if header.iter().ne(expected.iter().copied()) {
        return Err(IngestError::Header {
            path: path.to_path_buf(),
            found: header.iter().collect::<Vec<_>>().join(","),
            expected: expected.join(","),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            IngestError::row(path, line, e.to_string())
        })?;
        let line = record
            .position()
            .map(|p| line_at(text, p.byte() as usize))
            .unwrap_or(0);
        rows.push((line, record));
    }
    let skipped = text.lines().skip(1).filter(|l| l.trim().is_empty()).count();
    Ok(CsvRows { rows, skipped })
}

/// 1-based line of the first non-blank line starting at `offset`.
///
/// Record positions point at the end of the previous record, before any
/// blank lines the reader skipped.
fn line_at(text: &str, offset: usize) -> u64 {
    let mut line = text.as_bytes()[..offset]
        .iter()
        .filter(|b| **b == b'\n')
        .count() as u64
        + 1;
    for l in text[offset..].split('\n') {
        if !l.trim_end_matches('\r').is_empty() {
            break;
        }
        line += 1;
    }
    line
}

pub(crate) fn new_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub(crate) fn csv_err(e: csv::Error) -> IngestError {
    IngestError::Invalid(format!("csv write failed: {e}"))
}

pub(crate) fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("bad date {s:?}: {e}"))
}

pub(crate) const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// Parse an ISO-8601 local timestamp (seconds optional) in the given zone.
pub(crate) fn parse_local_timestamp(s: &str, tz: Tz) -> Result<DateTime<Tz>, String> {
    let naive = NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M"))
        .map_err(|e| format!("bad timestamp {s:?}: {e}"))?;
    localize(naive, tz)
}

/// Attach a zone to a wall-clock time; ambiguous times take the earlier instant.
pub(crate) fn localize(naive: NaiveDateTime, tz: Tz) -> Result<DateTime<Tz>, String> {
    tz.from_local_datetime(&naive)
        .earliest()
        .ok_or_else(|| format!("local time {naive} does not exist in {tz}"))
}

pub(crate) fn format_timestamp(t: &DateTime<Tz>) -> String {
    t.naive_local().format(TIMESTAMP_FORMAT).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dst_gap_is_rejected_and_overlap_takes_earliest() {
        let paris = chrono_tz::Europe::Paris;
        assert!(parse_local_timestamp("2018-03-25T02:30", paris).is_err());
        let t = parse_local_timestamp("2018-10-28T02:30:00", paris).unwrap();
        assert_eq!(t.to_rfc3339(), "2018-10-28T02:30:00+02:00");
    }

    #[test]
    fn header_must_match() {
        let err = read_csv("a,b\n1,2\n", Path::new("x.csv"), &["a", "c"]).unwrap_err();
        assert!(matches!(err, IngestError::Header { .. }));
        let rows = read_csv("a,b\n1,2\n\n3,4\n", Path::new("x.csv"), &["a", "b"]).unwrap();
        assert_eq!(rows.rows.len(), 2);
        assert_eq!(rows.rows[1].0, 4);
        assert_eq!(rows.skipped, 1);
    }
}
