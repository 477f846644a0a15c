//! Weekly timetables and their expansion into dated segments.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveTime};

use super::{csv_err, localize, new_writer, read_csv, read_to_string, LoadReport, StationTable};
use crate::error::IngestError;
use crate::model::{DateRange, ScheduledSegment};

pub const HEADER: [&str; 6] = [
    "mode_id",
    "dep_station",
    "arr_station",
    "days",
    "dep_time",
    "arr_time",
];

/// One line of a weekly timetable. Times are local to each station.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeeklyScheduleRow {
    pub mode_id: String,
    pub dep_station: String,
    pub arr_station: String,
    /// Monday first.
    pub days: [bool; 7],
    pub dep_time: NaiveTime,
    pub arr_time: NaiveTime,
}

impl WeeklyScheduleRow {
    /// Arrival clock time earlier than departure: the arrival is on the next day.
    pub fn overnight(&self) -> bool {
        self.arr_time < self.dep_time
    }

    fn validate(&self) -> Result<(), String> {
        if !self.days.iter().any(|d| *d) {
            return Err("day mask has no day set".into());
        }
        Ok(())
    }
}

fn parse_days(s: &str) -> Result<[bool; 7], String> {
    let bytes = s.as_bytes();
    if bytes.len() != 7 {
        return Err(format!("days must have 7 characters, got {s:?}"));
    }
    let mut days = [false; 7];
    for (slot, b) in days.iter_mut().zip(bytes) {
        *slot = match b {
            b'1' => true,
            b'0' => false,
            _ => return Err(format!("days must only contain 0 and 1, got {s:?}")),
        };
    }
    Ok(days)
}

fn parse_hhmm(s: &str) -> Result<NaiveTime, String> {
    NaiveTime::parse_from_str(s, "%H:%M").map_err(|_| format!("bad HH:MM time {s:?}"))
}

pub fn parse_weekly_schedule(
    text: &str,
    path: &Path,
) -> Result<(Vec<WeeklyScheduleRow>, LoadReport), IngestError> {
    let csv = read_csv(text, path, &HEADER)?;
    let mut rows = Vec::with_capacity(csv.rows.len());
    for (line, rec) in &csv.rows {
        let row = (|| -> Result<WeeklyScheduleRow, String> {
            let row = WeeklyScheduleRow {
                mode_id: rec[0].to_string(),
                dep_station: rec[1].to_string(),
                arr_station: rec[2].to_string(),
                days: parse_days(&rec[3])?,
                dep_time: parse_hhmm(&rec[4])?,
                arr_time: parse_hhmm(&rec[5])?,
            };
            row.validate()?;
            Ok(row)
        })()
        .map_err(|m| IngestError::row(path, *line, m))?;
        rows.push(row);
    }
    let report = LoadReport {
        loaded: rows.len(),
        skipped: csv.skipped,
    };
    Ok((rows, report))
}

/// Load `weekly_schedule.csv`.
pub fn load_weekly_schedule(
    path: &Path,
) -> Result<(Vec<WeeklyScheduleRow>, LoadReport), IngestError> {
    parse_weekly_schedule(&read_to_string(path)?, path)
}

pub fn write_weekly_schedule<W: Write>(
    rows: &[WeeklyScheduleRow],
    w: W,
) -> Result<(), IngestError> {
    let mut out = new_writer(w);
    out.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        let days: String = r.days.iter().map(|d| if *d { '1' } else { '0' }).collect();
        out.write_record([
            r.mode_id.clone(),
            r.dep_station.clone(),
            r.arr_station.clone(),
            days,
            r.dep_time.format("%H:%M").to_string(),
            r.arr_time.format("%H:%M").to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()
        .map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(())
}

/// Expand weekly rows into one on-time segment per matching date of `range`.
///
/// Scheduled times are built in each station's timezone and actual times
/// equal the schedule. Segment ids are `mode:dep-arr:YYYY-MM-DDTHH:MM`.
pub fn expand_weekly_schedule(
    rows: &[WeeklyScheduleRow],
    range: DateRange,
    stations: &StationTable,
) -> Result<Vec<ScheduledSegment>, IngestError> {
    let mut segments = Vec::new();
    let mut seen = HashSet::new();
    for row in rows {
        row.validate().map_err(IngestError::Invalid)?;
        let dep = stations
            .get(&row.dep_station)
            .ok_or_else(|| IngestError::Invalid(format!("unknown station {}", row.dep_station)))?;
        let arr = stations
            .get(&row.arr_station)
            .ok_or_else(|| IngestError::Invalid(format!("unknown station {}", row.arr_station)))?;
        for date in range.dates() {
            if !row.days[date.weekday().num_days_from_monday() as usize] {
                continue;
            }
            let arr_date = if row.overnight() {
                date + Duration::days(1)
            } else {
                date
            };
            let sched_dep =
                localize(date.and_time(row.dep_time), dep.tz).map_err(IngestError::Invalid)?;
            let sched_arr =
                localize(arr_date.and_time(row.arr_time), arr.tz).map_err(IngestError::Invalid)?;
            if sched_arr <= sched_dep {
                return Err(IngestError::Invalid(format!(
                    "{} {}-{} on {date}: arrival not after departure",
                    row.mode_id, row.dep_station, row.arr_station
                )));
            }
            let segment_id = format!(
                "{}:{}-{}:{}T{}",
                row.mode_id,
                row.dep_station,
                row.arr_station,
                date.format("%Y-%m-%d"),
                row.dep_time.format("%H:%M")
            );
            if !seen.insert(segment_id.clone()) {
                return Err(IngestError::Invalid(format!(
                    "duplicate schedule entry {segment_id}"
                )));
            }
            segments.push(ScheduledSegment {
                segment_id,
                mode_id: row.mode_id.clone(),
                dep_station: row.dep_station.clone(),
                arr_station: row.arr_station.clone(),
                sched_dep,
                sched_arr,
                actual_dep: Some(sched_dep),
                actual_arr: Some(sched_arr),
                cancelled: false,
            });
        }
    }
    Ok(segments)
}
