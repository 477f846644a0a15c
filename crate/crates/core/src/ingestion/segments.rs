use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use chrono::DateTime;
use chrono_tz::Tz;

use super::{
    csv_err, format_timestamp, new_writer, parse_local_timestamp, read_csv, read_to_string,
    LoadReport, StationTable,
};
use crate::error::IngestError;
use crate::model::ScheduledSegment;

pub const HEADER: [&str; 9] = [
    "segment_id",
    "mode_id",
    "dep_station",
    "arr_station",
    "sched_dep",
    "actual_dep",
    "sched_arr",
    "actual_arr",
    "cancelled",
];

fn optional_time(field: &str, tz: Tz) -> Result<Option<DateTime<Tz>>, String> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_local_timestamp(field, tz).map(Some)
    }
}

fn parse_row(
    rec: &csv::StringRecord,
    stations: &StationTable,
    on_time_mode: bool,
) -> Result<ScheduledSegment, String> {
    let dep = stations
        .get(&rec[2])
        .ok_or_else(|| format!("unknown dep_station {:?}", &rec[2]))?;
    let arr = stations
        .get(&rec[3])
        .ok_or_else(|| format!("unknown arr_station {:?}", &rec[3]))?;
    let cancelled = match &rec[8] {
        "0" => false,
        "1" => true,
        other => return Err(format!("cancelled must be 0 or 1, got {other:?}")),
    };
    let sched_dep = parse_local_timestamp(&rec[4], dep.tz)?;
    let sched_arr = parse_local_timestamp(&rec[6], arr.tz)?;
    let actual_dep = optional_time(&rec[5], dep.tz)?;
    let actual_arr = optional_time(&rec[7], arr.tz)?;
    if sched_arr <= sched_dep {
        return Err("scheduled arrival must be after scheduled departure".into());
    }
    match (actual_dep, actual_arr) {
        (Some(d), Some(a)) if a <= d => {
            return Err("actual arrival must be after actual departure".into())
        }
        (Some(_), Some(_)) => {}
        (None, None) if cancelled || on_time_mode => {}
        _ if cancelled => {}
        _ => return Err("actual times missing on a non-cancelled segment".into()),
    }
    Ok(ScheduledSegment {
        segment_id: rec[0].to_string(),
        mode_id: rec[1].to_string(),
        dep_station: rec[2].to_string(),
        arr_station: rec[3].to_string(),
        sched_dep,
        sched_arr,
        actual_dep,
        actual_arr,
        cancelled,
    })
}

pub fn parse_segments(
    text: &str,
    path: &Path,
    stations: &StationTable,
    on_time_mode: bool,
) -> Result<(Vec<ScheduledSegment>, LoadReport), IngestError> {
    let csv = read_csv(text, path, &HEADER)?;
    let mut seen = HashSet::new();
    let mut segments = Vec::with_capacity(csv.rows.len());
    for (line, rec) in &csv.rows {
        let seg =
            parse_row(rec, stations, on_time_mode).map_err(|m| IngestError::row(path, *line, m))?;
        if !seen.insert(seg.segment_id.clone()) {
            return Err(IngestError::row(
                path,
                *line,
                format!("duplicate segment_id {}", seg.segment_id),
            ));
        }
        segments.push(seg);
    }
    let report = LoadReport {
        loaded: segments.len(),
        skipped: csv.skipped,
    };
    Ok((segments, report))
}

/// Load `segments.csv`; timestamps are local to the referenced stations.
///
/// Cancelled rows are kept with their flag set. Empty actual times are only
/// accepted on cancelled rows or when `on_time_mode` is set.
pub fn load_segments_actuals(
    path: &Path,
    stations: &StationTable,
    on_time_mode: bool,
) -> Result<(Vec<ScheduledSegment>, LoadReport), IngestError> {
    parse_segments(&read_to_string(path)?, path, stations, on_time_mode)
}

pub fn write_segments<W: Write>(segments: &[ScheduledSegment], w: W) -> Result<(), IngestError> {
    let mut out = new_writer(w);
    out.write_record(HEADER).map_err(csv_err)?;
    let opt = |t: &Option<DateTime<Tz>>| t.as_ref().map(format_timestamp).unwrap_or_default();
    for s in segments {
        out.write_record([
            s.segment_id.clone(),
            s.mode_id.clone(),
            s.dep_station.clone(),
            s.arr_station.clone(),
            format_timestamp(&s.sched_dep),
            opt(&s.actual_dep),
            format_timestamp(&s.sched_arr),
            opt(&s.actual_arr),
            if s.cancelled { "1" } else { "0" }.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()
        .map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(())
}
