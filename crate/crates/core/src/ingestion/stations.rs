use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use chrono_tz::Tz;

use super::{csv_err, new_writer, read_csv, read_to_string, LoadReport};
use crate::error::IngestError;
use crate::model::{DwellProfile, GeoPoint, Station, StationKind};

pub const HEADER: [&str; 8] = [
    "station_id",
    "kind",
    "zone_id",
    "lat",
    "lon",
    "tz",
    "t_sec_dep_min",
    "t_arr_min",
];

/// Stations in input order, indexed by id.
#[derive(Debug, Clone, Default)]
pub struct StationTable {
    stations: Vec<Station>,
    by_id: HashMap<String, usize>,
}

impl StationTable {
    pub fn from_stations(stations: Vec<Station>) -> Result<Self, IngestError> {
        let mut table = StationTable::default();
        for s in stations {
            table.insert(s).map_err(IngestError::Invalid)?;
        }
        Ok(table)
    }

    fn insert(&mut self, station: Station) -> Result<(), String> {
        if self.by_id.contains_key(&station.station_id) {
            return Err(format!("duplicate station_id {}", station.station_id));
        }
        self.by_id
            .insert(station.station_id.clone(), self.stations.len());
        self.stations.push(station);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Station> {
        self.by_id.get(id).map(|i| &self.stations[*i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Station> {
        self.stations.iter()
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }
}

fn minutes_to_seconds(field: &str, name: &str) -> Result<i64, String> {
    let minutes: f64 = field
        .parse()
        .map_err(|_| format!("{name} must be a number of minutes, got {field:?}"))?;
    let seconds = minutes * 60.0;
    if !seconds.is_finite() || seconds < 0.0 || (seconds - seconds.round()).abs() > 1e-6 {
        return Err(format!(
            "{name} must be a non-negative whole number of seconds, got {field:?} min"
        ));
    }
    Ok(seconds.round() as i64)
}

fn seconds_to_minutes(s: i64) -> String {
    if s % 60 == 0 {
        (s / 60).to_string()
    } else {
        (s as f64 / 60.0).to_string()
    }
}

fn parse_row(rec: &csv::StringRecord) -> Result<Station, String> {
    let kind = StationKind::parse(&rec[1])
        .ok_or_else(|| format!("kind must be air or rail, got {:?}", &rec[1]))?;
    let lat: f64 = rec[3]
        .parse()
        .map_err(|_| format!("bad lat {:?}", &rec[3]))?;
    let lon: f64 = rec[4]
        .parse()
        .map_err(|_| format!("bad lon {:?}", &rec[4]))?;
    let location = GeoPoint::new(lat, lon).map_err(|e| e.to_string())?;
    let tz: Tz = rec[5]
        .parse()
        .map_err(|_| format!("unresolvable timezone {:?}", &rec[5]))?;
    let dwell = match (rec[6].trim(), rec[7].trim()) {
        ("", "") => None,
        (dep, arr) if !dep.is_empty() && !arr.is_empty() => Some(
            DwellProfile::new(
                minutes_to_seconds(dep, "t_sec_dep_min")?,
                minutes_to_seconds(arr, "t_arr_min")?,
            )
            .map_err(|e| e.to_string())?,
        ),
        _ => return Err("t_sec_dep_min and t_arr_min must both be set or both empty".into()),
    };
    if rec[0].is_empty() || rec[2].is_empty() {
        return Err("station_id and zone_id are required".into());
    }
    Ok(Station {
        station_id: rec[0].to_string(),
        kind,
        zone_id: rec[2].to_string(),
        location,
        tz,
        dwell,
    })
}

pub fn parse_stations(text: &str, path: &Path) -> Result<(StationTable, LoadReport), IngestError> {
    let csv = read_csv(text, path, &HEADER)?;
    let mut table = StationTable::default();
    for (line, rec) in &csv.rows {
        let station = parse_row(rec).map_err(|m| IngestError::row(path, *line, m))?;
        table
            .insert(station)
            .map_err(|m| IngestError::row(path, *line, m))?;
    }
    let report = LoadReport {
        loaded: table.len(),
        skipped: csv.skipped,
    };
    Ok((table, report))
}

/// Load `stations.csv`.
pub fn load_stations(path: &Path) -> Result<(StationTable, LoadReport), IngestError> {
    parse_stations(&read_to_string(path)?, path)
}

pub fn write_stations<W: Write>(table: &StationTable, w: W) -> Result<(), IngestError> {
    let mut out = new_writer(w);
    out.write_record(HEADER).map_err(csv_err)?;
    for s in table.iter() {
        let (dep, arr) = match s.dwell {
            Some(d) => (
                seconds_to_minutes(d.departure_s()),
                seconds_to_minutes(d.arrival_s()),
            ),
            None => (String::new(), String::new()),
        };
        out.write_record([
            s.station_id.clone(),
            s.kind.to_string(),
            s.zone_id.clone(),
            s.location.lat().to_string(),
            s.location.lon().to_string(),
            s.tz.name().to_string(),
            dep,
            arr,
        ])
        .map_err(csv_err)?;
    }
    out.flush()
        .map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(())
}
