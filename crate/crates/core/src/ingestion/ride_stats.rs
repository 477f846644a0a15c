use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use super::{csv_err, new_writer, parse_date, read_csv, read_to_string, LoadReport};
use crate::error::IngestError;
use crate::model::{DateRange, RideVariant};
use crate::period::DayPeriod;
use crate::trip::{RideHit, RideLookup};

pub const HEADER: [&str; 7] = [
    "origin_zone",
    "dest_zone",
    "date",
    "period",
    "mean_s",
    "min_s",
    "max_s",
];

/// Zone-to-zone ride time aggregate for one date and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneRideStat {
    pub origin_zone: String,
    pub dest_zone: String,
    pub date: NaiveDate,
    /// `DailyOnly` for whole-day aggregates.
    pub period: DayPeriod,
    pub ride: RideVariant,
}

impl ZoneRideStat {
    fn validate(&self) -> Result<(), String> {
        let r = &self.ride;
        if r.min_s <= 0 || r.mean_s <= 0 || r.max_s <= 0 {
            return Err("ride times must be positive".into());
        }
        if !(r.min_s <= r.mean_s && r.mean_s <= r.max_s) {
            return Err(format!(
                "expected min <= mean <= max, got min {} mean {} max {}",
                r.min_s, r.mean_s, r.max_s
            ));
        }
        Ok(())
    }
}

type SlotMap = HashMap<(NaiveDate, DayPeriod), usize>;

/// Keyed ride-time lookup with a daily fallback.
#[derive(Debug, Clone, Default)]
pub struct RideStatIndex {
    rows: Vec<ZoneRideStat>,
    by_pair: HashMap<String, HashMap<String, SlotMap>>,
}

impl RideStatIndex {
    pub fn from_rows(rows: Vec<ZoneRideStat>) -> Result<Self, IngestError> {
        let mut index = RideStatIndex::default();
        for row in rows {
            index.insert(row).map_err(IngestError::Invalid)?;
        }
        Ok(index)
    }

    fn insert(&mut self, row: ZoneRideStat) -> Result<(), String> {
        row.validate()?;
        let slots = self
            .by_pair
            .entry(row.origin_zone.clone())
            .or_default()
            .entry(row.dest_zone.clone())
            .or_default();
        let key = (row.date, row.period);
        if slots.contains_key(&key) {
            return Err(format!(
                "duplicate ride stat ({}, {}, {}, {})",
                row.origin_zone,
                row.dest_zone,
                row.date,
                row.period.code()
            ));
        }
        slots.insert(key, self.rows.len());
        self.rows.push(row);
        Ok(())
    }

    /// Rows in input order.
    pub fn rows(&self) -> &[ZoneRideStat] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The record stored under exactly this key, without fallback.
    pub fn get_exact(
        &self,
        origin: &str,
        dest: &str,
        date: NaiveDate,
        period: DayPeriod,
    ) -> Option<&ZoneRideStat> {
        let idx = self.by_pair.get(origin)?.get(dest)?.get(&(date, period))?;
        Some(&self.rows[*idx])
    }

    /// Zones reachable from `origin` on at least one date, sorted.
    pub fn destinations_from(&self, origin: &str) -> BTreeSet<&str> {
        self.by_pair
            .get(origin)
            .map(|m| m.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    /// Daily (`DailyOnly`) aggregates towards `dest` whose date lies in `range`.
    pub fn daily_rows_to<'a>(
        &'a self,
        dest: &'a str,
        range: DateRange,
    ) -> impl Iterator<Item = &'a ZoneRideStat> + 'a {
        self.rows.iter().filter(move |r| {
            r.dest_zone == dest && r.period == DayPeriod::DailyOnly && range.contains(r.date)
        })
    }

    /// Number of daily records standing in for at least one missing period-level record.
    pub fn daily_fallback_slots(&self) -> usize {
        self.by_pair
            .values()
            .flat_map(|m| m.values())
            .map(|slots| {
                slots
                    .keys()
                    .filter(|(date, p)| {
                        *p == DayPeriod::DailyOnly
                            && !DayPeriod::CLASSIFIED
                                .iter()
                                .all(|c| slots.contains_key(&(*date, *c)))
                    })
                    .count()
            })
            .sum()
    }
}

impl RideLookup for RideStatIndex {
    fn lookup(
        &self,
        origin: &str,
        dest: &str,
        date: NaiveDate,
        period: DayPeriod,
    ) -> Option<RideHit> {
        let slots = self.by_pair.get(origin)?.get(dest)?;
        if let Some(idx) = slots.get(&(date, period)) {
            return Some(RideHit {
                ride: self.rows[*idx].ride,
                fallback: period == DayPeriod::DailyOnly,
            });
        }
        slots.get(&(date, DayPeriod::DailyOnly)).map(|idx| RideHit {
            ride: self.rows[*idx].ride,
            fallback: true,
        })
    }
}

fn parse_seconds(field: &str, name: &str) -> Result<i64, String> {
    field
        .parse::<i64>()
        .map_err(|_| format!("{name} must be an integer number of seconds, got {field:?}"))
}

pub fn parse_ride_stats(
    text: &str,
    path: &Path,
) -> Result<(RideStatIndex, LoadReport), IngestError> {
    let csv = read_csv(text, path, &HEADER)?;
    let mut index = RideStatIndex::default();
    for (line, rec) in &csv.rows {
        let row = (|| -> Result<ZoneRideStat, String> {
            let code: u8 = rec[3]
                .parse()
                .map_err(|_| format!("bad period {:?}", &rec[3]))?;
            let period =
                DayPeriod::from_code(code).ok_or_else(|| format!("period {code} not in 0..=5"))?;
            Ok(ZoneRideStat {
                origin_zone: rec[0].to_string(),
                dest_zone: rec[1].to_string(),
                date: parse_date(&rec[2])?,
                period,
                ride: RideVariant {
                    mean_s: parse_seconds(&rec[4], "mean_s")?,
                    min_s: parse_seconds(&rec[5], "min_s")?,
                    max_s: parse_seconds(&rec[6], "max_s")?,
                },
            })
        })()
        .map_err(|m| IngestError::row(path, *line, m))?;
        index
            .insert(row)
            .map_err(|m| IngestError::row(path, *line, m))?;
    }
    let report = LoadReport {
        loaded: index.len(),
        skipped: csv.skipped,
    };
    Ok((index, report))
}

/// Load and validate `ride_stats.csv`.
pub fn load_ride_stats(path: &Path) -> Result<(RideStatIndex, LoadReport), IngestError> {
    parse_ride_stats(&read_to_string(path)?, path)
}

pub fn write_ride_stats<W: Write>(index: &RideStatIndex, w: W) -> Result<(), IngestError> {
    let mut out = new_writer(w);
    out.write_record(HEADER).map_err(csv_err)?;
    for r in index.rows() {
        out.write_record([
            r.origin_zone.clone(),
            r.dest_zone.clone(),
            r.date.format("%Y-%m-%d").to_string(),
            r.period.code().to_string(),
            r.ride.mean_s.to_string(),
            r.ride.min_s.to_string(),
            r.ride.max_s.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()
        .map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(())
}
