//! Domain types shared by every stage of the engine.

use std::fmt;

use chrono::{DateTime, NaiveDate};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::period::DayPeriod;
use crate::SECONDS_PER_MINUTE;

/// A WGS84 position in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, IngestError> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(IngestError::Invalid(format!(
                "latitude {lat} outside [-90, 90]"
            )));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(IngestError::Invalid(format!(
                "longitude {lon} outside [-180, 180]"
            )));
        }
        Ok(GeoPoint { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

/// Smallest geographic analysis unit (census tract, IRIS zone, wijk...).
#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub zone_id: String,
    pub internal_point: Option<GeoPoint>,
    /// Persons per area unit, never negative.
    pub population_density: Option<f64>,
    /// Geometry carried through untouched from the input for export.
    pub geometry: Option<serde_json::Value>,
}

impl Zone {
    pub fn new(zone_id: impl Into<String>) -> Self {
        Zone {
            zone_id: zone_id.into(),
            internal_point: None,
            population_density: None,
            geometry: None,
        }
    }

    pub fn with_point(mut self, point: GeoPoint) -> Self {
        self.internal_point = Some(point);
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.population_density = Some(density);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StationKind {
    Air,
    Rail,
}

impl StationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StationKind::Air => "air",
            StationKind::Rail => "rail",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "air" => Some(StationKind::Air),
            "rail" => Some(StationKind::Rail),
            _ => None,
        }
    }
}

impl fmt::Display for StationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Processing time at departure (`t_sec`) and dwell at arrival (`t_arr`), in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DwellProfile {
    departure_s: i64,
    arrival_s: i64,
}

impl DwellProfile {
    pub fn new(departure_s: i64, arrival_s: i64) -> Result<Self, IngestError> {
        if departure_s < 0 || arrival_s < 0 {
            return Err(IngestError::Invalid(format!(
                "dwell times must be non-negative, got {departure_s}s / {arrival_s}s"
            )));
        }
        Ok(DwellProfile {
            departure_s,
            arrival_s,
        })
    }

    pub const fn from_minutes(departure_min: u32, arrival_min: u32) -> Self {
        DwellProfile {
            departure_s: departure_min as i64 * SECONDS_PER_MINUTE,
            arrival_s: arrival_min as i64 * SECONDS_PER_MINUTE,
        }
    }

    /// Departure processing time `t_sec`.
    pub fn departure_s(&self) -> i64 {
        self.departure_s
    }

    /// Arrival dwell `t_arr`.
    pub fn arrival_s(&self) -> i64 {
        self.arrival_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub station_id: String,
    pub kind: StationKind,
    pub zone_id: String,
    pub location: GeoPoint,
    pub tz: Tz,
    /// Per-station dwell configured in the input; built-in defaults apply otherwise.
    pub dwell: Option<DwellProfile>,
}

/// One flight or train movement.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledSegment {
    pub segment_id: String,
    pub mode_id: String,
    pub dep_station: String,
    pub arr_station: String,
    pub sched_dep: DateTime<Tz>,
    pub sched_arr: DateTime<Tz>,
    pub actual_dep: Option<DateTime<Tz>>,
    pub actual_arr: Option<DateTime<Tz>>,
    pub cancelled: bool,
}

impl ScheduledSegment {
    /// Actual times, or the schedule when running in on-time mode.
    pub fn effective_times(&self, on_time_mode: bool) -> Option<(DateTime<Tz>, DateTime<Tz>)> {
        match (self.actual_dep, self.actual_arr) {
            (Some(dep), Some(arr)) => Some((dep, arr)),
            _ if on_time_mode => Some((self.sched_dep, self.sched_arr)),
            _ => None,
        }
    }
}

/// Road ride time variants taken from the same aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RideVariant {
    pub mean_s: i64,
    pub min_s: i64,
    pub max_s: i64,
}

impl RideVariant {
    pub fn get(&self, variant: Variant) -> i64 {
        match variant {
            Variant::Mean => self.mean_s,
            Variant::Min => self.min_s,
            Variant::Max => self.max_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Mean,
    Min,
    Max,
}

/// The five phase durations of a trip plus the extra wait folded into `dep_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TripPhaseTimes {
    pub to_s: i64,
    pub dep_s: i64,
    pub in_s: i64,
    pub arr_s: i64,
    pub from_s: i64,
    pub wait_s: i64,
}

impl TripPhaseTimes {
    pub fn total_s(&self) -> i64 {
        self.to_s + self.dep_s + self.in_s + self.arr_s + self.from_s
    }

    /// Processing time component of the departure dwell.
    pub fn processing_s(&self) -> i64 {
        self.dep_s - self.wait_s
    }

    pub fn as_array(&self) -> [i64; 5] {
        [self.to_s, self.dep_s, self.in_s, self.arr_s, self.from_s]
    }
}

/// One evaluated door-to-door trip.
#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub segment_id: String,
    pub mode_id: String,
    pub dep_station: String,
    pub arr_station: String,
    pub origin_zone: String,
    pub dest_zone: String,
    /// Phases using the mean ride times.
    pub phases: TripPhaseTimes,
    pub ride_to: RideVariant,
    pub ride_from: RideVariant,
    pub arrival_period: DayPeriod,
    pub arrival_date: NaiveDate,
    /// Period and local date at which the passenger leaves the origin door.
    pub departure_period: DayPeriod,
    pub departure_date: NaiveDate,
    pub used_daily_fallback_to: bool,
    pub used_daily_fallback_from: bool,
}

impl TripRecord {
    pub fn total_s(&self) -> i64 {
        self.phases.total_s()
    }

    /// Door-to-door total with both rides taken at the given variant.
    pub fn total_with(&self, variant: Variant) -> i64 {
        self.phases.dep_s
            + self.phases.in_s
            + self.phases.arr_s
            + self.ride_to.get(variant)
            + self.ride_from.get(variant)
    }

    /// Spread between the max-variant and min-variant totals.
    pub fn variability_s(&self) -> i64 {
        self.total_with(Variant::Max) - self.total_with(Variant::Min)
    }

    /// Label of the station pair, used to group trips by city pair.
    pub fn pair_id(&self) -> String {
        format!("{}-{}", self.dep_station, self.arr_station)
    }
}

/// Inclusive range of calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateRange {
    start: NaiveDate,
    end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, IngestError> {
        if end < start {
            return Err(IngestError::Invalid(format!(
                "empty date range {start}..={end}"
            )));
        }
        Ok(DateRange { start, end })
    }

    pub fn single(date: NaiveDate) -> Self {
        DateRange {
            start: date,
            end: date,
        }
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        self.start.iter_days().take_while(move |d| *d <= end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geo_point_validation() {
        assert!(GeoPoint::new(90.0, 180.0).is_ok());
        assert!(GeoPoint::new(-90.5, 0.0).is_err());
        assert!(GeoPoint::new(0.0, 181.0).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn date_range_iteration() {
        let d = |day| NaiveDate::from_ymd_opt(2018, 1, day).unwrap();
        let r = DateRange::new(d(1), d(7)).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.dates().count(), 7);
        assert!(r.contains(d(7)) && !r.contains(d(8)));
        assert!(DateRange::new(d(2), d(1)).is_err());
    }

    #[test]
    fn dwell_rejects_negative() {
        assert!(DwellProfile::new(-1, 0).is_err());
        assert_eq!(DwellProfile::from_minutes(90, 45).departure_s(), 5400);
    }

    #[test]
    fn phase_totals() {
        let p = TripPhaseTimes {
            to_s: 1800,
            dep_s: 5400 + 960,
            in_s: 4800,
            arr_s: 2700,
            from_s: 1500,
            wait_s: 960,
        };
        assert_eq!(p.total_s(), 286 * 60);
        assert_eq!(p.processing_s(), 5400);
        assert_eq!(TripPhaseTimes::default().total_s(), 0);
    }
}
