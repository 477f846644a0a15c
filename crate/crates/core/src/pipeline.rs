//! Dataset loading and full evaluation runs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use log::{debug, info};
use rayon::prelude::*;

use crate::aggregation::{
    daily_zone_means_with, summarize, GroupingOptions, ZonePeriodDayStat, ZonePeriodSummary,
};
use crate::analytics::{airport_integration, delay_sensitivity, DelaySensitivity, IntegrationFit};
use crate::dwell::{self, DwellOverrides};
use crate::error::{AnalysisError, IngestError, TripError};
use crate::ingestion::{
    expand_weekly_schedule, load_ride_stats, load_segments_actuals, load_stations,
    load_weekly_schedule, load_zones, LoadReport, RideStatIndex, StationTable, ZoneSet,
};
use crate::model::{DateRange, ScheduledSegment, StationKind, TripRecord, Zone};
use crate::trip::{compute_trip, TripLeg, TripOptions};

/// Input files of one city dataset. At least one of `segments` and
/// `weekly_schedule` must be set; both may be combined.
#[derive(Debug, Clone, Default)]
pub struct DatasetPaths {
    pub ride_stats: PathBuf,
    pub stations: PathBuf,
    pub zones: PathBuf,
    pub segments: Option<PathBuf>,
    pub weekly_schedule: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReports {
    pub ride_stats: LoadReport,
    pub stations: LoadReport,
    pub zones: LoadReport,
    pub segments: Option<LoadReport>,
    pub weekly_schedule: Option<LoadReport>,
    /// Segments produced by expanding the weekly schedule.
    pub expanded_segments: usize,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub stations: StationTable,
    pub zones: ZoneSet,
    pub rides: RideStatIndex,
    pub segments: Vec<ScheduledSegment>,
}

impl Dataset {
    /// Load every input; the weekly schedule is expanded over `range`.
    pub fn load(
        paths: &DatasetPaths,
        range: DateRange,
        on_time_mode: bool,
    ) -> Result<(Dataset, LoadReports), IngestError> {
        if paths.segments.is_none() && paths.weekly_schedule.is_none() {
            return Err(IngestError::Invalid(
                "either segments or a weekly schedule is required".into(),
            ));
        }
        // independent files are parsed concurrently
        let ((stations, zones), rides) = rayon::join(
            || {
                rayon::join(
                    || load_stations(&paths.stations),
                    || load_zones(&paths.zones),
                )
            },
            || load_ride_stats(&paths.ride_stats),
        );
        let (stations, station_report) = stations?;
        let (zones, zone_report) = zones?;
        let (rides, ride_report) = rides?;

        let mut reports = LoadReports {
            ride_stats: ride_report,
            stations: station_report,
            zones: zone_report,
            ..Default::default()
        };
        let mut segments = Vec::new();
        if let Some(path) = &paths.segments {
            let (segs, report) = load_segments_actuals(path, &stations, on_time_mode)?;
            reports.segments = Some(report);
            segments.extend(segs);
        }
        if let Some(path) = &paths.weekly_schedule {
            let (rows, report) = load_weekly_schedule(path)?;
            reports.weekly_schedule = Some(report);
            let expanded = expand_weekly_schedule(&rows, range, &stations)?;
            reports.expanded_segments = expanded.len();
            segments.extend(expanded);
        }
        let mut ids = std::collections::HashSet::new();
        for s in &segments {
            if !ids.insert(s.segment_id.as_str()) {
                return Err(IngestError::Invalid(format!(
                    "segment id {} appears in both the segments file and the weekly schedule",
                    s.segment_id
                )));
            }
        }
        info!(
            "loaded {} stations, {} zones, {} ride stats, {} segments",
            stations.len(),
            zones.len(),
            rides.len(),
            segments.len()
        );
        Ok((
            Dataset {
                stations,
                zones,
                rides,
                segments,
            },
            reports,
        ))
    }

    pub fn segment(&self, segment_id: &str) -> Option<&ScheduledSegment> {
        self.segments.iter().find(|s| s.segment_id == segment_id)
    }

    /// Zones reached from `station_zone` in the ride data that are also known zones.
    pub fn destinations_from(&self, station_zone: &str) -> Vec<&str> {
        self.rides
            .destinations_from(station_zone)
            .into_iter()
            .filter(|z| self.zones.contains(z))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// Origin zones of every trip. When empty, each trip starts in the zone
    /// of its departure station.
    pub origin_zones: Vec<String>,
    /// Trips are kept when their grouping date lies in this range.
    pub date_range: DateRange,
    pub on_time_mode: bool,
    pub overrides: DwellOverrides,
    pub grouping: GroupingOptions,
}

impl EvalConfig {
    pub fn new(date_range: DateRange) -> Self {
        EvalConfig {
            origin_zones: Vec::new(),
            date_range,
            on_time_mode: false,
            overrides: DwellOverrides::default(),
            grouping: GroupingOptions::default(),
        }
    }
}

/// Why candidate trips were not evaluated, with counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipCounts {
    pub cancelled_segments: usize,
    pub missing_actuals: usize,
    /// Trips without ride data in the period nor a daily fallback.
    pub no_ride_data: usize,
    /// Trips whose grouping date lies outside the date range.
    pub out_of_range: usize,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub trips: Vec<TripRecord>,
    pub skipped: SkipCounts,
}

enum Outcome {
    Trips(Vec<TripRecord>, usize, usize),
    Cancelled,
    MissingActuals,
}

fn evaluate_segment(
    dataset: &Dataset,
    cfg: &EvalConfig,
    seg: &ScheduledSegment,
) -> Result<Outcome, TripError> {
    let dep = dataset
        .stations
        .get(&seg.dep_station)
        .ok_or_else(|| TripError::UnknownStation(seg.dep_station.clone()))?;
    let arr = dataset
        .stations
        .get(&seg.arr_station)
        .ok_or_else(|| TripError::UnknownStation(seg.arr_station.clone()))?;
    if seg.cancelled {
        return Ok(Outcome::Cancelled);
    }
    if seg.effective_times(cfg.on_time_mode).is_none() {
        return Ok(Outcome::MissingActuals);
    }
    let dwell_dep = dwell::resolve(dep, &cfg.overrides)?;
    let dwell_arr = dwell::resolve(arr, &cfg.overrides)?;
    let leg = TripLeg {
        segment: seg,
        dep_station: dep,
        arr_station: arr,
    };
    let options = TripOptions {
        on_time_mode: cfg.on_time_mode,
    };

    let own_origin = [dep.zone_id.clone()];
    let origins: &[String] = if cfg.origin_zones.is_empty() {
        &own_origin
    } else {
        &cfg.origin_zones
    };
    let mut trips = Vec::new();
    let (mut no_data, mut out_of_range) = (0, 0);
    for origin in origins {
        for dest in dataset.destinations_from(&arr.zone_id) {
            match compute_trip(
                &leg,
                origin,
                dest,
                dwell_dep,
                dwell_arr,
                &dataset.rides,
                options,
            ) {
                Ok(t) if cfg.date_range.contains(cfg.grouping.date_of(&t)) => trips.push(t),
                Ok(_) => out_of_range += 1,
                Err(TripError::NoRideData { .. }) => no_data += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Outcome::Trips(trips, no_data, out_of_range))
}

/// Evaluate every (segment, origin zone, destination zone) trip.
///
/// Destinations of a segment are the zones reachable from its arrival
/// station zone in the ride data. Output order follows segment order, so it
/// does not depend on the number of threads.
pub fn evaluate_trips(dataset: &Dataset, cfg: &EvalConfig) -> Result<Evaluation, TripError> {
    for z in &cfg.origin_zones {
        if !dataset.zones.contains(z) {
            debug!("origin zone {z} is not in the zones file");
        }
    }
    let outcomes: Vec<Outcome> = dataset
        .segments
        .par_iter()
        .map(|seg| evaluate_segment(dataset, cfg, seg))
        .collect::<Result<_, _>>()?;
    let mut skipped = SkipCounts::default();
    let mut trips = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Trips(t, no_data, out_of_range) => {
                trips.extend(t);
                skipped.no_ride_data += no_data;
                skipped.out_of_range += out_of_range;
            }
            Outcome::Cancelled => skipped.cancelled_segments += 1,
            Outcome::MissingActuals => skipped.missing_actuals += 1,
        }
    }
    info!("evaluated {} trips, skipped {:?}", trips.len(), skipped);
    Ok(Evaluation { trips, skipped })
}

/// Trips, daily stats and per (zone, period) summaries of one configuration.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub evaluation: Evaluation,
    pub day_stats: Vec<ZonePeriodDayStat>,
    pub summaries: Vec<ZonePeriodSummary>,
}

pub fn analyze(dataset: &Dataset, cfg: &EvalConfig) -> Result<Analysis, TripError> {
    let evaluation = evaluate_trips(dataset, cfg)?;
    let day_stats = daily_zone_means_with(&evaluation.trips, cfg.grouping);
    let summaries = summarize(&day_stats, cfg.date_range.len());
    Ok(Analysis {
        evaluation,
        day_stats,
        summaries,
    })
}

#[derive(Debug, Clone)]
pub struct WhatIf {
    pub baseline: Analysis,
    pub scenario: Analysis,
}

/// Re-run the whole evaluation with dwell `overrides` on top of `cfg`.
pub fn what_if_processing(
    dataset: &Dataset,
    cfg: &EvalConfig,
    overrides: DwellOverrides,
) -> Result<WhatIf, TripError> {
    let baseline = analyze(dataset, cfg)?;
    let mut scenario_cfg = cfg.clone();
    if overrides.air.is_some() {
        scenario_cfg.overrides.air = overrides.air;
    }
    if overrides.rail.is_some() {
        scenario_cfg.overrides.rail = overrides.rail;
    }
    let scenario = analyze(dataset, &scenario_cfg)?;
    Ok(WhatIf { baseline, scenario })
}

/// Passenger delay analysis of one segment over the zones reached from its
/// arrival station.
pub fn segment_delay(
    dataset: &Dataset,
    segment_id: &str,
    overrides: &DwellOverrides,
) -> Result<DelaySensitivity, AnalysisError> {
    let seg = dataset
        .segment(segment_id)
        .ok_or_else(|| AnalysisError::UnknownSegment(segment_id.to_string()))?;
    let arr = dataset
        .stations
        .get(&seg.arr_station)
        .ok_or_else(|| TripError::UnknownStation(seg.arr_station.clone()))?;
    let dwell_arr = dwell::resolve(arr, overrides)?;
    let zones: Vec<&Zone> = dataset
        .destinations_from(&arr.zone_id)
        .into_iter()
        .filter_map(|z| dataset.zones.get(z))
        .collect();
    delay_sensitivity(seg, arr, dwell_arr, &dataset.rides, &zones)
}

/// Integration fit of every airport; stations whose fit is undefined are
/// returned separately with the reason.
pub fn integration_fits(
    dataset: &Dataset,
    range: DateRange,
) -> (Vec<IntegrationFit>, BTreeMap<String, String>) {
    let mut fits = Vec::new();
    let mut failed = BTreeMap::new();
    for station in dataset
        .stations
        .iter()
        .filter(|s| s.kind == StationKind::Air)
    {
        match airport_integration(station, &dataset.rides, &dataset.zones, range) {
            Ok(fit) => fits.push(fit),
            Err(e) => {
                failed.insert(station.station_id.clone(), e.to_string());
            }
        }
    }
    (fits, failed)
}
