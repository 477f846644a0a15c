//! Evaluation of one door-to-door trip.
//!
//! The passenger reaches the departure station exactly `t_sec` before the
//! scheduled departure. That station-arrival deadline picks the period of the
//! access ride. The egress ride starts once the arrival dwell is over, which
//! picks the period of the egress ride. The trip is then attributed to the
//! period and local date of the final arrival at the destination door.

use chrono::{DateTime, Duration, NaiveDate};
use chrono_tz::Tz;

use crate::error::TripError;
use crate::model::{
    DwellProfile, RideVariant, ScheduledSegment, Station, TripPhaseTimes, TripRecord,
};
use crate::period::{classify_local_time, DayPeriod};

/// Result of a ride-time lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RideHit {
    pub ride: RideVariant,
    /// Set when the period-level aggregate was missing and the daily one was used.
    pub fallback: bool,
}

/// Source of zone-to-zone ride times.
pub trait RideLookup {
    /// Period-level aggregate if present, else the daily aggregate of that date.
    fn lookup(
        &self,
        origin: &str,
        dest: &str,
        date: NaiveDate,
        period: DayPeriod,
    ) -> Option<RideHit>;
}

/// A segment together with its resolved stations.
#[derive(Debug, Clone, Copy)]
pub struct TripLeg<'a> {
    pub segment: &'a ScheduledSegment,
    pub dep_station: &'a Station,
    pub arr_station: &'a Station,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TripOptions {
    /// Use scheduled times when actual times are absent.
    pub on_time_mode: bool,
}

fn local_slot(instant: DateTime<Tz>, tz: Tz) -> (DayPeriod, NaiveDate) {
    let local = instant.with_timezone(&tz);
    (classify_local_time(local.time()), local.date_naive())
}

fn ride<R: RideLookup + ?Sized>(
    rides: &R,
    origin: &str,
    dest: &str,
    (period, date): (DayPeriod, NaiveDate),
) -> Result<RideHit, TripError> {
    rides
        .lookup(origin, dest, date, period)
        .ok_or_else(|| TripError::NoRideData {
            origin: origin.to_string(),
            dest: dest.to_string(),
            date,
            period,
        })
}

/// Evaluate the door-to-door trip from `origin_zone` to `dest_zone` using `leg`.
pub fn compute_trip<R: RideLookup + ?Sized>(
    leg: &TripLeg<'_>,
    origin_zone: &str,
    dest_zone: &str,
    dwell_dep: DwellProfile,
    dwell_arr: DwellProfile,
    rides: &R,
    options: TripOptions,
) -> Result<TripRecord, TripError> {
    let seg = leg.segment;
    if seg.cancelled {
        return Err(TripError::Cancelled(seg.segment_id.clone()));
    }
    for (used, station) in [
        (&seg.dep_station, leg.dep_station),
        (&seg.arr_station, leg.arr_station),
    ] {
        if *used != station.station_id {
            return Err(TripError::StationMismatch {
                segment: seg.segment_id.clone(),
                station: station.station_id.clone(),
                expected: used.clone(),
            });
        }
    }
    let (actual_dep, actual_arr) = seg
        .effective_times(options.on_time_mode)
        .ok_or_else(|| TripError::MissingActuals(seg.segment_id.clone()))?;

    let in_s = (actual_arr - actual_dep).num_seconds();
    if in_s <= 0 {
        return Err(TripError::NonPositiveInVehicle(seg.segment_id.clone()));
    }
    // early departures do not shorten the processing time
    let wait_s = (actual_dep - seg.sched_dep).num_seconds().max(0);
    let t_sec = dwell_dep.departure_s();
    let t_arr = dwell_arr.arrival_s();

    let deadline = seg.sched_dep - Duration::seconds(t_sec);
    let access = ride(
        rides,
        origin_zone,
        &leg.dep_station.zone_id,
        local_slot(deadline, leg.dep_station.tz),
    )?;

    let egress_start = actual_arr + Duration::seconds(t_arr);
    let egress = ride(
        rides,
        &leg.arr_station.zone_id,
        dest_zone,
        local_slot(egress_start, leg.arr_station.tz),
    )?;

    let door_arrival = egress_start + Duration::seconds(egress.ride.mean_s);
    let (arrival_period, arrival_date) = local_slot(door_arrival, leg.arr_station.tz);
    let door_departure = deadline - Duration::seconds(access.ride.mean_s);
    let (departure_period, departure_date) = local_slot(door_departure, leg.dep_station.tz);

    Ok(TripRecord {
        segment_id: seg.segment_id.clone(),
        mode_id: seg.mode_id.clone(),
        dep_station: seg.dep_station.clone(),
        arr_station: seg.arr_station.clone(),
        origin_zone: origin_zone.to_string(),
        dest_zone: dest_zone.to_string(),
        phases: TripPhaseTimes {
            to_s: access.ride.mean_s,
            dep_s: t_sec + wait_s,
            in_s,
            arr_s: t_arr,
            from_s: egress.ride.mean_s,
            wait_s,
        },
        ride_to: access.ride,
        ride_from: egress.ride,
        arrival_period,
        arrival_date,
        departure_period,
        departure_date,
        used_daily_fallback_to: access.fallback,
        used_daily_fallback_from: egress.fallback,
    })
}
