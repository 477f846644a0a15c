//! Passenger delay caused by a vehicle arriving in a different traffic period
//! than scheduled.
//!
//! The passenger leaves the station `t_arr` after the vehicle lands. If the
//! scheduled and actual exit times fall in different periods, the egress ride
//! to each destination zone is taken from a different aggregate. The extra
//! ride time per zone is averaged with population-density weights; the
//! largest change of the maximum ride time gives the worst case.

use chrono::{DateTime, Duration, NaiveDate};
use chrono_tz::Tz;
use log::warn;

use crate::error::AnalysisError;
use crate::ingestion::RideStatIndex;
use crate::model::{DwellProfile, ScheduledSegment, Station, Zone};
use crate::period::{classify_local_time, DayPeriod};

#[derive(Debug, Clone, PartialEq)]
pub struct DelaySensitivity {
    pub segment_id: String,
    pub scheduled_egress_period: DayPeriod,
    pub scheduled_egress_date: NaiveDate,
    pub actual_egress_period: DayPeriod,
    pub actual_egress_date: NaiveDate,
    /// Density-weighted mean of the per-zone change of mean ride time.
    pub weighted_mean_delta_s: f64,
    /// Largest per-zone change of the maximum ride time.
    pub max_of_max_delta_s: i64,
    pub zones_used: Vec<String>,
    /// Per-zone detail, in the order of `zones_used`.
    pub zone_deltas: Vec<ZoneDelta>,
    /// Zones lacking an aggregate in one of the two periods.
    pub zones_excluded: Vec<String>,
    /// Set when densities were missing and every zone got the same weight.
    pub uniform_weights: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneDelta {
    pub zone_id: String,
    pub mean_delta_s: i64,
    pub max_delta_s: i64,
    /// Normalized weight; weights of all used zones sum to 1.
    pub weight: f64,
}

fn egress_slot(landing: DateTime<Tz>, dwell: DwellProfile, tz: Tz) -> (DayPeriod, NaiveDate) {
    let local = (landing + Duration::seconds(dwell.arrival_s())).with_timezone(&tz);
    (classify_local_time(local.time()), local.date_naive())
}

/// Evaluate how the arrival deviation of `segment` changes egress ride times
/// from `arr_station` to each of `zones`.
pub fn delay_sensitivity(
    segment: &ScheduledSegment,
    arr_station: &Station,
    dwell_arr: DwellProfile,
    rides: &RideStatIndex,
    zones: &[&Zone],
) -> Result<DelaySensitivity, AnalysisError> {
    let actual_arr = segment
        .actual_arr
        .ok_or_else(|| AnalysisError::MissingActualArrival(segment.segment_id.clone()))?;
    let (sched_period, sched_date) = egress_slot(segment.sched_arr, dwell_arr, arr_station.tz);
    let (act_period, act_date) = egress_slot(actual_arr, dwell_arr, arr_station.tz);

    let mut result = DelaySensitivity {
        segment_id: segment.segment_id.clone(),
        scheduled_egress_period: sched_period,
        scheduled_egress_date: sched_date,
        actual_egress_period: act_period,
        actual_egress_date: act_date,
        weighted_mean_delta_s: 0.0,
        max_of_max_delta_s: 0,
        zones_used: Vec::new(),
        zone_deltas: Vec::new(),
        zones_excluded: Vec::new(),
        uniform_weights: false,
    };
    if (sched_period, sched_date) == (act_period, act_date) {
        return Ok(result);
    }

    let from = arr_station.zone_id.as_str();
    // (density, mean delta, max delta) per usable zone
    let mut deltas: Vec<(Option<f64>, i64, i64)> = Vec::new();
    for zone in zones {
        let sched = rides.get_exact(from, &zone.zone_id, sched_date, sched_period);
        let act = rides.get_exact(from, &zone.zone_id, act_date, act_period);
        match (sched, act) {
            (Some(s), Some(a)) => {
                deltas.push((
                    zone.population_density,
                    a.ride.mean_s - s.ride.mean_s,
                    a.ride.max_s - s.ride.max_s,
                ));
                result.zones_used.push(zone.zone_id.clone());
            }
            _ => result.zones_excluded.push(zone.zone_id.clone()),
        }
    }
    if deltas.is_empty() {
        return Err(AnalysisError::SensitivityUndefined(format!(
            "no zone has egress ride data from {from} in both {sched_period} {sched_date} and {act_period} {act_date}"
        )));
    }

    let densities: Option<Vec<f64>> = deltas.iter().map(|d| d.0).collect();
    let weights = match densities {
        Some(w) if w.iter().sum::<f64>() > 0.0 => w,
        _ => {
            warn!(
                "segment {}: population densities missing, using uniform weights",
                segment.segment_id
            );
            result.uniform_weights = true;
            vec![1.0; deltas.len()]
        }
    };
    let weight_sum: f64 = weights.iter().sum();
    result.weighted_mean_delta_s = deltas
        .iter()
        .zip(&weights)
        .map(|((_, mean, _), w)| w * *mean as f64)
        .sum::<f64>()
        / weight_sum;
    result.max_of_max_delta_s = deltas.iter().map(|d| d.2).max().expect("non-empty");
    result.zone_deltas = result
        .zones_used
        .iter()
        .zip(&deltas)
        .zip(&weights)
        .map(|((zone_id, (_, mean, max)), w)| ZoneDelta {
            zone_id: zone_id.clone(),
            mean_delta_s: *mean,
            max_delta_s: *max,
            weight: w / weight_sum,
        })
        .collect();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use chrono::TimeZone;

    use super::*;
    use crate::ingestion::ZoneRideStat;
    use crate::model::{GeoPoint, RideVariant, StationKind};

    fn station() -> Station {
        Station {
            station_id: "SFO".into(),
            kind: StationKind::Air,
            zone_id: "Z_SFO".into(),
            location: GeoPoint::new(37.6, -122.4).unwrap(),
            tz: chrono_tz::America::Los_Angeles,
            dwell: None,
        }
    }

    fn d() -> NaiveDate {
        NaiveDate::from_ymd_opt(2018, 2, 15).unwrap()
    }

    fn stat(dest: &str, period: DayPeriod, mean_min: i64, max_min: i64) -> ZoneRideStat {
        ZoneRideStat {
            origin_zone: "Z_SFO".into(),
            dest_zone: dest.into(),
            date: d(),
            period,
            ride: RideVariant {
                mean_s: mean_min * 60,
                min_s: 60,
                max_s: max_min * 60,
            },
        }
    }

    fn segment(sched: (u32, u32), actual: (u32, u32)) -> ScheduledSegment {
        let tz = chrono_tz::America::Los_Angeles;
        let at = |(h, m): (u32, u32)| tz.with_ymd_and_hms(2018, 2, 15, h, m, 0).unwrap();
        ScheduledSegment {
            segment_id: "UA460".into(),
            mode_id: "LAX-SFO".into(),
            dep_station: "LAX".into(),
            arr_station: "SFO".into(),
            sched_dep: at((16, 40)),
            sched_arr: at(sched),
            actual_dep: Some(at((16, 56))),
            actual_arr: Some(at(actual)),
            cancelled: false,
        }
    }

    fn rides() -> RideStatIndex {
        RideStatIndex::from_rows(vec![
            stat("Z1", DayPeriod::Pm, 30, 50),
            stat("Z1", DayPeriod::LateEvening, 40, 90),
            stat("Z2", DayPeriod::Pm, 25, 45),
            stat("Z2", DayPeriod::LateEvening, 45, 70),
            stat("Z3", DayPeriod::Pm, 25, 45),
            stat("Z1", DayPeriod::Midday, 20, 30),
            stat("Z2", DayPeriod::Midday, 22, 31),
        ])
        .unwrap()
    }

    fn dwell() -> DwellProfile {
        DwellProfile::from_minutes(105, 45)
    }

    #[test]
    fn density_weighted_mean() {
        let zones = [
            Zone::new("Z1").with_density(1.0),
            Zone::new("Z2").with_density(3.0),
            Zone::new("Z3"),
        ];
        let refs: Vec<&Zone> = zones.iter().collect();
        // 18:02 + 45 = 18:47 (PM); 18:18 + 45 = 19:03 (late evening)
        let r = delay_sensitivity(
            &segment((18, 2), (18, 18)),
            &station(),
            dwell(),
            &rides(),
            &refs,
        )
        .unwrap();
        assert_eq!(r.scheduled_egress_period, DayPeriod::Pm);
        assert_eq!(r.actual_egress_period, DayPeriod::LateEvening);
        assert_eq!(r.zones_used, vec!["Z1", "Z2"]);
        assert_eq!(r.zones_excluded, vec!["Z3"]);
        assert!(!r.uniform_weights);
        assert!((r.weighted_mean_delta_s - 17.5 * 60.0).abs() < 1e-9);
        assert_eq!(r.max_of_max_delta_s, 40 * 60);
        assert_eq!(r.zone_deltas[1].mean_delta_s, 20 * 60);
        assert!((r.zone_deltas.iter().map(|z| z.weight).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_period_is_zero() {
        let zones = [Zone::new("Z1").with_density(1.0)];
        let refs: Vec<&Zone> = zones.iter().collect();
        let r = delay_sensitivity(
            &segment((17, 0), (17, 10)),
            &station(),
            dwell(),
            &rides(),
            &refs,
        )
        .unwrap();
        assert_eq!(r.weighted_mean_delta_s, 0.0);
        assert_eq!(r.max_of_max_delta_s, 0);
    }

    #[test]
    fn early_arrival_gives_negative_delta() {
        let zones = [
            Zone::new("Z1").with_density(2.0),
            Zone::new("Z2").with_density(2.0),
        ];
        let refs: Vec<&Zone> = zones.iter().collect();
        // 15:22 + 45 = 16:07 (PM); 14:57 + 45 = 15:42 (midday)
        let r = delay_sensitivity(
            &segment((15, 22), (14, 57)),
            &station(),
            dwell(),
            &rides(),
            &refs,
        )
        .unwrap();
        assert_eq!(r.actual_egress_period, DayPeriod::Midday);
        assert!((r.weighted_mean_delta_s - (-6.5 * 60.0)).abs() < 1e-9);
        assert_eq!(r.max_of_max_delta_s, -14 * 60);
    }

    #[test]
    fn missing_density_falls_back_to_uniform() {
        let zones = [Zone::new("Z1").with_density(1.0), Zone::new("Z2")];
        let refs: Vec<&Zone> = zones.iter().collect();
        let r = delay_sensitivity(
            &segment((18, 2), (18, 18)),
            &station(),
            dwell(),
            &rides(),
            &refs,
        )
        .unwrap();
        assert!(r.uniform_weights);
        assert!((r.weighted_mean_delta_s - 15.0 * 60.0).abs() < 1e-9);
    }

    #[test]
    fn undefined_without_paired_zones() {
        let zones = [Zone::new("Z3").with_density(1.0)];
        let refs: Vec<&Zone> = zones.iter().collect();
        let err = delay_sensitivity(
            &segment((18, 2), (18, 18)),
            &station(),
            dwell(),
            &rides(),
            &refs,
        )
        .unwrap_err();
        assert!(matches!(err, AnalysisError::SensitivityUndefined(_)));
        let mut seg = segment((18, 2), (18, 18));
        seg.actual_arr = None;
        assert!(matches!(
            delay_sensitivity(&seg, &station(), dwell(), &rides(), &refs),
            Err(AnalysisError::MissingActualArrival(_))
        ));
    }
}
