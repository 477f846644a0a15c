//! How well an airport is connected to its road network: mean daily access
//! ride time regressed on the geodesic distance to the airport.

use std::collections::BTreeMap;

use log::warn;

use crate::error::AnalysisError;
use crate::geo::geodesic_distance;
use crate::ingestion::{RideStatIndex, ZoneSet};
use crate::model::{DateRange, Station};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
}

impl OlsFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Closed-form simple linear regression `y = slope * x + intercept`.
pub fn ols_fit(xs: &[f64], ys: &[f64]) -> Result<OlsFit, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::FitUndefined(format!(
            "{} predictors for {} responses",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(AnalysisError::FitUndefined("fewer than two samples".into()));
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    if sxx == 0.0 || xs.iter().all(|x| *x == xs[0]) {
        return Err(AnalysisError::FitUndefined(
            "all distances are identical".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(OlsFit {
        slope,
        intercept: y_mean - slope * x_mean,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationSample {
    pub zone_id: String,
    pub distance_km: f64,
    pub mean_daily_ride_min: f64,
    pub days: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFit {
    pub station_id: String,
    pub samples: Vec<IntegrationSample>,
    /// Minutes of ride per km; smaller is better integrated.
    pub slope: f64,
    pub intercept: f64,
    pub max_range_km: f64,
    /// Zones with ride data but no internal point.
    pub skipped_zones: Vec<String>,
}

/// Fit daily access ride times to `station` against distance.
///
/// Only daily aggregates (period code 0) dated inside `range` are used. Each
/// zone contributes one sample: the mean of its daily means, in minutes.
pub fn airport_integration(
    station: &Station,
    rides: &RideStatIndex,
    zones: &ZoneSet,
    range: DateRange,
) -> Result<IntegrationFit, AnalysisError> {
    let mut per_zone: BTreeMap<&str, (i64, usize)> = BTreeMap::new();
    for stat in rides.daily_rows_to(&station.zone_id, range) {
        if stat.origin_zone == station.zone_id {
            continue;
        }
        let e = per_zone.entry(stat.origin_zone.as_str()).or_default();
        e.0 += stat.ride.mean_s;
        e.1 += 1;
    }
    let mut samples = Vec::new();
    let mut skipped_zones = Vec::new();
    for (zone_id, (sum_s, days)) in per_zone {
        match zones.get(zone_id).and_then(|z| z.internal_point) {
            Some(point) => samples.push(IntegrationSample {
                zone_id: zone_id.to_string(),
                distance_km: geodesic_distance(point, station.location),
                mean_daily_ride_min: sum_s as f64 / days as f64 / 60.0,
                days,
            }),
            None => {
                warn!("zone {zone_id} has no internal point, skipped in integration fit");
                skipped_zones.push(zone_id.to_string());
            }
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.distance_km).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.mean_daily_ride_min).collect();
    let fit = ols_fit(&xs, &ys).map_err(|e| match e {
        AnalysisError::FitUndefined(m) => {
            AnalysisError::FitUndefined(format!("station {}: {m}", station.station_id))
        }
        other => other,
    })?;
    Ok(IntegrationFit {
        station_id: station.station_id.clone(),
        max_range_km: xs.iter().copied().fold(0.0, f64::max),
        samples,
        slope: fit.slope,
        intercept: fit.intercept,
        skipped_zones,
    })
}

/// Fits ordered from best to worst integrated (ascending slope, then id).
pub fn rank_by_slope(fits: &[IntegrationFit]) -> Vec<&IntegrationFit> {
    let mut ranked: Vec<&IntegrationFit> = fits.iter().collect();
    ranked.sort_by(|a, b| {
        a.slope
            .total_cmp(&b.slope)
            .then_with(|| a.station_id.cmp(&b.station_id))
    });
    ranked
}
