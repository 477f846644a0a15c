//! Python bindings: `import door2door`.
//!
//! Results come back as plain dicts and lists so they can go straight into
//! pandas or json.

use std::path::PathBuf;

use chrono::NaiveDate;
use d2d_core::aggregation::{seconds_to_minutes, ZonePeriodSummary};
use d2d_core::analytics::{leg_shares, rank_by_slope};
use d2d_core::dwell::{builtin_airport, DwellOverrides};
use d2d_core::pipeline::{self, Analysis, Dataset, DatasetPaths, EvalConfig};
use d2d_core::{DateRange, DayPeriod, DwellProfile, GeoPoint, TripRecord};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_date(s: &str) -> PyResult<NaiveDate> {
    s.parse()
        .map_err(|_| PyValueError::new_err(format!("bad date {s:?}, expected YYYY-MM-DD")))
}

/// Period name ("early_morning", "am", "midday", "pm", "late_evening") of a
/// minute after local midnight.
#[pyfunction]
fn classify_period(minute_of_day: u32) -> PyResult<&'static str> {
    d2d_core::classify_period(minute_of_day)
        .map(DayPeriod::slug)
        .map_err(value_err)
}

/// Great-circle distance in km between two (lat, lon) points.
#[pyfunction]
fn geodesic_distance(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> PyResult<f64> {
    let a = GeoPoint::new(lat1, lon1).map_err(value_err)?;
    let b = GeoPoint::new(lat2, lon2).map_err(value_err)?;
    Ok(d2d_core::geo::geodesic_distance(a, b))
}

/// Built-in (departure, arrival) dwell minutes of an airport, or None.
#[pyfunction]
fn default_dwell(station_id: &str) -> Option<(i64, i64)> {
    builtin_airport(station_id).map(|d| (d.departure_s() / 60, d.arrival_s() / 60))
}

/// Least-squares (slope, intercept) of ys against xs.
#[pyfunction]
fn ols_fit(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<(f64, f64)> {
    let fit = d2d_core::analytics::ols_fit(&xs, &ys).map_err(value_err)?;
    Ok((fit.slope, fit.intercept))
}

fn trip_dict<'py>(py: Python<'py>, t: &TripRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("segment_id", &t.segment_id)?;
    d.set_item("mode_id", &t.mode_id)?;
    d.set_item("dep_station", &t.dep_station)?;
    d.set_item("arr_station", &t.arr_station)?;
    d.set_item("origin_zone", &t.origin_zone)?;
    d.set_item("dest_zone", &t.dest_zone)?;
    let p = &t.phases;
    d.set_item("t_to_s", p.to_s)?;
    d.set_item("t_dep_s", p.dep_s)?;
    d.set_item("t_in_s", p.in_s)?;
    d.set_item("t_arr_s", p.arr_s)?;
    d.set_item("t_from_s", p.from_s)?;
    d.set_item("wait_s", p.wait_s)?;
    d.set_item("total_s", t.total_s())?;
    d.set_item("variability_s", t.variability_s())?;
    d.set_item("arrival_period", t.arrival_period.slug())?;
    d.set_item("arrival_date", t.arrival_date.to_string())?;
    d.set_item(
        "used_daily_fallback",
        t.used_daily_fallback_to || t.used_daily_fallback_from,
    )?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &ZonePeriodSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("zone_id", &s.zone_id)?;
    d.set_item("period", s.period.slug())?;
    d.set_item("fastest_mode", &s.fastest_mode)?;
    d.set_item("most_reliable_mode", &s.most_reliable_mode)?;
    d.set_item("fastest_counts", s.fastest_counts.clone())?;
    d.set_item("reliability_counts", s.reliability_counts.clone())?;
    d.set_item("e_bar_min", seconds_to_minutes(&s.e_bar_s))?;
    // exact value as (numerator, denominator) seconds
    d.set_item("e_bar_s", (*s.e_bar_s.numer(), *s.e_bar_s.denom()))?;
    d.set_item("interval_bin", s.interval_bin.label())?;
    d.set_item("days_used", s.days_used)?;
    d.set_item("days_total", s.days_total)?;
    Ok(d)
}

fn summaries_list<'py>(py: Python<'py>, a: &Analysis) -> PyResult<Vec<Bound<'py, PyDict>>> {
    a.summaries.iter().map(|s| summary_dict(py, s)).collect()
}

/// A loaded dataset together with its evaluation settings.
#[pyclass(frozen)]
struct Engine {
    dataset: Dataset,
    cfg: EvalConfig,
}

impl Engine {
    fn analysis(&self) -> PyResult<Analysis> {
        pipeline::analyze(&self.dataset, &self.cfg)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pymethods]
impl Engine {
    #[staticmethod]
    #[pyo3(signature = (ride_stats, stations, zones, from_date, to_date=None, segments=None, weekly_schedule=None, origin_zones=None, on_time_mode=false))]
    #[allow(clippy::too_many_arguments)]
    fn load(
        ride_stats: PathBuf,
        stations: PathBuf,
        zones: PathBuf,
        from_date: &str,
        to_date: Option<&str>,
        segments: Option<PathBuf>,
        weekly_schedule: Option<PathBuf>,
        origin_zones: Option<Vec<String>>,
        on_time_mode: bool,
    ) -> PyResult<Engine> {
        let start = parse_date(from_date)?;
        let end = to_date.map(parse_date).transpose()?.unwrap_or(start);
        let range = DateRange::new(start, end).map_err(value_err)?;
        let paths = DatasetPaths {
            ride_stats,
            stations,
            zones,
            segments,
            weekly_schedule,
        };
        let (dataset, _) = Dataset::load(&paths, range, on_time_mode).map_err(value_err)?;
        let mut cfg = EvalConfig::new(range);
        cfg.on_time_mode = on_time_mode;
        cfg.origin_zones = origin_zones.unwrap_or_default();
        Ok(Engine { dataset, cfg })
    }

    /// Number of segments after schedule expansion.
    #[getter]
    fn n_segments(&self) -> usize {
        self.dataset.segments.len()
    }

    fn trips<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let eval = pipeline::evaluate_trips(&self.dataset, &self.cfg)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        eval.trips.iter().map(|t| trip_dict(py, t)).collect()
    }

    fn summaries<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        summaries_list(py, &self.analysis()?)
    }

    /// Baseline and scenario summaries with airport dwell set to the given minutes.
    fn what_if<'py>(
        &self,
        py: Python<'py>,
        dep_proc_min: u32,
        arr_proc_min: u32,
    ) -> PyResult<Bound<'py, PyDict>> {
        let overrides = DwellOverrides {
            air: Some(DwellProfile::from_minutes(dep_proc_min, arr_proc_min)),
            rail: None,
        };
        let w = pipeline::what_if_processing(&self.dataset, &self.cfg, overrides)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let d = PyDict::new(py);
        d.set_item("baseline", summaries_list(py, &w.baseline)?)?;
        d.set_item("scenario", summaries_list(py, &w.scenario)?)?;
        Ok(d)
    }

    fn legs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let a = self.analysis()?;
        let (shares, _) = leg_shares(&a.evaluation.trips);
        shares
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("pair_id", &s.pair_id)?;
                d.set_item("n_trips", s.n_trips)?;
                for (k, v) in ["to_pct", "dep_pct", "in_pct", "arr_pct", "from_pct"]
                    .iter()
                    .zip(s.shares)
                {
                    d.set_item(*k, v)?;
                }
                Ok(d)
            })
            .collect()
    }

    /// Airport fits ranked by slope; airports without a fit are left out.
    fn integration<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let (fits, _) = pipeline::integration_fits(&self.dataset, self.cfg.date_range);
        rank_by_slope(&fits)
            .into_iter()
            .map(|f| {
                let d = PyDict::new(py);
                d.set_item("station_id", &f.station_id)?;
                d.set_item("slope_min_per_km", f.slope)?;
                d.set_item("intercept_min", f.intercept)?;
                d.set_item("max_range_km", f.max_range_km)?;
                d.set_item("n_samples", f.samples.len())?;
                Ok(d)
            })
            .collect()
    }

    fn delay<'py>(&self, py: Python<'py>, segment_id: &str) -> PyResult<Bound<'py, PyDict>> {
        if self.dataset.segment(segment_id).is_none() {
            return Err(PyKeyError::new_err(segment_id.to_string()));
        }
        let r = pipeline::segment_delay(&self.dataset, segment_id, &self.cfg.overrides)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let d = PyDict::new(py);
        d.set_item("segment_id", &r.segment_id)?;
        d.set_item("scheduled_egress_period", r.scheduled_egress_period.slug())?;
        d.set_item("actual_egress_period", r.actual_egress_period.slug())?;
        d.set_item("weighted_mean_delta_s", r.weighted_mean_delta_s)?;
        d.set_item("max_of_max_delta_s", r.max_of_max_delta_s)?;
        d.set_item("zones_used", r.zones_used.clone())?;
        d.set_item("uniform_weights", r.uniform_weights)?;
        Ok(d)
    }
}

#[pymodule]
fn door2door(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify_period, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_distance, m)?)?;
    m.add_function(wrap_pyfunction!(default_dwell, m)?)?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_class::<Engine>()?;
    Ok(())
}
