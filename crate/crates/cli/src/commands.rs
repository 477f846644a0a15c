use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use d2d_core::aggregation::{bin_zone_counts, GroupingOptions, IntervalBin, ZonePeriodSummary};
use d2d_core::analytics::{leg_shares, rank_by_slope, weather_diff, Presence, WeatherDelta};
use d2d_core::dwell::{self, DwellOverrides};
use d2d_core::pipeline::{
    analyze, integration_fits, segment_delay, what_if_processing, Analysis, Dataset, EvalConfig,
    LoadReports,
};
use d2d_core::{AnalysisError, DateRange, DayPeriod, IngestError};
use log::warn;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::export::{fixed, minutes, opt_str, rounded, write_csv, write_zone_layer, Written};

type SummaryIndex<'a> = BTreeMap<(&'a str, DayPeriod), &'a ZonePeriodSummary>;

fn index(summaries: &[ZonePeriodSummary]) -> SummaryIndex<'_> {
    summaries
        .iter()
        .map(|s| ((s.zone_id.as_str(), s.period), s))
        .collect()
}

fn modes_of(summaries: &[ZonePeriodSummary]) -> Vec<String> {
    let set: BTreeSet<&String> = summaries
        .iter()
        .flat_map(|s| s.fastest_counts.keys())
        .collect();
    set.into_iter().cloned().collect()
}

fn counts_json(counts: Option<&BTreeMap<String, u32>>, modes: &[String]) -> Value {
    let map: Map<String, Value> = modes
        .iter()
        .map(|m| {
            (
                m.clone(),
                json!(counts.and_then(|c| c.get(m)).copied().unwrap_or(0)),
            )
        })
        .collect();
    Value::Object(map)
}

fn load(cfg: &RunConfig, range: DateRange) -> Result<(Dataset, LoadReports), CliError> {
    let paths = cfg.dataset_paths()?;
    Ok(Dataset::load(&paths, range, cfg.on_time_mode)?)
}

fn eval_config(cfg: &RunConfig, range: DateRange, overrides: DwellOverrides) -> EvalConfig {
    EvalConfig {
        origin_zones: cfg.origin_zones.clone(),
        date_range: range,
        on_time_mode: cfg.on_time_mode,
        overrides,
        grouping: cfg.grouping_options(),
    }
}

fn check_origins(cfg: &RunConfig, dataset: &Dataset) -> Result<(), CliError> {
    match cfg.origin_zones.iter().find(|z| !dataset.zones.contains(z)) {
        Some(z) => Err(CliError::Ingest(IngestError::Invalid(format!(
            "origin zone {z} is not in the zones file"
        )))),
        None => Ok(()),
    }
}

/// Dataset, evaluation config and analysis for the configured date range.
fn run_analysis(cfg: &RunConfig) -> Result<(Dataset, Analysis), CliError> {
    let range = cfg.date_range()?;
    let (dataset, _) = load(cfg, range)?;
    check_origins(cfg, &dataset)?;
    let analysis = analyze(&dataset, &eval_config(cfg, range, cfg.overrides()?))?;
    Ok((dataset, analysis))
}

fn run_summary(command: &str, analysis: &Analysis, written: &Written, extra: Value) -> Value {
    let s = &analysis.evaluation.skipped;
    let mut out = json!({
        "command": command,
        "trips": analysis.evaluation.trips.len(),
        "zone_periods": analysis.summaries.len(),
        "skipped": {
            "cancelled_segments": s.cancelled_segments,
            "missing_actuals": s.missing_actuals,
            "no_ride_data": s.no_ride_data,
            "out_of_range": s.out_of_range,
        },
        "written": written.0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    out
}

pub fn validate(cfg: &RunConfig) -> Result<Value, CliError> {
    let range = cfg.date_range()?;
    let (dataset, reports) = load(cfg, range)?;
    check_origins(cfg, &dataset)?;
    let overrides = cfg.overrides()?;
    let mut dwell_profiles = Map::new();
    for station in dataset.stations.iter() {
        let d = dwell::resolve(station, &overrides)
            .map_err(|e| CliError::Ingest(IngestError::Invalid(e.to_string())))?;
        dwell_profiles.insert(
            station.station_id.clone(),
            json!({"t_sec_dep_min": d.departure_s() as f64 / 60.0, "t_arr_min": d.arrival_s() as f64 / 60.0}),
        );
    }
    let daily_rows = dataset
        .rides
        .rows()
        .iter()
        .filter(|r| r.period == DayPeriod::DailyOnly)
        .count();
    let report =
        |r: &d2d_core::ingestion::LoadReport| json!({"loaded": r.loaded, "skipped": r.skipped});
    Ok(json!({
        "command": "validate",
        "dataset_id": cfg.dataset_id,
        "date_range": [range.start().to_string(), range.end().to_string()],
        "rows": {
            "ride_stats": report(&reports.ride_stats),
            "stations": report(&reports.stations),
            "zones": report(&reports.zones),
            "segments": reports.segments.as_ref().map(report),
            "weekly_schedule": reports.weekly_schedule.as_ref().map(report),
        },
        "expanded_segments": reports.expanded_segments,
        "segments_total": dataset.segments.len(),
        "segments_cancelled": dataset.segments.iter().filter(|s| s.cancelled).count(),
        "ride_stats_daily_rows": daily_rows,
        "ride_stats_period_rows": dataset.rides.len() - daily_rows,
        "daily_fallback_slots": dataset.rides.daily_fallback_slots(),
        "zones_without_internal_point": dataset.zones.without_internal_point().map(|z| z.zone_id.clone()).collect::<Vec<_>>(),
        "zones_without_density": dataset.zones.iter().filter(|z| z.population_density.is_none()).count(),
        "dwell_min": dwell_profiles,
    }))
}

fn write_fastest(
    dir: &Path,
    cfg: &RunConfig,
    dataset: &Dataset,
    a: &Analysis,
    written: &mut Written,
) -> Result<(), CliError> {
    let modes = modes_of(&a.summaries);
    let idx = index(&a.summaries);
    if cfg.format.geojson() {
        for period in DayPeriod::CLASSIFIED {
            let path = dir.join(format!("fastest_{}.geojson", period.slug()));
            write_zone_layer(
                &path,
                &dataset.zones,
                |z| {
                    let s = idx.get(&(z.zone_id.as_str(), period));
                    let mut p = Map::new();
                    p.insert("period".into(), json!(period.slug()));
                    p.insert("reached".into(), json!(s.is_some()));
                    p.insert(
                        "fastest_mode".into(),
                        json!(s.and_then(|s| s.fastest_mode.clone())),
                    );
                    p.insert(
                        "N_per_mode".into(),
                        counts_json(s.map(|s| &s.fastest_counts), &modes),
                    );
                    p.insert(
                        "days_with_records".into(),
                        json!(s.map_or(0, |s| s.days_used)),
                    );
                    p
                },
                written,
            )?;
        }
    }
    if cfg.format.csv() {
        let mut header: Vec<String> = ["zone_id", "period", "fastest_mode", "days_with_records"]
            .map(String::from)
            .to_vec();
        header.extend(modes.iter().map(|m| format!("N_{m}")));
        let rows: Vec<Vec<String>> = a
            .summaries
            .iter()
            .map(|s| {
                let mut r = vec![
                    s.zone_id.clone(),
                    s.period.slug().into(),
                    opt_str(s.fastest_mode.as_deref()),
                    s.days_used.to_string(),
                ];
                r.extend(
                    modes
                        .iter()
                        .map(|m| s.fastest_counts.get(m).copied().unwrap_or(0).to_string()),
                );
                r
            })
            .collect();
        write_csv(&dir.join("fastest.csv"), &header, &rows, written)?;
    }
    Ok(())
}

fn write_fastest_time(
    dir: &Path,
    cfg: &RunConfig,
    dataset: &Dataset,
    a: &Analysis,
    written: &mut Written,
) -> Result<(), CliError> {
    let modes = modes_of(&a.summaries);
    let idx = index(&a.summaries);
    if cfg.format.geojson() {
        for period in DayPeriod::CLASSIFIED {
            let path = dir.join(format!("fastest_time_{}.geojson", period.slug()));
            write_zone_layer(
                &path,
                &dataset.zones,
                |z| {
                    let s = idx.get(&(z.zone_id.as_str(), period));
                    let mut p = Map::new();
                    p.insert("period".into(), json!(period.slug()));
                    p.insert("reached".into(), json!(s.is_some()));
                    p.insert(
                        "fastest_mode".into(),
                        json!(s.and_then(|s| s.fastest_mode.clone())),
                    );
                    p.insert(
                        "N_per_mode".into(),
                        counts_json(s.map(|s| &s.fastest_counts), &modes),
                    );
                    p.insert(
                        "E_bar_min".into(),
                        s.map_or(Value::Null, |s| rounded(s.e_bar_minutes(), 4)),
                    );
                    p.insert(
                        "interval_bin".into(),
                        json!(s.map(|s| s.interval_bin.label())),
                    );
                    p.insert("days_used".into(), json!(s.map_or(0, |s| s.days_used)));
                    p.insert(
                        "days_total".into(),
                        json!(a.summaries.first().map_or(0, |s| s.days_total)),
                    );
                    p
                },
                written,
            )?;
        }
    }
    if cfg.format.csv() {
        let header = [
            "zone_id",
            "period",
            "fastest_mode",
            "e_bar_min",
            "interval_bin",
            "days_used",
            "days_total",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = a
            .summaries
            .iter()
            .map(|s| {
                vec![
                    s.zone_id.clone(),
                    s.period.slug().into(),
                    opt_str(s.fastest_mode.as_deref()),
                    fixed(minutes(&s.e_bar_s), 4),
                    s.interval_bin.label().into(),
                    s.days_used.to_string(),
                    s.days_total.to_string(),
                ]
            })
            .collect();
        write_csv(&dir.join("fastest_time.csv"), &header, &rows, written)?;

        let table = bin_zone_counts(&a.summaries);
        let mut rows = Vec::new();
        for mode in &modes {
            for period in DayPeriod::CLASSIFIED {
                for bin in IntervalBin::ALL {
                    let n = table
                        .get(&(mode.clone(), period, bin))
                        .copied()
                        .unwrap_or(0);
                    rows.push(vec![
                        mode.clone(),
                        period.slug().into(),
                        bin.label().into(),
                        n.to_string(),
                    ]);
                }
            }
        }
        let header = ["mode", "period", "interval", "zones"].map(String::from);
        write_csv(&dir.join("interval_table.csv"), &header, &rows, written)?;
    }
    Ok(())
}

fn write_reliability(
    dir: &Path,
    cfg: &RunConfig,
    dataset: &Dataset,
    a: &Analysis,
    written: &mut Written,
) -> Result<(), CliError> {
    let modes = modes_of(&a.summaries);
    let idx = index(&a.summaries);
    if cfg.format.geojson() {
        for period in DayPeriod::CLASSIFIED {
            let path = dir.join(format!("reliability_{}.geojson", period.slug()));
            write_zone_layer(
                &path,
                &dataset.zones,
                |z| {
                    let s = idx.get(&(z.zone_id.as_str(), period));
                    let mut p = Map::new();
                    p.insert("period".into(), json!(period.slug()));
                    p.insert("reached".into(), json!(s.is_some()));
                    p.insert(
                        "most_reliable_mode".into(),
                        json!(s.and_then(|s| s.most_reliable_mode.clone())),
                    );
                    p.insert(
                        "fastest_mode".into(),
                        json!(s.and_then(|s| s.fastest_mode.clone())),
                    );
                    p.insert(
                        "R_per_mode".into(),
                        counts_json(s.map(|s| &s.reliability_counts), &modes),
                    );
                    p
                },
                written,
            )?;
        }
    }
    if cfg.format.csv() {
        let mut header: Vec<String> = [
            "zone_id",
            "period",
            "most_reliable_mode",
            "fastest_mode",
            "days_with_records",
        ]
        .map(String::from)
        .to_vec();
        header.extend(modes.iter().map(|m| format!("R_{m}")));
        let rows: Vec<Vec<String>> = a
            .summaries
            .iter()
            .map(|s| {
                let mut r = vec![
                    s.zone_id.clone(),
                    s.period.slug().into(),
                    opt_str(s.most_reliable_mode.as_deref()),
                    opt_str(s.fastest_mode.as_deref()),
                    s.days_used.to_string(),
                ];
                r.extend(modes.iter().map(|m| {
                    s.reliability_counts
                        .get(m)
                        .copied()
                        .unwrap_or(0)
                        .to_string()
                }));
                r
            })
            .collect();
        write_csv(&dir.join("reliability.csv"), &header, &rows, written)?;
    }
    Ok(())
}

pub fn fastest(cfg: &RunConfig) -> Result<Value, CliError> {
    let (dataset, a) = run_analysis(cfg)?;
    let mut written = Written::default();
    write_fastest(&cfg.out_dir, cfg, &dataset, &a, &mut written)?;
    Ok(run_summary("fastest", &a, &written, json!({})))
}

pub fn fastest_time(cfg: &RunConfig) -> Result<Value, CliError> {
    let (dataset, a) = run_analysis(cfg)?;
    let mut written = Written::default();
    write_fastest_time(&cfg.out_dir, cfg, &dataset, &a, &mut written)?;
    Ok(run_summary("fastest-time", &a, &written, json!({})))
}

pub fn reliability(cfg: &RunConfig) -> Result<Value, CliError> {
    let (dataset, a) = run_analysis(cfg)?;
    let mut written = Written::default();
    write_reliability(&cfg.out_dir, cfg, &dataset, &a, &mut written)?;
    Ok(run_summary("reliability", &a, &written, json!({})))
}

fn delta_rows(deltas: &[WeatherDelta]) -> Vec<Vec<String>> {
    let min = |s: &Option<d2d_core::aggregation::Seconds>| {
        s.as_ref().map(|s| fixed(minutes(s), 4)).unwrap_or_default()
    };
    deltas
        .iter()
        .map(|d| {
            vec![
                d.zone_id.clone(),
                d.period.slug().into(),
                min(&d.e_bar_a_s),
                min(&d.e_bar_b_s),
                min(&d.delta_s),
                d.presence.as_str().into(),
            ]
        })
        .collect()
}

/// Baseline and override result trees plus a per-zone comparison.
pub fn whatif(cfg: &RunConfig) -> Result<Value, CliError> {
    let range = cfg.date_range()?;
    let (dataset, _) = load(cfg, range)?;
    check_origins(cfg, &dataset)?;
    let overrides = cfg.overrides()?;
    if overrides.air.is_none() {
        warn!("no --dep-proc-min/--arr-proc-min given, the override run repeats the baseline");
    }
    let base_cfg = eval_config(cfg, range, DwellOverrides::default());
    let w = what_if_processing(&dataset, &base_cfg, overrides)?;
    let mut written = Written::default();
    for (name, a) in [("baseline", &w.baseline), ("override", &w.scenario)] {
        let dir = cfg.out_dir.join(name);
        write_fastest(&dir, cfg, &dataset, a, &mut written)?;
        write_fastest_time(&dir, cfg, &dataset, a, &mut written)?;
        write_reliability(&dir, cfg, &dataset, a, &mut written)?;
    }
    let deltas = weather_diff(&w.baseline.summaries, &w.scenario.summaries);
    let header = [
        "zone_id",
        "period",
        "baseline_e_bar_min",
        "override_e_bar_min",
        "delta_min",
        "presence",
    ]
    .map(String::from);
    write_csv(
        &cfg.out_dir.join("whatif_diff.csv"),
        &header,
        &delta_rows(&deltas),
        &mut written,
    )?;
    let lost = deltas
        .iter()
        .filter(|d| d.presence == Presence::Disappeared)
        .count();
    Ok(run_summary(
        "whatif",
        &w.scenario,
        &written,
        json!({"baseline_trips": w.baseline.evaluation.trips.len(), "zone_periods_lost": lost}),
    ))
}

pub fn legs(cfg: &RunConfig) -> Result<Value, CliError> {
    let (_, a) = run_analysis(cfg)?;
    let (shares, excluded) = leg_shares(&a.evaluation.trips);
    let header = [
        "pair_id", "n_trips", "to_pct", "dep_pct", "in_pct", "arr_pct", "from_pct",
    ]
    .map(String::from);
    let rows: Vec<Vec<String>> = shares
        .iter()
        .map(|s| {
            let mut r = vec![s.pair_id.clone(), s.n_trips.to_string()];
            r.extend(s.shares.iter().map(|p| fixed(*p, 4)));
            r
        })
        .collect();
    let mut written = Written::default();
    // leg shares are keyed by city pair, not zone, so they are always CSV
    write_csv(&cfg.out_dir.join("legs.csv"), &header, &rows, &mut written)?;
    Ok(run_summary(
        "legs",
        &a,
        &written,
        json!({"excluded_zero_total": excluded}),
    ))
}

pub fn integration(cfg: &RunConfig) -> Result<Value, CliError> {
    let range = cfg.date_range()?;
    let (dataset, _) = load(cfg, range)?;
    let (fits, failed) = integration_fits(&dataset, range);
    if fits.is_empty() {
        let reasons: Vec<String> = failed.values().cloned().collect();
        return Err(AnalysisError::FitUndefined(format!(
            "no airport could be fitted: {}",
            reasons.join("; ")
        ))
        .into());
    }
    let ranked = rank_by_slope(&fits);
    let mut written = Written::default();
    if cfg.format.csv() {
        let header = [
            "rank",
            "station_id",
            "slope_min_per_km",
            "intercept_min",
            "max_range_km",
            "n_samples",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = ranked
            .iter()
            .enumerate()
            .map(|(i, f)| {
                vec![
                    (i + 1).to_string(),
                    f.station_id.clone(),
                    fixed(f.slope, 6),
                    fixed(f.intercept, 6),
                    fixed(f.max_range_km, 4),
                    f.samples.len().to_string(),
                ]
            })
            .collect();
        write_csv(
            &cfg.out_dir.join("integration.csv"),
            &header,
            &rows,
            &mut written,
        )?;
        let header = [
            "station_id",
            "zone_id",
            "distance_km",
            "mean_daily_ride_min",
            "days",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = fits
            .iter()
            .flat_map(|f| {
                f.samples.iter().map(move |s| {
                    vec![
                        f.station_id.clone(),
                        s.zone_id.clone(),
                        fixed(s.distance_km, 4),
                        fixed(s.mean_daily_ride_min, 4),
                        s.days.to_string(),
                    ]
                })
            })
            .collect();
        write_csv(
            &cfg.out_dir.join("integration_samples.csv"),
            &header,
            &rows,
            &mut written,
        )?;
    }
    if cfg.format.geojson() {
        let path = cfg.out_dir.join("integration.geojson");
        write_zone_layer(
            &path,
            &dataset.zones,
            |z| {
                let samples: Map<String, Value> = fits
                .iter()
                .filter_map(|f| {
                    f.samples.iter().find(|s| s.zone_id == z.zone_id).map(|s| {
                        (
                            f.station_id.clone(),
                            json!({"distance_km": rounded(s.distance_km, 4), "mean_daily_ride_min": rounded(s.mean_daily_ride_min, 4)}),
                        )
                    })
                })
                .collect();
                let mut p = Map::new();
                p.insert("samples".into(), Value::Object(samples));
                p
            },
            &mut written,
        )?;
    }
    Ok(json!({
        "command": "integration",
        "ranking": ranked.iter().map(|f| f.station_id.clone()).collect::<Vec<_>>(),
        "failed": failed,
        "written": written.0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}

pub fn weather(
    cfg: &RunConfig,
    date_a: NaiveDate,
    date_b: NaiveDate,
    whole_day: bool,
) -> Result<Value, CliError> {
    let (lo, hi) = (date_a.min(date_b), date_a.max(date_b));
    // the day before covers late departures arriving after midnight
    let load_range = DateRange::new(lo - Duration::days(1), hi)?;
    let (dataset, _) = load(cfg, load_range)?;
    check_origins(cfg, &dataset)?;
    let overrides = cfg.overrides()?;
    let grouping = GroupingOptions {
        whole_day,
        ..cfg.grouping_options()
    };
    let run = |date| -> Result<Analysis, CliError> {
        let mut ec = eval_config(cfg, DateRange::single(date), overrides);
        ec.grouping = grouping;
        Ok(analyze(&dataset, &ec)?)
    };
    let a = run(date_a)?;
    let b = run(date_b)?;
    let deltas = weather_diff(&a.summaries, &b.summaries);
    let mut written = Written::default();
    if cfg.format.csv() {
        let header = [
            "zone_id",
            "period",
            "e_bar_a_min",
            "e_bar_b_min",
            "delta_min",
            "presence",
        ]
        .map(String::from);
        write_csv(
            &cfg.out_dir.join("weather_diff.csv"),
            &header,
            &delta_rows(&deltas),
            &mut written,
        )?;
    }
    if cfg.format.geojson() {
        let periods: Vec<DayPeriod> = if whole_day {
            vec![DayPeriod::DailyOnly]
        } else {
            DayPeriod::CLASSIFIED.to_vec()
        };
        let by_key: BTreeMap<(&str, DayPeriod), &WeatherDelta> = deltas
            .iter()
            .map(|d| ((d.zone_id.as_str(), d.period), d))
            .collect();
        for period in periods {
            let path = cfg
                .out_dir
                .join(format!("weather_diff_{}.geojson", period.slug()));
            write_zone_layer(
                &path,
                &dataset.zones,
                |z| {
                    let d = by_key.get(&(z.zone_id.as_str(), period));
                    let min = |s: Option<&d2d_core::aggregation::Seconds>| {
                        s.map_or(Value::Null, |s| rounded(minutes(s), 4))
                    };
                    let mut p = Map::new();
                    p.insert("period".into(), json!(period.slug()));
                    p.insert(
                        "presence".into(),
                        json!(d.map_or("absent", |d| d.presence.as_str())),
                    );
                    p.insert(
                        "E_bar_a_min".into(),
                        min(d.and_then(|d| d.e_bar_a_s.as_ref())),
                    );
                    p.insert(
                        "E_bar_b_min".into(),
                        min(d.and_then(|d| d.e_bar_b_s.as_ref())),
                    );
                    p.insert("delta_min".into(), min(d.and_then(|d| d.delta_s.as_ref())));
                    p
                },
                &mut written,
            )?;
        }
    }
    let count = |p: Presence| deltas.iter().filter(|d| d.presence == p).count();
    Ok(json!({
        "command": "weather-diff",
        "date_a": date_a.to_string(),
        "date_b": date_b.to_string(),
        "trips_a": a.evaluation.trips.len(),
        "trips_b": b.evaluation.trips.len(),
        "disappeared": count(Presence::Disappeared),
        "appeared": count(Presence::Appeared),
        "written": written.0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}

pub fn delay(cfg: &RunConfig, segment_id: &str) -> Result<Value, CliError> {
    let range = match cfg.date_range() {
        Ok(r) => r,
        // the range only matters for expanding a weekly schedule
        Err(_) if cfg.weekly_schedule.is_none() => DateRange::single(NaiveDate::MIN),
        Err(e) => return Err(e),
    };
    let (dataset, _) = load(cfg, range)?;
    let d = segment_delay(&dataset, segment_id, &cfg.overrides()?)?;
    let mut written = Written::default();
    if cfg.format.csv() {
        let header = [
            "segment_id",
            "scheduled_egress_period",
            "scheduled_egress_date",
            "actual_egress_period",
            "actual_egress_date",
            "weighted_mean_delta_s",
            "max_of_max_delta_s",
            "zones_used",
            "zones_excluded",
            "uniform_weights",
        ]
        .map(String::from);
        let row = vec![
            d.segment_id.clone(),
            d.scheduled_egress_period.slug().into(),
            d.scheduled_egress_date.to_string(),
            d.actual_egress_period.slug().into(),
            d.actual_egress_date.to_string(),
            fixed(d.weighted_mean_delta_s, 3),
            d.max_of_max_delta_s.to_string(),
            d.zones_used.len().to_string(),
            d.zones_excluded.len().to_string(),
            d.uniform_weights.to_string(),
        ];
        write_csv(
            &cfg.out_dir.join("delay.csv"),
            &header,
            &[row],
            &mut written,
        )?;
        let header = ["zone_id", "mean_delta_s", "max_delta_s", "weight"].map(String::from);
        let rows: Vec<Vec<String>> = d
            .zone_deltas
            .iter()
            .map(|z| {
                vec![
                    z.zone_id.clone(),
                    z.mean_delta_s.to_string(),
                    z.max_delta_s.to_string(),
                    fixed(z.weight, 6),
                ]
            })
            .collect();
        write_csv(
            &cfg.out_dir.join("delay_zones.csv"),
            &header,
            &rows,
            &mut written,
        )?;
    }
    if cfg.format.geojson() {
        let path = cfg.out_dir.join("delay.geojson");
        write_zone_layer(
            &path,
            &dataset.zones,
            |z| {
                let zd = d.zone_deltas.iter().find(|x| x.zone_id == z.zone_id);
                let mut p = Map::new();
                p.insert("segment_id".into(), json!(d.segment_id));
                p.insert("used".into(), json!(zd.is_some()));
                p.insert("mean_delta_s".into(), json!(zd.map(|x| x.mean_delta_s)));
                p.insert("max_delta_s".into(), json!(zd.map(|x| x.max_delta_s)));
                p.insert(
                    "weight".into(),
                    zd.map_or(Value::Null, |x| rounded(x.weight, 6)),
                );
                p
            },
            &mut written,
        )?;
    }
    Ok(json!({
        "command": "delay",
        "segment_id": d.segment_id,
        "scheduled_egress_period": d.scheduled_egress_period.slug(),
        "actual_egress_period": d.actual_egress_period.slug(),
        "weighted_mean_delta_s": rounded(d.weighted_mean_delta_s, 3),
        "max_of_max_delta_s": d.max_of_max_delta_s,
        "written": written.0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}
