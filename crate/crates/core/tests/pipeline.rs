//! End-to-end runs of the library on a small New York to Boston dataset
//! written to a temp dir.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use d2d_core::aggregation::{seconds_to_minutes, Seconds};
use d2d_core::dwell::DwellOverrides;
use d2d_core::ingestion::ride_stats::{parse_ride_stats, write_ride_stats};
use d2d_core::ingestion::schedule::{parse_weekly_schedule, write_weekly_schedule};
use d2d_core::ingestion::segments::{parse_segments, write_segments};
use d2d_core::ingestion::stations::{parse_stations, write_stations};
use d2d_core::ingestion::zones::{parse_zones, write_zones};
use d2d_core::pipeline::{
    analyze, evaluate_trips, segment_delay, what_if_processing, Dataset, DatasetPaths, EvalConfig,
};
use d2d_core::{DateRange, DayPeriod, DwellProfile};

const STATIONS: &str = "station_id,kind,zone_id,lat,lon,tz,t_sec_dep_min,t_arr_min
LGA,air,Z_LGA,40.7769,-73.8740,America/New_York,105,40
BOS,air,Z_BOS,42.3656,-71.0096,America/New_York,,
NYP,rail,Z_NYP,40.7506,-73.9935,America/New_York,,
BBY,rail,Z_BBY,42.3473,-71.0752,America/New_York,,
";

const SCHEDULE: &str = "mode_id,dep_station,arr_station,days,dep_time,arr_time
BOS,LGA,BOS,1111100,08:00,09:15
BOS,LGA,BOS,1111111,22:00,23:15
BBY,NYP,BBY,1111111,07:00,10:40
";

const SEGMENTS: &str =
    "segment_id,mode_id,dep_station,arr_station,sched_dep,actual_dep,sched_arr,actual_arr,cancelled
DL2100,BOS,LGA,BOS,2018-03-06T14:00:00,2018-03-06T14:20:00,2018-03-06T15:10:00,2018-03-06T15:30:00,0
DL2101,BOS,LGA,BOS,2018-03-07T14:00:00,,2018-03-07T15:10:00,,1
";

fn zones() -> String {
    let feature = |id: &str, lat: f64, lon: f64, density: Option<f64>| {
        let mut props = serde_json::json!({"zone_id": id, "internal_point": [lon, lat]});
        if let Some(d) = density {
            props["population_density"] = d.into();
        }
        serde_json::json!({"type": "Feature", "properties": props, "geometry": null})
    };
    let doc = serde_json::json!({"type": "FeatureCollection", "features": [
        feature("O1", 40.75, -73.98, Some(30000.0)),
        feature("Z_LGA", 40.7769, -73.8740, None),
        feature("Z_BOS", 42.3656, -71.0096, None),
        feature("Z_NYP", 40.7506, -73.9935, None),
        feature("Z_BBY", 42.3473, -71.0752, None),
        feature("D1", 42.36, -71.06, Some(12000.0)),
        feature("D2", 42.33, -71.10, Some(4000.0)),
    ]});
    serde_json::to_string_pretty(&doc).unwrap()
}

/// Ride means in minutes per period: access rides and two egress rides
/// from each Boston station.
fn ride_stats() -> String {
    let mut out = String::from("origin_zone,dest_zone,date,period,mean_s,min_s,max_s\n");
    let factor = [0.8, 1.3, 1.0, 1.4, 0.9];
    for day in 5..=11 {
        let date = format!("2018-03-{day:02}");
        for (o, d, base) in [
            ("O1", "Z_LGA", 30.0),
            ("O1", "Z_NYP", 12.0),
            ("Z_BOS", "D1", 20.0),
            ("Z_BOS", "D2", 28.0),
            ("Z_BBY", "D1", 12.0),
            ("Z_BBY", "D2", 9.0),
        ] {
            for (i, f) in factor.iter().enumerate() {
                let mean = (base * f * 60.0_f64).round() as i64;
                out += &format!(
                    "{o},{d},{date},{},{mean},{},{}\n",
                    i + 1,
                    mean * 4 / 5,
                    mean * 3 / 2
                );
            }
        }
    }
    out
}

fn write_fixture(dir: &Path) -> DatasetPaths {
    let files = [
        ("stations.csv", STATIONS.to_string()),
        ("weekly_schedule.csv", SCHEDULE.to_string()),
        ("segments.csv", SEGMENTS.to_string()),
        ("zones.geojson", zones()),
        ("ride_stats.csv", ride_stats()),
    ];
    for (name, text) in files {
        fs::write(dir.join(name), text).unwrap();
    }
    DatasetPaths {
        ride_stats: dir.join("ride_stats.csv"),
        stations: dir.join("stations.csv"),
        zones: dir.join("zones.geojson"),
        segments: Some(dir.join("segments.csv")),
        weekly_schedule: Some(dir.join("weekly_schedule.csv")),
    }
}

fn week() -> DateRange {
    // Monday to Sunday
    DateRange::new(
        NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(),
        NaiveDate::from_ymd_opt(2018, 3, 11).unwrap(),
    )
    .unwrap()
}

fn load() -> (tempfile::TempDir, Dataset) {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let (dataset, reports) = Dataset::load(&paths, week(), false).unwrap();
    assert_eq!(reports.ride_stats.loaded, 7 * 6 * 5);
    (tmp, dataset)
}

fn config() -> EvalConfig {
    let mut cfg = EvalConfig::new(week());
    cfg.origin_zones = vec!["O1".into()];
    cfg
}

#[test]
fn weekly_schedule_expands_per_day_mask() {
    let (_tmp, dataset) = load();
    // 5 weekday flights, 7 late flights, 7 trains, plus 2 listed segments
    assert_eq!(dataset.segments.len(), 5 + 7 + 7 + 2);
    let late: Vec<_> = dataset
        .segments
        .iter()
        .filter(|s| s.segment_id.ends_with("T22:00"))
        .collect();
    assert_eq!(late.len(), 7);
}

#[test]
fn trips_and_summaries() {
    let (_tmp, dataset) = load();
    let eval = evaluate_trips(&dataset, &config()).unwrap();
    assert_eq!(eval.skipped.cancelled_segments, 1);
    // LGA dwell comes from the stations file: 105 min, BOS arrival 40 min
    let trip = eval
        .trips
        .iter()
        .find(|t| t.segment_id == "DL2100" && t.dest_zone == "D1")
        .unwrap();
    assert_eq!(trip.phases.dep_s, (105 + 20) * 60);
    assert_eq!(trip.phases.wait_s, 20 * 60);
    assert_eq!(trip.phases.arr_s, 40 * 60);
    assert_eq!(trip.phases.in_s, 70 * 60);
    // deadline 12:15 (midday), egress from 16:10 (PM)
    assert_eq!(trip.phases.to_s, 30 * 60);
    assert_eq!(trip.phases.from_s, 28 * 60);
    assert_eq!(trip.arrival_period, DayPeriod::Pm);

    let a = analyze(&dataset, &config()).unwrap();
    assert!(!a.summaries.is_empty());
    for s in &a.summaries {
        assert_eq!(s.days_total, 7);
        assert!(s.days_used >= 1 && s.days_used <= 7);
        assert!(s.fastest_mode.is_some());
    }
    // the 07:00 train beats the 08:00 flight to D1: 15 + 220 + 10 + 9.6 + 12 min
    // against 105 + 75 + 40 + 24 + 26 min
    let midday = a
        .summaries
        .iter()
        .find(|s| s.zone_id == "D1" && s.period == DayPeriod::Midday)
        .unwrap();
    assert_eq!(midday.fastest_mode.as_deref(), Some("BBY"));
    assert_eq!(midday.fastest_counts["BBY"], 7);
    assert_eq!(midday.fastest_counts["BOS"], 0);
    assert_eq!(midday.e_bar_s, Seconds::from_integer(15996));
    assert!((seconds_to_minutes(&midday.e_bar_s) - 266.6).abs() < 1e-9);
}

#[test]
fn what_if_with_current_dwell_is_identity() {
    let (_tmp, dataset) = load();
    let same = DwellOverrides {
        air: Some(DwellProfile::from_minutes(105, 40)),
        rail: None,
    };
    let w = what_if_processing(&dataset, &config(), same).unwrap();
    assert_eq!(w.baseline.summaries, w.scenario.summaries);
    assert_eq!(w.baseline.evaluation.trips, w.scenario.evaluation.trips);

    // a shorter arrival dwell moves the late flight's arrivals back before midnight
    let fast = DwellOverrides {
        air: Some(DwellProfile::from_minutes(60, 5)),
        rail: None,
    };
    let w = what_if_processing(&dataset, &config(), fast).unwrap();
    let early = |a: &d2d_core::pipeline::Analysis| {
        a.evaluation
            .trips
            .iter()
            .filter(|t| t.arrival_period == DayPeriod::EarlyMorning)
            .count()
    };
    assert!(early(&w.baseline) > 0);
    assert_eq!(early(&w.scenario), 0);
}

#[test]
fn delay_of_a_late_flight() {
    let (_tmp, dataset) = load();
    let d = segment_delay(&dataset, "DL2100", &DwellOverrides::default()).unwrap();
    // 15:10 + 40 = 15:50 midday; 15:30 + 40 = 16:10 PM
    assert_eq!(d.scheduled_egress_period, DayPeriod::Midday);
    assert_eq!(d.actual_egress_period, DayPeriod::Pm);
    assert_eq!(d.zones_used, vec!["D1", "D2"]);
    // PM rides are 1.4x the midday ones: +8 min to D1, +11.2 min to D2
    let expected = (12000.0 * 8.0 * 60.0 + 4000.0 * 672.0) / 16000.0;
    assert!(
        (d.weighted_mean_delta_s - expected).abs() < 1e-9,
        "{}",
        d.weighted_mean_delta_s
    );
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (_tmp, dataset) = load();
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| analyze(&dataset, &config()).unwrap())
    };
    let (one, four) = (run(1), run(4));
    assert_eq!(one.evaluation.trips, four.evaluation.trips);
    assert_eq!(one.summaries, four.summaries);
}

#[test]
fn writers_are_canonical() {
    let p = Path::new("x");
    let (stations, _) = parse_stations(STATIONS, p).unwrap();
    let mut a = Vec::new();
    write_stations(&stations, &mut a).unwrap();
    let (again, _) = parse_stations(std::str::from_utf8(&a).unwrap(), p).unwrap();
    let mut b = Vec::new();
    write_stations(&again, &mut b).unwrap();
    assert_eq!(a, b);

    let (rides, _) = parse_ride_stats(&ride_stats(), p).unwrap();
    let mut a = Vec::new();
    write_ride_stats(&rides, &mut a).unwrap();
    let (again, _) = parse_ride_stats(std::str::from_utf8(&a).unwrap(), p).unwrap();
    assert_eq!(rides.rows(), again.rows());

    let (segs, _) = parse_segments(SEGMENTS, p, &stations, false).unwrap();
    let mut a = Vec::new();
    write_segments(&segs, &mut a).unwrap();
    let (again, _) = parse_segments(std::str::from_utf8(&a).unwrap(), p, &stations, false).unwrap();
    assert_eq!(segs, again);

    let (rows, _) = parse_weekly_schedule(SCHEDULE, p).unwrap();
    let mut a = Vec::new();
    write_weekly_schedule(&rows, &mut a).unwrap();
    assert_eq!(
        parse_weekly_schedule(std::str::from_utf8(&a).unwrap(), p)
            .unwrap()
            .0,
        rows
    );

    let (zs, _) = parse_zones(&zones(), p).unwrap();
    let mut a = Vec::new();
    write_zones(&zs, &mut a).unwrap();
    let (again, _) = parse_zones(std::str::from_utf8(&a).unwrap(), p).unwrap();
    let mut b = Vec::new();
    write_zones(&again, &mut b).unwrap();
    assert_eq!(a, b);
}
