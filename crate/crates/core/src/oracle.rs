//! Brute-force reference implementations used by tests.
//!
//! The reference computation shares no code with [`crate::aggregation`]: values are plain
//! reduced fractions, every (zone, period, date, mode) cell is recomputed by
//! scanning the whole trip list, and comparisons use cross multiplication.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregation::{bin_zone_counts, daily_zone_means, summarize, IntervalBin};
use crate::model::{RideVariant, TripPhaseTimes, TripRecord};
use crate::period::DayPeriod;

/// Reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Frac {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    fn lt(self, other: Frac) -> bool {
        self.num * other.den < other.num * self.den
    }

    fn add(self, other: Frac) -> Frac {
        Frac::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }
}

/// Brute-force results for one (zone, period).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCell {
    pub fastest_counts: BTreeMap<String, u32>,
    pub reliability_counts: BTreeMap<String, u32>,
    pub fastest_mode: Option<String>,
    pub most_reliable_mode: Option<String>,
    pub e_bar: Frac,
    pub days_used: u32,
    /// Index into [0,240), [240,270), [270,300), [300,inf) minutes.
    pub bin: usize,
}

/// E and V for one (zone, period, date, mode), or `None` without trips.
pub fn cell_means(
    trips: &[TripRecord],
    zone: &str,
    period: DayPeriod,
    date: NaiveDate,
    mode: &str,
) -> Option<(Frac, Frac, u32)> {
    let (mut total, mut spread, mut n) = (0i128, 0i128, 0i128);
    for t in trips {
        if t.dest_zone == zone
            && t.arrival_period == period
            && t.arrival_date == date
            && t.mode_id == mode
        {
            let p = &t.phases;
            total += (p.to_s + p.dep_s + p.in_s + p.arr_s + p.from_s) as i128;
            let hi = t.ride_to.max_s + t.ride_from.max_s;
            let lo = t.ride_to.min_s + t.ride_from.min_s;
            spread += (hi - lo) as i128;
            n += 1;
        }
    }
    (n > 0).then(|| (Frac::new(total, n), Frac::new(spread, n), n as u32))
}

fn winner(counts: &BTreeMap<String, u32>) -> Option<String> {
    let best = *counts.values().max()?;
    if best == 0 {
        return None;
    }
    counts
        .iter()
        .find(|(_, n)| **n == best)
        .map(|(m, _)| m.clone())
}

fn bin_of(e: Frac) -> usize {
    [240i128, 270, 300]
        .iter()
        .filter(|m| !e.lt(Frac::new(**m * 60, 1)))
        .count()
}

/// Exhaustive recomputation over every zone, period, date and mode present
/// in `trips`.
pub fn brute_force(trips: &[TripRecord]) -> BTreeMap<(String, DayPeriod), OracleCell> {
    let zones: BTreeSet<&str> = trips.iter().map(|t| t.dest_zone.as_str()).collect();
    let modes: BTreeSet<&str> = trips.iter().map(|t| t.mode_id.as_str()).collect();
    let dates: BTreeSet<NaiveDate> = trips.iter().map(|t| t.arrival_date).collect();
    let mut out = BTreeMap::new();
    for zone in &zones {
        for period in DayPeriod::CLASSIFIED {
            let mut fastest: BTreeMap<String, u32> =
                modes.iter().map(|m| (m.to_string(), 0)).collect();
            let mut reliable = fastest.clone();
            let mut minima_sum = Frac::new(0, 1);
            let mut days_used = 0u32;
            for date in &dates {
                let cells: Vec<(&str, Frac, Frac)> = modes
                    .iter()
                    .filter_map(|m| {
                        cell_means(trips, zone, period, *date, m).map(|(e, v, _)| (*m, e, v))
                    })
                    .collect();
                if cells.is_empty() {
                    continue;
                }
                days_used += 1;
                let min_e = cells
                    .iter()
                    .map(|c| c.1)
                    .reduce(|a, b| if b.lt(a) { b } else { a })
                    .unwrap();
                let min_v = cells
                    .iter()
                    .map(|c| c.2)
                    .reduce(|a, b| if b.lt(a) { b } else { a })
                    .unwrap();
                for (m, e, v) in &cells {
                    if *e == min_e {
                        *fastest.get_mut(*m).unwrap() += 1;
                    }
                    if *v == min_v {
                        *reliable.get_mut(*m).unwrap() += 1;
                    }
                }
                minima_sum = minima_sum.add(min_e);
            }
            if days_used == 0 {
                continue;
            }
            let e_bar = Frac::new(minima_sum.num, minima_sum.den * days_used as i128);
            out.insert(
                (zone.to_string(), period),
                OracleCell {
                    fastest_mode: winner(&fastest),
                    most_reliable_mode: winner(&reliable),
                    fastest_counts: fastest,
                    reliability_counts: reliable,
                    e_bar,
                    days_used,
                    bin: bin_of(e_bar),
                },
            );
        }
    }
    out
}

/// Random trip set with at most 5 zones, 3 modes and 14 days.
///
/// Durations are drawn from a coarse grid so that exact ties between modes
/// are frequent.
pub fn random_trips(seed: u64) -> Vec<TripRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_zones = rng.gen_range(1..=5);
    let n_modes = rng.gen_range(1..=3);
    let n_days = rng.gen_range(1..=14);
    let start = NaiveDate::from_ymd_opt(2018, 1, 1).unwrap();
    let mut trips = Vec::new();
    for z in 0..n_zones {
        for m in 0..n_modes {
            for d in 0..n_days {
                for period in DayPeriod::CLASSIFIED {
                    if rng.gen_bool(0.4) {
                        continue;
                    }
                    for k in 0..rng.gen_range(1..=3) {
                        let date = start + Duration::days(d);
                        trips.push(random_trip(
                            &mut rng,
                            &format!("Z{z}"),
                            &format!("M{m}"),
                            date,
                            period,
                            k,
                        ));
                    }
                }
            }
        }
    }
    trips
}

fn random_trip(
    rng: &mut ChaCha8Rng,
    zone: &str,
    mode: &str,
    date: NaiveDate,
    period: DayPeriod,
    k: u32,
) -> TripRecord {
    let step = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rng.gen_range(lo..=hi) * 300;
    let ride = |rng: &mut ChaCha8Rng, mean: i64| {
        let down = rng.gen_range(0..=2) * 300;
        let up = rng.gen_range(0..=4) * 300;
        RideVariant {
            mean_s: mean,
            min_s: (mean - down).max(60),
            max_s: mean + up,
        }
    };
    let to = step(rng, 2, 12);
    let from = step(rng, 2, 12);
    let wait = rng.gen_range(0..=2) * 600;
    let dep = 5400 + wait;
    TripRecord {
        segment_id: format!("{mode}-{date}-{}-{k}", period.code()),
        mode_id: mode.to_string(),
        dep_station: "ORIG".into(),
        arr_station: mode.to_string(),
        origin_zone: "O".into(),
        dest_zone: zone.to_string(),
        phases: TripPhaseTimes {
            to_s: to,
            dep_s: dep,
            in_s: step(rng, 12, 30),
            arr_s: 2700,
            from_s: from,
            wait_s: wait,
        },
        ride_to: ride(rng, to),
        ride_from: ride(rng, from),
        arrival_period: period,
        arrival_date: date,
        departure_period: period,
        departure_date: date,
        used_daily_fallback_to: false,
        used_daily_fallback_from: false,
    }
}

/// Compare the aggregation engine with [`brute_force`] on `random_trips(seed)`.
///
/// Returns the number of (zone, period) cells checked.
pub fn check_seed(seed: u64) -> Result<usize, String> {
    let trips = random_trips(seed);
    let expected = brute_force(&trips);
    let summaries = summarize(&daily_zone_means(&trips), 14);
    if summaries.len() != expected.len() {
        return Err(format!(
            "seed {seed}: {} cells, oracle has {}",
            summaries.len(),
            expected.len()
        ));
    }
    for s in &summaries {
        let o = expected
            .get(&(s.zone_id.clone(), s.period))
            .ok_or_else(|| format!("seed {seed}: unexpected cell {} {}", s.zone_id, s.period))?;
        let same = s.fastest_counts == o.fastest_counts
            && s.reliability_counts == o.reliability_counts
            && s.fastest_mode == o.fastest_mode
            && s.most_reliable_mode == o.most_reliable_mode
            && (*s.e_bar_s.numer(), *s.e_bar_s.denom()) == (o.e_bar.num, o.e_bar.den)
            && s.days_used == o.days_used
            && s.interval_bin == IntervalBin::ALL[o.bin];
        if !same {
            return Err(format!(
                "seed {seed}: {} {} differs: {s:?} vs {o:?}",
                s.zone_id, s.period
            ));
        }
    }
    let table = bin_zone_counts(&summaries);
    if table.values().sum::<u32>() as usize
        != expected
            .values()
            .filter(|o| o.fastest_mode.is_some())
            .count()
    {
        return Err(format!(
            "seed {seed}: interval table does not count every zone once"
        ));
    }
    Ok(summaries.len())
}
