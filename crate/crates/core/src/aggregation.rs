//! Per-zone aggregation of evaluated trips.
//!
//! All averages are exact rationals over integer seconds, so comparisons
//! between modes (and therefore tie detection) are exact.
//!
//! * [`daily_zone_means`]: mean door-to-door time `E` and mean variability `V`
//!   per (zone, date, period, mode).
//! * [`fastest_mode_counts`] / [`reliability_counts`]: per (zone, period),
//!   how many days each mode attained the daily minimum of `E` (resp. `V`).
//!   Every tied mode is counted.
//! * [`fastest_time`]: average over days of the daily minimum `E`.
//! * [`bin_zone_counts`]: zone counts per (fastest mode, period, time interval).

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::model::TripRecord;
use crate::period::DayPeriod;

/// Exact duration in seconds.
pub type Seconds = Ratio<i128>;

pub fn seconds_to_f64(s: &Seconds) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

pub fn seconds_to_minutes(s: &Seconds) -> f64 {
    seconds_to_f64(s) / 60.0
}

/// Which instant of a trip decides its day and period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GroupingInstant {
    /// Arrival at the destination door.
    #[default]
    Arrival,
    /// Departure from the origin door.
    Departure,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupingOptions {
    pub instant: GroupingInstant,
    /// Collapse the five periods into a single `DailyOnly` bucket.
    pub whole_day: bool,
}

impl GroupingOptions {
    fn slot(&self, trip: &TripRecord) -> (DayPeriod, NaiveDate) {
        let (period, date) = match self.instant {
            GroupingInstant::Arrival => (trip.arrival_period, trip.arrival_date),
            GroupingInstant::Departure => (trip.departure_period, trip.departure_date),
        };
        if self.whole_day {
            (DayPeriod::DailyOnly, date)
        } else {
            (period, date)
        }
    }

    /// Date a trip is attributed to.
    pub fn date_of(&self, trip: &TripRecord) -> NaiveDate {
        self.slot(trip).1
    }
}

/// Mean door-to-door time of one mode to one zone on one day and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonePeriodDayStat {
    pub zone_id: String,
    pub period: DayPeriod,
    pub date: NaiveDate,
    pub mode_id: String,
    /// `E`: mean of the trips' mean-variant totals.
    pub mean_s: Seconds,
    pub n_trips: u32,
    /// `V`: mean of the trips' (max-variant − min-variant) totals.
    pub variability_s: Seconds,
}

type DayKey<'a> = (&'a str, DayPeriod, NaiveDate, &'a str);

#[derive(Default, Clone, Copy)]
struct DayAcc {
    total: i128,
    spread: i128,
    n: u32,
}

fn merge<'a>(
    mut a: BTreeMap<DayKey<'a>, DayAcc>,
    b: BTreeMap<DayKey<'a>, DayAcc>,
) -> BTreeMap<DayKey<'a>, DayAcc> {
    for (k, v) in b {
        let e = a.entry(k).or_default();
        e.total += v.total;
        e.spread += v.spread;
        e.n += v.n;
    }
    a
}

/// Group trips by arrival zone, arrival date, arrival period and mode.
pub fn daily_zone_means(trips: &[TripRecord]) -> Vec<ZonePeriodDayStat> {
    daily_zone_means_with(trips, GroupingOptions::default())
}

/// Output is sorted by (zone, period, date, mode) whatever the thread count.
pub fn daily_zone_means_with(
    trips: &[TripRecord],
    options: GroupingOptions,
) -> Vec<ZonePeriodDayStat> {
    let groups = trips
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<DayKey<'_>, DayAcc>, t| {
            let (period, date) = options.slot(t);
            let e = acc
                .entry((t.dest_zone.as_str(), period, date, t.mode_id.as_str()))
                .or_default();
            e.total += t.total_s() as i128;
            e.spread += t.variability_s() as i128;
            e.n += 1;
            acc
        })
        .reduce(BTreeMap::new, merge);

    groups
        .into_iter()
        .map(|((zone, period, date, mode), acc)| ZonePeriodDayStat {
            zone_id: zone.to_string(),
            period,
            date,
            mode_id: mode.to_string(),
            mean_s: Ratio::new(acc.total, acc.n as i128),
            n_trips: acc.n,
            variability_s: Ratio::new(acc.spread, acc.n as i128),
        })
        .collect()
}

/// Per (zone, period) number of days each mode attained the daily minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeCounts {
    pub zone_id: String,
    pub period: DayPeriod,
    /// Every mode of the dataset, zero when it never won.
    pub counts: BTreeMap<String, u32>,
    pub days_with_records: u32,
    /// Mode with the highest count; ties go to the smallest mode id.
    pub winner: Option<String>,
}

type ZonePeriod<'a> = (&'a str, DayPeriod);

/// Stats grouped by (zone, period) then by date.
fn by_zone_period(
    day_stats: &[ZonePeriodDayStat],
) -> BTreeMap<ZonePeriod<'_>, BTreeMap<NaiveDate, Vec<&ZonePeriodDayStat>>> {
    let mut groups: BTreeMap<ZonePeriod<'_>, BTreeMap<NaiveDate, Vec<&ZonePeriodDayStat>>> =
        BTreeMap::new();
    for s in day_stats {
        groups
            .entry((s.zone_id.as_str(), s.period))
            .or_default()
            .entry(s.date)
            .or_default()
            .push(s);
    }
    groups
}

fn all_modes(day_stats: &[ZonePeriodDayStat]) -> BTreeMap<String, u32> {
    day_stats.iter().map(|s| (s.mode_id.clone(), 0)).collect()
}

fn argmax(counts: &BTreeMap<String, u32>) -> Option<String> {
    // BTreeMap iterates in mode order, so the first strict maximum wins ties
    let mut best: Option<(&String, u32)> = None;
    for (mode, n) in counts {
        if *n > 0 && best.is_none_or(|(_, b)| *n > b) {
            best = Some((mode, *n));
        }
    }
    best.map(|(m, _)| m.clone())
}

fn count_daily_winners<F>(day_stats: &[ZonePeriodDayStat], metric: F) -> Vec<ModeCounts>
where
    F: Fn(&ZonePeriodDayStat) -> &Seconds,
{
    let modes = all_modes(day_stats);
    by_zone_period(day_stats)
        .into_iter()
        .map(|((zone, period), days)| {
            let mut counts = modes.clone();
            for stats in days.values() {
                let best = stats
                    .iter()
                    .map(|s| metric(s))
                    .min()
                    .expect("non-empty day");
                for s in stats.iter().filter(|s| metric(s) == best) {
                    *counts.get_mut(&s.mode_id).expect("mode registered") += 1;
                }
            }
            let winner = argmax(&counts);
            ModeCounts {
                zone_id: zone.to_string(),
                period,
                counts,
                days_with_records: days.len() as u32,
                winner,
            }
        })
        .collect()
}

/// Number of days each mode had the shortest mean door-to-door time.
pub fn fastest_mode_counts(day_stats: &[ZonePeriodDayStat]) -> Vec<ModeCounts> {
    count_daily_winners(day_stats, |s| &s.mean_s)
}

/// Number of days each mode had the lowest variability.
pub fn reliability_counts(day_stats: &[ZonePeriodDayStat]) -> Vec<ModeCounts> {
    count_daily_winners(day_stats, |s| &s.variability_s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastestTime {
    pub zone_id: String,
    pub period: DayPeriod,
    /// Mean over covered days of the daily minimum mean time.
    pub e_bar_s: Seconds,
    /// Days with at least one mode record.
    pub days_used: u32,
}

/// Average fastest time per (zone, period), over days that have a record.
pub fn fastest_time(day_stats: &[ZonePeriodDayStat]) -> Vec<FastestTime> {
    by_zone_period(day_stats)
        .into_iter()
        .map(|((zone, period), days)| {
            let sum: Seconds = days
                .values()
                .map(|stats| stats.iter().map(|s| s.mean_s).min().expect("non-empty day"))
                .sum();
            FastestTime {
                zone_id: zone.to_string(),
                period,
                e_bar_s: sum / Seconds::from_integer(days.len() as i128),
                days_used: days.len() as u32,
            }
        })
        .collect()
}

/// Door-to-door time intervals: under 4h, 4h to 4h30, 4h30 to 5h, 5h and more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntervalBin {
    Under4h,
    From4hTo4h30,
    From4h30To5h,
    Over5h,
}

impl IntervalBin {
    pub const ALL: [IntervalBin; 4] = [
        IntervalBin::Under4h,
        IntervalBin::From4hTo4h30,
        IntervalBin::From4h30To5h,
        IntervalBin::Over5h,
    ];

    /// Half-open bins on minutes: [0,240), [240,270), [270,300), [300,inf).
    pub fn of(seconds: &Seconds) -> IntervalBin {
        let minute = |m: i128| Seconds::from_integer(m * 60);
        if *seconds < minute(240) {
            IntervalBin::Under4h
        } else if *seconds < minute(270) {
            IntervalBin::From4hTo4h30
        } else if *seconds < minute(300) {
            IntervalBin::From4h30To5h
        } else {
            IntervalBin::Over5h
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IntervalBin::Under4h => "<4h",
            IntervalBin::From4hTo4h30 => "4h-4h30",
            IntervalBin::From4h30To5h => "4h30-5h",
            IntervalBin::Over5h => ">=5h",
        }
    }
}

impl fmt::Display for IntervalBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Everything known about one (zone, period) over the analysed date range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonePeriodSummary {
    pub zone_id: String,
    pub period: DayPeriod,
    pub fastest_counts: BTreeMap<String, u32>,
    pub reliability_counts: BTreeMap<String, u32>,
    pub fastest_mode: Option<String>,
    pub most_reliable_mode: Option<String>,
    pub e_bar_s: Seconds,
    pub days_used: u32,
    pub days_total: u32,
    pub interval_bin: IntervalBin,
}

impl ZonePeriodSummary {
    pub fn e_bar_minutes(&self) -> f64 {
        seconds_to_minutes(&self.e_bar_s)
    }

    /// Fraction of the date range covered by at least one trip.
    pub fn coverage(&self) -> f64 {
        if self.days_total == 0 {
            0.0
        } else {
            self.days_used as f64 / self.days_total as f64
        }
    }
}

/// Combine fastest counts, reliability counts, fastest time and its bin.
pub fn summarize(day_stats: &[ZonePeriodDayStat], days_total: usize) -> Vec<ZonePeriodSummary> {
    let fastest = fastest_mode_counts(day_stats);
    let reliable = reliability_counts(day_stats);
    let times = fastest_time(day_stats);
    fastest
        .into_iter()
        .zip(reliable)
        .zip(times)
        .map(|((f, r), t)| {
            debug_assert!(f.zone_id == r.zone_id && f.zone_id == t.zone_id);
            debug_assert!(f.period == r.period && f.period == t.period);
            ZonePeriodSummary {
                interval_bin: IntervalBin::of(&t.e_bar_s),
                zone_id: f.zone_id,
                period: f.period,
                fastest_counts: f.counts,
                reliability_counts: r.counts,
                fastest_mode: f.winner,
                most_reliable_mode: r.winner,
                e_bar_s: t.e_bar_s,
                days_used: t.days_used,
                days_total: days_total as u32,
            }
        })
        .collect()
}

/// Zone counts keyed by (fastest mode, period, interval).
pub type IntervalTable = BTreeMap<(String, DayPeriod, IntervalBin), u32>;

pub fn bin_zone_counts(summaries: &[ZonePeriodSummary]) -> IntervalTable {
    let mut table = IntervalTable::new();
    for s in summaries {
        if let Some(mode) = &s.fastest_mode {
            *table
                .entry((mode.clone(), s.period, s.interval_bin))
                .or_default() += 1;
        }
    }
    table
}
