use std::fmt;
use std::str::FromStr;

use chrono::{NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::PeriodError;

pub const MINUTES_PER_DAY: u32 = 1440;

/// Traffic period of the day used by the ride-time aggregates.
///
/// The five classified periods tile the day with half-open intervals
/// `[start, end)` in minutes from local midnight. `DailyOnly` tags whole-day
/// fallback aggregates and is never the result of a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DayPeriod {
    EarlyMorning,
    Am,
    Midday,
    Pm,
    LateEvening,
    DailyOnly,
}

impl DayPeriod {
    /// The five periods that partition a day, in chronological order.
    pub const CLASSIFIED: [DayPeriod; 5] = [
        DayPeriod::EarlyMorning,
        DayPeriod::Am,
        DayPeriod::Midday,
        DayPeriod::Pm,
        DayPeriod::LateEvening,
    ];

    /// Half-open interval in minutes from midnight; `None` for `DailyOnly`.
    pub const fn interval_minutes(self) -> Option<(u32, u32)> {
        match self {
            DayPeriod::EarlyMorning => Some((0, 420)),
            DayPeriod::Am => Some((420, 600)),
            DayPeriod::Midday => Some((600, 960)),
            DayPeriod::Pm => Some((960, 1140)),
            DayPeriod::LateEvening => Some((1140, 1440)),
            DayPeriod::DailyOnly => None,
        }
    }

    /// Numeric code used in `ride_stats.csv` (0 = daily, 1..=5 = periods).
    pub const fn code(self) -> u8 {
        match self {
            DayPeriod::DailyOnly => 0,
            DayPeriod::EarlyMorning => 1,
            DayPeriod::Am => 2,
            DayPeriod::Midday => 3,
            DayPeriod::Pm => 4,
            DayPeriod::LateEvening => 5,
        }
    }

    pub const fn from_code(code: u8) -> Option<DayPeriod> {
        match code {
            0 => Some(DayPeriod::DailyOnly),
            1 => Some(DayPeriod::EarlyMorning),
            2 => Some(DayPeriod::Am),
            3 => Some(DayPeriod::Midday),
            4 => Some(DayPeriod::Pm),
            5 => Some(DayPeriod::LateEvening),
            _ => None,
        }
    }

    /// Stable snake_case name, used in file names and exported properties.
    pub const fn slug(self) -> &'static str {
        match self {
            DayPeriod::EarlyMorning => "early_morning",
            DayPeriod::Am => "am",
            DayPeriod::Midday => "midday",
            DayPeriod::Pm => "pm",
            DayPeriod::LateEvening => "late_evening",
            DayPeriod::DailyOnly => "daily",
        }
    }
}

impl fmt::Display for DayPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for DayPeriod {
    type Err = PeriodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DayPeriod::CLASSIFIED
            .iter()
            .chain(std::iter::once(&DayPeriod::DailyOnly))
            .copied()
            .find(|p| p.slug() == s)
            .ok_or_else(|| PeriodError::UnknownName(s.to_string()))
    }
}

/// Classify a local clock time given in minutes from midnight.
pub fn classify_period(minute_of_day: u32) -> Result<DayPeriod, PeriodError> {
    if minute_of_day >= MINUTES_PER_DAY {
        return Err(PeriodError::OutOfRange(minute_of_day));
    }
    let period = DayPeriod::CLASSIFIED
        .into_iter()
        .find(|p| {
            let (start, end) = p
                .interval_minutes()
                .expect("classified periods have intervals");
            (start..end).contains(&minute_of_day)
        })
        .expect("the five periods tile the day");
    Ok(period)
}

/// Classify a local wall-clock time. Seconds are truncated to the minute.
pub fn classify_local_time(time: NaiveTime) -> DayPeriod {
    let minute = time.hour() * 60 + time.minute();
    classify_period(minute).expect("NaiveTime is always within one day")
}
