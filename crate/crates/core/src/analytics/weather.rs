//! Compare two evaluations of the same configuration, e.g. before and after a
//! disruption.

use std::collections::BTreeMap;

use crate::aggregation::{Seconds, ZonePeriodSummary};
use crate::period::DayPeriod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Presence {
    Both,
    /// Reached on the first date only.
    Disappeared,
    /// Reached on the second date only.
    Appeared,
}

impl Presence {
    pub fn as_str(self) -> &'static str {
        match self {
            Presence::Both => "both",
            Presence::Disappeared => "disappeared",
            Presence::Appeared => "appeared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeatherDelta {
    pub zone_id: String,
    pub period: DayPeriod,
    pub e_bar_a_s: Option<Seconds>,
    pub e_bar_b_s: Option<Seconds>,
    /// `E_bar(B) - E_bar(A)` when the zone is reached on both dates.
    pub delta_s: Option<Seconds>,
    pub presence: Presence,
}

/// Averages on the first and second date.
type Pair = (Option<Seconds>, Option<Seconds>);

/// Per (zone, period) change of the fastest average time from `a` to `b`.
pub fn weather_diff(a: &[ZonePeriodSummary], b: &[ZonePeriodSummary]) -> Vec<WeatherDelta> {
    let mut keyed: BTreeMap<(&str, DayPeriod), Pair> = BTreeMap::new();
    for s in a {
        keyed.entry((&s.zone_id, s.period)).or_default().0 = Some(s.e_bar_s);
    }
    for s in b {
        keyed.entry((&s.zone_id, s.period)).or_default().1 = Some(s.e_bar_s);
    }
    keyed
        .into_iter()
        .map(|((zone, period), (ea, eb))| {
            let presence = match (ea, eb) {
                (Some(_), Some(_)) => Presence::Both,
                (Some(_), None) => Presence::Disappeared,
                (None, Some(_)) => Presence::Appeared,
                (None, None) => unreachable!("entry created from one side"),
            };
            WeatherDelta {
                zone_id: zone.to_string(),
                period,
                e_bar_a_s: ea,
                e_bar_b_s: eb,
                delta_s: ea.zip(eb).map(|(x, y)| y - x),
                presence,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::IntervalBin;

    fn summary(zone: &str, period: DayPeriod, e_bar_min: i128) -> ZonePeriodSummary {
        let e_bar_s = Seconds::from_integer(e_bar_min * 60);
        ZonePeriodSummary {
            zone_id: zone.into(),
            period,
            fastest_counts: Default::default(),
            reliability_counts: Default::default(),
            fastest_mode: Some("A".into()),
            most_reliable_mode: Some("A".into()),
            e_bar_s,
            days_used: 1,
            days_total: 1,
            interval_bin: IntervalBin::of(&e_bar_s),
        }
    }

    #[test]
    fn identical_inputs_give_zero() {
        let a = vec![
            summary("Z1", DayPeriod::Am, 250),
            summary("Z2", DayPeriod::Pm, 270),
        ];
        for d in weather_diff(&a, &a) {
            assert_eq!(d.delta_s, Some(Seconds::from_integer(0)));
            assert_eq!(d.presence, Presence::Both);
        }
    }

    #[test]
    fn presence_flags_and_antisymmetry() {
        let a = vec![
            summary("Z1", DayPeriod::Am, 250),
            summary("Z2", DayPeriod::Am, 270),
        ];
        let b = vec![
            summary("Z1", DayPeriod::Am, 280),
            summary("Z3", DayPeriod::Am, 300),
        ];
        let ab = weather_diff(&a, &b);
        assert_eq!(ab.len(), 3);
        assert_eq!(ab[0].delta_s, Some(Seconds::from_integer(30 * 60)));
        assert_eq!(ab[1].presence, Presence::Disappeared);
        assert_eq!(ab[2].presence, Presence::Appeared);
        let ba = weather_diff(&b, &a);
        assert_eq!(ba[0].delta_s, ab[0].delta_s.map(|d| -d));
        assert_eq!(ba[1].presence, Presence::Appeared);
    }
}
