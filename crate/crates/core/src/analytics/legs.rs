use std::collections::BTreeMap;

use log::warn;

use crate::model::{TripPhaseTimes, TripRecord};

/// Average share of the door-to-door time spent in each phase, per city pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LegShare {
    pub pair_id: String,
    /// Percentages for (to, dep, in, arr, from).
    pub shares: [f64; 5],
    pub n_trips: usize,
}

impl LegShare {
    pub fn in_vehicle(&self) -> f64 {
        self.shares[2]
    }
}

/// Phase percentages of one trip; `None` when the total is zero.
pub fn phase_percentages(phases: &TripPhaseTimes) -> Option<[f64; 5]> {
    let total = phases.total_s();
    if total <= 0 {
        return None;
    }
    Some(phases.as_array().map(|p| p as f64 / total as f64 * 100.0))
}

/// Mean phase percentages per city pair, sorted by ascending in-vehicle share.
///
/// Returns the shares and the number of zero-total trips left out.
pub fn leg_shares(trips: &[TripRecord]) -> (Vec<LegShare>, usize) {
    let mut groups: BTreeMap<String, ([f64; 5], usize)> = BTreeMap::new();
    let mut excluded = 0;
    for t in trips {
        let Some(pct) = phase_percentages(&t.phases) else {
            warn!(
                "trip {} to {} has a zero total, excluded from leg shares",
                t.segment_id, t.dest_zone
            );
            excluded += 1;
            continue;
        };
        let (sum, n) = groups.entry(t.pair_id()).or_insert(([0.0; 5], 0));
        for (s, p) in sum.iter_mut().zip(pct) {
            *s += p;
        }
        *n += 1;
    }
    let mut shares: Vec<LegShare> = groups
        .into_iter()
        .map(|(pair_id, (sum, n))| LegShare {
            pair_id,
            shares: sum.map(|s| s / n as f64),
            n_trips: n,
        })
        .collect();
    // stable sort keeps pair order for equal shares
    shares.sort_by(|a, b| a.in_vehicle().total_cmp(&b.in_vehicle()));
    (shares, excluded)
}
