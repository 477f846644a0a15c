//! Station dwell times: built-in defaults and per-kind overrides.

use crate::error::TripError;
use crate::model::{DwellProfile, Station, StationKind};

/// Average airport dwell times in minutes (departure, arrival).
pub const AIRPORT_DEFAULTS: [(&str, DwellProfile); 9] = [
    ("ATL", DwellProfile::from_minutes(110, 60)),
    ("BOS", DwellProfile::from_minutes(105, 40)),
    ("DCA", DwellProfile::from_minutes(100, 35)),
    ("LAX", DwellProfile::from_minutes(125, 65)),
    ("SEA", DwellProfile::from_minutes(105, 50)),
    ("SFO", DwellProfile::from_minutes(105, 45)),
    ("AMS", DwellProfile::from_minutes(90, 45)),
    ("CDG", DwellProfile::from_minutes(90, 45)),
    ("ORY", DwellProfile::from_minutes(90, 45)),
];

/// Dwell applied at every train station.
pub const RAIL_DEFAULT: DwellProfile = DwellProfile::from_minutes(15, 10);

pub fn builtin_airport(station_id: &str) -> Option<DwellProfile> {
    AIRPORT_DEFAULTS
        .iter()
        .find(|(id, _)| *id == station_id)
        .map(|(_, d)| *d)
}

/// Per-kind dwell replacements for what-if scenarios.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DwellOverrides {
    pub air: Option<DwellProfile>,
    pub rail: Option<DwellProfile>,
}

impl DwellOverrides {
    pub fn for_kind(&self, kind: StationKind) -> Option<DwellProfile> {
        match kind {
            StationKind::Air => self.air,
            StationKind::Rail => self.rail,
        }
    }
}

/// Resolve the dwell profile of a station.
///
/// Precedence: override for the station kind, then the value configured on
/// the station, then the built-in airport table, then the rail default.
pub fn resolve(station: &Station, overrides: &DwellOverrides) -> Result<DwellProfile, TripError> {
    if let Some(d) = overrides.for_kind(station.kind) {
        return Ok(d);
    }
    if let Some(d) = station.dwell {
        return Ok(d);
    }
    match station.kind {
        StationKind::Air => builtin_airport(&station.station_id)
            .ok_or_else(|| TripError::NoDwellProfile(station.station_id.clone())),
        StationKind::Rail => Ok(RAIL_DEFAULT),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeoPoint;

    fn station(id: &str, kind: StationKind, dwell: Option<DwellProfile>) -> Station {
        Station {
            station_id: id.into(),
            kind,
            zone_id: "Z".into(),
            location: GeoPoint::new(0.0, 0.0).unwrap(),
            tz: chrono_tz::UTC,
            dwell,
        }
    }

    #[test]
    fn builtin_table_values() {
        let sfo = builtin_airport("SFO").unwrap();
        assert_eq!((sfo.departure_s(), sfo.arrival_s()), (105 * 60, 45 * 60));
        assert_eq!(builtin_airport("JFK"), None);
    }

    #[test]
    fn resolution_precedence() {
        let none = DwellOverrides::default();
        let custom = DwellProfile::from_minutes(70, 20);
        assert_eq!(
            resolve(&station("CDG", StationKind::Air, None), &none).unwrap(),
            DwellProfile::from_minutes(90, 45)
        );
        assert_eq!(
            resolve(&station("CDG", StationKind::Air, Some(custom)), &none).unwrap(),
            custom
        );
        assert_eq!(
            resolve(&station("GDN", StationKind::Rail, None), &none).unwrap(),
            RAIL_DEFAULT
        );
        assert!(matches!(
            resolve(&station("XYZ", StationKind::Air, None), &none),
            Err(TripError::NoDwellProfile(_))
        ));

        let fast = DwellOverrides {
            air: Some(DwellProfile::from_minutes(60, 30)),
            rail: None,
        };
        assert_eq!(
            resolve(&station("CDG", StationKind::Air, Some(custom)), &fast).unwrap(),
            DwellProfile::from_minutes(60, 30)
        );
        assert_eq!(
            resolve(&station("GDN", StationKind::Rail, None), &fast).unwrap(),
            RAIL_DEFAULT
        );
    }
}
