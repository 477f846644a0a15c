use crate::model::GeoPoint;

/// Mean Earth radius in kilometres (IUGG).
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Great-circle distance between two points, haversine formula.
pub fn geodesic_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat().to_radians(), b.lat().to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon() - a.lon()).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    // rounding can push h a hair above 1 for antipodal points
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn reference_values() {
        assert_eq!(geodesic_distance(p(48.85, 2.35), p(48.85, 2.35)), 0.0);
        // one degree of arc: 2*pi*R/360
        let one_degree = 2.0 * std::f64::consts::PI * EARTH_RADIUS_KM / 360.0;
        assert!((one_degree - 111.1949).abs() < 1e-3);
        assert!((geodesic_distance(p(0.0, 0.0), p(0.0, 1.0)) - one_degree).abs() < 1e-9);
        let half_turn = std::f64::consts::PI * EARTH_RADIUS_KM;
        assert!((half_turn - 20015.1144).abs() < 1e-3);
        assert!((geodesic_distance(p(0.0, 0.0), p(0.0, 180.0)) - half_turn).abs() < 1e-6);
    }

    fn point() -> impl Strategy<Value = GeoPoint> {
        (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(lat, lon)| p(lat, lon))
    }

    proptest! {
        #[test]
        fn symmetric_and_non_negative(a in point(), b in point()) {
            let ab = geodesic_distance(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - geodesic_distance(b, a)).abs() < 1e-6);
        }

        #[test]
        fn triangle_inequality(a in point(), b in point(), c in point()) {
            let ac = geodesic_distance(a, c);
            prop_assert!(ac <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-6);
        }

        #[test]
        fn identity(a in point()) {
            prop_assert!(geodesic_distance(a, a).abs() < 1e-6);
        }
    }
}
