use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{read_to_string, LoadReport};
use crate::error::IngestError;
use crate::model::{GeoPoint, Zone};

/// Zones in input order, indexed by id.
#[derive(Debug, Clone, Default)]
pub struct ZoneSet {
    zones: Vec<Zone>,
    by_id: HashMap<String, usize>,
}

impl ZoneSet {
    pub fn from_zones(zones: Vec<Zone>) -> Result<Self, IngestError> {
        let mut set = ZoneSet::default();
        for z in zones {
            set.insert(z).map_err(IngestError::Invalid)?;
        }
        Ok(set)
    }

    fn insert(&mut self, zone: Zone) -> Result<(), String> {
        if let Some(d) = zone.population_density {
            if !d.is_finite() || d < 0.0 {
                return Err(format!(
                    "zone {}: population_density must be >= 0, got {d}",
                    zone.zone_id
                ));
            }
        }
        if self.by_id.contains_key(&zone.zone_id) {
            return Err(format!("duplicate zone_id {}", zone.zone_id));
        }
        self.by_id.insert(zone.zone_id.clone(), self.zones.len());
        self.zones.push(zone);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Zone> {
        self.by_id.get(id).map(|i| &self.zones[*i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Zone> {
        self.zones.iter()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn without_internal_point(&self) -> impl Iterator<Item = &Zone> {
        self.zones.iter().filter(|z| z.internal_point.is_none())
    }
}

fn parse_feature(feature: &Value) -> Result<Zone, String> {
    let props = feature
        .get("properties")
        .and_then(Value::as_object)
        .ok_or("feature without properties object")?;
    let zone_id = match props.get("zone_id") {
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err("feature without zone_id property".into()),
    };
    let mut zone = Zone::new(zone_id);
    match props.get("internal_point") {
        None | Some(Value::Null) => {}
        Some(Value::Array(coords)) if coords.len() == 2 => {
            let lon = coords[0]
                .as_f64()
                .ok_or("internal_point longitude is not a number")?;
            let lat = coords[1]
                .as_f64()
                .ok_or("internal_point latitude is not a number")?;
            zone.internal_point =
                Some(GeoPoint::new(lat, lon).map_err(|e| format!("zone {}: {e}", zone.zone_id))?);
        }
        Some(_) => {
            return Err(format!(
                "zone {}: internal_point must be [lon, lat]",
                zone.zone_id
            ))
        }
    }
    let density = props
        .get("population_density")
        .or_else(|| props.get("density"));
    match density {
        None | Some(Value::Null) => {}
        Some(v) => {
            zone.population_density = Some(v.as_f64().ok_or_else(|| {
                format!("zone {}: population_density is not a number", zone.zone_id)
            })?)
        }
    }
    zone.geometry = feature.get("geometry").filter(|g| !g.is_null()).cloned();
    Ok(zone)
}

pub fn parse_zones(text: &str, path: &Path) -> Result<(ZoneSet, LoadReport), IngestError> {
    let doc_err = |message: String| IngestError::Document {
        path: path.to_path_buf(),
        message,
    };
    let doc: Value =
        serde_json::from_str(text).map_err(|e| doc_err(format!("invalid JSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(doc_err("expected a GeoJSON FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| doc_err("FeatureCollection without features array".into()))?;
    let mut set = ZoneSet::default();
    for (i, feature) in features.iter().enumerate() {
        let zone = parse_feature(feature).map_err(|m| doc_err(format!("feature {i}: {m}")))?;
        set.insert(zone)
            .map_err(|m| doc_err(format!("feature {i}: {m}")))?;
    }
    let report = LoadReport {
        loaded: set.len(),
        skipped: 0,
    };
    Ok((set, report))
}

/// Load `zones.geojson`.
pub fn load_zones(path: &Path) -> Result<(ZoneSet, LoadReport), IngestError> {
    parse_zones(&read_to_string(path)?, path)
}

/// Canonical GeoJSON for a zone set: pretty printed, keys sorted, trailing newline.
pub fn zones_to_geojson(zones: &ZoneSet) -> Value {
    let features: Vec<Value> = zones
        .iter()
        .map(|z| {
            let mut props = Map::new();
            props.insert("zone_id".into(), json!(z.zone_id));
            if let Some(p) = z.internal_point {
                props.insert("internal_point".into(), json!([p.lon(), p.lat()]));
            }
            if let Some(d) = z.population_density {
                props.insert("population_density".into(), json!(d));
            }
            json!({
                "type": "Feature",
                "properties": props,
                "geometry": z.geometry.clone().unwrap_or(Value::Null),
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn write_zones<W: Write>(zones: &ZoneSet, mut w: W) -> Result<(), IngestError> {
    let text = serde_json::to_string_pretty(&zones_to_geojson(zones))
        .map_err(|e| IngestError::Invalid(e.to_string()))?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.write_all(b"\n"))
        .map_err(|e| IngestError::Invalid(e.to_string()))
}
