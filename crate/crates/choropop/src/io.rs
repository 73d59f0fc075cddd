//! Ingestion of geometry, statistics tables, city layers and trial logs.
//!
//! Geometry is a JSON FeatureCollection subset: features carrying `Polygon`
//! or `MultiPolygon` coordinates plus `{id, name}` properties; everything
//! else in the document is ignored. Tables are UTF-8 CSV with `.` decimals
//! and no thousands separators.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{ring_is_closed, ring_signed_area, Point, Ring};
use crate::model::{
    City, CityLayer, DataMap, DataRow, RankingRecord, Region, RegionMap, TrialRecord, TrialSet,
};

/// Outer rings counter-clockwise, holes clockwise.
fn normalize_ring(mut ring: Ring, outer: bool) -> Ring {
    let ccw = ring_signed_area(&ring) > 0.0;
    if ccw != outer {
        ring.reverse();
    }
    ring
}

fn parse_ring(value: &Value, id: &str, ring_index: usize) -> Result<Ring> {
    let coords = value.as_array().ok_or_else(|| Error::BadRing {
        id: id.into(),
        ring: ring_index,
        reason: "ring is not an array".into(),
    })?;
    let mut ring = Vec::with_capacity(coords.len());
    for pair in coords {
        let xy = pair.as_array().ok_or_else(|| Error::BadRing {
            id: id.into(),
            ring: ring_index,
            reason: "vertex is not an array".into(),
        })?;
        let (x, y) = match (xy.first().and_then(Value::as_f64), xy.get(1).and_then(Value::as_f64)) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                return Err(Error::BadRing {
                    id: id.into(),
                    ring: ring_index,
                    reason: "vertex is not a number pair".into(),
                })
            }
        };
        ring.push(Point::new(x, y));
    }
    if ring.len() < 4 {
        return Err(Error::BadRing {
            id: id.into(),
            ring: ring_index,
            reason: format!("only {} vertices (need at least 4)", ring.len()),
        });
    }
    if !ring_is_closed(&ring) {
        return Err(Error::BadRing {
            id: id.into(),
            ring: ring_index,
            reason: "first and last vertex differ".into(),
        });
    }
    if ring_signed_area(&ring) == 0.0 {
        return Err(Error::BadRing {
            id: id.into(),
            ring: ring_index,
            reason: "zero signed area".into(),
        });
    }
    Ok(ring)
}

fn parse_polygon(rings: &Value, id: &str, ring_offset: usize) -> Result<Vec<Ring>> {
    let rings = rings.as_array().ok_or_else(|| {
        Error::MalformedGeometry(format!("region `{id}`: polygon coordinates are not an array"))
    })?;
    let mut out = Vec::with_capacity(rings.len());
    for (i, ring) in rings.iter().enumerate() {
        let ring = parse_ring(ring, id, ring_offset + i)?;
        out.push(normalize_ring(ring, i == 0));
    }
    if out.is_empty() {
        return Err(Error::MalformedGeometry(format!(
            "region `{id}`: polygon with no rings"
        )));
    }
    Ok(out)
}

/// Parses the geometry file into a validated [`RegionMap`]. Ring orientation
/// is normalized here so downstream signed-area code can rely on it.
pub fn parse_geometry(bytes: &[u8]) -> Result<RegionMap> {
    let doc: Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::MalformedGeometry(format!("invalid JSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::MalformedGeometry(
            "root `type` must be FeatureCollection".into(),
        ));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::MalformedGeometry("missing `features` array".into()))?;

    let mut regions = Vec::with_capacity(features.len());
    for (fi, feature) in features.iter().enumerate() {
        let props = feature.get("properties").ok_or_else(|| {
            Error::MalformedGeometry(format!("feature {fi}: missing properties"))
        })?;
        let id = match props.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => {
                return Err(Error::MalformedGeometry(format!(
                    "feature {fi}: missing `id` property"
                )))
            }
        };
        let name = match props.get("name") {
            Some(Value::String(s)) => s.clone(),
            _ => id.clone(),
        };
        let geom = feature
            .get("geometry")
            .ok_or_else(|| Error::MalformedGeometry(format!("region `{id}`: missing geometry")))?;
        let coords = geom.get("coordinates").ok_or_else(|| {
            Error::MalformedGeometry(format!("region `{id}`: missing coordinates"))
        })?;
        let rings = match geom.get("type").and_then(Value::as_str) {
            Some("Polygon") => parse_polygon(coords, &id, 0)?,
            Some("MultiPolygon") => {
                let parts = coords.as_array().ok_or_else(|| {
                    Error::MalformedGeometry(format!(
                        "region `{id}`: multipolygon coordinates are not an array"
                    ))
                })?;
                let mut rings = Vec::new();
                for part in parts {
                    let offset = rings.len();
                    rings.extend(parse_polygon(part, &id, offset)?);
                }
                rings
            }
            other => {
                return Err(Error::MalformedGeometry(format!(
                    "region `{id}`: unsupported geometry type {other:?}"
                )))
            }
        };
        regions.push(Region { id, name, rings });
    }

    let crs_note = doc
        .get("crs_note")
        .and_then(Value::as_str)
        .unwrap_or("pre-projected planar map units")
        .to_string();
    RegionMap::new(regions, crs_note)
}

/// Writes a [`RegionMap`] back out in the same FeatureCollection subset.
pub fn serialize_geometry(map: &RegionMap) -> Vec<u8> {
    let features: Vec<Value> = map
        .regions
        .iter()
        .map(|region| {
            // Group rings back into polygons: an outer ring starts a part.
            let mut parts: Vec<Vec<Value>> = Vec::new();
            for ring in &region.rings {
                let coords: Vec<Value> = ring
                    .iter()
                    .map(|p| serde_json::json!([p.x, p.y]))
                    .collect();
                if ring_signed_area(ring) > 0.0 || parts.is_empty() {
                    parts.push(vec![Value::Array(coords)]);
                } else {
                    parts.last_mut().unwrap().push(Value::Array(coords));
                }
            }
            let geometry = if parts.len() == 1 {
                serde_json::json!({"type": "Polygon", "coordinates": parts.remove(0)})
            } else {
                serde_json::json!({"type": "MultiPolygon", "coordinates": parts})
            };
            serde_json::json!({
                "type": "Feature",
                "properties": {"id": region.id, "name": region.name},
                "geometry": geometry,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "type": "FeatureCollection",
        "crs_note": map.crs_note,
        "features": features,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("json serialization");
    bytes.push(b'\n');
    bytes
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn check_header(
    file: &'static str,
    headers: &csv::StringRecord,
    required: &[&str],
    optional: &[&str],
) -> Result<Vec<usize>> {
    let found: Vec<&str> = headers.iter().collect();
    let mut indices = Vec::with_capacity(required.len() + optional.len());
    for name in required {
        match found.iter().position(|h| h == name) {
            Some(i) => indices.push(i),
            None => {
                return Err(Error::BadCsvHeader {
                    file,
                    expected: "see the interface docs",
                    got: found.join(","),
                })
            }
        }
    }
    for col in &found {
        if !required.contains(col) && !optional.contains(col) {
            return Err(Error::BadCsvHeader {
                file,
                expected: "see the interface docs",
                got: format!("unexpected column `{col}`"),
            });
        }
    }
    for name in optional {
        indices.push(found.iter().position(|h| h == name).unwrap_or(usize::MAX));
    }
    Ok(indices)
}

fn parse_number(file: &'static str, row: usize, field: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>().map_err(|_| Error::BadCsvRow {
        file,
        row,
        reason: format!("`{field}` is not a number: `{raw}`"),
    })
}

/// Region data CSV: `id,name,population,statistic`.
pub fn parse_data_rows(bytes: &[u8]) -> Result<Vec<DataRow>> {
    let mut rdr = reader(bytes);
    let headers = rdr.headers().map_err(csv_err("data", 0))?.clone();
    let idx = check_header("data", &headers, &["id", "name", "population", "statistic"], &[])?;
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row_no = i + 2; // 1-based, after the header
        let record = record.map_err(csv_err("data", row_no))?;
        rows.push(DataRow {
            id: record[idx[0]].to_string(),
            name: record[idx[1]].to_string(),
            population: parse_number("data", row_no, "population", &record[idx[2]])?,
            statistic: parse_number("data", row_no, "statistic", &record[idx[3]])?,
        });
    }
    Ok(rows)
}

fn csv_err(file: &'static str, row: usize) -> impl Fn(csv::Error) -> Error {
    move |e| Error::BadCsvRow {
        file,
        row,
        reason: e.to_string(),
    }
}

/// Parses a WKT `POLYGON ((x y, ...), ...)` into normalized rings.
pub fn parse_wkt_polygon(text: &str) -> std::result::Result<Vec<Ring>, String> {
    let trimmed = text.trim();
    let upper = trimmed.to_ascii_uppercase();
    let rest = upper
        .strip_prefix("POLYGON")
        .ok_or_else(|| format!("expected POLYGON, got `{trimmed}`"))?;
    let body_start = trimmed.len() - rest.len();
    let body = trimmed[body_start..].trim();
    if !body.starts_with('(') || !body.ends_with(')') {
        return Err("POLYGON body must be parenthesized".into());
    }
    let inner = &body[1..body.len() - 1];

    let mut rings = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = Some(i + 1);
                }
                depth += 1;
            }
            ')' => {
                depth = depth.checked_sub(1).ok_or("unbalanced parentheses")?;
                if depth == 0 {
                    let raw = &inner[start.ok_or("unbalanced parentheses")?..i];
                    let mut ring = Vec::new();
                    for pair in raw.split(',') {
                        let mut nums = pair.split_whitespace();
                        let x = nums
                            .next()
                            .and_then(|v| v.parse::<f64>().ok())
                            .ok_or_else(|| format!("bad vertex `{pair}`"))?;
                        let y = nums
                            .next()
                            .and_then(|v| v.parse::<f64>().ok())
                            .ok_or_else(|| format!("bad vertex `{pair}`"))?;
                        ring.push(Point::new(x, y));
                    }
                    if ring.len() < 4 || !ring_is_closed(&ring) {
                        return Err("ring must be closed with at least 4 vertices".into());
                    }
                    rings.push(normalize_ring(ring, rings.is_empty()));
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    if rings.is_empty() {
        return Err("POLYGON with no rings".into());
    }
    Ok(rings)
}

/// Cities CSV: `id,region_id,name,x,y,population` with an optional
/// `footprint` column holding a WKT POLYGON.
pub fn parse_cities(bytes: &[u8], data: &DataMap) -> Result<(CityLayer, Vec<String>)> {
    let mut rdr = reader(bytes);
    let headers = rdr.headers().map_err(csv_err("cities", 0))?.clone();
    let idx = check_header(
        "cities",
        &headers,
        &["id", "region_id", "name", "x", "y", "population"],
        &["footprint"],
    )?;
    let footprint_idx = idx[6];
    let mut cities = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row_no = i + 2;
        let record = record.map_err(csv_err("cities", row_no))?;
        let footprint = if footprint_idx != usize::MAX {
            let raw = record.get(footprint_idx).unwrap_or("").trim();
            if raw.is_empty() {
                None
            } else {
                Some(parse_wkt_polygon(raw).map_err(|reason| Error::BadCsvRow {
                    file: "cities",
                    row: row_no,
                    reason,
                })?)
            }
        } else {
            None
        };
        cities.push(City {
            id: record[idx[0]].to_string(),
            region_id: record[idx[1]].to_string(),
            name: record[idx[2]].to_string(),
            location: Point::new(
                parse_number("cities", row_no, "x", &record[idx[3]])?,
                parse_number("cities", row_no, "y", &record[idx[4]])?,
            ),
            population: parse_number("cities", row_no, "population", &record[idx[5]])?,
            footprint,
        });
    }
    CityLayer::new(cities, data)
}

/// Trial log CSV: `participant_id,technique,question,question_set,correct,time_ms`,
/// with an optional rankings CSV `participant_id,technique,rank`.
pub fn parse_trials(trials: &[u8], rankings: Option<&[u8]>) -> Result<TrialSet> {
    let mut rdr = reader(trials);
    let headers = rdr.headers().map_err(csv_err("trials", 0))?.clone();
    let idx = check_header(
        "trials",
        &headers,
        &[
            "participant_id",
            "technique",
            "question",
            "question_set",
            "correct",
            "time_ms",
        ],
        &[],
    )?;
    let mut records = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row_no = i + 2;
        let record = record.map_err(csv_err("trials", row_no))?;
        let correct = match record[idx[4]].trim() {
            "0" => 0u8,
            "1" => 1u8,
            other => {
                return Err(Error::BadCsvRow {
                    file: "trials",
                    row: row_no,
                    reason: format!("`correct` must be 0 or 1, got `{other}`"),
                })
            }
        };
        let time_ms = parse_number("trials", row_no, "time_ms", &record[idx[5]])?;
        if time_ms <= 0.0 {
            return Err(Error::BadCsvRow {
                file: "trials",
                row: row_no,
                reason: format!("`time_ms` must be positive, got {time_ms}"),
            });
        }
        records.push(TrialRecord {
            participant_id: record[idx[0]].to_string(),
            technique: record[idx[1]].to_string(),
            question: record[idx[2]].to_string(),
            question_set: record[idx[3]].to_string(),
            correct,
            time_ms,
        });
    }

    let ranking_records = match rankings {
        Some(bytes) => parse_rankings(bytes)?,
        None => Vec::new(),
    };
    TrialSet::new(records, ranking_records)
}

/// Rankings CSV: `participant_id,technique,rank`.
pub fn parse_rankings(bytes: &[u8]) -> Result<Vec<RankingRecord>> {
    let mut rdr = reader(bytes);
    let headers = rdr.headers().map_err(csv_err("rankings", 0))?.clone();
    let idx = check_header("rankings", &headers, &["participant_id", "technique", "rank"], &[])?;
    let mut records = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row_no = i + 2;
        let record = record.map_err(csv_err("rankings", row_no))?;
        let rank = record[idx[2]]
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::BadCsvRow {
                file: "rankings",
                row: row_no,
                reason: format!("`rank` is not a positive integer: `{}`", &record[idx[2]]),
            })?;
        records.push(RankingRecord {
            participant_id: record[idx[0]].to_string(),
            technique: record[idx[1]].to_string(),
            rank,
        });
    }
    Ok(records)
}
