//! Checks against the committed data files: the parser's view of the
//! 96-region fixture must agree with an independent scan of the raw text,
//! round-trips must be lossless, and the demo trial log must validate.

use std::fs;
use std::path::PathBuf;

use choropop::io::{parse_cities, parse_data_rows, parse_geometry, parse_trials, serialize_geometry};
use choropop::model::{join_data, StatisticUnit};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// Pulls every `"id": "…"` property value out of the raw JSON text without
/// using the parser.
fn scan_ids(raw: &str) -> Vec<String> {
    let mut ids = Vec::new();
    let mut rest = raw;
    while let Some(pos) = rest.find("\"id\"") {
        rest = &rest[pos + 4..];
        let Some(colon) = rest.find(':') else { break };
        let after = rest[colon + 1..].trim_start();
        if let Some(stripped) = after.strip_prefix('"') {
            if let Some(end) = stripped.find('"') {
                ids.push(stripped[..end].to_string());
            }
        }
    }
    ids
}

#[test]
fn grid96_has_96_regions_in_file_order() {
    let raw = fs::read_to_string(data_dir().join("grid96.geo.json")).unwrap();
    let scanned = scan_ids(&raw);
    assert_eq!(scanned.len(), 96, "text scan finds 96 ids");

    let map = parse_geometry(raw.as_bytes()).unwrap();
    assert_eq!(map.len(), 96);
    let parsed: Vec<&str> = map.regions.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(parsed, scanned.iter().map(String::as_str).collect::<Vec<_>>());
}

#[test]
fn grid96_round_trips_through_serialization() {
    let raw = fs::read(data_dir().join("grid96.geo.json")).unwrap();
    let map = parse_geometry(&raw).unwrap();
    let reparsed = parse_geometry(&serialize_geometry(&map)).unwrap();
    assert_eq!(reparsed.len(), map.len());
    for (a, b) in map.regions.iter().zip(&reparsed.regions) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.rings, b.rings);
    }
}

#[test]
fn grid96_data_and_cities_join_cleanly() {
    let map = parse_geometry(&fs::read(data_dir().join("grid96.geo.json")).unwrap()).unwrap();
    let rows = parse_data_rows(&fs::read(data_dir().join("grid96.data.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 96);
    let data = join_data(map, &rows, StatisticUnit::Percent).unwrap();
    assert!(data.rates().iter().all(|r| (0.0..=1.0).contains(r)));
    assert!(data.validation_warnings().is_empty());

    let (cities, warnings) =
        parse_cities(&fs::read(data_dir().join("grid96.cities.csv")).unwrap(), &data).unwrap();
    assert!(cities.cities.len() >= 35);
    assert!(
        warnings.is_empty(),
        "fixture cities should sit inside their regions: {warnings:?}"
    );
    assert!(cities.cities.iter().any(|c| c.footprint.is_some()));
}

#[test]
fn demo_trials_validate() {
    let trials = fs::read(data_dir().join("trials_demo.csv")).unwrap();
    let rankings = fs::read(data_dir().join("rankings_demo.csv")).unwrap();
    let set = parse_trials(&trials, Some(&rankings)).unwrap();
    assert_eq!(set.participants().len(), 58);
    assert_eq!(set.techniques().len(), 4);
    assert_eq!(set.questions().len(), 5);
    assert_eq!(set.records.len(), 58 * 4 * 5);
    assert_eq!(set.rankings.len(), 58 * 4);
}
