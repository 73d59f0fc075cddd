//! Shared fixture builders for the integration and acceptance suites.

use choropop::geometry::{unit_square_ring, Point};
use choropop::model::{join_data, City, CityLayer, DataMap, DataRow, Region, RegionMap, StatisticUnit};

/// Deterministic 20-region (5x4 grid) map with all-distinct populations and
/// rates.
pub fn twenty_region_data() -> DataMap {
    let cols = 5;
    let mut regions = Vec::new();
    let mut rows = Vec::new();
    for i in 0..20 {
        let (c, r) = (i % cols, i / cols);
        let id = format!("g{i:02}");
        regions.push(Region {
            id: id.clone(),
            name: format!("Grid {i:02}"),
            rings: vec![unit_square_ring(c as f64 * 10.0, r as f64 * 10.0, 10.0)],
        });
        rows.push(DataRow {
            id,
            name: format!("Grid {i:02}"),
            population: 20_000.0 + 7919.0 * i as f64 + (i * i) as f64,
            statistic: 0.03 + 0.0041 * i as f64,
        });
    }
    let map = RegionMap::new(regions, "synthetic 5x4 grid").unwrap();
    join_data(map, &rows, StatisticUnit::Fraction).unwrap()
}

/// Forty cities over the 20-region fixture, two per region, populations
/// distinct; every second region's primary city records a square footprint.
pub fn forty_cities(data: &DataMap) -> CityLayer {
    let mut cities = Vec::new();
    for (i, region) in data.map.regions.iter().enumerate() {
        let bbox = region.bbox();
        let cx = (bbox.min_x + bbox.max_x) / 2.0;
        let cy = (bbox.min_y + bbox.max_y) / 2.0;
        for (slot, (dx, dy)) in [(-2.0, -1.5), (2.5, 2.0)].iter().enumerate() {
            let id = format!("c{i:02}{slot}");
            let population = 1500.0 + 811.0 * (2 * i + slot) as f64;
            let footprint = if slot == 0 && i % 2 == 0 {
                let side = 1.8;
                Some(vec![vec![
                    Point::new(cx + dx - side, cy + dy - side),
                    Point::new(cx + dx + side, cy + dy - side),
                    Point::new(cx + dx + side, cy + dy + side),
                    Point::new(cx + dx - side, cy + dy + side),
                    Point::new(cx + dx - side, cy + dy - side),
                ]])
            } else {
                None
            };
            cities.push(City {
                id,
                region_id: region.id.clone(),
                name: format!("City {i:02}-{slot}"),
                location: Point::new(cx + dx, cy + dy),
                population,
                footprint,
            });
        }
    }
    CityLayer::new(cities, data).unwrap().0
}
