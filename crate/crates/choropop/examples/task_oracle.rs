//! Compute ground-truth answers for the map-reading tasks.
//!
//! ```sh
//! cargo run --example task_oracle
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::geometry::{adjacency, default_adjacency_eps};
use choropop::io::{parse_cities, parse_data_rows, parse_geometry};
use choropop::model::{join_data, StatisticUnit};
use choropop::tasks::{
    biggest_city, neighbor_argmax, rank_regions, region_population_from_cities,
    summarize_compare, Metric,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let map = parse_geometry(&fs::read(data_dir.join("grid96.geo.json"))?)?;
    let rows = parse_data_rows(&fs::read(data_dir.join("grid96.data.csv"))?)?;
    let data = join_data(map, &rows, StatisticUnit::Percent)?;
    let (cities, _) = parse_cities(&fs::read(data_dir.join("grid96.cities.csv"))?, &data)?;
    let all: Vec<String> = data.map.regions.iter().map(|r| r.id.clone()).collect();

    // Who has the most people affected (population x rate)?
    let ranked = rank_regions(&data, Metric::Absolute, &all)?;
    println!("highest absolute count: {}", ranked[0]);

    // Which neighbor of r43 has the highest absolute count?
    let graph = adjacency(&data.map, default_adjacency_eps(&data.map));
    let neighbor = neighbor_argmax("r43", &data, &graph, Metric::Absolute)?;
    println!("neighbor of r43 with highest absolute count: {neighbor}");

    // Compare two four-region averages.
    let west: Vec<String> = vec!["r01".into(), "r02".into(), "r13".into(), "r14".into()];
    let east: Vec<String> = vec!["r11".into(), "r12".into(), "r23".into(), "r24".into()];
    let outcome = summarize_compare(&west, &east, &data, Metric::Absolute)?;
    println!(
        "west vs east mean absolute count: {:?} ({:.0} vs {:.0})",
        outcome.verdict, outcome.mean_a, outcome.mean_b
    );

    // City-level tasks.
    let (city, region) = biggest_city(&all, &cities)?;
    println!("biggest city: {city} in {region}");
    println!(
        "city population summed for r17: {:.0}",
        region_population_from_cities("r17", &cities)
    );
    Ok(())
}
