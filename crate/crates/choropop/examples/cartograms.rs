//! Run both cartogram solvers directly and inspect their diagnostics.
//!
//! ```sh
//! cargo run --example cartograms
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::cartogram::{contiguous_cartogram, noncontiguous_layout, ContiguousParams};
use choropop::io::{parse_data_rows, parse_geometry, serialize_geometry};
use choropop::model::{join_data, StatisticUnit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/out");
    fs::create_dir_all(&out_dir)?;

    let map = parse_geometry(&fs::read(data_dir.join("grid96.geo.json"))?)?;
    let rows = parse_data_rows(&fs::read(data_dir.join("grid96.data.csv"))?)?;
    let data = join_data(map, &rows, StatisticUnit::Percent)?;

    // Contiguous density equalization.
    let result = contiguous_cartogram(&data, &ContiguousParams::default())?;
    let d = &result.diagnostics;
    println!(
        "contiguous: {} iterations, mean area error {:.4} -> {:.4}, converged: {}, folds: {}",
        d.iterations, d.initial_mean_error, d.final_mean_error, d.converged, d.fold_count
    );
    let deformed = out_dir.join("cartogram_deformed.geo.json");
    fs::write(&deformed, serialize_geometry(&result.map))?;
    println!("wrote {}", deformed.display());

    // Non-contiguous shrink-factor layout.
    let layout = noncontiguous_layout(&data)?;
    println!("non-contiguous: global zoom {:.4}", layout.global_zoom);
    let mut oversized: Vec<(&str, f64)> = data
        .map
        .regions
        .iter()
        .zip(&layout.placements)
        .filter(|(_, p)| p.scale > 1.0)
        .map(|(r, p)| (r.id.as_str(), p.scale))
        .collect();
    oversized.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    println!("regions drawn bigger than life ({}):", oversized.len());
    for (id, scale) in oversized.iter().take(8) {
        println!("  {id}: scale {scale:.3}");
    }
    Ok(())
}
