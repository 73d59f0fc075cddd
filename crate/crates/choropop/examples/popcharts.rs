//! Render the four fine-scale population overlays on the base choropleth.
//!
//! ```sh
//! cargo run --example popcharts
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::io::{parse_cities, parse_data_rows, parse_geometry};
use choropop::model::{join_data, StatisticUnit};
use choropop::popchart::{render_popchart, PopchartSpec, PopchartVariant};
use choropop::svg::write_svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/out");
    fs::create_dir_all(&out_dir)?;

    let map = parse_geometry(&fs::read(data_dir.join("grid96.geo.json"))?)?;
    let rows = parse_data_rows(&fs::read(data_dir.join("grid96.data.csv"))?)?;
    let data = join_data(map, &rows, StatisticUnit::Percent)?;
    let (cities, warnings) = parse_cities(&fs::read(data_dir.join("grid96.cities.csv"))?, &data)?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "{} cities, largest {:.0} inhabitants",
        cities.cities.len(),
        cities.max_population()
    );

    for variant in PopchartVariant::ALL {
        let mut spec = PopchartSpec::new(variant);
        spec.stat_title = "unemployment".into();
        spec.stat_unit = "%".into();
        spec.stat_display_scale = 100.0;
        let scene = render_popchart(&data, &cities, &spec)?;
        let path = out_dir.join(format!("popchart_{}.svg", variant.name()));
        fs::write(&path, write_svg(&scene))?;
        println!("{:<11} -> {}", variant.name(), path.display());
    }
    Ok(())
}
