//! Parse the bundled fixtures and render a plain classed choropleth.
//!
//! ```sh
//! cargo run --example choropleth_basics
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::classify::{classify, quantile_breaks};
use choropop::io::{parse_data_rows, parse_geometry};
use choropop::model::{join_data, StatisticUnit};
use choropop::svg::write_svg;
use choropop::techniques::{render_region_map, RegionTechnique, RegionTechniqueSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/out");
    fs::create_dir_all(&out_dir)?;

    let map = parse_geometry(&fs::read(data_dir.join("grid96.geo.json"))?)?;
    let rows = parse_data_rows(&fs::read(data_dir.join("grid96.data.csv"))?)?;
    let data = join_data(map, &rows, StatisticUnit::Percent)?;
    println!(
        "{} regions, total population {:.0}",
        data.map.len(),
        data.total_population()
    );

    let breaks = quantile_breaks(data.rates(), 5)?;
    println!(
        "quantile boundaries (fractions): {:?} ({} classes)",
        breaks.boundaries, breaks.effective_k
    );
    for id in ["r17", "r43", "r01"] {
        let rate = data.rate_of(id).unwrap();
        println!("  {id}: rate {:.3} -> class {}", rate, classify(rate, &breaks));
    }

    let mut spec = RegionTechniqueSpec::new(RegionTechnique::Choropleth);
    spec.stat_title = "unemployment".into();
    spec.stat_unit = "%".into();
    spec.stat_display_scale = 100.0;
    spec.highlight = vec!["r43".into()];
    let rendered = render_region_map(&data, &spec)?;
    let path = out_dir.join("choropleth.svg");
    fs::write(&path, write_svg(&rendered.scene))?;
    println!("wrote {}", path.display());
    Ok(())
}
