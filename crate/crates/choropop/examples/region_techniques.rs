//! Render every region-level bivariate design for the bundled fixture.
//!
//! ```sh
//! cargo run --example region_techniques
//! ```

use std::fs;
use std::path::PathBuf;

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

    for technique in RegionTechnique::ALL {
        let mut spec = RegionTechniqueSpec::new(technique);
        spec.stat_title = "unemployment".into();
        spec.stat_unit = "%".into();
        spec.stat_display_scale = 100.0;
        let rendered = render_region_map(&data, &spec)?;
        let path = out_dir.join(format!("{}.svg", technique.name()));
        fs::write(&path, write_svg(&rendered.scene))?;
        match rendered.layout {
            Some(layout) => println!(
                "{:<16} -> {} (+ solver diagnostics: {})",
                technique.name(),
                path.display(),
                serde_json::to_string(&layout)?.len()
            ),
            None => println!("{:<16} -> {}", technique.name(), path.display()),
        }
    }
    Ok(())
}
