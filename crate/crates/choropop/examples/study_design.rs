//! Generate a counterbalanced study design and verify its balance.
//!
//! ```sh
//! cargo run --example study_design
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::tasks::generate_design;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/out");
    fs::create_dir_all(&out_dir)?;

    let techniques: Vec<String> = ["juxtaposed", "bertillon", "prism3d", "cartogram"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let sets: Vec<String> = (1..=4).map(|i| format!("s{i}")).collect();
    let design = generate_design(&techniques, &sets, 60)?;

    let path = out_dir.join("design.csv");
    fs::write(&path, design.to_csv())?;
    println!("wrote {} ({} assignments)", path.display(), design.assignments.len());

    println!("appearances per position (rows = techniques):");
    for (technique, row) in techniques.iter().zip(design.position_counts()) {
        println!("  {technique:<11} {row:?}");
    }

    println!("first two participants:");
    for a in design.assignments.iter().take(8) {
        println!(
            "  participant {} position {} -> {} with {}",
            a.participant, a.position, a.technique, a.question_set
        );
    }
    Ok(())
}
