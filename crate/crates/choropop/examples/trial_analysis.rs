//! Run the bootstrap estimation pipeline over the bundled demo trial log.
//!
//! ```sh
//! cargo run --example trial_analysis
//! ```

use std::fs;
use std::path::PathBuf;

use choropop::io::parse_trials;
use choropop::stats::analyze_trials;
use choropop::svg::write_svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/out/analysis");
    fs::create_dir_all(&out_dir)?;

    let trials = parse_trials(
        &fs::read(data_dir.join("trials_demo.csv"))?,
        Some(&fs::read(data_dir.join("rankings_demo.csv"))?),
    )?;
    println!(
        "{} records from {} participants",
        trials.records.len(),
        trials.participants().len()
    );

    let report = analyze_trials(&trials, 10_000, 42)?;
    fs::write(out_dir.join("results.csv"), report.to_csv())?;
    for measure in report.measures() {
        let path = out_dir.join(format!("{}.svg", measure.replace('/', "_")));
        fs::write(&path, write_svg(&report.chart(&measure)))?;
    }
    if let Some(ranking) = &report.ranking {
        fs::write(out_dir.join("ranking_summary.csv"), ranking.to_csv())?;
        println!("ranking summary:");
        print!("{}", ranking.to_csv());
    }

    println!("accuracy for q5_sum:");
    for row in report
        .rows
        .iter()
        .filter(|r| r.question == "q5_sum" && r.measure == "accuracy")
    {
        println!(
            "  {:<11} {:.3} [{:.3}, {:.3}]",
            row.technique, row.estimate.point, row.estimate.ci_low, row.estimate.ci_high
        );
    }
    println!("outputs in {}", out_dir.display());
    Ok(())
}
