//! Command-line front end: `render`, `popchart`, `oracle`, `design`,
//! `analyze` and `validate` subcommands over the library.
//!
//! Flags are long-form only. Every run materializes its fully-resolved
//! configuration into `<out>.meta.json` (trailing slashes stripped);
//! re-running with `--from-meta <file>` reproduces the outputs
//! byte-identically. Exit codes: 0 success, 1 input or validation error,
//! 2 internal error. Diagnostics go to stderr; outputs only to `--out`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cartogram::ContiguousParams;
use crate::classify::Palette;
use crate::error::{Error, Result};
use crate::geometry::{adjacency, default_adjacency_eps};
use crate::io;
use crate::model::{CityLayer, DataMap, StatisticUnit, TrialSet};
use crate::popchart::{render_popchart, PopchartSpec, PopchartVariant};
use crate::scene::Camera;
use crate::stats::analyze_trials;
use crate::svg::write_svg;
use crate::tasks::{self, Metric};
use crate::techniques::{render_region_map, RegionTechnique, RegionTechniqueSpec};

#[derive(Parser, Debug)]
#[command(
    name = "choropop",
    version,
    about = "Bivariate choropleth map synthesis, task ground truth, and trial analysis",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render one region-level map design to SVG.
    Render(CommonArgs),
    /// Render a fine-scale population overlay to SVG.
    Popchart(CommonArgs),
    /// Compute ground truth for a map-reading task as JSON.
    Oracle(CommonArgs),
    /// Generate a counterbalanced study design as CSV.
    Design(CommonArgs),
    /// Run the bootstrap estimation pipeline over a trial log.
    Analyze(CommonArgs),
    /// Validate input files and report warnings.
    Validate(CommonArgs),
}

/// One flag surface shared by all subcommands; requiredness is resolved per
/// subcommand so missing-flag errors can name the flag.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Re-run from a previously written meta file (other flags ignored;
    /// --out may override the recorded output path).
    #[arg(long, value_name = "META_JSON")]
    from_meta: Option<PathBuf>,

    #[arg(long, value_name = "FILE")]
    geometry: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    cities: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    trials: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    rankings: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Region technique (render): choropleth, juxtaposed, absolute,
    /// value_by_alpha, prism3d, bertillon, dotmap, cartogram, noncontiguous.
    #[arg(long)]
    technique: Option<String>,
    /// Popchart variant: dasymetric, dot, heatmap, prism.
    #[arg(long)]
    variant: Option<String>,

    /// Statistic class count.
    #[arg(long)]
    classes: Option<usize>,
    /// Comma-separated #rrggbb fills overriding the default palette.
    #[arg(long)]
    palette: Option<String>,
    /// Comma-separated region ids to outline.
    #[arg(long)]
    highlight: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    /// Camera pitch in degrees (extrusion renders).
    #[arg(long)]
    pitch: Option<f64>,
    /// Screen height of the maximum extruded value, in pixels.
    #[arg(long)]
    height_scale: Option<f64>,
    /// KDE bandwidth in map units.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Heatmap grid resolution per axis.
    #[arg(long)]
    resolution: Option<usize>,
    /// Unit of the statistic column: percent (default) or fraction.
    #[arg(long)]
    statistic_unit: Option<String>,
    /// Legend title for the statistic.
    #[arg(long)]
    stat_title: Option<String>,
    /// Also write layout solver diagnostics next to the output.
    #[arg(long)]
    diagnostics: bool,

    /// Oracle task: rank, neighbor-max, compare, biggest-city,
    /// city-population, count.
    #[arg(long)]
    task: Option<String>,
    /// Oracle metric: population, rate, absolute.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    region: Option<String>,
    /// Comma-separated candidate region ids (defaults to all regions).
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long)]
    set_a: Option<String>,
    #[arg(long)]
    set_b: Option<String>,

    /// Comma-separated technique labels (design).
    #[arg(long)]
    techniques: Option<String>,
    /// Comma-separated question-set labels (design).
    #[arg(long)]
    question_sets: Option<String>,
    #[arg(long)]
    participants: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resamples: Option<usize>,
}

/// Fully-resolved run configuration, echoed to the meta sidecar.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    pub library_version: String,
    pub geometry: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub cities: Option<PathBuf>,
    pub trials: Option<PathBuf>,
    pub rankings: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub technique: Option<String>,
    pub variant: Option<String>,
    pub classes: usize,
    pub palette: Option<String>,
    pub highlight: Vec<String>,
    pub width: f64,
    pub height: f64,
    pub pitch: f64,
    pub height_scale: f64,
    pub bandwidth: Option<f64>,
    pub resolution: usize,
    pub statistic_unit: String,
    pub stat_title: String,
    pub diagnostics: bool,
    pub task: Option<String>,
    pub metric: Option<String>,
    pub region: Option<String>,
    pub candidates: Vec<String>,
    pub set_a: Vec<String>,
    pub set_b: Vec<String>,
    pub techniques: Vec<String>,
    pub question_sets: Vec<String>,
    pub participants: usize,
    pub seed: u64,
    pub resamples: usize,
}

fn split_list(raw: &Option<String>) -> Vec<String> {
    raw.as_deref()
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
}

impl RunConfig {
    fn resolve(subcommand: &str, args: &CommonArgs) -> RunConfig {
        RunConfig {
            subcommand: subcommand.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            geometry: args.geometry.clone(),
            data: args.data.clone(),
            cities: args.cities.clone(),
            trials: args.trials.clone(),
            rankings: args.rankings.clone(),
            out: args.out.clone(),
            technique: args.technique.clone(),
            variant: args.variant.clone(),
            classes: args.classes.unwrap_or(crate::techniques::DEFAULT_CLASSES),
            palette: args.palette.clone(),
            highlight: split_list(&args.highlight),
            width: args.width.unwrap_or(900.0),
            height: args.height.unwrap_or(620.0),
            pitch: args.pitch.unwrap_or(55.0),
            height_scale: args.height_scale.unwrap_or(120.0),
            bandwidth: args.bandwidth,
            resolution: args.resolution.unwrap_or(256),
            statistic_unit: args
                .statistic_unit
                .clone()
                .unwrap_or_else(|| "percent".to_string()),
            stat_title: args.stat_title.clone().unwrap_or_else(|| "statistic".into()),
            diagnostics: args.diagnostics,
            task: args.task.clone(),
            metric: args.metric.clone(),
            region: args.region.clone(),
            candidates: split_list(&args.candidates),
            set_a: split_list(&args.set_a),
            set_b: split_list(&args.set_b),
            techniques: split_list(&args.techniques),
            question_sets: split_list(&args.question_sets),
            participants: args.participants.unwrap_or(1),
            seed: args.seed.unwrap_or(0),
            resamples: args.resamples.unwrap_or(10_000),
        }
    }

    fn require<'a, T>(&self, value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| {
            Error::Cli(format!(
                "{}: missing required flag --{flag}",
                self.subcommand
            ))
        })
    }

    fn statistic_unit(&self) -> Result<StatisticUnit> {
        match self.statistic_unit.as_str() {
            "percent" => Ok(StatisticUnit::Percent),
            "fraction" => Ok(StatisticUnit::Fraction),
            other => Err(Error::Cli(format!(
                "--statistic-unit must be percent or fraction, got `{other}`"
            ))),
        }
    }

    fn palette(&self) -> Result<Option<Palette>> {
        match &self.palette {
            None => Ok(None),
            Some(raw) => {
                let hex: Vec<&str> = raw.split(',').map(str::trim).collect();
                Ok(Some(Palette::from_hex_list("custom", &hex)?))
            }
        }
    }

    fn camera(&self) -> Result<Camera> {
        if !(self.pitch > 0.0 && self.pitch <= 90.0) {
            return Err(Error::Cli(format!(
                "--pitch must be in (0, 90], got {}",
                self.pitch
            )));
        }
        Ok(Camera {
            pitch_deg: self.pitch,
            height_scale: self.height_scale,
        })
    }

    fn load_data(&self) -> Result<DataMap> {
        let geometry_path = self.require(&self.geometry, "geometry")?;
        let data_path = self.require(&self.data, "data")?;
        let map = io::parse_geometry(&fs::read(geometry_path)?)?;
        let rows = io::parse_data_rows(&fs::read(data_path)?)?;
        crate::model::join_data(map, &rows, self.statistic_unit()?)
    }

    fn load_cities(&self, data: &DataMap) -> Result<(CityLayer, Vec<String>)> {
        let cities_path = self.require(&self.cities, "cities")?;
        io::parse_cities(&fs::read(cities_path)?, data)
    }

    fn load_trials(&self) -> Result<TrialSet> {
        let trials_path = self.require(&self.trials, "trials")?;
        let trials_bytes = fs::read(trials_path)?;
        let rankings_bytes = match &self.rankings {
            Some(path) => Some(fs::read(path)?),
            None => None,
        };
        io::parse_trials(&trials_bytes, rankings_bytes.as_deref())
    }

    fn stat_display(&self) -> (f64, String) {
        match self.statistic_unit.as_str() {
            "percent" => (100.0, "%".to_string()),
            _ => (1.0, String::new()),
        }
    }
}

/// Meta sidecar path: `<out>.meta.json` with any trailing separator
/// stripped, so a directory output `results/` maps to `results.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    let trimmed = out
        .to_string_lossy()
        .trim_end_matches(std::path::MAIN_SEPARATOR)
        .to_string();
    PathBuf::from(format!("{trimmed}.meta.json"))
}

fn write_meta(config: &RunConfig) -> Result<()> {
    if let Some(out) = &config.out {
        let mut bytes = serde_json::to_vec_pretty(config).expect("config serializes");
        bytes.push(b'\n');
        fs::write(meta_path(out), bytes)?;
    }
    Ok(())
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn run_render(config: &RunConfig) -> Result<()> {
    let technique_name = require_str(config, &config.technique, "technique")?;
    let technique = RegionTechnique::parse(technique_name).ok_or_else(|| {
        Error::Cli(format!("unknown technique `{technique_name}`"))
    })?;
    let data = config.load_data()?;
    let mut spec = RegionTechniqueSpec::new(technique);
    spec.classes = config.classes;
    spec.palette = config.palette()?;
    spec.camera = config.camera()?;
    spec.width = config.width;
    spec.height = config.height;
    spec.highlight = config.highlight.clone();
    spec.contiguous = ContiguousParams::default();
    spec.stat_title = config.stat_title.clone();
    let (scale, unit) = config.stat_display();
    spec.stat_display_scale = scale;
    spec.stat_unit = unit;

    let rendered = render_region_map(&data, &spec)?;
    let out = config.require(&config.out, "out")?;
    write_output(out, &write_svg(&rendered.scene))?;
    if config.diagnostics {
        if let Some(layout) = &rendered.layout {
            let mut bytes = serde_json::to_vec_pretty(layout).expect("diagnostics serialize");
            bytes.push(b'\n');
            let path = PathBuf::from(format!("{}.diagnostics.json", out.to_string_lossy()));
            write_output(&path, &bytes)?;
        }
    }
    Ok(())
}

fn require_str<'a>(config: &RunConfig, value: &'a Option<String>, flag: &str) -> Result<&'a str> {
    value.as_deref().ok_or_else(|| {
        Error::Cli(format!(
            "{}: missing required flag --{flag}",
            config.subcommand
        ))
    })
}

fn run_popchart(config: &RunConfig) -> Result<()> {
    let variant_name = require_str(config, &config.variant, "variant")?;
    let variant = PopchartVariant::parse(variant_name)
        .ok_or_else(|| Error::Cli(format!("unknown popchart variant `{variant_name}`")))?;
    let data = config.load_data()?;
    let (cities, warnings) = config.load_cities(&data)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let mut spec = PopchartSpec::new(variant);
    spec.classes = config.classes;
    spec.palette = config.palette()?;
    spec.bandwidth = config.bandwidth;
    spec.resolution = config.resolution;
    spec.camera = config.camera()?;
    spec.width = config.width;
    spec.height = config.height;
    spec.highlight = config.highlight.clone();
    spec.stat_title = config.stat_title.clone();
    let (scale, unit) = config.stat_display();
    spec.stat_display_scale = scale;
    spec.stat_unit = unit;

    let scene = render_popchart(&data, &cities, &spec)?;
    let out = config.require(&config.out, "out")?;
    write_output(out, &write_svg(&scene))
}

fn run_oracle(config: &RunConfig) -> Result<()> {
    let task = require_str(config, &config.task, "task")?;
    let data = config.load_data()?;
    let metric = match &config.metric {
        Some(m) => Metric::parse(m)
            .ok_or_else(|| Error::Cli(format!("unknown metric `{m}`")))?,
        None => Metric::Absolute,
    };
    let all_ids = || -> Vec<String> {
        data.map.regions.iter().map(|r| r.id.clone()).collect()
    };
    let candidates = if config.candidates.is_empty() {
        all_ids()
    } else {
        config.candidates.clone()
    };

    let result: serde_json::Value = match task {
        "rank" => {
            let order = tasks::rank_regions(&data, metric, &candidates)?;
            let support: Vec<serde_json::Value> = order
                .iter()
                .map(|id| {
                    serde_json::json!({
                        "region": id,
                        "value": metric.value(&data, id).unwrap(),
                    })
                })
                .collect();
            serde_json::json!({
                "task": "rank",
                "metric": metric.name(),
                "answer": order[0],
                "support": support,
            })
        }
        "neighbor-max" => {
            let region = require_str(config, &config.region, "region")?;
            let graph = adjacency(&data.map, default_adjacency_eps(&data.map));
            let answer = tasks::neighbor_argmax(region, &data, &graph, metric)?;
            let support: Vec<serde_json::Value> = graph
                .neighbors(region)
                .map(|n| {
                    serde_json::json!({
                        "region": n,
                        "value": metric.value(&data, n).unwrap(),
                    })
                })
                .collect();
            serde_json::json!({
                "task": "neighbor-max",
                "metric": metric.name(),
                "region": region,
                "answer": answer,
                "support": support,
            })
        }
        "compare" => {
            if config.set_a.is_empty() || config.set_b.is_empty() {
                return Err(Error::Cli(
                    "compare: missing required flags --set-a and --set-b".into(),
                ));
            }
            let outcome =
                tasks::summarize_compare(&config.set_a, &config.set_b, &data, metric)?;
            serde_json::json!({
                "task": "compare",
                "metric": metric.name(),
                "answer": outcome.verdict,
                "support": {"mean_a": outcome.mean_a, "mean_b": outcome.mean_b},
            })
        }
        "biggest-city" => {
            let (cities, _) = config.load_cities(&data)?;
            let scope = if config.candidates.is_empty() {
                all_ids()
            } else {
                config.candidates.clone()
            };
            let (city, region) = tasks::biggest_city(&scope, &cities)?;
            let population = cities
                .cities
                .iter()
                .find(|c| c.id == city)
                .map(|c| c.population)
                .unwrap_or(0.0);
            serde_json::json!({
                "task": "biggest-city",
                "answer": {"city": city, "region": region},
                "support": {"population": population},
            })
        }
        "city-population" => {
            let region = require_str(config, &config.region, "region")?;
            let (cities, _) = config.load_cities(&data)?;
            let total = tasks::region_population_from_cities(region, &cities);
            serde_json::json!({
                "task": "city-population",
                "region": region,
                "answer": total,
                "support": cities
                    .in_region(region)
                    .map(|c| serde_json::json!({"city": c.id, "population": c.population}))
                    .collect::<Vec<_>>(),
            })
        }
        "count" => {
            let region = require_str(config, &config.region, "region")?;
            let count = tasks::absolute_count(region, &data)?;
            serde_json::json!({
                "task": "count",
                "region": region,
                "answer": count,
                "support": {
                    "population": data.population_of(region),
                    "rate": data.rate_of(region),
                },
            })
        }
        other => {
            return Err(Error::Cli(format!("unknown oracle task `{other}`")));
        }
    };

    let out = config.require(&config.out, "out")?;
    let mut bytes = serde_json::to_vec_pretty(&result).expect("json");
    bytes.push(b'\n');
    write_output(out, &bytes)
}

fn run_design(config: &RunConfig) -> Result<()> {
    if config.techniques.is_empty() {
        return Err(Error::Cli(
            "design: missing required flag --techniques".into(),
        ));
    }
    if config.question_sets.is_empty() {
        return Err(Error::Cli(
            "design: missing required flag --question-sets".into(),
        ));
    }
    let design = tasks::generate_design(
        &config.techniques,
        &config.question_sets,
        config.participants,
    )?;
    let out = config.require(&config.out, "out")?;
    write_output(out, design.to_csv().as_bytes())
}

fn run_analyze(config: &RunConfig) -> Result<()> {
    let trials = config.load_trials()?;
    let report = analyze_trials(&trials, config.resamples, config.seed)?;
    let out = config.require(&config.out, "out")?;
    fs::create_dir_all(out)?;
    write_output(&out.join("results.csv"), report.to_csv().as_bytes())?;
    for measure in report.measures() {
        let chart = report.chart(&measure);
        write_output(
            &out.join(format!("{}.svg", measure.replace('/', "_"))),
            &write_svg(&chart),
        )?;
    }
    if let Some(ranking) = &report.ranking {
        write_output(&out.join("ranking_summary.csv"), ranking.to_csv().as_bytes())?;
    }
    Ok(())
}

fn run_validate(config: &RunConfig) -> Result<()> {
    let mut warnings: Vec<String> = Vec::new();
    let geometry_path = config.require(&config.geometry, "geometry")?;
    let map = io::parse_geometry(&fs::read(geometry_path)?)?;
    warnings.extend(map.validation_warnings());
    eprintln!("geometry: {} regions", map.len());

    let data = match &config.data {
        Some(path) => {
            let rows = io::parse_data_rows(&fs::read(path)?)?;
            let data = crate::model::join_data(map, &rows, config.statistic_unit()?)?;
            eprintln!("data: {} rows joined", data.map.len());
            Some(data)
        }
        None => None,
    };
    if let (Some(data), Some(path)) = (&data, &config.cities) {
        let (layer, city_warnings) = io::parse_cities(&fs::read(path)?, data)?;
        eprintln!("cities: {} records", layer.cities.len());
        warnings.extend(city_warnings);
    }
    if let Some(path) = &config.trials {
        let rankings = match &config.rankings {
            Some(r) => Some(fs::read(r)?),
            None => None,
        };
        let trials = io::parse_trials(&fs::read(path)?, rankings.as_deref())?;
        eprintln!(
            "trials: {} records, {} participants",
            trials.records.len(),
            trials.participants().len()
        );
    }
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(out) = &config.out {
        let report = serde_json::json!({
            "status": "ok",
            "warnings": warnings,
        });
        let mut bytes = serde_json::to_vec_pretty(&report).expect("json");
        bytes.push(b'\n');
        write_output(out, &bytes)?;
    }
    Ok(())
}

fn execute(config: &RunConfig) -> Result<()> {
    match config.subcommand.as_str() {
        "render" => run_render(config),
        "popchart" => run_popchart(config),
        "oracle" => run_oracle(config),
        "design" => run_design(config),
        "analyze" => run_analyze(config),
        "validate" => run_validate(config),
        other => Err(Error::Cli(format!("unknown subcommand `{other}`"))),
    }
}

fn resolve_config(subcommand: &str, args: &CommonArgs) -> Result<RunConfig> {
    match &args.from_meta {
        Some(path) => {
            let bytes = fs::read(path)?;
            let mut config: RunConfig = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Cli(format!("invalid meta file: {e}")))?;
            if config.subcommand != subcommand {
                return Err(Error::Cli(format!(
                    "meta file is for `{}`, not `{subcommand}`",
                    config.subcommand
                )));
            }
            if let Some(out) = &args.out {
                config.out = Some(out.clone());
            }
            Ok(config)
        }
        None => Ok(RunConfig::resolve(subcommand, args)),
    }
}

/// Parses arguments, runs the subcommand, writes the meta sidecar.
pub fn run(args: Vec<String>) -> i32 {
    let mut argv = vec!["choropop".to_string()];
    argv.extend(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exit codes.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (subcommand, common) = match &cli.command {
        Command::Render(a) => ("render", a),
        Command::Popchart(a) => ("popchart", a),
        Command::Oracle(a) => ("oracle", a),
        Command::Design(a) => ("design", a),
        Command::Analyze(a) => ("analyze", a),
        Command::Validate(a) => ("validate", a),
    };
    let config = match resolve_config(subcommand, common) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = std::panic::catch_unwind(|| execute(&config).and_then(|()| write_meta(&config)));
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(_) => {
            eprintln!("error: internal failure");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
    }

    fn run_args(args: &[&str]) -> i32 {
        run(args.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn render_writes_svg_and_meta() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("map.svg");
        let code = run_args(&[
            "render",
            "--technique",
            "choropleth",
            "--geometry",
            data_dir().join("grid96.geo.json").to_str().unwrap(),
            "--data",
            data_dir().join("grid96.data.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.exists());
        assert!(meta_path(&out).exists());
        let meta: RunConfig =
            serde_json::from_slice(&fs::read(meta_path(&out)).unwrap()).unwrap();
        assert_eq!(meta.subcommand, "render");
        assert_eq!(meta.classes, 5);
    }

    #[test]
    fn missing_flag_names_it() {
        let code = run_args(&["render", "--technique", "prism3d"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn from_meta_reproduces_bytes() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("map.svg");
        let code = run_args(&[
            "render",
            "--technique",
            "value_by_alpha",
            "--geometry",
            data_dir().join("grid96.geo.json").to_str().unwrap(),
            "--data",
            data_dir().join("grid96.data.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let first = fs::read(&out).unwrap();

        let out2 = tmp.path().join("again.svg");
        let code = run_args(&[
            "render",
            "--from-meta",
            meta_path(&out).to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(first, fs::read(&out2).unwrap());
    }

    #[test]
    fn meta_path_strips_trailing_separator() {
        assert_eq!(
            meta_path(Path::new("results/")),
            PathBuf::from("results.meta.json")
        );
        assert_eq!(
            meta_path(Path::new("map.svg")),
            PathBuf::from("map.svg.meta.json")
        );
    }
}
