//! Synthesis toolkit for bivariate choropleth maps.
//!
//! Given region geometry, per-region statistics and (optionally) fine-scale
//! city population records, this crate renders the full family of
//! region-level bivariate map designs (juxtaposed panels, absolute maps,
//! opacity encoding, 3D extrusion, rectangle glyphs, dot overlays, contiguous
//! and non-contiguous cartograms) plus four city-level population overlays on
//! a base choropleth. Alongside the renderers it computes machine-checkable
//! ground truth for common map-reading tasks, generates counterbalanced study
//! designs, and runs a seeded bootstrap estimation pipeline over trial logs.
//!
//! All outputs (SVG scenes, CSV tables, JSON reports) are deterministic:
//! identical inputs and seeds reproduce identical bytes.
//!
//! Start with the runnable programs under `examples/`; the `choropop` binary
//! exposes the same capabilities as subcommands.

pub mod cartogram;
pub mod classify;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod model;
pub mod popchart;
pub mod scene;
pub mod stats;
pub mod svg;
pub mod tasks;
pub mod techniques;

pub use error::{Error, Result};
