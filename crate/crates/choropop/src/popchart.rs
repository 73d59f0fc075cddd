//! Fine-scale population overlays on a base statistic choropleth: a
//! transparent black dasymetric layer, area-proportional city dots, a kernel
//! density heatmap, and per-city extruded prisms.
//!
//! City marks carry `c:<id>` element ids. Missing footprints (needed by the
//! dasymetric and prism variants) are substituted by a square centered on
//! the city whose area is population / ρ_ref, with ρ_ref ten times the
//! dataset's overall population density.

use serde::{Deserialize, Serialize};

use crate::classify::{classify, quantile_breaks, AlphaScale, Palette, Rgb};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect, Ring};
use crate::model::{City, CityLayer, DataMap};
use crate::scene::{
    depth_sort, legend_alpha, legend_ramp, project_prism, Camera, Node, PrismFaces, Scene, Style,
};
use crate::techniques::{RegionTechnique, RegionTechniqueSpec, Viewport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopchartVariant {
    Dasymetric,
    Dot,
    Heatmap,
    Prism,
}

impl PopchartVariant {
    pub const ALL: [PopchartVariant; 4] = [
        PopchartVariant::Dasymetric,
        PopchartVariant::Dot,
        PopchartVariant::Heatmap,
        PopchartVariant::Prism,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PopchartVariant::Dasymetric => "dasymetric",
            PopchartVariant::Dot => "dot",
            PopchartVariant::Heatmap => "heatmap",
            PopchartVariant::Prism => "prism",
        }
    }

    pub fn parse(name: &str) -> Option<PopchartVariant> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

/// Configuration for the overlay renderers.
#[derive(Debug, Clone, PartialEq)]
pub struct PopchartSpec {
    pub variant: PopchartVariant,
    pub classes: usize,
    pub palette: Option<Palette>,
    /// KDE bandwidth in map units; default 1.5% of the bbox diagonal.
    pub bandwidth: Option<f64>,
    /// Heatmap grid resolution per axis.
    pub resolution: usize,
    pub camera: Camera,
    /// Dot radius cap in pixels; default 4% of the viewport's shorter side.
    pub dot_r_max: Option<f64>,
    /// Opacity levels for the dasymetric overlay.
    pub overlay_alpha: AlphaScale,
    /// Reference density for substituted footprints; see module docs.
    pub rho_ref: Option<f64>,
    pub width: f64,
    pub height: f64,
    pub highlight: Vec<String>,
    pub stat_title: String,
    pub stat_unit: String,
    pub stat_display_scale: f64,
}

impl PopchartSpec {
    pub fn new(variant: PopchartVariant) -> Self {
        PopchartSpec {
            variant,
            classes: crate::techniques::DEFAULT_CLASSES,
            palette: None,
            bandwidth: None,
            resolution: 256,
            camera: Camera::default(),
            dot_r_max: None,
            overlay_alpha: AlphaScale::default_overlay(),
            rho_ref: None,
            width: 900.0,
            height: 620.0,
            highlight: Vec::new(),
            stat_title: "statistic".into(),
            stat_unit: String::new(),
            stat_display_scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.classes < 1 {
            return Err(Error::BadClassCount { k: self.classes });
        }
        if self.resolution < 16 {
            return Err(Error::BadArgument {
                op: "popchart",
                reason: format!("resolution {} below the minimum of 16", self.resolution),
            });
        }
        if let Some(b) = self.bandwidth {
            if b <= 0.0 {
                return Err(Error::BadArgument {
                    op: "popchart",
                    reason: format!("bandwidth {b} must be positive"),
                });
            }
        }
        Ok(())
    }

    fn base_spec(&self) -> RegionTechniqueSpec {
        let mut base = RegionTechniqueSpec::new(RegionTechnique::Choropleth);
        base.classes = self.classes;
        base.palette = self.palette.clone();
        base.width = self.width;
        base.height = self.height;
        base.highlight = self.highlight.clone();
        base.stat_title = self.stat_title.clone();
        base.stat_unit = self.stat_unit.clone();
        base.stat_display_scale = self.stat_display_scale;
        base
    }
}

/// Raster of population weights over the map extent.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub origin: Point,
    pub cell_width: f64,
    pub cell_height: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major weights, persons per cell.
    pub weights: Vec<f64>,
}

impl DensityGrid {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn cell_rect(&self, ix: usize, iy: usize) -> Rect {
        Rect {
            min_x: self.origin.x + ix as f64 * self.cell_width,
            min_y: self.origin.y + iy as f64 * self.cell_height,
            max_x: self.origin.x + (ix + 1) as f64 * self.cell_width,
            max_y: self.origin.y + (iy + 1) as f64 * self.cell_height,
        }
    }
}

/// Accumulates truncated Gaussian kernels (unit mass, cut at four
/// bandwidths) evaluated at cell centers, times cell area, so the grid sum
/// approximates the total population placed.
pub fn kde_grid(
    cities: &CityLayer,
    bandwidth: f64,
    resolution: usize,
    extent: &Rect,
) -> Result<(DensityGrid, Vec<String>)> {
    if bandwidth <= 0.0 {
        return Err(Error::BadArgument {
            op: "kde",
            reason: format!("bandwidth {bandwidth} must be positive"),
        });
    }
    if resolution < 16 {
        return Err(Error::BadArgument {
            op: "kde",
            reason: format!("resolution {resolution} below the minimum of 16"),
        });
    }
    let nx = resolution;
    let ny = resolution;
    let cell_width = extent.width() / nx as f64;
    let cell_height = extent.height() / ny as f64;
    let cell_area = cell_width * cell_height;
    let mut grid = DensityGrid {
        origin: Point::new(extent.min_x, extent.min_y),
        cell_width,
        cell_height,
        nx,
        ny,
        weights: vec![0.0; nx * ny],
    };
    let mut warnings = Vec::new();
    if cities.cities.is_empty() {
        warnings.push("city layer is empty; density grid is all zero".into());
        return Ok((grid, warnings));
    }

    let cutoff = 4.0 * bandwidth;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * bandwidth * bandwidth);
    for city in &cities.cities {
        let loc = city.location;
        let ix0 = (((loc.x - cutoff) - extent.min_x) / cell_width).floor().max(0.0) as usize;
        let ix1 = ((((loc.x + cutoff) - extent.min_x) / cell_width).ceil() as usize).min(nx);
        let iy0 = (((loc.y - cutoff) - extent.min_y) / cell_height).floor().max(0.0) as usize;
        let iy1 = ((((loc.y + cutoff) - extent.min_y) / cell_height).ceil() as usize).min(ny);
        for iy in iy0..iy1 {
            let cy = extent.min_y + (iy as f64 + 0.5) * cell_height;
            for ix in ix0..ix1 {
                let cx = extent.min_x + (ix as f64 + 0.5) * cell_width;
                let d2 = (cx - loc.x).powi(2) + (cy - loc.y).powi(2);
                if d2 > cutoff * cutoff {
                    continue;
                }
                let kernel = norm * (-d2 / (2.0 * bandwidth * bandwidth)).exp();
                grid.weights[iy * nx + ix] += city.population * kernel * cell_area;
            }
        }
    }
    Ok((grid, warnings))
}

/// Converts a grid to drawable cells: opacity = weight / p99 of the nonzero
/// weights (clamped to 1); cells below 1/255 opacity are dropped.
pub fn heatmap_cells(grid: &DensityGrid) -> Vec<(Rect, f64)> {
    let mut nonzero: Vec<f64> = grid.weights.iter().copied().filter(|&w| w > 0.0).collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((0.99 * nonzero.len() as f64).ceil() as usize).clamp(1, nonzero.len());
    let p99 = nonzero[rank - 1];

    let mut cells = Vec::new();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let w = grid.weights[iy * grid.nx + ix];
            if w <= 0.0 {
                continue;
            }
            let opacity = (w / p99).min(1.0);
            if opacity < 1.0 / 255.0 {
                continue;
            }
            cells.push((grid.cell_rect(ix, iy), opacity));
        }
    }
    cells
}

/// Footprint rings for a city, substituting a square when none is recorded.
pub fn city_footprint(city: &City, rho_ref: f64) -> Vec<Ring> {
    if let Some(footprint) = &city.footprint {
        return footprint.clone();
    }
    let area = if rho_ref > 0.0 {
        city.population / rho_ref
    } else {
        0.0
    };
    let side = area.max(1e-12).sqrt();
    let (cx, cy) = (city.location.x, city.location.y);
    vec![vec![
        Point::new(cx - side / 2.0, cy - side / 2.0),
        Point::new(cx + side / 2.0, cy - side / 2.0),
        Point::new(cx + side / 2.0, cy + side / 2.0),
        Point::new(cx - side / 2.0, cy + side / 2.0),
        Point::new(cx - side / 2.0, cy - side / 2.0),
    ]]
}

fn default_rho_ref(data: &DataMap) -> f64 {
    let area = data.total_area();
    if area > 0.0 {
        10.0 * data.total_population() / area
    } else {
        1.0
    }
}

/// Renders one popchart variant: base statistic choropleth, the city-level
/// overlay, and both legends.
pub fn render_popchart(
    data: &DataMap,
    cities: &CityLayer,
    spec: &PopchartSpec,
) -> Result<Scene> {
    spec.validate()?;
    for city in &cities.cities {
        if data.map.region(&city.region_id).is_none() {
            return Err(Error::UnknownRegion {
                id: city.region_id.clone(),
            });
        }
    }

    let base_spec = spec.base_spec();
    let rate_breaks = quantile_breaks(data.rates(), spec.classes)?;
    let palette = spec
        .palette
        .clone()
        .unwrap_or_else(|| Palette::sequential(spec.classes))
        .fitted(rate_breaks.effective_k)?;

    let mut scene = Scene::new(spec.width, spec.height);
    let rho_ref = spec.rho_ref.unwrap_or_else(|| default_rho_ref(data));
    let pop_max = cities.max_population();

    match spec.variant {
        PopchartVariant::Prism => {
            // Tilted base: regions projected at zero elevation, then city
            // prisms painted far to near.
            let headroom = {
                let (_, cos_t) = spec.camera.trig();
                spec.camera.height_scale * cos_t
            };
            let viewport = Viewport::fit(
                &data.map.bbox,
                14.0,
                14.0 + headroom,
                spec.width - 150.0 - 2.0 * 14.0,
                spec.height - 2.0 * 14.0 - headroom,
            );
            let (sin_t, _) = spec.camera.trig();
            let mut nodes = Vec::new();
            for (i, region) in data.map.regions.iter().enumerate() {
                let squashed: Vec<Ring> = viewport
                    .rings(&region.rings)
                    .into_iter()
                    .map(|ring| {
                        ring.into_iter()
                            .map(|p| Point::new(p.x, p.y * sin_t))
                            .collect()
                    })
                    .collect();
                let fill = palette.colors[classify(data.rates()[i], &rate_breaks)];
                let highlighted = spec.highlight.iter().any(|h| h == &region.id);
                let style = if highlighted {
                    Style::filled(fill).with_stroke(Rgb::new(34, 34, 34), 3.0)
                } else {
                    Style::filled(fill).with_stroke(Rgb::new(77, 77, 77), 0.6)
                };
                nodes.push(Node::Path {
                    id: Some(format!("r:{}", region.id)),
                    rings: squashed,
                    style,
                });
            }

            let faces: Vec<PrismFaces> = cities
                .cities
                .iter()
                .map(|city| {
                    let footprint = viewport.rings(&city_footprint(city, rho_ref));
                    project_prism(&city.id, &footprint, city.population, pop_max, &spec.camera)
                })
                .collect();
            for face in depth_sort(faces) {
                let city = cities.cities.iter().find(|c| c.id == face.id).unwrap();
                let region_index = data.map.index_of(&city.region_id).unwrap();
                let color =
                    palette.colors[classify(data.rates()[region_index], &rate_breaks)];
                let side_color = color.scaled(0.7);
                for quad in &face.sides {
                    nodes.push(Node::Path {
                        id: None,
                        rings: vec![vec![quad[0], quad[1], quad[2], quad[3], quad[0]]],
                        style: Style::filled(side_color).with_stroke(side_color.scaled(0.85), 0.4),
                    });
                }
                nodes.push(Node::Path {
                    id: Some(format!("c:{}", face.id)),
                    rings: face.top.clone(),
                    style: Style::filled(color).with_stroke(color.scaled(0.6), 0.8),
                });
            }
            scene.push(Node::group("panel:1", nodes));
        }
        _ => {
            // Flat base: reuse the plain choropleth panel.
            let base = crate::techniques::render_region_map(data, &base_spec)?;
            let panel = base
                .scene
                .nodes
                .into_iter()
                .find(|n| matches!(n, Node::Group { id: Some(id), .. } if id == "panel:1"))
                .expect("choropleth render has panel:1");
            let Node::Group { mut children, .. } = panel else {
                unreachable!()
            };
            let viewport = Viewport::fit(
                &data.map.bbox,
                14.0,
                14.0,
                spec.width - 150.0 - 2.0 * 14.0,
                spec.height - 2.0 * 14.0,
            );

            match spec.variant {
                PopchartVariant::Dasymetric => {
                    let populations: Vec<f64> =
                        cities.cities.iter().map(|c| c.population).collect();
                    let mut overlay = Vec::new();
                    for city in &cities.cities {
                        let alpha = crate::classify::alpha_for(
                            city.population,
                            &populations,
                            &spec.overlay_alpha,
                        )?;
                        overlay.push(Node::Path {
                            id: Some(format!("c:{}", city.id)),
                            rings: viewport.rings(&city_footprint(city, rho_ref)),
                            style: Style::filled(Rgb::new(0, 0, 0)).with_opacity(alpha),
                        });
                    }
                    children.push(Node::group("overlay", overlay));
                }
                PopchartVariant::Dot => {
                    let r_max = spec.dot_r_max.unwrap_or_else(|| {
                        0.04 * (spec.width.min(spec.height))
                    });
                    let mut order: Vec<usize> = (0..cities.cities.len()).collect();
                    order.sort_by(|&a, &b| {
                        cities.cities[b]
                            .population
                            .partial_cmp(&cities.cities[a].population)
                            .unwrap()
                            .then_with(|| cities.cities[a].id.cmp(&cities.cities[b].id))
                    });
                    let mut overlay = Vec::new();
                    for &i in &order {
                        let city = &cities.cities[i];
                        let radius =
                            crate::techniques::encode_dot(city.population, pop_max, r_max);
                        if radius <= 0.0 {
                            continue;
                        }
                        overlay.push(Node::Circle {
                            id: Some(format!("c:{}", city.id)),
                            center: viewport.to_screen(city.location),
                            radius,
                            style: Style::filled(Rgb::new(0, 0, 0))
                                .with_opacity(0.9)
                                .with_stroke(Rgb::new(255, 255, 255), 0.6),
                        });
                    }
                    children.push(Node::group("overlay", overlay));
                }
                PopchartVariant::Heatmap => {
                    let bandwidth = spec
                        .bandwidth
                        .unwrap_or_else(|| 0.015 * data.map.bbox.diagonal());
                    let (grid, _warnings) =
                        kde_grid(cities, bandwidth, spec.resolution, &data.map.bbox)?;
                    let mut overlay = Vec::new();
                    for (rect, opacity) in heatmap_cells(&grid) {
                        // Map-space rect corners to screen space; y flips.
                        let a = viewport.to_screen(Point::new(rect.min_x, rect.max_y));
                        let b = viewport.to_screen(Point::new(rect.max_x, rect.min_y));
                        overlay.push(Node::Rect {
                            id: None,
                            x: a.x,
                            y: a.y,
                            width: b.x - a.x,
                            height: b.y - a.y,
                            style: Style::filled(Rgb::new(0, 0, 0)).with_opacity(opacity),
                        });
                    }
                    children.push(Node::group("overlay", overlay));
                }
                PopchartVariant::Prism => unreachable!(),
            }
            scene.push(Node::group("panel:1", children));
        }
    }

    // Legends: statistic classes plus the population overlay key.
    let legend_origin = Point::new(spec.width - 150.0, 14.0 + 6.0);
    scene.push(crate::scene::legend(
        &rate_breaks.scaled(spec.stat_display_scale),
        &palette,
        &spec.stat_title,
        &spec.stat_unit,
        legend_origin,
    ));
    let overlay_origin = Point::new(legend_origin.x, legend_origin.y + 160.0);
    match spec.variant {
        PopchartVariant::Dasymetric => {
            scene.push(legend_alpha(
                &spec.overlay_alpha,
                "city population",
                overlay_origin,
            ));
        }
        PopchartVariant::Dot => {
            let r_max = spec
                .dot_r_max
                .unwrap_or_else(|| 0.04 * (spec.width.min(spec.height)));
            let mut children = vec![Node::Text {
                id: None,
                at: overlay_origin,
                content: "city population".into(),
                size: 12.0,
                fill: Rgb::new(20, 20, 20),
            }];
            for (i, frac) in [1.0, 0.25, 0.0625].iter().enumerate() {
                let r = crate::techniques::encode_dot(frac * pop_max, pop_max, r_max);
                children.push(Node::Circle {
                    id: None,
                    center: Point::new(
                        overlay_origin.x + r_max,
                        overlay_origin.y + 10.0 + r_max + i as f64 * (r_max + 12.0),
                    ),
                    radius: r,
                    style: Style::filled(Rgb::new(0, 0, 0)).with_opacity(0.9),
                });
            }
            scene.push(Node::group("legend:size", children));
        }
        PopchartVariant::Heatmap => {
            scene.push(legend_ramp(
                Rgb::new(255, 255, 255),
                Rgb::new(0, 0, 0),
                "population density",
                "low",
                "high",
                overlay_origin,
            ));
        }
        PopchartVariant::Prism => {
            scene.push(legend_ramp(
                Rgb::new(255, 255, 255),
                Rgb::new(0, 0, 0),
                "city population (height)",
                "0",
                &crate::scene::format_label_number(pop_max),
                overlay_origin,
            ));
        }
    }

    Ok(scene)
}
