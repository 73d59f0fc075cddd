//! Region-level bivariate map renderers: nine designs mapping a [`DataMap`]
//! onto a [`Scene`].
//!
//! Every design shares the same scaffolding: the map is fitted into the
//! viewport (y flipped so north is up), region shapes carry `r:<id>`
//! element ids, glyph marks carry `glyph:<id>`, panels are groups named
//! `panel:<n>`, and requested highlight regions get a 3px dark outline with
//! their encoding untouched. Rendering is pure: identical inputs produce
//! byte-identical SVG.

use serde::{Deserialize, Serialize};

use crate::cartogram::{
    contiguous_cartogram, noncontiguous_layout, CartogramDiagnostics, ContiguousParams,
};
use crate::classify::{alpha_for, classify, quantile_breaks, AlphaScale, Breaks, Palette, Rgb};
use crate::error::{Error, Result};
use crate::geometry::{apply_placement, label_anchor, Point, Rect, Ring};
use crate::model::{DataMap, Region};
use crate::scene::{legend, legend_alpha, legend_ramp, Camera, Node, PrismFaces, Scene, Style};
use crate::scene::{depth_sort, project_prism};

pub const DEFAULT_CLASSES: usize = 5;
const MARGIN: f64 = 14.0;
const LEGEND_WIDTH: f64 = 150.0;
const BASE_STROKE: Rgb = Rgb { r: 77, g: 77, b: 77 };
const HIGHLIGHT_STROKE: Rgb = Rgb { r: 34, g: 34, b: 34 };
const HIGHLIGHT_WIDTH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTechnique {
    Choropleth,
    Juxtaposed,
    Absolute,
    ValueByAlpha,
    Prism3d,
    Bertillon,
    Dotmap,
    Cartogram,
    Noncontiguous,
}

impl RegionTechnique {
    pub const ALL: [RegionTechnique; 9] = [
        RegionTechnique::Choropleth,
        RegionTechnique::Juxtaposed,
        RegionTechnique::Absolute,
        RegionTechnique::ValueByAlpha,
        RegionTechnique::Prism3d,
        RegionTechnique::Bertillon,
        RegionTechnique::Dotmap,
        RegionTechnique::Cartogram,
        RegionTechnique::Noncontiguous,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RegionTechnique::Choropleth => "choropleth",
            RegionTechnique::Juxtaposed => "juxtaposed",
            RegionTechnique::Absolute => "absolute",
            RegionTechnique::ValueByAlpha => "value_by_alpha",
            RegionTechnique::Prism3d => "prism3d",
            RegionTechnique::Bertillon => "bertillon",
            RegionTechnique::Dotmap => "dotmap",
            RegionTechnique::Cartogram => "cartogram",
            RegionTechnique::Noncontiguous => "noncontiguous",
        }
    }

    pub fn parse(name: &str) -> Option<RegionTechnique> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

/// Full render configuration. Fields irrelevant to a technique are ignored
/// but still validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTechniqueSpec {
    pub technique: RegionTechnique,
    pub classes: usize,
    /// Statistic class colors; defaults to the sequential scheme.
    pub palette: Option<Palette>,
    pub alpha: AlphaScale,
    pub camera: Camera,
    pub width: f64,
    pub height: f64,
    /// Glyph size cap in pixels; default 60% of the shorter bbox side of
    /// the most populous region.
    pub glyph_cap: Option<f64>,
    pub highlight: Vec<String>,
    pub contiguous: ContiguousParams,
    /// Legend title for the statistic.
    pub stat_title: String,
    /// Legend unit label, e.g. "%".
    pub stat_unit: String,
    /// Display factor applied to statistic boundaries in legends (100 for
    /// percent display); classification always uses fractions.
    pub stat_display_scale: f64,
}

impl RegionTechniqueSpec {
    pub fn new(technique: RegionTechnique) -> Self {
        RegionTechniqueSpec {
            technique,
            classes: DEFAULT_CLASSES,
            palette: None,
            alpha: AlphaScale::default_region(),
            camera: Camera::default(),
            width: 900.0,
            height: 620.0,
            glyph_cap: None,
            highlight: Vec::new(),
            contiguous: ContiguousParams::default(),
            stat_title: "statistic".into(),
            stat_unit: String::new(),
            stat_display_scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.classes < 1 {
            return Err(Error::BadClassCount { k: self.classes });
        }
        if self.width < 100.0 || self.height < 100.0 {
            return Err(Error::BadArgument {
                op: "render",
                reason: format!("viewport {}x{} too small", self.width, self.height),
            });
        }
        if let Some(cap) = self.glyph_cap {
            if cap <= 0.0 {
                return Err(Error::BadArgument {
                    op: "render",
                    reason: format!("glyph cap {cap} must be positive"),
                });
            }
        }
        self.contiguous.validate()?;
        Ok(())
    }
}

/// Layout solver report attached to cartogram renders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum LayoutDiagnostics {
    Contiguous(CartogramDiagnostics),
    NonContiguous {
        global_zoom: f64,
        regions: Vec<NonContiguousRegion>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonContiguousRegion {
    pub id: String,
    pub scale: f64,
    pub translation_x: f64,
    pub translation_y: f64,
}

/// A rendered scene plus any layout-solver diagnostics it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedMap {
    pub scene: Scene,
    pub layout: Option<LayoutDiagnostics>,
}

/// Rectangle glyph encoding: width proportional to population, height to the
/// rate, so the glyph area is proportional to population x rate.
pub fn encode_bertillon(
    population: f64,
    rate: f64,
    pop_max: f64,
    w_max: f64,
    h_max: f64,
) -> (f64, f64) {
    let width = if pop_max > 0.0 {
        w_max * population / pop_max
    } else {
        0.0
    };
    (width, h_max * rate)
}

/// Area-proportional circle: radius r_max·√(population/pop_max).
pub fn encode_dot(population: f64, pop_max: f64, r_max: f64) -> f64 {
    if pop_max <= 0.0 {
        return 0.0;
    }
    r_max * (population / pop_max).sqrt()
}

/// Map-to-screen transform: uniform scale, y flipped so north stays up.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Viewport {
    scale: f64,
    offset_x: f64,
    offset_y: f64,
    map_max_y: f64,
}

impl Viewport {
    pub(crate) fn fit(bbox: &Rect, x0: f64, y0: f64, width: f64, height: f64) -> Viewport {
        let sx = width / bbox.width();
        let sy = height / bbox.height();
        let scale = sx.min(sy);
        let used_w = bbox.width() * scale;
        let used_h = bbox.height() * scale;
        Viewport {
            scale,
            offset_x: x0 + (width - used_w) / 2.0 - bbox.min_x * scale,
            offset_y: y0 + (height - used_h) / 2.0,
            map_max_y: bbox.max_y,
        }
    }

    pub(crate) fn to_screen(&self, p: Point) -> Point {
        Point::new(
            p.x * self.scale + self.offset_x,
            (self.map_max_y - p.y) * self.scale + self.offset_y,
        )
    }

    pub(crate) fn ring(&self, ring: &Ring) -> Ring {
        ring.iter().map(|&p| self.to_screen(p)).collect()
    }

    pub(crate) fn rings(&self, rings: &[Ring]) -> Vec<Ring> {
        rings.iter().map(|r| self.ring(r)).collect()
    }

    pub(crate) fn length(&self, d: f64) -> f64 {
        d * self.scale
    }
}

fn region_style(fill: Rgb, highlighted: bool) -> Style {
    if highlighted {
        Style::filled(fill).with_stroke(HIGHLIGHT_STROKE, HIGHLIGHT_WIDTH)
    } else {
        Style::filled(fill).with_stroke(BASE_STROKE, 0.6)
    }
}

fn region_node(region: &Region, viewport: &Viewport, style: Style) -> Node {
    Node::Path {
        id: Some(format!("r:{}", region.id)),
        rings: viewport.rings(&region.rings),
        style,
    }
}

struct Frame<'a> {
    data: &'a DataMap,
    spec: &'a RegionTechniqueSpec,
    rate_breaks: Breaks,
    palette: Palette,
}

impl<'a> Frame<'a> {
    fn build(data: &'a DataMap, spec: &'a RegionTechniqueSpec) -> Result<Frame<'a>> {
        let rate_breaks = quantile_breaks(data.rates(), spec.classes)?;
        let palette = spec
            .palette
            .clone()
            .unwrap_or_else(|| Palette::sequential(spec.classes))
            .fitted(rate_breaks.effective_k)?;
        Ok(Frame {
            data,
            spec,
            rate_breaks,
            palette,
        })
    }

    fn rate_color(&self, index: usize) -> Rgb {
        self.palette.colors[classify(self.data.rates()[index], &self.rate_breaks)]
    }

    fn highlighted(&self, id: &str) -> bool {
        self.spec.highlight.iter().any(|h| h == id)
    }

    fn stat_legend(&self, origin: Point) -> Node {
        legend(
            &self.rate_breaks.scaled(self.spec.stat_display_scale),
            &self.palette,
            &self.spec.stat_title,
            &self.spec.stat_unit,
            origin,
        )
    }

    /// Default glyph cap: 60% of the shorter bbox side (in pixels) of the
    /// most populous region.
    fn glyph_cap(&self, viewport: &Viewport) -> f64 {
        if let Some(cap) = self.spec.glyph_cap {
            return cap;
        }
        let populations = self.data.populations();
        let max_idx = (0..populations.len())
            .max_by(|&a, &b| populations[a].partial_cmp(&populations[b]).unwrap())
            .unwrap_or(0);
        let bbox = self.data.map.regions[max_idx].bbox();
        0.6 * viewport.length(bbox.width().min(bbox.height()))
    }

    /// Region indices in descending population order (small glyphs drawn
    /// last, landing on top).
    fn descending_population(&self) -> Vec<usize> {
        let populations = self.data.populations();
        let mut order: Vec<usize> = (0..populations.len()).collect();
        order.sort_by(|&a, &b| {
            populations[b]
                .partial_cmp(&populations[a])
                .unwrap()
                .then_with(|| self.data.map.regions[a].id.cmp(&self.data.map.regions[b].id))
        });
        order
    }
}

/// Renders one region-level design. See the module docs for the shared
/// element-id scheme.
pub fn render_region_map(data: &DataMap, spec: &RegionTechniqueSpec) -> Result<RenderedMap> {
    spec.validate()?;
    let frame = Frame::build(data, spec)?;
    let mut scene = Scene::new(spec.width, spec.height);
    let mut layout = None;

    match spec.technique {
        RegionTechnique::Choropleth => {
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let nodes = choropleth_nodes(&frame, &viewport);
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
        }
        RegionTechnique::Juxtaposed => {
            let half = (spec.width - LEGEND_WIDTH - 3.0 * MARGIN) / 2.0;
            let map_h = spec.height - 2.0 * MARGIN;
            let left = Viewport::fit(&data.map.bbox, MARGIN, MARGIN, half, map_h);
            let right =
                Viewport::fit(&data.map.bbox, 2.0 * MARGIN + half, MARGIN, half, map_h);

            scene.push(Node::group("panel:1", choropleth_nodes(&frame, &left)));

            let pop_max = data.max_population();
            let mut nodes = Vec::new();
            for (i, region) in data.map.regions.iter().enumerate() {
                let t = if pop_max > 0.0 {
                    data.populations()[i] / pop_max
                } else {
                    0.0
                };
                let g = (255.0 * (1.0 - t)).round() as u8;
                nodes.push(region_node(
                    region,
                    &right,
                    region_style(Rgb::new(g, g, g), frame.highlighted(&region.id)),
                ));
            }
            scene.push(Node::group("panel:2", nodes));

            let origin = legend_origin(spec);
            scene.push(frame.stat_legend(origin));
            scene.push(legend_ramp(
                Rgb::new(255, 255, 255),
                Rgb::new(0, 0, 0),
                "population",
                "0",
                &crate::scene::format_label_number(pop_max),
                Point::new(origin.x, origin.y + 160.0),
            ));
        }
        RegionTechnique::Absolute => {
            // Single explicit value: population x rate, quantile-classed
            // with the same k as the base design.
            let values: Vec<f64> = data
                .populations()
                .iter()
                .zip(data.rates())
                .map(|(p, r)| p * r)
                .collect();
            let breaks = quantile_breaks(&values, spec.classes)?;
            let palette = spec
                .palette
                .clone()
                .unwrap_or_else(|| Palette::sequential(spec.classes))
                .fitted(breaks.effective_k)?;
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let mut nodes = Vec::new();
            for (i, region) in data.map.regions.iter().enumerate() {
                let fill = palette.colors[classify(values[i], &breaks)];
                nodes.push(region_node(
                    region,
                    &viewport,
                    region_style(fill, frame.highlighted(&region.id)),
                ));
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(legend(
                &breaks,
                &palette,
                "absolute count",
                "persons",
                legend_origin(spec),
            ));
        }
        RegionTechnique::ValueByAlpha => {
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let populations = data.populations();
            let mut nodes = Vec::new();
            for (i, region) in data.map.regions.iter().enumerate() {
                let alpha = alpha_for(populations[i], populations, &spec.alpha)?;
                let style =
                    region_style(frame.rate_color(i), frame.highlighted(&region.id))
                        .with_opacity(alpha);
                nodes.push(region_node(region, &viewport, style));
            }
            scene.push(Node::group("panel:1", nodes));
            let origin = legend_origin(spec);
            scene.push(frame.stat_legend(origin));
            scene.push(legend_alpha(
                &spec.alpha,
                "population",
                Point::new(origin.x, origin.y + 160.0),
            ));
        }
        RegionTechnique::Prism3d => {
            let headroom = prism_headroom(&spec.camera);
            let viewport = map_viewport(&data.map.bbox, spec, headroom);
            let populations = data.populations();
            let pop_max = data.max_population();
            let faces: Vec<PrismFaces> = data
                .map
                .regions
                .iter()
                .enumerate()
                .map(|(i, region)| {
                    project_prism(
                        &region.id,
                        &viewport.rings(&region.rings),
                        populations[i],
                        pop_max,
                        &spec.camera,
                    )
                })
                .collect();
            let mut nodes = Vec::new();
            for face in depth_sort(faces) {
                let index = data.map.index_of(&face.id).expect("face id from map");
                let top_color = frame.rate_color(index);
                let side_color = top_color.scaled(0.7);
                for quad in &face.sides {
                    nodes.push(Node::Path {
                        id: None,
                        rings: vec![vec![quad[0], quad[1], quad[2], quad[3], quad[0]]],
                        style: Style::filled(side_color).with_stroke(side_color.scaled(0.85), 0.4),
                    });
                }
                nodes.push(Node::Path {
                    id: Some(format!("r:{}", face.id)),
                    rings: face.top.clone(),
                    style: region_style(top_color, frame.highlighted(&face.id)),
                });
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
        }
        RegionTechnique::Bertillon => {
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let mut nodes = choropleth_nodes(&frame, &viewport);
            let cap = frame.glyph_cap(&viewport);
            let pop_max = data.max_population();
            for &i in &frame.descending_population() {
                let region = &data.map.regions[i];
                let (w, h) = encode_bertillon(
                    data.populations()[i],
                    data.rates()[i],
                    pop_max,
                    cap,
                    cap,
                );
                if w <= 0.0 || h <= 0.0 {
                    continue;
                }
                let anchor = viewport.to_screen(label_anchor(region));
                nodes.push(Node::Rect {
                    id: Some(format!("glyph:{}", region.id)),
                    x: anchor.x - w / 2.0,
                    y: anchor.y - h / 2.0,
                    width: w,
                    height: h,
                    style: Style::filled(frame.rate_color(i)).with_stroke(Rgb::new(0, 0, 0), 1.0),
                });
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
        }
        RegionTechnique::Dotmap => {
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let mut nodes = choropleth_nodes(&frame, &viewport);
            let r_max = frame.glyph_cap(&viewport);
            let pop_max = data.max_population();
            for &i in &frame.descending_population() {
                let region = &data.map.regions[i];
                let radius = encode_dot(data.populations()[i], pop_max, r_max);
                if radius <= 0.0 {
                    continue;
                }
                nodes.push(Node::Circle {
                    id: Some(format!("glyph:{}", region.id)),
                    center: viewport.to_screen(label_anchor(region)),
                    radius,
                    style: Style::filled(Rgb::new(26, 26, 26))
                        .with_opacity(0.85)
                        .with_stroke(Rgb::new(255, 255, 255), 0.8),
                });
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
        }
        RegionTechnique::Cartogram => {
            let result = contiguous_cartogram(data, &spec.contiguous)?;
            let viewport = map_viewport(&result.map.bbox, spec, 0.0);
            let mut nodes = Vec::new();
            for (i, region) in result.map.regions.iter().enumerate() {
                nodes.push(region_node(
                    region,
                    &viewport,
                    region_style(frame.rate_color(i), frame.highlighted(&region.id)),
                ));
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
            layout = Some(LayoutDiagnostics::Contiguous(result.diagnostics));
        }
        RegionTechnique::Noncontiguous => {
            let nc = noncontiguous_layout(data)?;
            let viewport = map_viewport(&data.map.bbox, spec, 0.0);
            let mut nodes = Vec::new();
            let mut basemap = Vec::new();
            for region in &data.map.regions {
                basemap.push(Node::Path {
                    id: None,
                    rings: viewport.rings(&region.rings),
                    style: Style::filled(Rgb::new(242, 242, 242))
                        .with_stroke(Rgb::new(204, 204, 204), 0.5),
                });
            }
            nodes.push(Node::group("basemap", basemap));

            // Big scaled-up regions first so small ones stay visible.
            let mut order: Vec<usize> = (0..data.map.len()).collect();
            order.sort_by(|&a, &b| {
                nc.placements[b]
                    .scale
                    .partial_cmp(&nc.placements[a].scale)
                    .unwrap()
                    .then_with(|| data.map.regions[a].id.cmp(&data.map.regions[b].id))
            });
            for &i in &order {
                let region = &data.map.regions[i];
                let placed = apply_placement(&region.rings, &nc.placements[i]);
                nodes.push(Node::Path {
                    id: Some(format!("r:{}", region.id)),
                    rings: viewport.rings(&placed),
                    style: region_style(frame.rate_color(i), frame.highlighted(&region.id)),
                });
            }
            scene.push(Node::group("panel:1", nodes));
            scene.push(frame.stat_legend(legend_origin(spec)));
            layout = Some(LayoutDiagnostics::NonContiguous {
                global_zoom: nc.global_zoom,
                regions: data
                    .map
                    .regions
                    .iter()
                    .zip(&nc.placements)
                    .map(|(r, p)| NonContiguousRegion {
                        id: r.id.clone(),
                        scale: p.scale,
                        translation_x: p.translation.x,
                        translation_y: p.translation.y,
                    })
                    .collect(),
            });
        }
    }

    Ok(RenderedMap { scene, layout })
}

fn choropleth_nodes(frame: &Frame, viewport: &Viewport) -> Vec<Node> {
    frame
        .data
        .map
        .regions
        .iter()
        .enumerate()
        .map(|(i, region)| {
            region_node(
                region,
                viewport,
                region_style(frame.rate_color(i), frame.highlighted(&region.id)),
            )
        })
        .collect()
}

fn prism_headroom(camera: &Camera) -> f64 {
    let (_, cos_t) = camera.trig();
    camera.height_scale * cos_t
}

fn map_viewport(bbox: &Rect, spec: &RegionTechniqueSpec, headroom: f64) -> Viewport {
    Viewport::fit(
        bbox,
        MARGIN,
        MARGIN + headroom,
        spec.width - LEGEND_WIDTH - 2.0 * MARGIN,
        spec.height - 2.0 * MARGIN - headroom,
    )
}

fn legend_origin(spec: &RegionTechniqueSpec) -> Point {
    Point::new(spec.width - LEGEND_WIDTH, MARGIN + 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify;
    use crate::geometry::unit_square_ring;
    use crate::model::{join_data, DataRow, RegionMap, StatisticUnit};
    use crate::svg::{elements_with_id_prefix, scan_svg, write_svg};
    use approx::assert_relative_eq;

    fn fixture(n: usize) -> DataMap {
        let cols = 5;
        let mut regions = Vec::new();
        let mut rows = Vec::new();
        for i in 0..n {
            let (c, r) = (i % cols, i / cols);
            let id = format!("r{i:02}");
            regions.push(Region {
                id: id.clone(),
                name: id.clone(),
                rings: vec![unit_square_ring(c as f64 * 1.0, r as f64 * 1.0, 1.0)],
            });
            rows.push(DataRow {
                id,
                name: String::new(),
                population: 1000.0 + (i as f64 * 137.0) % 9000.0,
                statistic: 0.02 + 0.013 * (i as f64 % 7.0),
            });
        }
        let map = RegionMap::new(regions, "").unwrap();
        join_data(map, &rows, StatisticUnit::Fraction).unwrap()
    }

    fn render(technique: RegionTechnique, data: &DataMap) -> (Vec<u8>, RegionTechniqueSpec) {
        let spec = RegionTechniqueSpec::new(technique);
        let rendered = render_region_map(data, &spec).unwrap();
        (write_svg(&rendered.scene), spec)
    }

    #[test]
    fn choropleth_fills_match_classify_oracle() {
        let data = fixture(10);
        let (svg, spec) = render(RegionTechnique::Choropleth, &data);
        let elements = scan_svg(&svg);
        let breaks = quantile_breaks(data.rates(), spec.classes).unwrap();
        let palette = Palette::sequential(spec.classes)
            .fitted(breaks.effective_k)
            .unwrap();
        let mut seen = 0;
        for (id, el) in elements_with_id_prefix(&elements, "r:", Some("panel:1")) {
            let rate = data.rate_of(id).unwrap();
            let expect = palette.colors[classify::classify(rate, &breaks)].hex();
            assert_eq!(el.attr("fill"), Some(expect.as_str()), "region {id}");
            seen += 1;
        }
        assert_eq!(seen, 10);
    }

    #[test]
    fn juxtaposed_has_two_full_panels() {
        let data = fixture(10);
        let (svg, _) = render(RegionTechnique::Juxtaposed, &data);
        let elements = scan_svg(&svg);
        for panel in ["panel:1", "panel:2"] {
            let ids: Vec<&str> = elements_with_id_prefix(&elements, "r:", Some(panel))
                .map(|(id, _)| id)
                .collect();
            assert_eq!(ids.len(), 10, "{panel}");
        }
        // Population panel is an unclassed white-to-black ramp.
        let (_, el) = elements_with_id_prefix(&elements, "r:", Some("panel:2"))
            .next()
            .unwrap();
        assert!(el.attr("fill").unwrap().starts_with('#'));
    }

    #[test]
    fn absolute_classes_follow_products() {
        // Two regions: products 5 and 10 with k=2 straddle the boundary.
        let map = RegionMap::new(
            vec![
                Region {
                    id: "A".into(),
                    name: "A".into(),
                    rings: vec![unit_square_ring(0.0, 0.0, 1.0)],
                },
                Region {
                    id: "B".into(),
                    name: "B".into(),
                    rings: vec![unit_square_ring(1.0, 0.0, 1.0)],
                },
            ],
            "",
        )
        .unwrap();
        let data = join_data(
            map,
            &[
                DataRow {
                    id: "A".into(),
                    name: "A".into(),
                    population: 10.0,
                    statistic: 0.5,
                },
                DataRow {
                    id: "B".into(),
                    name: "B".into(),
                    population: 100.0,
                    statistic: 0.1,
                },
            ],
            StatisticUnit::Fraction,
        )
        .unwrap();
        let mut spec = RegionTechniqueSpec::new(RegionTechnique::Absolute);
        spec.classes = 2;
        let rendered = render_region_map(&data, &spec).unwrap();
        let elements = scan_svg(&write_svg(&rendered.scene));

        let products = [5.0, 10.0];
        let breaks = quantile_breaks(&products, 2).unwrap();
        let palette = Palette::sequential(2).fitted(breaks.effective_k).unwrap();
        assert_eq!(classify::classify(5.0, &breaks), 0);
        assert_eq!(classify::classify(10.0, &breaks), 1);
        for (id, el) in elements_with_id_prefix(&elements, "r:", Some("panel:1")) {
            let product = data.population_of(id).unwrap() * data.rate_of(id).unwrap();
            let expect = palette.colors[classify::classify(product, &breaks)].hex();
            assert_eq!(el.attr("fill"), Some(expect.as_str()));
        }
    }

    #[test]
    fn value_by_alpha_opacity_tracks_population_quantiles() {
        let data = fixture(9);
        let (svg, spec) = render(RegionTechnique::ValueByAlpha, &data);
        let elements = scan_svg(&svg);
        for (id, el) in elements_with_id_prefix(&elements, "r:", Some("panel:1")) {
            let expect = alpha_for(
                data.population_of(id).unwrap(),
                data.populations(),
                &spec.alpha,
            )
            .unwrap();
            assert_relative_eq!(el.num("fill-opacity").unwrap(), expect, epsilon = 1e-3);
        }
    }

    #[test]
    fn prism_heights_linear_in_population() {
        // Three identical square footprints on one row: their projected
        // bases share the same y extent, so top-face y minima differ by
        // exactly the extrusion offsets z·cosθ.
        let map = RegionMap::new(
            (0..3)
                .map(|i| Region {
                    id: format!("p{i}"),
                    name: format!("p{i}"),
                    rings: vec![unit_square_ring(i as f64 * 2.0, 0.0, 1.0)],
                })
                .collect(),
            "",
        )
        .unwrap();
        let pops = [100.0, 50.0, 0.0];
        let rows: Vec<DataRow> = (0..3)
            .map(|i| DataRow {
                id: format!("p{i}"),
                name: String::new(),
                population: pops[i],
                statistic: 0.5,
            })
            .collect();
        let data = join_data(map, &rows, StatisticUnit::Fraction).unwrap();
        let (svg, spec) = render(RegionTechnique::Prism3d, &data);
        let elements = scan_svg(&svg);
        let (_, cos_t) = spec.camera.trig();

        let min_y = |id: &str| -> f64 {
            let (_, el) = elements_with_id_prefix(&elements, "r:", Some("panel:1"))
                .find(|(eid, _)| *eid == id)
                .unwrap();
            el.path_points()
                .iter()
                .map(|&(_, y)| y)
                .fold(f64::INFINITY, f64::min)
        };

        // Max-population region rises by the full height scale.
        let full = min_y("p2") - min_y("p0");
        assert_relative_eq!(full, spec.camera.height_scale * cos_t, epsilon = 2e-3);
        // Half the population, half the offset.
        let half = min_y("p2") - min_y("p1");
        assert_relative_eq!(half, 0.5 * spec.camera.height_scale * cos_t, epsilon = 2e-3);
        // Zero population stays flat: plan position with no side quads.
        assert_relative_eq!(full / half, 2.0, epsilon = 1e-2);
    }

    #[test]
    fn prism_plan_view_matches_choropleth_geometry() {
        let data = fixture(6);
        let mut spec = RegionTechniqueSpec::new(RegionTechnique::Prism3d);
        spec.camera = Camera {
            pitch_deg: 90.0,
            height_scale: 120.0,
        };
        let rendered = render_region_map(&data, &spec).unwrap();
        let elements = scan_svg(&write_svg(&rendered.scene));

        let flat = render_region_map(&data, &RegionTechniqueSpec::new(RegionTechnique::Choropleth))
            .unwrap();
        let flat_elements = scan_svg(&write_svg(&flat.scene));

        for (id, el) in elements_with_id_prefix(&elements, "r:", Some("panel:1")) {
            let (_, flat_el) = elements_with_id_prefix(&flat_elements, "r:", Some("panel:1"))
                .find(|(fid, _)| *fid == id)
                .unwrap();
            assert_eq!(el.path_points(), flat_el.path_points(), "region {id}");
        }
    }

    #[test]
    fn bertillon_ratios() {
        let data = fixture(10);
        let (svg, _) = render(RegionTechnique::Bertillon, &data);
        let elements = scan_svg(&svg);
        let glyphs: Vec<(&str, f64, f64)> =
            elements_with_id_prefix(&elements, "glyph:", Some("panel:1"))
                .map(|(id, el)| (id, el.num("width").unwrap(), el.num("height").unwrap()))
                .collect();
        assert_eq!(glyphs.len(), 10);
        let (id0, w0, h0) = glyphs[0];
        let p0 = data.population_of(id0).unwrap();
        let a0 = p0 * data.rate_of(id0).unwrap();
        for &(id, w, h) in &glyphs[1..] {
            let p = data.population_of(id).unwrap();
            let a = p * data.rate_of(id).unwrap();
            assert_relative_eq!(w / w0, p / p0, max_relative = 1e-2);
            assert_relative_eq!((w * h) / (w0 * h0), a / a0, max_relative = 1e-2);
        }
    }

    #[test]
    fn dot_radii_follow_sqrt_law() {
        let data = fixture(10);
        let (svg, _) = render(RegionTechnique::Dotmap, &data);
        let elements = scan_svg(&svg);
        // Every dot must reconstruct the same radius cap under the √ law.
        let caps: Vec<f64> = elements_with_id_prefix(&elements, "glyph:", Some("panel:1"))
            .map(|(id, el)| {
                let pop = data.population_of(id).unwrap();
                el.num("r").unwrap() / (pop / data.max_population()).sqrt()
            })
            .collect();
        assert_eq!(caps.len(), 10);
        for cap in &caps[1..] {
            assert_relative_eq!(*cap, caps[0], max_relative = 1e-2);
        }
    }

    #[test]
    fn cartogram_scene_uses_solver_geometry() {
        let data = fixture(9);
        let spec = RegionTechniqueSpec::new(RegionTechnique::Cartogram);
        let rendered = render_region_map(&data, &spec).unwrap();
        let Some(LayoutDiagnostics::Contiguous(diag)) = &rendered.layout else {
            panic!("missing diagnostics");
        };
        let elements = scan_svg(&write_svg(&rendered.scene));
        // Compare screen-space polygon area against the solver's map-space
        // area scaled by the viewport factor (recovered from the totals).
        let mut screen_areas: Vec<(String, f64)> = Vec::new();
        for (id, el) in elements_with_id_prefix(&elements, "r:", Some("panel:1")) {
            let rings = el.path_rings();
            let mut area = 0.0;
            for ring in rings {
                let mut sum = 0.0;
                for i in 0..ring.len() {
                    let (x0, y0) = ring[i];
                    let (x1, y1) = ring[(i + 1) % ring.len()];
                    sum += x0 * y1 - x1 * y0;
                }
                area += (sum / 2.0).abs();
            }
            screen_areas.push((id.to_string(), area));
        }
        let total_screen: f64 = screen_areas.iter().map(|(_, a)| a).sum();
        let total_solver: f64 = diag.final_areas.iter().map(|(_, a)| a).sum();
        for (id, screen) in &screen_areas {
            let solver = diag
                .final_areas
                .iter()
                .find(|(sid, _)| sid == id)
                .map(|(_, a)| *a)
                .unwrap();
            assert_relative_eq!(
                screen / total_screen,
                solver / total_solver,
                max_relative = 1e-2
            );
        }
    }

    #[test]
    fn noncontiguous_backdrop_and_scaled_shapes() {
        let data = fixture(9);
        let rendered =
            render_region_map(&data, &RegionTechniqueSpec::new(RegionTechnique::Noncontiguous))
                .unwrap();
        let elements = scan_svg(&write_svg(&rendered.scene));
        let scaled: Vec<&str> = elements_with_id_prefix(&elements, "r:", Some("panel:1"))
            .map(|(id, _)| id)
            .collect();
        assert_eq!(scaled.len(), 9);
        assert!(elements.iter().any(|e| e.attr("id") == Some("basemap")));
        assert!(matches!(
            rendered.layout,
            Some(LayoutDiagnostics::NonContiguous { .. })
        ));
    }

    #[test]
    fn highlight_adds_outline_without_fill_change() {
        let data = fixture(10);
        let mut spec = RegionTechniqueSpec::new(RegionTechnique::Choropleth);
        spec.highlight = vec!["r03".into()];
        let rendered = render_region_map(&data, &spec).unwrap();
        let elements = scan_svg(&write_svg(&rendered.scene));
        let (_, el) = elements_with_id_prefix(&elements, "r:", Some("panel:1"))
            .find(|(id, _)| *id == "r03")
            .unwrap();
        assert_eq!(el.attr("stroke"), Some("#222222"));
        assert_eq!(el.num("stroke-width"), Some(3.0));

        let plain = render_region_map(&data, &RegionTechniqueSpec::new(RegionTechnique::Choropleth))
            .unwrap();
        let plain_elements = scan_svg(&write_svg(&plain.scene));
        let (_, plain_el) = elements_with_id_prefix(&plain_elements, "r:", Some("panel:1"))
            .find(|(id, _)| *id == "r03")
            .unwrap();
        assert_eq!(el.attr("fill"), plain_el.attr("fill"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let data = fixture(12);
        for technique in RegionTechnique::ALL {
            let (a, _) = render(technique, &data);
            let (b, _) = render(technique, &data);
            assert_eq!(a, b, "{}", technique.name());
        }
    }

    #[test]
    fn encode_helpers() {
        assert_eq!(encode_bertillon(100.0, 1.0, 100.0, 50.0, 100.0), (50.0, 100.0));
        let (w_half, h) = encode_bertillon(50.0, 1.0, 100.0, 50.0, 100.0);
        assert_relative_eq!(w_half, 25.0);
        assert_relative_eq!(h, 100.0);
        let (w, h) = encode_bertillon(1000.0, 0.10, 10_000.0, 50.0, 100.0);
        assert_relative_eq!(w, 5.0);
        assert_relative_eq!(h, 10.0);
        assert_relative_eq!(w * h, 50.0);

        assert_relative_eq!(encode_dot(100.0, 100.0, 30.0), 30.0);
        assert_relative_eq!(encode_dot(25.0, 100.0, 30.0), 15.0);
        assert_eq!(encode_dot(0.0, 100.0, 30.0), 0.0);
    }

    #[test]
    fn invalid_class_count_rejected() {
        let data = fixture(4);
        let mut spec = RegionTechniqueSpec::new(RegionTechnique::Choropleth);
        spec.classes = 0;
        assert!(matches!(
            render_region_map(&data, &spec),
            Err(Error::BadClassCount { .. })
        ));
    }
}
