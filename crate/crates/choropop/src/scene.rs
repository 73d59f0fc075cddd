//! Ordered 2D scene graph with legends and the tilted projection used by the
//! extrusion renderers.
//!
//! Scenes live in output pixel coordinates: +x right, +y down, north at the
//! top of the image. Draw order equals node order. Every region- or
//! city-derived node carries its source id (`r:<id>` / `c:<id>`) so emitted
//! documents can be machine-checked.

use crate::classify::{AlphaScale, Breaks, Palette, Rgb};
use crate::geometry::{ring_signed_area, Point, Ring};

/// Fill/stroke attributes shared by drawable nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Style {
    pub fill: Option<Rgb>,
    pub fill_opacity: Option<f64>,
    pub stroke: Option<Rgb>,
    pub stroke_width: Option<f64>,
}

impl Style {
    pub fn filled(color: Rgb) -> Style {
        Style {
            fill: Some(color),
            ..Style::default()
        }
    }

    pub fn with_stroke(mut self, color: Rgb, width: f64) -> Style {
        self.stroke = Some(color);
        self.stroke_width = Some(width);
        self
    }

    pub fn with_opacity(mut self, alpha: f64) -> Style {
        self.fill_opacity = Some(alpha);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Closed subpaths, one `d` attribute.
    Path {
        id: Option<String>,
        rings: Vec<Ring>,
        style: Style,
    },
    Circle {
        id: Option<String>,
        center: Point,
        radius: f64,
        style: Style,
    },
    Rect {
        id: Option<String>,
        x: f64,
        y: f64,
        width: f64,
        height: f64,
        style: Style,
    },
    Text {
        id: Option<String>,
        at: Point,
        content: String,
        size: f64,
        fill: Rgb,
    },
    Group {
        id: Option<String>,
        opacity: Option<f64>,
        children: Vec<Node>,
    },
}

impl Node {
    pub fn group(id: impl Into<String>, children: Vec<Node>) -> Node {
        Node::Group {
            id: Some(id.into()),
            opacity: None,
            children,
        }
    }
}

/// Resolution-independent drawing tree, serialized to SVG in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub nodes: Vec<Node>,
}

impl Scene {
    pub fn new(width: f64, height: f64) -> Scene {
        Scene {
            width,
            height,
            nodes: Vec::new(),
        }
    }

    pub fn push(&mut self, node: Node) {
        self.nodes.push(node);
    }
}

/// Tilted-view parameters for extrusion rendering.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Camera {
    /// Pitch in degrees, (0, 90]; 90 is a pure plan view.
    pub pitch_deg: f64,
    /// Screen height in pixels of the maximum extruded value.
    pub height_scale: f64,
}

impl Default for Camera {
    fn default() -> Self {
        Camera {
            pitch_deg: 55.0,
            height_scale: 120.0,
        }
    }
}

impl Camera {
    /// (sin θ, cos θ) with the plan view made exact.
    pub fn trig(&self) -> (f64, f64) {
        if self.pitch_deg == 90.0 {
            (1.0, 0.0)
        } else {
            let r = self.pitch_deg.to_radians();
            (r.sin(), r.cos())
        }
    }
}

/// Projected prism: top polygon, visible side quads, and a far-to-near
/// ordering key.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismFaces {
    pub id: String,
    pub top: Vec<Ring>,
    pub sides: Vec<[Point; 4]>,
    /// Larger = farther from the viewer; equals the footprint's maximum
    /// world (northing) coordinate up to the affine screen transform.
    pub depth_key: f64,
}

/// Projects a footprint (screen pixels, +y down, north at top) extruded to
/// `value` out of `value_max`. A point at elevation z maps to
/// (x, y·sinθ − z·cosθ); side quads are emitted only for viewer-facing
/// (south) edges and only when the extrusion is nonzero.
pub fn project_prism(
    id: &str,
    footprint: &[Ring],
    value: f64,
    value_max: f64,
    camera: &Camera,
) -> PrismFaces {
    let (sin_t, cos_t) = camera.trig();
    let z = if value_max > 0.0 {
        camera.height_scale * (value / value_max)
    } else {
        0.0
    };
    let lift = |p: Point, z: f64| Point::new(p.x, p.y * sin_t - z * cos_t);

    let top: Vec<Ring> = footprint
        .iter()
        .map(|ring| ring.iter().map(|&p| lift(p, z)).collect())
        .collect();

    let mut sides = Vec::new();
    if z > 0.0 && cos_t > 0.0 {
        for ring in footprint {
            // In screen coordinates (+y down) a ring that was CCW in map
            // space appears CW; outward normals flip with the orientation.
            let ccw = ring_signed_area(ring) > 0.0;
            for w in ring.windows(2) {
                let (a, b) = (w[0], w[1]);
                let dx = b.x - a.x;
                let normal_y = if ccw { -dx } else { dx };
                if normal_y > 0.0 {
                    sides.push([lift(a, 0.0), lift(b, 0.0), lift(b, z), lift(a, z)]);
                }
            }
        }
    }

    let min_screen_y = footprint
        .iter()
        .flatten()
        .map(|p| p.y)
        .fold(f64::INFINITY, f64::min);

    PrismFaces {
        id: id.to_string(),
        top,
        sides,
        depth_key: -min_screen_y,
    }
}

/// Painter order: descending depth key (far drawn first), ties broken by id.
pub fn depth_sort(mut faces: Vec<PrismFaces>) -> Vec<PrismFaces> {
    faces.sort_by(|a, b| {
        b.depth_key
            .partial_cmp(&a.depth_key)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    });
    faces
}

/// Compact number for legend labels: up to four decimals, trailing zeros
/// stripped.
pub fn format_label_number(x: f64) -> String {
    let mut s = format!("{x:.4}");
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        s.pop();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Interval label for one class under the upper-bin tie rule: classes are
/// `< b1`, `[b_i, b_{i+1})`, …, `≥ b_last`; a single class shows the full
/// range.
pub fn class_label(breaks: &Breaks, class: usize) -> String {
    let n = format_label_number;
    if breaks.effective_k == 1 {
        return format!("[{}, {}]", n(breaks.low), n(breaks.high));
    }
    if class == 0 {
        format!("< {}", n(breaks.boundaries[0]))
    } else if class == breaks.effective_k - 1 {
        format!("\u{2265} {}", n(breaks.boundaries[class - 1]))
    } else {
        format!(
            "[{}, {})",
            n(breaks.boundaries[class - 1]),
            n(breaks.boundaries[class])
        )
    }
}

const LEGEND_SWATCH: f64 = 16.0;
const LEGEND_GAP: f64 = 6.0;
const LEGEND_FONT: f64 = 11.0;

/// Class legend: one swatch and interval label per effective class, stacked
/// top-down from `origin`.
pub fn legend(breaks: &Breaks, palette: &Palette, title: &str, unit_label: &str, origin: Point) -> Node {
    assert_eq!(
        palette.colors.len(),
        breaks.effective_k,
        "palette must carry one color per effective class"
    );
    let mut children = Vec::new();
    let full_title = if unit_label.is_empty() {
        title.to_string()
    } else {
        format!("{title} ({unit_label})")
    };
    children.push(Node::Text {
        id: None,
        at: Point::new(origin.x, origin.y),
        content: full_title,
        size: LEGEND_FONT + 1.0,
        fill: Rgb::new(20, 20, 20),
    });
    for class in 0..breaks.effective_k {
        let y = origin.y + LEGEND_GAP + (LEGEND_SWATCH + LEGEND_GAP) * class as f64 + 4.0;
        children.push(Node::Rect {
            id: None,
            x: origin.x,
            y,
            width: LEGEND_SWATCH,
            height: LEGEND_SWATCH,
            style: Style::filled(palette.colors[class]).with_stroke(Rgb::new(60, 60, 60), 0.5),
        });
        children.push(Node::Text {
            id: None,
            at: Point::new(origin.x + LEGEND_SWATCH + LEGEND_GAP, y + LEGEND_SWATCH - 4.0),
            content: class_label(breaks, class),
            size: LEGEND_FONT,
            fill: Rgb::new(20, 20, 20),
        });
    }
    Node::group("legend", children)
}

/// Opacity legend: one black swatch per level at that level's opacity.
pub fn legend_alpha(scale: &AlphaScale, title: &str, origin: Point) -> Node {
    let mut children = Vec::new();
    children.push(Node::Text {
        id: None,
        at: origin,
        content: title.to_string(),
        size: LEGEND_FONT + 1.0,
        fill: Rgb::new(20, 20, 20),
    });
    for (i, &alpha) in scale.levels.iter().enumerate() {
        let y = origin.y + LEGEND_GAP + (LEGEND_SWATCH + LEGEND_GAP) * i as f64 + 4.0;
        children.push(Node::Rect {
            id: None,
            x: origin.x,
            y,
            width: LEGEND_SWATCH,
            height: LEGEND_SWATCH,
            style: Style::filled(Rgb::new(0, 0, 0))
                .with_opacity(alpha)
                .with_stroke(Rgb::new(60, 60, 60), 0.5),
        });
        children.push(Node::Text {
            id: None,
            at: Point::new(origin.x + LEGEND_SWATCH + LEGEND_GAP, y + LEGEND_SWATCH - 4.0),
            content: format!("q{}/{}", i + 1, scale.levels.len()),
            size: LEGEND_FONT,
            fill: Rgb::new(20, 20, 20),
        });
    }
    Node::group("legend:alpha", children)
}

/// Continuous luminance ramp legend (stepped) from `low_label` to
/// `high_label`.
pub fn legend_ramp(from: Rgb, to: Rgb, title: &str, low_label: &str, high_label: &str, origin: Point) -> Node {
    const STEPS: usize = 24;
    const STEP_W: f64 = 5.0;
    let mut children = vec![Node::Text {
        id: None,
        at: origin,
        content: title.to_string(),
        size: LEGEND_FONT + 1.0,
        fill: Rgb::new(20, 20, 20),
    }];
    let y = origin.y + LEGEND_GAP + 4.0;
    for i in 0..STEPS {
        let t = i as f64 / (STEPS - 1) as f64;
        children.push(Node::Rect {
            id: None,
            x: origin.x + STEP_W * i as f64,
            y,
            width: STEP_W + 0.25,
            height: LEGEND_SWATCH,
            style: Style::filled(from.lerp(to, t)),
        });
    }
    children.push(Node::Text {
        id: None,
        at: Point::new(origin.x, y + LEGEND_SWATCH + LEGEND_FONT),
        content: low_label.to_string(),
        size: LEGEND_FONT,
        fill: Rgb::new(20, 20, 20),
    });
    children.push(Node::Text {
        id: None,
        at: Point::new(origin.x + STEP_W * STEPS as f64, y + LEGEND_SWATCH + LEGEND_FONT),
        content: high_label.to_string(),
        size: LEGEND_FONT,
        fill: Rgb::new(20, 20, 20),
    });
    Node::group("legend:ramp", children)
}
