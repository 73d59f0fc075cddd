//! Deterministic SVG 1.1 serialization of scenes, plus a small scanner that
//! reads elements back out of emitted documents for verification.
//!
//! Coordinates are written with exactly three fractional digits so identical
//! scenes serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::scene::{Node, Scene, Style};

/// Fixed three-decimal coordinate formatting; negative zero is normalized.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

fn style_attrs(style: &Style, out: &mut String) {
    match style.fill {
        Some(c) => {
            let _ = write!(out, r#" fill="{}""#, c.hex());
        }
        None => out.push_str(r#" fill="none""#),
    }
    if let Some(a) = style.fill_opacity {
        let _ = write!(out, r#" fill-opacity="{}""#, fmt3(a));
    }
    if let Some(c) = style.stroke {
        let _ = write!(out, r#" stroke="{}""#, c.hex());
    }
    if let Some(w) = style.stroke_width {
        let _ = write!(out, r#" stroke-width="{}""#, fmt3(w));
    }
}

fn id_attr(id: &Option<String>, out: &mut String) {
    if let Some(id) = id {
        let _ = write!(out, r#" id="{}""#, escape(id));
    }
}

fn write_node(node: &Node, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match node {
        Node::Path { id, rings, style } => {
            let mut d = String::new();
            for ring in rings {
                if ring.is_empty() {
                    continue;
                }
                let _ = write!(d, "M {} {}", fmt3(ring[0].x), fmt3(ring[0].y));
                for p in &ring[1..ring.len().saturating_sub(1)] {
                    let _ = write!(d, " L {} {}", fmt3(p.x), fmt3(p.y));
                }
                d.push_str(" Z");
            }
            out.push_str(&pad);
            out.push_str("<path");
            id_attr(id, out);
            let _ = write!(out, r#" d="{d}""#);
            style_attrs(style, out);
            out.push_str("/>\n");
        }
        Node::Circle {
            id,
            center,
            radius,
            style,
        } => {
            out.push_str(&pad);
            out.push_str("<circle");
            id_attr(id, out);
            let _ = write!(
                out,
                r#" cx="{}" cy="{}" r="{}""#,
                fmt3(center.x),
                fmt3(center.y),
                fmt3(*radius)
            );
            style_attrs(style, out);
            out.push_str("/>\n");
        }
        Node::Rect {
            id,
            x,
            y,
            width,
            height,
            style,
        } => {
            out.push_str(&pad);
            out.push_str("<rect");
            id_attr(id, out);
            let _ = write!(
                out,
                r#" x="{}" y="{}" width="{}" height="{}""#,
                fmt3(*x),
                fmt3(*y),
                fmt3(*width),
                fmt3(*height)
            );
            style_attrs(style, out);
            out.push_str("/>\n");
        }
        Node::Text {
            id,
            at,
            content,
            size,
            fill,
        } => {
            out.push_str(&pad);
            out.push_str("<text");
            id_attr(id, out);
            let _ = write!(
                out,
                r#" x="{}" y="{}" font-size="{}" font-family="sans-serif" fill="{}">{}</text>"#,
                fmt3(at.x),
                fmt3(at.y),
                fmt3(*size),
                fill.hex(),
                escape(content)
            );
            out.push('\n');
        }
        Node::Group {
            id,
            opacity,
            children,
        } => {
            out.push_str(&pad);
            out.push_str("<g");
            id_attr(id, out);
            if let Some(o) = opacity {
                let _ = write!(out, r#" opacity="{}""#, fmt3(*o));
            }
            out.push_str(">\n");
            for child in children {
                write_node(child, indent + 1, out);
            }
            out.push_str(&pad);
            out.push_str("</g>\n");
        }
    }
}

/// Serializes a scene to a well-formed SVG 1.1 document. Node order is
/// preserved and the output is byte-identical for identical scenes.
pub fn write_svg(scene: &Scene) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt3(scene.width),
        fmt3(scene.height),
        fmt3(scene.width),
        fmt3(scene.height)
    );
    for node in &scene.nodes {
        write_node(node, 1, &mut out);
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

/// One element read back from an emitted document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScannedElement {
    pub tag: String,
    pub attrs: BTreeMap<String, String>,
    /// Ids of the enclosing groups, outermost first.
    pub group_path: Vec<String>,
}

impl ScannedElement {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).map(String::as_str)
    }

    pub fn num(&self, name: &str) -> Option<f64> {
        self.attr(name).and_then(|v| v.parse().ok())
    }

    pub fn in_group(&self, id: &str) -> bool {
        self.group_path.iter().any(|g| g == id)
    }

    /// All "x y" coordinate pairs of a path's `d` attribute.
    pub fn path_points(&self) -> Vec<(f64, f64)> {
        let Some(d) = self.attr("d") else {
            return Vec::new();
        };
        let mut points = Vec::new();
        let mut nums = Vec::new();
        for token in d.split_whitespace() {
            if let Ok(v) = token.parse::<f64>() {
                nums.push(v);
            }
        }
        for pair in nums.chunks(2) {
            if let [x, y] = pair {
                points.push((*x, *y));
            }
        }
        points
    }

    /// Closed subpaths of the `d` attribute (split at `M`).
    pub fn path_rings(&self) -> Vec<Vec<(f64, f64)>> {
        let Some(d) = self.attr("d") else {
            return Vec::new();
        };
        let mut rings: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut pending: Option<f64> = None;
        for token in d.split_whitespace() {
            match token {
                "M" => rings.push(Vec::new()),
                "L" | "Z" => {}
                other => {
                    if let Ok(v) = other.parse::<f64>() {
                        match pending.take() {
                            Some(x) => {
                                if let Some(ring) = rings.last_mut() {
                                    ring.push((x, v));
                                }
                            }
                            None => pending = Some(v),
                        }
                    }
                }
            }
        }
        rings
    }
}

/// Scans an emitted SVG document into its element list. This is a reader for
/// the subset this crate writes (attribute-quoted, one element per line) and
/// is kept independent of the writer's internal state so round-trip checks
/// stay meaningful.
pub fn scan_svg(bytes: &[u8]) -> Vec<ScannedElement> {
    let text = String::from_utf8_lossy(bytes);
    let mut elements = Vec::new();
    let mut group_stack: Vec<String> = Vec::new();

    let mut rest = text.as_ref();
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        if let Some(end) = rest.find('>') {
            let raw = &rest[..end];
            rest = &rest[end + 1..];
            if raw.starts_with('?') || raw.starts_with('!') {
                continue;
            }
            if let Some(closed) = raw.strip_prefix('/') {
                if closed.trim() == "g" {
                    group_stack.pop();
                }
                continue;
            }
            let body = raw.strip_suffix('/').unwrap_or(raw);
            let tag_end = body.find(char::is_whitespace).unwrap_or(body.len());
            let tag = body[..tag_end].to_string();
            let mut attrs = BTreeMap::new();
            let mut attr_rest = &body[tag_end..];
            while let Some(eq) = attr_rest.find("=\"") {
                let name = attr_rest[..eq].trim().to_string();
                let after = &attr_rest[eq + 2..];
                let Some(quote) = after.find('"') else { break };
                attrs.insert(name, after[..quote].to_string());
                attr_rest = &after[quote + 1..];
            }
            if tag == "g" {
                let id = attrs.get("id").cloned().unwrap_or_default();
                elements.push(ScannedElement {
                    tag: tag.clone(),
                    attrs,
                    group_path: group_stack.clone(),
                });
                group_stack.push(id);
            } else {
                elements.push(ScannedElement {
                    tag,
                    attrs,
                    group_path: group_stack.clone(),
                });
            }
        } else {
            break;
        }
    }
    elements
}

/// Elements with an id carrying the given prefix (e.g. `r:`), scoped to an
/// optional enclosing group.
pub fn elements_with_id_prefix<'a>(
    elements: &'a [ScannedElement],
    prefix: &'a str,
    group: Option<&'a str>,
) -> impl Iterator<Item = (&'a str, &'a ScannedElement)> {
    elements.iter().filter_map(move |el| {
        let id = el.attr("id")?;
        let bare = id.strip_prefix(prefix)?;
        if let Some(g) = group {
            if !el.in_group(g) {
                return None;
            }
        }
        Some((bare, el))
    })
}
