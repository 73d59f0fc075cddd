//! Planar polygon computations shared by every map design: signed areas,
//! centroids, boundary adjacency, label anchors and affine placements.
//!
//! Map coordinates are pre-projected planar units with +y pointing north.
//! Rings are closed vertex lists (first == last). After ingestion the
//! orientation is normalized: outer rings counter-clockwise, holes clockwise,
//! so signed-area sums over a region's rings yield its net area directly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Region, RegionMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A closed polygon ring; the last vertex repeats the first.
pub type Ring = Vec<Point>;

/// Axis-aligned bounding rectangle in map units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn empty() -> Self {
        Rect {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    pub fn include(&mut self, p: Point) {
        self.min_x = self.min_x.min(p.x);
        self.min_y = self.min_y.min(p.y);
        self.max_x = self.max_x.max(p.x);
        self.max_y = self.max_y.max(p.y);
    }

    pub fn from_rings<'a>(rings: impl IntoIterator<Item = &'a Ring>) -> Self {
        let mut r = Rect::empty();
        for ring in rings {
            for &p in ring {
                r.include(p);
            }
        }
        r
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        Point::new(
            (self.min_x + self.max_x) / 2.0,
            (self.min_y + self.max_y) / 2.0,
        )
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.min_x < other.max_x
            && other.min_x < self.max_x
            && self.min_y < other.max_y
            && other.min_y < self.max_y
    }
}

/// Shoelace area of one ring: positive for counter-clockwise orientation.
pub fn ring_signed_area(ring: &[Point]) -> f64 {
    let mut sum = 0.0;
    for w in ring.windows(2) {
        sum += w[0].x * w[1].y - w[1].x * w[0].y;
    }
    sum / 2.0
}

pub fn ring_is_closed(ring: &[Point]) -> bool {
    ring.len() >= 4 && ring.first() == ring.last()
}

/// Net polygon area over normalized rings (outer CCW, holes CW).
///
/// A single ring is measured by absolute value; with several rings the
/// signed contributions are summed, which subtracts holes and adds the
/// outer rings of multi-part regions.
pub fn polygon_area(rings: &[Ring]) -> Result<f64> {
    for ring in rings {
        if !ring_is_closed(ring) {
            return Err(Error::OpenRing);
        }
    }
    if rings.len() == 1 {
        return Ok(ring_signed_area(&rings[0]).abs());
    }
    Ok(rings.iter().map(|r| ring_signed_area(r)).sum())
}

/// Area-weighted centroid of the outer rings minus holes.
pub fn centroid(rings: &[Ring]) -> Result<Point> {
    for ring in rings {
        if !ring_is_closed(ring) {
            return Err(Error::OpenRing);
        }
    }
    let single = rings.len() == 1;
    let mut area_sum = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for ring in rings {
        let mut a = 0.0;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for w in ring.windows(2) {
            let cross = w[0].x * w[1].y - w[1].x * w[0].y;
            a += cross;
            sx += (w[0].x + w[1].x) * cross;
            sy += (w[0].y + w[1].y) * cross;
        }
        let sign = if single && a < 0.0 { -1.0 } else { 1.0 };
        area_sum += sign * a / 2.0;
        cx += sign * sx / 6.0;
        cy += sign * sy / 6.0;
    }
    if area_sum.abs() < f64::EPSILON {
        return Err(Error::ZeroAreaPolygon);
    }
    Ok(Point::new(cx / area_sum, cy / area_sum))
}

/// Even-odd point-in-ring test (boundary points are implementation-defined).
pub fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Even-odd test across all rings: inside an outer ring and not in a hole.
pub fn point_in_rings(p: Point, rings: &[Ring]) -> bool {
    let mut crossings = 0usize;
    for ring in rings {
        if point_in_ring(p, ring) {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// Region neighborhood derived from shared boundary segments.
#[derive(Debug, Clone, Default)]
pub struct AdjacencyGraph {
    neighbors: BTreeMap<String, BTreeSet<String>>,
}

impl AdjacencyGraph {
    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.neighbors
            .get(id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn degree(&self, id: &str) -> usize {
        self.neighbors.get(id).map_or(0, BTreeSet::len)
    }

    pub fn is_adjacent(&self, a: &str, b: &str) -> bool {
        self.neighbors.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn regions(&self) -> impl Iterator<Item = &str> {
        self.neighbors.keys().map(String::as_str)
    }

    fn connect(&mut self, a: &str, b: &str) {
        if a == b {
            return;
        }
        self.neighbors
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string());
        self.neighbors
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string());
    }
}

impl PartialEq for AdjacencyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.neighbors == other.neighbors
    }
}

/// Default snapping tolerance for boundary matching.
pub fn default_adjacency_eps(map: &RegionMap) -> f64 {
    1e-9 * map.bbox.diagonal()
}

/// Two regions are adjacent iff they share at least one boundary segment
/// whose endpoints coincide pairwise within `eps`. Corner contact does not
/// count: a shared vertex alone produces no shared segment.
pub fn adjacency(map: &RegionMap, eps: f64) -> AdjacencyGraph {
    let snap = |v: f64| -> i64 {
        if eps > 0.0 {
            (v / eps).round() as i64
        } else {
            v.to_bits() as i64
        }
    };
    let key = |p: Point| (snap(p.x), snap(p.y));

    let mut owners: HashMap<((i64, i64), (i64, i64)), Vec<usize>> = HashMap::new();
    for (idx, region) in map.regions.iter().enumerate() {
        for ring in &region.rings {
            for w in ring.windows(2) {
                let (a, b) = (key(w[0]), key(w[1]));
                if a == b {
                    continue;
                }
                let k = if a <= b { (a, b) } else { (b, a) };
                let entry = owners.entry(k).or_default();
                if !entry.contains(&idx) {
                    entry.push(idx);
                }
            }
        }
    }

    let mut graph = AdjacencyGraph::default();
    for region in &map.regions {
        graph.neighbors.entry(region.id.clone()).or_default();
    }
    for indices in owners.values() {
        for i in 0..indices.len() {
            for j in i + 1..indices.len() {
                graph.connect(&map.regions[indices[i]].id, &map.regions[indices[j]].id);
            }
        }
    }
    graph
}

/// Anchor point for region labels and glyphs: the centroid when it falls
/// inside an outer ring (holes ignored), otherwise the midpoint of the
/// longest horizontal chord through the outer ring's vertical midpoint.
pub fn label_anchor(region: &Region) -> Point {
    let c = centroid(&region.rings).unwrap_or_else(|_| Rect::from_rings(&region.rings).center());
    let outers: Vec<&Ring> = region.outer_rings().collect();
    if outers.iter().any(|ring| point_in_ring(c, ring)) {
        return c;
    }

    // Fallback: scan the largest outer ring at its vertical midpoint.
    let ring = outers
        .iter()
        .max_by(|a, b| {
            let (aa, ab) = (ring_signed_area(a).abs(), ring_signed_area(b).abs());
            aa.partial_cmp(&ab).unwrap_or(std::cmp::Ordering::Equal)
        })
        .copied();
    let Some(ring) = ring else { return c };

    let bbox = Rect::from_rings(std::iter::once(ring));
    let y_mid = (bbox.min_y + bbox.max_y) / 2.0;
    let mut xs: Vec<f64> = Vec::new();
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.y > y_mid) != (b.y > y_mid) {
            xs.push(a.x + (y_mid - a.y) / (b.y - a.y) * (b.x - a.x));
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best: Option<(f64, f64)> = None;
    for pair in xs.chunks(2) {
        if let [x0, x1] = pair {
            let len = x1 - x0;
            if best.is_none_or(|(l, _)| len > l) {
                best = Some((len, (x0 + x1) / 2.0));
            }
        }
    }
    match best {
        Some((_, x)) => Point::new(x, y_mid),
        None => c,
    }
}

/// Uniform scale about an anchor followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePlacement {
    pub scale: f64,
    pub translation: Point,
    pub anchor: Point,
}

impl AffinePlacement {
    pub fn identity(anchor: Point) -> Self {
        AffinePlacement {
            scale: 1.0,
            translation: Point::new(0.0, 0.0),
            anchor,
        }
    }

    pub fn apply_point(&self, v: Point) -> Point {
        Point::new(
            self.anchor.x + self.scale * (v.x - self.anchor.x) + self.translation.x,
            self.anchor.y + self.scale * (v.y - self.anchor.y) + self.translation.y,
        )
    }
}

/// Maps every vertex through `p`; vertex counts and ring closure are kept.
pub fn apply_placement(rings: &[Ring], p: &AffinePlacement) -> Vec<Ring> {
    rings
        .iter()
        .map(|ring| ring.iter().map(|&v| p.apply_point(v)).collect())
        .collect()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Proper crossing test for two segments; shared endpoints do not count.
pub fn segments_properly_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Number of properly crossing segment pairs within one ring (fold count).
pub fn ring_self_intersections(ring: &[Point]) -> usize {
    let n = ring.len().saturating_sub(1);
    let mut count = 0;
    for i in 0..n {
        for j in i + 2..n {
            // Skip the wrap-around pair sharing the closing vertex.
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_properly_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                count += 1;
            }
        }
    }
    count
}

pub fn unit_square_ring(x: f64, y: f64, side: f64) -> Ring {
    vec![
        Point::new(x, y),
        Point::new(x + side, y),
        Point::new(x + side, y + side),
        Point::new(x, y + side),
        Point::new(x, y),
    ]
}
