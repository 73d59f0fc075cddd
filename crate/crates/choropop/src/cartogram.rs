//! Cartogram layout solvers: contiguous density equalization (rubber-sheet
//! iteration) and the non-contiguous shrink-factor layout.
//!
//! Both treat the region population as the sizing variable. Zero-population
//! regions are floored to 0.1% of the maximum region population so the
//! formulas stay defined. Both solvers are deterministic: identical inputs
//! yield bit-identical output.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    self, apply_placement, centroid, AffinePlacement, Point, Rect, Ring,
};
use crate::model::{DataMap, Region, RegionMap};

const POPULATION_FLOOR_FRACTION: f64 = 0.001;

fn floored_populations(data: &DataMap) -> Vec<f64> {
    let max = data.max_population();
    let floor = if max > 0.0 {
        max * POPULATION_FLOOR_FRACTION
    } else {
        1.0
    };
    data.populations()
        .iter()
        .map(|&p| if p > 0.0 { p } else { floor })
        .collect()
}

/// √(density / max density); the region at maximum density keeps factor 1.
pub fn shrink_factor(population: f64, area: f64, max_density: f64) -> Result<f64> {
    if area <= 0.0 {
        return Err(Error::ShrinkZeroArea);
    }
    if population <= 0.0 {
        return Err(Error::ShrinkZeroPopulation);
    }
    let density = population / area;
    if density > max_density * (1.0 + 1e-12) {
        return Err(Error::DensityAboveMax {
            density,
            max_density,
        });
    }
    Ok((density / max_density).sqrt().min(1.0))
}

/// Per-region placements plus the shared zoom factor.
#[derive(Debug, Clone, PartialEq)]
pub struct NonContiguousLayout {
    /// Placements aligned with the map's region order.
    pub placements: Vec<AffinePlacement>,
    /// Zoom applied to every shrink factor so total displayed area equals
    /// total original area.
    pub global_zoom: f64,
}

impl NonContiguousLayout {
    pub fn placement_of(&self, map: &RegionMap, id: &str) -> Option<&AffinePlacement> {
        map.index_of(id).map(|i| &self.placements[i])
    }
}

/// Non-contiguous layout: every region shrinks about its centroid by
/// √(density/maxdensity), the whole map is zoomed so Σ scale²·A = Σ A, and
/// only regions that end up larger than life (scale > 1) are translated
/// apart until their scaled bounding boxes are disjoint. Everything else
/// stays correctly centered.
pub fn noncontiguous_layout(data: &DataMap) -> Result<NonContiguousLayout> {
    let map = &data.map;
    let populations = floored_populations(data);
    let areas: Vec<f64> = map.regions.iter().map(Region::area).collect();
    if areas.iter().any(|&a| a <= 0.0) {
        return Err(Error::ShrinkZeroArea);
    }
    let max_density = populations
        .iter()
        .zip(&areas)
        .map(|(p, a)| p / a)
        .fold(0.0, f64::max);

    let factors: Vec<f64> = populations
        .iter()
        .zip(&areas)
        .map(|(&p, &a)| shrink_factor(p, a, max_density))
        .collect::<Result<_>>()?;

    let total_area: f64 = areas.iter().sum();
    let scaled_area: f64 = factors
        .iter()
        .zip(&areas)
        .map(|(f, a)| f * f * a)
        .sum();
    let zoom = (total_area / scaled_area).sqrt();

    let mut placements: Vec<AffinePlacement> = map
        .regions
        .iter()
        .zip(&factors)
        .map(|(region, &f)| AffinePlacement {
            scale: f * zoom,
            translation: Point::new(0.0, 0.0),
            anchor: centroid(&region.rings).expect("regions have positive area"),
        })
        .collect();

    separate_oversized(map, &mut placements)?;

    Ok(NonContiguousLayout {
        placements,
        global_zoom: zoom,
    })
}

/// Pushes scale>1 regions apart, largest first, stepping each along the
/// direction away from the already-placed region it overlaps.
fn separate_oversized(map: &RegionMap, placements: &mut [AffinePlacement]) -> Result<()> {
    const MAX_SWEEPS: usize = 1000;
    let step = 0.02 * map.bbox.diagonal();

    let mut oversized: Vec<usize> = (0..placements.len())
        .filter(|&i| placements[i].scale > 1.0)
        .collect();
    oversized.sort_by(|&a, &b| {
        placements[b]
            .scale
            .partial_cmp(&placements[a].scale)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| map.regions[a].id.cmp(&map.regions[b].id))
    });

    let outer_bbox = |idx: usize, placements: &[AffinePlacement]| -> Rect {
        let region = &map.regions[idx];
        let outers: Vec<Ring> = region.outer_rings().cloned().collect();
        Rect::from_rings(&apply_placement(&outers, &placements[idx]))
    };

    // Current centroid of a scaled region: the anchor is the original
    // centroid, so scaling about it leaves only the translation.
    let center_of = |idx: usize, placements: &[AffinePlacement]| -> Point {
        Point::new(
            placements[idx].anchor.x + placements[idx].translation.x,
            placements[idx].anchor.y + placements[idx].translation.y,
        )
    };

    let mut placed: Vec<usize> = Vec::new();
    for &idx in &oversized {
        let mut sweeps = 0usize;
        loop {
            let bbox = outer_bbox(idx, placements);
            let overlapping: Vec<usize> = placed
                .iter()
                .copied()
                .filter(|&other| bbox.overlaps(&outer_bbox(other, placements)))
                .collect();
            if overlapping.is_empty() {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::SeparationDiverged(MAX_SWEEPS));
            }
            let me = center_of(idx, placements);
            let (mut dx, mut dy) = (0.0, 0.0);
            for &other in &overlapping {
                let from = center_of(other, placements);
                let (ex, ey) = (me.x - from.x, me.y - from.y);
                let len = ex.hypot(ey);
                if len > 1e-12 {
                    dx += ex / len;
                    dy += ey / len;
                }
            }
            let len = dx.hypot(dy);
            if len < 1e-12 {
                // Symmetric or coincident pushes cancel out; break the tie
                // perpendicular to the first overlapper.
                let from = center_of(overlapping[0], placements);
                let (ex, ey) = (me.x - from.x, me.y - from.y);
                let elen = ex.hypot(ey);
                if elen > 1e-12 {
                    dx = -ey / elen;
                    dy = ex / elen;
                } else {
                    dx = 1.0;
                    dy = 0.0;
                }
            } else {
                dx /= len;
                dy /= len;
            }
            // Grow the stride on long separations so corridors between
            // already-placed regions cannot trap the walk.
            let stride = step * (1.0 + sweeps as f64 / 100.0);
            placements[idx].translation.x += dx * stride;
            placements[idx].translation.y += dy * stride;
        }
        placed.push(idx);
    }
    Ok(())
}

/// Parameters for the contiguous density-equalization solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContiguousParams {
    pub max_iterations: usize,
    /// Mean relative area error at which iteration stops.
    pub target_mean_error: f64,
    /// Force multiplier in (0, 1].
    pub force_damping: f64,
}

impl Default for ContiguousParams {
    fn default() -> Self {
        ContiguousParams {
            max_iterations: 128,
            target_mean_error: 0.02,
            force_damping: 0.25,
        }
    }
}

impl ContiguousParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::BadArgument {
                op: "contiguous cartogram",
                reason: "max_iterations must be at least 1".into(),
            });
        }
        if !(self.target_mean_error > 0.0 && self.target_mean_error < 1.0) {
            return Err(Error::BadArgument {
                op: "contiguous cartogram",
                reason: format!("target_mean_error {} outside (0, 1)", self.target_mean_error),
            });
        }
        if !(self.force_damping > 0.0 && self.force_damping <= 1.0) {
            return Err(Error::BadArgument {
                op: "contiguous cartogram",
                reason: format!("force_damping {} outside (0, 1]", self.force_damping),
            });
        }
        Ok(())
    }
}

/// Solver report emitted alongside the deformed map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartogramDiagnostics {
    pub iterations: usize,
    pub initial_mean_error: f64,
    pub final_mean_error: f64,
    pub converged: bool,
    /// Rings that self-intersect after deformation (local folds).
    pub fold_count: usize,
    pub max_vertex_displacement: f64,
    /// Final per-region areas, in region order.
    pub final_areas: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartogramResult {
    pub map: RegionMap,
    pub diagnostics: CartogramDiagnostics,
}

struct RegionState {
    radius: f64,
    mass: f64,
    center: Point,
}

fn mean_relative_error(areas: &[f64], shares: &[f64]) -> f64 {
    let total: f64 = areas.iter().sum();
    areas
        .iter()
        .zip(shares)
        .map(|(&a, &s)| ((a / total) - s).abs() / s)
        .sum::<f64>()
        / areas.len() as f64
}

/// Contiguous cartogram by rubber-sheet iteration: each region exerts a
/// radial force on every vertex, sized by the gap between its desired and
/// actual radius with inverse-distance falloff. Displacement is a function
/// of vertex position only, so vertices shared between regions move
/// together and contiguity is preserved by construction. Non-convergence is
/// reported in the diagnostics, not as an error.
pub fn contiguous_cartogram(data: &DataMap, params: &ContiguousParams) -> Result<CartogramResult> {
    params.validate()?;
    let populations = floored_populations(data);
    let total_pop: f64 = populations.iter().sum();
    let shares: Vec<f64> = populations.iter().map(|p| p / total_pop).collect();

    let mut regions: Vec<Region> = data.map.regions.clone();
    let original: Vec<Region> = regions.clone();

    let compute_areas = |regions: &[Region]| -> Vec<f64> {
        regions.iter().map(Region::area).collect()
    };

    let initial_mean_error = mean_relative_error(&compute_areas(&regions), &shares);
    let mut mean_error = initial_mean_error;
    let mut iterations = 0;

    while mean_error > params.target_mean_error && iterations < params.max_iterations {
        iterations += 1;
        let areas = compute_areas(&regions);
        let total_area: f64 = areas.iter().sum();

        let states: Vec<RegionState> = regions
            .iter()
            .zip(&areas)
            .zip(&shares)
            .map(|((region, &area), &share)| {
                let desired = share * total_area;
                RegionState {
                    radius: (area / std::f64::consts::PI).sqrt(),
                    mass: (desired / std::f64::consts::PI).sqrt()
                        - (area / std::f64::consts::PI).sqrt(),
                    center: centroid(&region.rings).unwrap_or_else(|_| region.bbox().center()),
                }
            })
            .collect();

        // Deduplicate vertices by bit pattern: shared boundary vertices are
        // displaced once and written back everywhere.
        let mut unique: Vec<Point> = Vec::new();
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        for region in &regions {
            for ring in &region.rings {
                for p in ring {
                    let key = (p.x.to_bits(), p.y.to_bits());
                    index.entry(key).or_insert_with(|| {
                        unique.push(*p);
                        unique.len() - 1
                    });
                }
            }
        }

        let moved: Vec<Point> = unique
            .iter()
            .map(|&v| {
                let (mut fx, mut fy) = (0.0, 0.0);
                for s in &states {
                    let (dx, dy) = (v.x - s.center.x, v.y - s.center.y);
                    let dist = dx.hypot(dy);
                    if dist < 1e-12 {
                        continue;
                    }
                    let strength = if dist > s.radius {
                        s.mass * s.radius / dist
                    } else {
                        let ratio = dist / s.radius;
                        s.mass * ratio * ratio * (4.0 - 3.0 * ratio)
                    };
                    fx += strength * dx / dist;
                    fy += strength * dy / dist;
                }
                Point::new(
                    v.x + params.force_damping * fx,
                    v.y + params.force_damping * fy,
                )
            })
            .collect();

        for region in &mut regions {
            for ring in &mut region.rings {
                for p in ring.iter_mut() {
                    let key = (p.x.to_bits(), p.y.to_bits());
                    *p = moved[index[&key]];
                }
            }
        }

        mean_error = mean_relative_error(&compute_areas(&regions), &shares);
    }

    let fold_count: usize = regions
        .iter()
        .flat_map(|r| r.rings.iter())
        .map(|ring| geometry::ring_self_intersections(ring))
        .sum();

    let max_vertex_displacement = regions
        .iter()
        .zip(&original)
        .flat_map(|(now, before)| now.rings.iter().zip(&before.rings))
        .flat_map(|(now, before)| now.iter().zip(before))
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);

    let final_areas: Vec<(String, f64)> = regions
        .iter()
        .map(|r| (r.id.clone(), r.area()))
        .collect();

    let diagnostics = CartogramDiagnostics {
        iterations,
        initial_mean_error,
        final_mean_error: mean_error,
        converged: mean_error <= params.target_mean_error,
        fold_count,
        max_vertex_displacement,
        final_areas,
    };
    let map = RegionMap::new(regions, data.map.crs_note.clone())?;
    Ok(CartogramResult { map, diagnostics })
}
