//! Domain model: regions with polygon geometry, per-region statistics,
//! fine-scale city records, and study trial logs.
//!
//! All values are immutable after construction and safe to share across
//! renderers. The statistic is always stored as a fraction in [0, 1];
//! percent input is converted at ingestion time.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Rect, Ring};

/// One administrative region: an outer ring (counter-clockwise) optionally
/// followed by holes (clockwise) and further outer rings for multi-part
/// regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: String,
    pub name: String,
    pub rings: Vec<Ring>,
}

impl Region {
    pub fn area(&self) -> f64 {
        geometry::polygon_area(&self.rings).unwrap_or(0.0)
    }

    pub fn outer_rings(&self) -> impl Iterator<Item = &Ring> {
        self.rings
            .iter()
            .filter(|r| geometry::ring_signed_area(r) > 0.0)
    }

    pub fn hole_rings(&self) -> impl Iterator<Item = &Ring> {
        self.rings
            .iter()
            .filter(|r| geometry::ring_signed_area(r) < 0.0)
    }

    pub fn bbox(&self) -> Rect {
        Rect::from_rings(&self.rings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub regions: Vec<Region>,
    pub bbox: Rect,
    pub crs_note: String,
    index: HashMap<String, usize>,
}

impl RegionMap {
    /// Builds a map and enforces the structural invariants: unique non-empty
    /// ids, closed rings of at least four vertices, nonzero region areas.
    pub fn new(regions: Vec<Region>, crs_note: impl Into<String>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, region) in regions.iter().enumerate() {
            if region.id.is_empty() {
                return Err(Error::EmptyRegionId);
            }
            if index.insert(region.id.clone(), i).is_some() {
                return Err(Error::DuplicateRegionId {
                    id: region.id.clone(),
                });
            }
            if region.rings.is_empty() {
                return Err(Error::BadRing {
                    id: region.id.clone(),
                    ring: 0,
                    reason: "region has no rings".into(),
                });
            }
            for (ri, ring) in region.rings.iter().enumerate() {
                if ring.len() < 4 {
                    return Err(Error::BadRing {
                        id: region.id.clone(),
                        ring: ri,
                        reason: format!("only {} vertices (need at least 4)", ring.len()),
                    });
                }
                if ring.first() != ring.last() {
                    return Err(Error::BadRing {
                        id: region.id.clone(),
                        ring: ri,
                        reason: "first and last vertex differ".into(),
                    });
                }
                if geometry::ring_signed_area(ring) == 0.0 {
                    return Err(Error::BadRing {
                        id: region.id.clone(),
                        ring: ri,
                        reason: "zero signed area".into(),
                    });
                }
            }
            if region.area() <= 0.0 {
                return Err(Error::ZeroAreaRegion {
                    id: region.id.clone(),
                });
            }
        }
        let bbox = Rect::from_rings(regions.iter().flat_map(|r| r.rings.iter()));
        Ok(RegionMap {
            regions,
            bbox,
            crs_note: crs_note.into(),
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.index_of(id).map(|i| &self.regions[i])
    }

    /// Non-fatal findings: holes that are not strictly inside an outer ring.
    pub fn validation_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for region in &self.regions {
            let outers: Vec<&Ring> = region.outer_rings().collect();
            for (ri, hole) in region.rings.iter().enumerate() {
                if geometry::ring_signed_area(hole) >= 0.0 {
                    continue;
                }
                let inside = hole[..hole.len() - 1]
                    .iter()
                    .all(|&p| outers.iter().any(|o| geometry::point_in_ring(p, o)));
                if !inside {
                    warnings.push(format!(
                        "region `{}` ring {}: hole not strictly inside an outer ring",
                        region.id, ri
                    ));
                }
            }
        }
        warnings
    }
}

/// One row of the region statistics table.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRow {
    pub id: String,
    pub name: String,
    pub population: f64,
    pub statistic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticUnit {
    Percent,
    Fraction,
}

/// RegionMap joined with per-region population and statistic (stored as a
/// fraction in [0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMap {
    pub map: RegionMap,
    population: Vec<f64>,
    rate: Vec<f64>,
}

impl DataMap {
    pub fn populations(&self) -> &[f64] {
        &self.population
    }

    pub fn rates(&self) -> &[f64] {
        &self.rate
    }

    pub fn population_of(&self, id: &str) -> Option<f64> {
        self.map.index_of(id).map(|i| self.population[i])
    }

    pub fn rate_of(&self, id: &str) -> Option<f64> {
        self.map.index_of(id).map(|i| self.rate[i])
    }

    pub fn total_population(&self) -> f64 {
        self.population.iter().sum()
    }

    pub fn total_area(&self) -> f64 {
        self.map.regions.iter().map(Region::area).sum()
    }

    pub fn max_population(&self) -> f64 {
        self.population.iter().copied().fold(0.0, f64::max)
    }

    /// Zero errors by construction; returns residual geometry warnings.
    pub fn validation_warnings(&self) -> Vec<String> {
        self.map.validation_warnings()
    }
}

/// Joins a statistics table onto a map. Exactly one row per region id is
/// required; percent statistics are divided by 100 before storage.
pub fn join_data(map: RegionMap, rows: &[DataRow], unit: StatisticUnit) -> Result<DataMap> {
    let mut by_id: BTreeMap<&str, &DataRow> = BTreeMap::new();
    for row in rows {
        if map.index_of(&row.id).is_none() {
            return Err(Error::UnknownRegion { id: row.id.clone() });
        }
        if by_id.insert(row.id.as_str(), row).is_some() {
            return Err(Error::BadCsvRow {
                file: "data",
                row: 0,
                reason: format!("duplicate row for region `{}`", row.id),
            });
        }
    }
    let mut population = Vec::with_capacity(map.len());
    let mut rate = Vec::with_capacity(map.len());
    for region in &map.regions {
        let row = by_id.get(region.id.as_str()).ok_or(Error::MissingDataRow {
            id: region.id.clone(),
        })?;
        if row.population < 0.0 {
            return Err(Error::NegativePopulation {
                id: region.id.clone(),
                value: row.population,
            });
        }
        let r = match unit {
            StatisticUnit::Percent => row.statistic / 100.0,
            StatisticUnit::Fraction => row.statistic,
        };
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RateOutOfRange {
                id: region.id.clone(),
                value: r,
            });
        }
        population.push(row.population);
        rate.push(r);
    }
    Ok(DataMap {
        map,
        population,
        rate,
    })
}

/// One fine-scale population record.
#[derive(Debug, Clone, PartialEq)]
pub struct City {
    pub id: String,
    pub region_id: String,
    pub name: String,
    pub location: Point,
    pub population: f64,
    pub footprint: Option<Vec<Ring>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CityLayer {
    pub cities: Vec<City>,
}

impl CityLayer {
    /// Checks id uniqueness and region membership; cities located outside
    /// their declared region are kept and reported as warnings.
    pub fn new(cities: Vec<City>, data: &DataMap) -> Result<(Self, Vec<String>)> {
        let mut seen: HashMap<&str, ()> = HashMap::new();
        let mut warnings = Vec::new();
        for city in &cities {
            if seen.insert(city.id.as_str(), ()).is_some() {
                return Err(Error::DuplicateCityId {
                    id: city.id.clone(),
                });
            }
            if city.population < 0.0 {
                return Err(Error::NegativeCityPopulation {
                    id: city.id.clone(),
                    value: city.population,
                });
            }
            let Some(region) = data.map.region(&city.region_id) else {
                return Err(Error::UnknownRegion {
                    id: city.region_id.clone(),
                });
            };
            if !geometry::point_in_rings(city.location, &region.rings) {
                warnings.push(format!(
                    "city `{}` lies outside its declared region `{}`",
                    city.id, city.region_id
                ));
            }
        }
        Ok((CityLayer { cities }, warnings))
    }

    pub fn in_region<'a>(&'a self, region_id: &'a str) -> impl Iterator<Item = &'a City> {
        self.cities.iter().filter(move |c| c.region_id == region_id)
    }

    pub fn max_population(&self) -> f64 {
        self.cities.iter().map(|c| c.population).fold(0.0, f64::max)
    }

    pub fn total_population(&self) -> f64 {
        self.cities.iter().map(|c| c.population).sum()
    }
}

/// One answered question in a study log.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub participant_id: String,
    pub technique: String,
    pub question: String,
    pub question_set: String,
    pub correct: u8,
    pub time_ms: f64,
}

/// One technique preference rank (1 = most favorite).
#[derive(Debug, Clone, PartialEq)]
pub struct RankingRecord {
    pub participant_id: String,
    pub technique: String,
    pub rank: u32,
}

/// Trial records plus optional per-participant technique rankings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialSet {
    pub records: Vec<TrialRecord>,
    pub rankings: Vec<RankingRecord>,
}

impl TrialSet {
    pub fn new(records: Vec<TrialRecord>, rankings: Vec<RankingRecord>) -> Result<Self> {
        for record in &records {
            if record.correct > 1 {
                return Err(Error::BadCsvRow {
                    file: "trials",
                    row: 0,
                    reason: format!("correct must be 0 or 1, got {}", record.correct),
                });
            }
            if record.time_ms <= 0.0 {
                return Err(Error::NonPositiveTime(record.time_ms));
            }
        }
        validate_rankings(&rankings)?;
        Ok(TrialSet { records, rankings })
    }

    pub fn techniques(&self) -> Vec<String> {
        let mut out: Vec<String> = self.records.iter().map(|r| r.technique.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn questions(&self) -> Vec<String> {
        let mut out: Vec<String> = self.records.iter().map(|r| r.question.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn participants(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .records
            .iter()
            .map(|r| r.participant_id.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Each participant must rank each technique exactly once and the ranks per
/// participant must form a permutation of 1..T.
pub fn validate_rankings(rankings: &[RankingRecord]) -> Result<()> {
    if rankings.is_empty() {
        return Ok(());
    }
    let mut techniques: Vec<&str> = rankings.iter().map(|r| r.technique.as_str()).collect();
    techniques.sort();
    techniques.dedup();
    let t = techniques.len();

    let mut per_participant: BTreeMap<&str, Vec<&RankingRecord>> = BTreeMap::new();
    for record in rankings {
        per_participant
            .entry(record.participant_id.as_str())
            .or_default()
            .push(record);
    }
    for (participant, records) in per_participant {
        let mut seen_technique: Vec<&str> = records.iter().map(|r| r.technique.as_str()).collect();
        seen_technique.sort();
        seen_technique.dedup();
        if seen_technique.len() != records.len() || records.len() != t {
            return Err(Error::RankPermutation {
                participant: participant.to_string(),
                t,
                reason: format!("expected one rank per technique, got {} rows", records.len()),
            });
        }
        let mut ranks: Vec<u32> = records.iter().map(|r| r.rank).collect();
        ranks.sort_unstable();
        let expected: Vec<u32> = (1..=t as u32).collect();
        if ranks != expected {
            return Err(Error::RankPermutation {
                participant: participant.to_string(),
                t,
                reason: format!("ranks {ranks:?}"),
            });
        }
    }
    Ok(())
}
