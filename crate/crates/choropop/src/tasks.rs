//! Ground truth for map-reading tasks (reading, ranking, neighbor lookups,
//! set comparisons, city aggregation) and counterbalanced study-design
//! generation.
//!
//! Ties are always broken by id so every oracle is deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AdjacencyGraph;
use crate::model::{CityLayer, DataMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Population,
    Rate,
    /// population × rate: the absolute count behind the rate.
    Absolute,
}

impl Metric {
    pub fn parse(name: &str) -> Option<Metric> {
        match name {
            "population" => Some(Metric::Population),
            "rate" => Some(Metric::Rate),
            "absolute" => Some(Metric::Absolute),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Population => "population",
            Metric::Rate => "rate",
            Metric::Absolute => "absolute",
        }
    }

    pub fn value(&self, data: &DataMap, id: &str) -> Option<f64> {
        let population = data.population_of(id)?;
        let rate = data.rate_of(id)?;
        Some(match self {
            Metric::Population => population,
            Metric::Rate => rate,
            Metric::Absolute => population * rate,
        })
    }
}

/// population × rate for one region.
pub fn absolute_count(region: &str, data: &DataMap) -> Result<f64> {
    Metric::Absolute
        .value(data, region)
        .ok_or_else(|| Error::UnknownRegion {
            id: region.to_string(),
        })
}

/// Candidates ordered descending by the metric, ties broken by id
/// ascending. The first element answers the "highest" tasks.
pub fn rank_regions(data: &DataMap, metric: Metric, candidates: &[String]) -> Result<Vec<String>> {
    if candidates.is_empty() {
        return Err(Error::BadArgument {
            op: "rank",
            reason: "empty candidate set".into(),
        });
    }
    let mut scored: Vec<(f64, &str)> = Vec::with_capacity(candidates.len());
    for id in candidates {
        let value = metric.value(data, id).ok_or_else(|| Error::UnknownRegion {
            id: id.clone(),
        })?;
        scored.push((value, id.as_str()));
    }
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.1.cmp(b.1))
    });
    Ok(scored.into_iter().map(|(_, id)| id.to_string()).collect())
}

/// Neighbor of `region` with the highest metric; errors on isolated
/// regions.
pub fn neighbor_argmax(
    region: &str,
    data: &DataMap,
    adjacency: &AdjacencyGraph,
    metric: Metric,
) -> Result<String> {
    let neighbors: Vec<String> = adjacency.neighbors(region).map(str::to_string).collect();
    if neighbors.is_empty() {
        return Err(Error::IsolatedRegion {
            id: region.to_string(),
        });
    }
    Ok(rank_regions(data, metric, &neighbors)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    A,
    B,
    Tie,
}

/// Mean-comparison outcome: the verdict plus both means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutcome {
    pub verdict: Verdict,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// Compares arithmetic means of a metric over two region sets. Relative
/// differences below 1e-12 are a tie.
pub fn summarize_compare(
    set_a: &[String],
    set_b: &[String],
    data: &DataMap,
    metric: Metric,
) -> Result<CompareOutcome> {
    let mean = |set: &[String]| -> Result<f64> {
        if set.is_empty() {
            return Err(Error::BadArgument {
                op: "compare",
                reason: "empty region set".into(),
            });
        }
        let mut sum = 0.0;
        for id in set {
            sum += metric.value(data, id).ok_or_else(|| Error::UnknownRegion {
                id: id.clone(),
            })?;
        }
        Ok(sum / set.len() as f64)
    };
    let mean_a = mean(set_a)?;
    let mean_b = mean(set_b)?;
    let scale = mean_a.abs().max(mean_b.abs());
    let verdict = if scale == 0.0 || (mean_a - mean_b).abs() / scale < 1e-12 {
        Verdict::Tie
    } else if mean_a > mean_b {
        Verdict::A
    } else {
        Verdict::B
    };
    Ok(CompareOutcome {
        verdict,
        mean_a,
        mean_b,
    })
}

/// The most populous city among those whose region is in `regions`; ties by
/// city id. Returns (city id, region id).
pub fn biggest_city(regions: &[String], cities: &CityLayer) -> Result<(String, String)> {
    let mut best: Option<(&str, &str, f64)> = None;
    for city in &cities.cities {
        if !regions.iter().any(|r| r == &city.region_id) {
            continue;
        }
        let better = match best {
            None => true,
            Some((best_id, _, best_pop)) => {
                city.population > best_pop
                    || (city.population == best_pop && city.id.as_str() < best_id)
            }
        };
        if better {
            best = Some((&city.id, &city.region_id, city.population));
        }
    }
    best.map(|(c, r, _)| (c.to_string(), r.to_string()))
        .ok_or(Error::NoCitiesInScope)
}

/// Region population summed from its cities.
pub fn region_population_from_cities(region: &str, cities: &CityLayer) -> f64 {
    cities.in_region(region).map(|c| c.population).sum()
}

/// One participant's schedule entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub participant: usize,
    /// 1-based position in the participant's sequence.
    pub position: usize,
    pub technique: String,
    pub question_set: String,
}

/// Counterbalanced technique orders with rotating question sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyDesign {
    pub techniques: Vec<String>,
    pub question_sets: Vec<String>,
    pub assignments: Vec<Assignment>,
}

/// Balanced Latin square row: 0, 1, T-1, 2, T-2, … offset by the row index.
fn balanced_row(row: usize, t: usize) -> Vec<usize> {
    let mut seq = Vec::with_capacity(t);
    let (mut lo, mut hi) = (0usize, t - 1);
    seq.push(0);
    while seq.len() < t {
        lo += 1;
        seq.push(lo);
        if seq.len() < t {
            seq.push(hi);
            hi -= 1;
        }
    }
    seq.into_iter().map(|s| (s + row) % t).collect()
}

/// Generates the per-participant technique order (balanced Latin square of
/// size T, cycled) and question-set rotation: participant p at position j
/// receives set (p + j) mod S. Requires at least as many sets as
/// techniques.
pub fn generate_design(
    techniques: &[String],
    question_sets: &[String],
    participants: usize,
) -> Result<StudyDesign> {
    let t = techniques.len();
    let s = question_sets.len();
    if t < 1 || participants < 1 {
        return Err(Error::BadArgument {
            op: "design",
            reason: "need at least one technique and one participant".into(),
        });
    }
    if s < t {
        return Err(Error::TooFewQuestionSets { need: t, t });
    }
    let mut assignments = Vec::with_capacity(participants * t);
    for p in 0..participants {
        let order = balanced_row(p % t, t);
        for (j, &tech_index) in order.iter().enumerate() {
            assignments.push(Assignment {
                participant: p + 1,
                position: j + 1,
                technique: techniques[tech_index].clone(),
                question_set: question_sets[(p + j) % s].clone(),
            });
        }
    }
    Ok(StudyDesign {
        techniques: techniques.to_vec(),
        question_sets: question_sets.to_vec(),
        assignments,
    })
}

impl StudyDesign {
    /// CSV export: `participant_id,position,technique,question_set`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("participant_id,position,technique,question_set\n");
        for a in &self.assignments {
            out.push_str(&format!(
                "{},{},{},{}\n",
                a.participant, a.position, a.technique, a.question_set
            ));
        }
        out
    }

    /// Count of appearances per (technique, position), techniques in input
    /// order, positions 0-based.
    pub fn position_counts(&self) -> Vec<Vec<usize>> {
        let t = self.techniques.len();
        let mut counts = vec![vec![0usize; t]; t];
        for a in &self.assignments {
            let ti = self
                .techniques
                .iter()
                .position(|x| *x == a.technique)
                .unwrap();
            counts[ti][a.position - 1] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{adjacency, default_adjacency_eps, unit_square_ring};
    use crate::model::{join_data, City, DataRow, Region, RegionMap, StatisticUnit};
    use std::collections::BTreeMap;

    fn chain_data(values: &[(&str, f64, f64)]) -> DataMap {
        let regions: Vec<Region> = values
            .iter()
            .enumerate()
            .map(|(i, (id, _, _))| Region {
                id: id.to_string(),
                name: id.to_string(),
                rings: vec![unit_square_ring(i as f64, 0.0, 1.0)],
            })
            .collect();
        let rows: Vec<DataRow> = values
            .iter()
            .map(|(id, pop, rate)| DataRow {
                id: id.to_string(),
                name: String::new(),
                population: *pop,
                statistic: *rate,
            })
            .collect();
        join_data(
            RegionMap::new(regions, "").unwrap(),
            &rows,
            StatisticUnit::Fraction,
        )
        .unwrap()
    }

    #[test]
    fn absolute_count_examples() {
        let data = chain_data(&[("A", 100_000.0, 0.08), ("B", 58_000.0, 0.125), ("C", 10.0, 0.0)]);
        assert_eq!(absolute_count("A", &data).unwrap(), 8000.0);
        assert_eq!(absolute_count("B", &data).unwrap(), 7250.0);
        assert_eq!(absolute_count("C", &data).unwrap(), 0.0);
    }

    #[test]
    fn rank_by_each_metric() {
        let data = chain_data(&[("A", 10.0, 0.5), ("B", 100.0, 0.1)]);
        let ids = vec!["A".to_string(), "B".to_string()];
        // Absolute counts 5 vs 10.
        assert_eq!(
            rank_regions(&data, Metric::Absolute, &ids).unwrap(),
            vec!["B", "A"]
        );
        assert_eq!(
            rank_regions(&data, Metric::Population, &ids).unwrap(),
            vec!["B", "A"]
        );
        assert_eq!(
            rank_regions(&data, Metric::Rate, &ids).unwrap(),
            vec!["A", "B"]
        );
    }

    #[test]
    fn rank_breaks_ties_by_id() {
        let data = chain_data(&[("B", 10.0, 0.5), ("A", 10.0, 0.5)]);
        let ids = vec!["B".to_string(), "A".to_string()];
        assert_eq!(
            rank_regions(&data, Metric::Absolute, &ids).unwrap(),
            vec!["A", "B"]
        );
    }

    #[test]
    fn rank_matches_exhaustive_sort_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(1..=200);
            let values: Vec<(String, f64, f64)> = (0..n)
                .map(|i| {
                    (
                        format!("z{i:03}"),
                        rng.random_range(1.0..1e6),
                        rng.random_range(0.0..1.0),
                    )
                })
                .collect();
            let tuples: Vec<(&str, f64, f64)> =
                values.iter().map(|(id, p, r)| (id.as_str(), *p, *r)).collect();
            let data = chain_data(&tuples);
            let ids: Vec<String> = values.iter().map(|(id, _, _)| id.clone()).collect();
            for metric in [Metric::Population, Metric::Rate, Metric::Absolute] {
                let got = rank_regions(&data, metric, &ids).unwrap();
                let mut expect: Vec<(f64, String)> = values
                    .iter()
                    .map(|(id, p, r)| {
                        let v = match metric {
                            Metric::Population => *p,
                            Metric::Rate => *r,
                            Metric::Absolute => p * r,
                        };
                        (v, id.clone())
                    })
                    .collect();
                expect.sort_by(|a, b| {
                    b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1))
                });
                let expect_ids: Vec<String> = expect.into_iter().map(|(_, id)| id).collect();
                assert_eq!(got, expect_ids);
            }
        }
    }

    #[test]
    fn neighbor_argmax_on_chain() {
        // Chain A-B-C with absolute counts 5, 1, 9.
        let data = chain_data(&[("A", 10.0, 0.5), ("B", 10.0, 0.1), ("C", 10.0, 0.9)]);
        let adj = adjacency(&data.map, default_adjacency_eps(&data.map));
        assert_eq!(
            neighbor_argmax("B", &data, &adj, Metric::Absolute).unwrap(),
            "C"
        );
        assert_eq!(
            neighbor_argmax("A", &data, &adj, Metric::Absolute).unwrap(),
            "B"
        );
        // The answer is always adjacent to the query region.
        assert!(adj.is_adjacent("B", "C"));
    }

    #[test]
    fn isolated_region_errors() {
        let regions = vec![
            Region {
                id: "A".into(),
                name: "A".into(),
                rings: vec![unit_square_ring(0.0, 0.0, 1.0)],
            },
            Region {
                id: "Z".into(),
                name: "Z".into(),
                rings: vec![unit_square_ring(5.0, 5.0, 1.0)],
            },
        ];
        let rows = vec![
            DataRow {
                id: "A".into(),
                name: String::new(),
                population: 1.0,
                statistic: 0.1,
            },
            DataRow {
                id: "Z".into(),
                name: String::new(),
                population: 1.0,
                statistic: 0.1,
            },
        ];
        let data = join_data(
            RegionMap::new(regions, "").unwrap(),
            &rows,
            StatisticUnit::Fraction,
        )
        .unwrap();
        let adj = adjacency(&data.map, default_adjacency_eps(&data.map));
        assert!(matches!(
            neighbor_argmax("Z", &data, &adj, Metric::Population),
            Err(Error::IsolatedRegion { .. })
        ));
    }

    #[test]
    fn compare_means() {
        // Absolute counts: A {8000, 2000}, B {4000, 4000}: means 5000 vs 4000.
        let data = chain_data(&[
            ("A1", 10_000.0, 0.8),
            ("A2", 10_000.0, 0.2),
            ("B1", 10_000.0, 0.4),
            ("B2", 10_000.0, 0.4),
        ]);
        let out = summarize_compare(
            &["A1".into(), "A2".into()],
            &["B1".into(), "B2".into()],
            &data,
            Metric::Absolute,
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::A);
        assert_eq!(out.mean_a, 5000.0);
        assert_eq!(out.mean_b, 4000.0);

        let tie = summarize_compare(
            &["A1".into(), "A2".into()],
            &["A1".into(), "A2".into()],
            &data,
            Metric::Absolute,
        )
        .unwrap();
        assert_eq!(tie.verdict, Verdict::Tie);

        let single = summarize_compare(
            &["A2".into()],
            &["A1".into()],
            &data,
            Metric::Absolute,
        )
        .unwrap();
        assert_eq!(single.verdict, Verdict::B);
    }

    #[test]
    fn compare_verdict_scale_invariant() {
        let base = chain_data(&[("A", 30.0, 0.4), ("B", 20.0, 0.9), ("C", 50.0, 0.2)]);
        let scaled = chain_data(&[("A", 3000.0, 0.4), ("B", 2000.0, 0.9), ("C", 5000.0, 0.2)]);
        for metric in [Metric::Population, Metric::Absolute] {
            let a = summarize_compare(
                &["A".into(), "B".into()],
                &["C".into()],
                &base,
                metric,
            )
            .unwrap();
            let b = summarize_compare(
                &["A".into(), "B".into()],
                &["C".into()],
                &scaled,
                metric,
            )
            .unwrap();
            assert_eq!(a.verdict, b.verdict);
        }
    }

    fn city(id: &str, region: &str, pop: f64) -> City {
        City {
            id: id.into(),
            region_id: region.into(),
            name: id.into(),
            location: crate::geometry::Point::new(0.5, 0.5),
            population: pop,
            footprint: None,
        }
    }

    #[test]
    fn biggest_city_scoping_and_ties() {
        let cities = CityLayer {
            cities: vec![city("c1", "A", 5.0), city("c2", "B", 9.0), city("c3", "C", 50.0)],
        };
        assert_eq!(
            biggest_city(&["A".into(), "B".into()], &cities).unwrap(),
            ("c2".to_string(), "B".to_string())
        );
        // Highest city excluded by scope; max among remaining wins.
        assert_eq!(
            biggest_city(&["A".into()], &cities).unwrap(),
            ("c1".to_string(), "A".to_string())
        );
        assert!(matches!(
            biggest_city(&["Z".into()], &cities),
            Err(Error::NoCitiesInScope)
        ));

        let tied = CityLayer {
            cities: vec![city("x2", "A", 7.0), city("x1", "B", 7.0)],
        };
        assert_eq!(
            biggest_city(&["A".into(), "B".into()], &tied).unwrap().0,
            "x1"
        );
    }

    #[test]
    fn city_population_sums() {
        let cities = CityLayer {
            cities: vec![city("c1", "A", 3.0), city("c2", "A", 7.0), city("c3", "B", 100.0)],
        };
        assert_eq!(region_population_from_cities("A", &cities), 10.0);
        assert_eq!(region_population_from_cities("Z", &cities), 0.0);

        // A fixture whose cities sum to the region totals reproduces the
        // joined populations exactly.
        let data = chain_data(&[("A", 10.0, 0.1), ("B", 100.0, 0.1)]);
        for id in ["A", "B"] {
            assert_eq!(
                region_population_from_cities(id, &cities),
                data.population_of(id).unwrap()
            );
        }
    }

    #[test]
    fn biggest_city_brute_force_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n_regions = rng.random_range(1..=20);
            let n_cities = rng.random_range(1..=500);
            let cities = CityLayer {
                cities: (0..n_cities)
                    .map(|i| {
                        city(
                            &format!("c{i:03}"),
                            &format!("r{:02}", rng.random_range(0..n_regions)),
                            rng.random_range(1.0..1e6),
                        )
                    })
                    .collect(),
            };
            let scope: Vec<String> = (0..n_regions)
                .filter(|_| rng.random_bool(0.6))
                .map(|r| format!("r{r:02}"))
                .collect();
            let got = biggest_city(&scope, &cities);
            let mut best: Option<(&City, &str)> = None;
            for c in &cities.cities {
                if scope.iter().any(|s| *s == c.region_id) {
                    let replace = match best {
                        None => true,
                        Some((b, _)) => {
                            c.population > b.population
                                || (c.population == b.population && c.id < b.id)
                        }
                    };
                    if replace {
                        best = Some((c, &c.region_id));
                    }
                }
            }
            match (got, best) {
                (Ok((cid, rid)), Some((c, r))) => {
                    assert_eq!(cid, c.id);
                    assert_eq!(rid, r);
                }
                (Err(Error::NoCitiesInScope), None) => {}
                (g, b) => panic!("mismatch: {g:?} vs {b:?}"),
            }
        }
    }

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn design_four_by_four_positional_balance() {
        let design = generate_design(&labels("t", 4), &labels("s", 4), 4).unwrap();
        let counts = design.position_counts();
        for row in counts {
            assert!(row.iter().all(|&c| c == 1), "{row:?}");
        }
    }

    #[test]
    fn design_single_technique_rotates_sets() {
        let design = generate_design(&labels("t", 1), &labels("s", 3), 5).unwrap();
        assert_eq!(design.assignments.len(), 5);
        let sets: Vec<&str> = design
            .assignments
            .iter()
            .map(|a| a.question_set.as_str())
            .collect();
        assert_eq!(sets, vec!["s0", "s1", "s2", "s0", "s1"]);
    }

    #[test]
    fn design_adjacent_pairs_balance_for_even_t() {
        let design = generate_design(&labels("t", 4), &labels("s", 4), 8).unwrap();
        let mut pairs: BTreeMap<(String, String), usize> = BTreeMap::new();
        for chunk in design.assignments.chunks(4) {
            for w in chunk.windows(2) {
                *pairs
                    .entry((w[0].technique.clone(), w[1].technique.clone()))
                    .or_default() += 1;
            }
        }
        assert_eq!(pairs.len(), 12);
        assert!(pairs.values().all(|&c| c == 2), "{pairs:?}");
    }

    #[test]
    fn design_requires_enough_sets() {
        assert!(matches!(
            generate_design(&labels("t", 4), &labels("s", 3), 4),
            Err(Error::TooFewQuestionSets { .. })
        ));
    }

    #[test]
    fn design_each_technique_once_per_participant() {
        let design = generate_design(&labels("t", 5), &labels("s", 6), 13).unwrap();
        for chunk in design.assignments.chunks(5) {
            let mut seen: Vec<&str> = chunk.iter().map(|a| a.technique.as_str()).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), 5);
        }
    }
}
