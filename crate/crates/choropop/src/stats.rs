//! Seeded bootstrap estimation over trial logs: mean accuracy with
//! percentile confidence intervals, within-participant pairwise differences,
//! geometric-mean completion times (antilogged log-means), pairwise time
//! ratios, and ranking summaries.
//!
//! Every estimate is deterministic given (data, resamples, seed). Draws come
//! sequentially from one ChaCha stream per estimate; the analysis pipeline
//! threads a single stream through its cells in a fixed order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::Rgb;
use crate::error::{Error, Result};
use crate::model::{RankingRecord, TrialSet};
use crate::scene::{format_label_number, Node, Scene, Style};

const MIN_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PercentileBootstrap,
    AntiloggedBootstrap,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::PercentileBootstrap => "percentile-bootstrap",
            Method::AntiloggedBootstrap => "antilogged-bootstrap",
        }
    }
}

/// Point estimate with a 95% bootstrap confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub method: Method,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// 95% percentile interval of the resampled means, drawn with replacement
/// from one seeded stream (nearest-rank percentiles).
fn resampled_mean_interval(
    samples: &[f64],
    resamples: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let n = samples.len();
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += samples[rng.random_range(0..n)];
        }
        stats.push(sum / n as f64);
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = |q: f64| ((q * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
    (stats[idx(0.025)], stats[idx(0.975)])
}

fn check_inputs(samples: &[f64], resamples: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::TooFewResamples {
            need: MIN_RESAMPLES,
            got: resamples,
        });
    }
    Ok(())
}

fn mean_ci_with(samples: &[f64], resamples: usize, rng: &mut ChaCha8Rng) -> Result<Estimate> {
    check_inputs(samples, resamples)?;
    let (ci_low, ci_high) = resampled_mean_interval(samples, resamples, rng);
    Ok(Estimate {
        point: mean(samples),
        ci_low,
        ci_high,
        n: samples.len(),
        method: Method::PercentileBootstrap,
    })
}

/// Arithmetic-mean estimate with a percentile-bootstrap 95% CI.
pub fn bootstrap_mean_ci(samples: &[f64], resamples: usize, seed: u64) -> Result<Estimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mean_ci_with(samples, resamples, &mut rng)
}

fn paired_diffs(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::PairMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::BadArgument {
            op: "pairwise",
            reason: "need at least 2 pairs".into(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

/// Mean within-participant difference a−b with a percentile-bootstrap CI;
/// resampling happens at the participant level.
pub fn pairwise_diff_ci(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<Estimate> {
    let diffs = paired_diffs(a, b)?;
    bootstrap_mean_ci(&diffs, resamples, seed)
}

fn log_samples(times: &[f64]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            if t > 0.0 {
                Ok(t.ln())
            } else {
                Err(Error::NonPositiveTime(t))
            }
        })
        .collect()
}

fn antilogged(estimate: Estimate) -> Estimate {
    Estimate {
        point: estimate.point.exp(),
        ci_low: estimate.ci_low.exp(),
        ci_high: estimate.ci_high.exp(),
        n: estimate.n,
        method: Method::AntiloggedBootstrap,
    }
}

/// Geometric mean: exp of the mean log, equal to (Π t)^(1/n); the CI is the
/// antilogged percentile-bootstrap interval of the mean log.
pub fn geometric_mean_ci(times: &[f64], resamples: usize, seed: u64) -> Result<Estimate> {
    let logs = log_samples(times)?;
    Ok(antilogged(bootstrap_mean_ci(&logs, resamples, seed)?))
}

/// Antilogged mean log-ratio: a value r means "a is r times slower than b".
pub fn pairwise_ratio_ci(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<Estimate> {
    let log_a = log_samples(a)?;
    let log_b = log_samples(b)?;
    let diffs = paired_diffs(&log_a, &log_b)?;
    Ok(antilogged(bootstrap_mean_ci(&diffs, resamples, seed)?))
}

/// Per-technique ranking digest: mean/median/population-SD of ranks plus a
/// count per rank position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub positions: usize,
    pub rows: Vec<RankRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub technique: String,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    /// counts[p] = participants ranking this technique at position p+1.
    pub counts: Vec<usize>,
}

pub fn rank_summary(rankings: &[RankingRecord]) -> RankSummary {
    let mut techniques: Vec<&str> = rankings.iter().map(|r| r.technique.as_str()).collect();
    techniques.sort();
    techniques.dedup();
    let positions = techniques.len();

    let rows = techniques
        .iter()
        .map(|&technique| {
            let mut ranks: Vec<f64> = rankings
                .iter()
                .filter(|r| r.technique == technique)
                .map(|r| r.rank as f64)
                .collect();
            ranks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = ranks.len() as f64;
            let mean_rank = ranks.iter().sum::<f64>() / n;
            let median = if ranks.len() % 2 == 1 {
                ranks[ranks.len() / 2]
            } else {
                (ranks[ranks.len() / 2 - 1] + ranks[ranks.len() / 2]) / 2.0
            };
            let sd = (ranks
                .iter()
                .map(|r| (r - mean_rank).powi(2))
                .sum::<f64>()
                / n)
                .sqrt();
            let mut counts = vec![0usize; positions];
            for r in rankings.iter().filter(|r| r.technique == technique) {
                let p = (r.rank as usize).saturating_sub(1);
                if p < positions {
                    counts[p] += 1;
                }
            }
            RankRow {
                technique: technique.to_string(),
                mean: mean_rank,
                median,
                sd,
                counts,
            }
        })
        .collect();
    RankSummary { positions, rows }
}

impl RankSummary {
    /// CSV mirroring the ranking-table column order:
    /// `technique,mean,median,sd,rank1..rankT`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("technique,mean,median,sd");
        for p in 1..=self.positions {
            out.push_str(&format!(",rank{p}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}",
                row.technique,
                format_label_number(row.mean),
                format_label_number(row.median),
                format_label_number(row.sd)
            ));
            for c in &row.counts {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// One estimated quantity in the analysis output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub question: String,
    /// Technique name, or "t1-t2" / "t1/t2" for pairwise rows.
    pub technique: String,
    pub measure: String,
    pub estimate: Estimate,
}

/// Full per-question × per-technique estimation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub rows: Vec<AnalysisRow>,
    pub resamples: usize,
    pub seed: u64,
    /// Ranking digest when rankings were supplied.
    pub ranking: Option<RankSummary>,
}

/// Per-participant aggregates within one (question, technique) cell:
/// mean accuracy and mean log time.
fn cell_aggregates(
    trials: &TrialSet,
    question: &str,
    technique: &str,
) -> BTreeMap<String, (f64, f64)> {
    let mut per: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    for record in trials
        .records
        .iter()
        .filter(|r| r.question == question && r.technique == technique)
    {
        let entry = per
            .entry(record.participant_id.clone())
            .or_insert((0.0, 0.0, 0));
        entry.0 += record.correct as f64;
        entry.1 += record.time_ms.ln();
        entry.2 += 1;
    }
    per.into_iter()
        .map(|(participant, (acc, log_t, count))| {
            (participant, (acc / count as f64, log_t / count as f64))
        })
        .collect()
}

/// Runs the full estimation pipeline: per-cell accuracy and geometric-mean
/// time, then pairwise accuracy differences and time ratios for every
/// technique pair, resampling participants throughout.
pub fn analyze_trials(trials: &TrialSet, resamples: usize, seed: u64) -> Result<AnalysisReport> {
    if trials.records.is_empty() {
        return Err(Error::EmptySample);
    }
    let questions = trials.questions();
    let techniques = trials.techniques();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();

    for question in &questions {
        let cells: BTreeMap<&str, BTreeMap<String, (f64, f64)>> = techniques
            .iter()
            .map(|t| (t.as_str(), cell_aggregates(trials, question, t)))
            .collect();

        for technique in &techniques {
            let cell = &cells[technique.as_str()];
            if cell.is_empty() {
                continue;
            }
            let accuracy: Vec<f64> = cell.values().map(|v| v.0).collect();
            let log_times: Vec<f64> = cell.values().map(|v| v.1).collect();
            rows.push(AnalysisRow {
                question: question.clone(),
                technique: technique.clone(),
                measure: "accuracy".into(),
                estimate: mean_ci_with(&accuracy, resamples, &mut rng)?,
            });
            rows.push(AnalysisRow {
                question: question.clone(),
                technique: technique.clone(),
                measure: "time_geomean_ms".into(),
                estimate: antilogged(mean_ci_with(&log_times, resamples, &mut rng)?),
            });
        }

        for (i, t1) in techniques.iter().enumerate() {
            for t2 in &techniques[i + 1..] {
                let (c1, c2) = (&cells[t1.as_str()], &cells[t2.as_str()]);
                let shared: Vec<&String> =
                    c1.keys().filter(|p| c2.contains_key(*p)).collect();
                if shared.len() < 2 {
                    continue;
                }
                let acc_diff: Vec<f64> =
                    shared.iter().map(|p| c1[*p].0 - c2[*p].0).collect();
                let log_ratio: Vec<f64> =
                    shared.iter().map(|p| c1[*p].1 - c2[*p].1).collect();
                rows.push(AnalysisRow {
                    question: question.clone(),
                    technique: format!("{t1}-{t2}"),
                    measure: "accuracy_diff".into(),
                    estimate: mean_ci_with(&acc_diff, resamples, &mut rng)?,
                });
                rows.push(AnalysisRow {
                    question: question.clone(),
                    technique: format!("{t1}/{t2}"),
                    measure: "time_ratio".into(),
                    estimate: antilogged(mean_ci_with(&log_ratio, resamples, &mut rng)?),
                });
            }
        }
    }

    let ranking = if trials.rankings.is_empty() {
        None
    } else {
        Some(rank_summary(&trials.rankings))
    };
    Ok(AnalysisReport {
        rows,
        resamples,
        seed,
        ranking,
    })
}

impl AnalysisReport {
    /// CSV export: `question,technique,measure,point,ci_low,ci_high,n,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("question,technique,measure,point,ci_low,ci_high,n,method\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{:.6},{},{}\n",
                row.question,
                row.technique,
                row.measure,
                row.estimate.point,
                row.estimate.ci_low,
                row.estimate.ci_high,
                row.estimate.n,
                row.estimate.method.name()
            ));
        }
        out
    }

    pub fn measures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.rows.iter().map(|r| r.measure.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Dot-and-interval chart for one measure: a point marker with a
    /// horizontal 95% interval per technique, grouped by question.
    pub fn chart(&self, measure: &str) -> Scene {
        const ROW_H: f64 = 22.0;
        const HEADER_H: f64 = 26.0;
        const LABEL_W: f64 = 170.0;
        const PLOT_W: f64 = 420.0;
        const MARGIN: f64 = 16.0;

        let rows: Vec<&AnalysisRow> =
            self.rows.iter().filter(|r| r.measure == measure).collect();
        let mut questions: Vec<&str> = rows.iter().map(|r| r.question.as_str()).collect();
        questions.sort();
        questions.dedup();

        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in &rows {
            lo = lo.min(row.estimate.ci_low);
            hi = hi.max(row.estimate.ci_high);
        }
        if !lo.is_finite() || !hi.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo < 1e-9 {
            hi = lo + 1.0;
        }
        let pad = (hi - lo) * 0.06;
        let (lo, hi) = (lo - pad, hi + pad);
        let x = |v: f64| MARGIN + LABEL_W + (v - lo) / (hi - lo) * PLOT_W;

        let total_rows: usize = rows.len();
        let height = MARGIN * 2.0
            + questions.len() as f64 * HEADER_H
            + total_rows as f64 * ROW_H
            + 30.0;
        let mut scene = Scene::new(MARGIN * 2.0 + LABEL_W + PLOT_W + 40.0, height);

        let ink = Rgb::new(30, 30, 30);
        let accent = Rgb::new(44, 127, 184);
        let mut y = MARGIN;
        let mut nodes = Vec::new();
        for question in &questions {
            y += HEADER_H;
            nodes.push(Node::Text {
                id: None,
                at: crate::geometry::Point::new(MARGIN, y - 8.0),
                content: question.to_string(),
                size: 13.0,
                fill: ink,
            });
            for row in rows.iter().filter(|r| r.question == *question) {
                let cy = y + ROW_H / 2.0;
                nodes.push(Node::Text {
                    id: None,
                    at: crate::geometry::Point::new(MARGIN + 10.0, cy + 4.0),
                    content: row.technique.clone(),
                    size: 11.0,
                    fill: ink,
                });
                nodes.push(Node::Path {
                    id: None,
                    rings: vec![vec![
                        crate::geometry::Point::new(x(row.estimate.ci_low), cy),
                        crate::geometry::Point::new(x(row.estimate.ci_high), cy),
                    ]],
                    style: Style::default().with_stroke(ink, 1.4),
                });
                nodes.push(Node::Circle {
                    id: None,
                    center: crate::geometry::Point::new(x(row.estimate.point), cy),
                    radius: 3.4,
                    style: Style::filled(accent),
                });
                y += ROW_H;
            }
        }
        // Axis labels.
        nodes.push(Node::Text {
            id: None,
            at: crate::geometry::Point::new(MARGIN + LABEL_W, y + 24.0),
            content: format!(
                "{measure}: {} to {}",
                format_label_number(lo),
                format_label_number(hi)
            ),
            size: 11.0,
            fill: ink,
        });
        scene.push(Node::group(format!("chart:{measure}"), nodes));
        scene
    }
}
