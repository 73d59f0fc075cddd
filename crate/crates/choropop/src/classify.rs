//! Quantile classification of the mapped statistic plus the color and
//! opacity scales used by the renderers.
//!
//! Classes are lower-inclusive: a value equal to a boundary belongs to the
//! upper bin. Boundaries are the smallest value of each upper class, so for
//! distinct values and n divisible by k every class holds exactly n/k
//! values. Duplicate boundaries produced by heavy ties are merged and the
//! effective class count shrinks accordingly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quantile class boundaries for one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breaks {
    /// Requested class count.
    pub k: usize,
    /// Ascending boundary values; length `effective_k - 1`.
    pub boundaries: Vec<f64>,
    /// Classes remaining after duplicate-boundary merging.
    pub effective_k: usize,
    /// Smallest input value (used for legend range labels).
    pub low: f64,
    /// Largest input value.
    pub high: f64,
}

impl Breaks {
    /// Scales boundaries and range by a positive factor; display-only
    /// convenience for legends (e.g. fraction → percent).
    pub fn scaled(&self, factor: f64) -> Breaks {
        Breaks {
            k: self.k,
            boundaries: self.boundaries.iter().map(|b| b * factor).collect(),
            effective_k: self.effective_k,
            low: self.low * factor,
            high: self.high * factor,
        }
    }
}

/// Computes quantile class boundaries: boundary i is the first value of
/// class i (sorted order), i.e. `sorted[min(n-1, ceil(i*n/k))]`. Boundaries
/// that coincide or cannot separate anything from the minimum are merged.
pub fn quantile_breaks(values: &[f64], k: usize) -> Result<Breaks> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    if k < 1 {
        return Err(Error::BadClassCount { k });
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let low = sorted[0];
    let high = sorted[n - 1];

    let mut boundaries = Vec::with_capacity(k.saturating_sub(1));
    for i in 1..k {
        let idx = ((i * n) as f64 / k as f64).ceil() as usize;
        let b = sorted[idx.min(n - 1)];
        if b > low && boundaries.last() != Some(&b) {
            boundaries.push(b);
        }
    }
    let effective_k = boundaries.len() + 1;
    Ok(Breaks {
        k,
        boundaries,
        effective_k,
        low,
        high,
    })
}

/// 0-based class of a value: the index of the first boundary greater than
/// it. A value equal to a boundary goes to the upper bin; values at or above
/// the last boundary land in class `effective_k - 1`.
pub fn classify(value: f64, breaks: &Breaks) -> usize {
    breaks
        .boundaries
        .iter()
        .position(|&b| b > value)
        .unwrap_or(breaks.effective_k - 1)
}

/// RGB color with `#rrggbb` text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let hex = text.strip_prefix('#').unwrap_or(text);
        if hex.len() != 6 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::BadColor(text.to_string()));
        }
        let parse = |s: &str| u8::from_str_radix(s, 16).unwrap();
        Ok(Rgb::new(parse(&hex[0..2]), parse(&hex[2..4]), parse(&hex[4..6])))
    }

    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }

    /// Multiplies each channel by `factor` (clamped); used to darken prism
    /// side faces.
    pub fn scaled(&self, factor: f64) -> Rgb {
        let f = |v: u8| ((v as f64 * factor).round().clamp(0.0, 255.0)) as u8;
        Rgb::new(f(self.r), f(self.g), f(self.b))
    }

    /// Linear blend toward `other`.
    pub fn lerp(&self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Rgb::new(mix(self.r, other.r), mix(self.g, other.g), mix(self.b, other.b))
    }
}

impl std::fmt::Display for Rgb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.hex())
    }
}

const SEQUENTIAL_ANCHORS: [&str; 5] = ["#ffffcc", "#a1dab4", "#41b6c4", "#2c7fb8", "#253494"];

/// Ordered class fill colors; one entry per effective class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub name: String,
    pub colors: Vec<Rgb>,
}

impl Palette {
    /// Default sequential scheme. Up to five classes the anchors are used
    /// directly; beyond that the ramp is sampled linearly.
    pub fn sequential(k: usize) -> Palette {
        let anchors: Vec<Rgb> = SEQUENTIAL_ANCHORS
            .iter()
            .map(|h| Rgb::from_hex(h).unwrap())
            .collect();
        let colors = if k <= anchors.len() {
            anchors[..k.max(1)].to_vec()
        } else {
            (0..k)
                .map(|i| {
                    let t = i as f64 / (k - 1) as f64 * (anchors.len() - 1) as f64;
                    let lo = t.floor() as usize;
                    let hi = (lo + 1).min(anchors.len() - 1);
                    anchors[lo].lerp(anchors[hi], t - lo as f64)
                })
                .collect()
        };
        Palette {
            name: "sequential".into(),
            colors,
        }
    }

    pub fn from_hex_list(name: &str, hex: &[&str]) -> Result<Palette> {
        let colors = hex
            .iter()
            .map(|h| Rgb::from_hex(h))
            .collect::<Result<Vec<_>>>()?;
        Ok(Palette {
            name: name.into(),
            colors,
        })
    }

    /// Truncates to the effective class count; errors when fewer colors
    /// than classes were supplied.
    pub fn fitted(&self, effective_k: usize) -> Result<Palette> {
        if self.colors.len() < effective_k {
            return Err(Error::PaletteLength {
                got: self.colors.len(),
                need: effective_k,
            });
        }
        Ok(Palette {
            name: self.name.clone(),
            colors: self.colors[..effective_k].to_vec(),
        })
    }
}

/// Discrete opacity levels, ascending, ending at 1.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScale {
    pub levels: Vec<f64>,
}

impl AlphaScale {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty()
            || levels.windows(2).any(|w| w[0] >= w[1])
            || levels.iter().any(|&a| !(0.0..=1.0).contains(&a) || a == 0.0)
            || *levels.last().unwrap() != 1.0
        {
            return Err(Error::BadArgument {
                op: "alpha scale",
                reason: format!("levels must ascend within (0,1] and end at 1.0: {levels:?}"),
            });
        }
        Ok(AlphaScale { levels })
    }

    /// Region-level default: three levels.
    pub fn default_region() -> Self {
        AlphaScale {
            levels: vec![0.30, 0.65, 1.00],
        }
    }

    /// Five levels for city overlays.
    pub fn default_overlay() -> Self {
        AlphaScale {
            levels: vec![0.20, 0.40, 0.60, 0.80, 1.00],
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Opacity for one population value: its quantile class among `populations`
/// (with as many classes as the scale has levels) picks the level. When ties
/// merge classes the surviving classes are spread across the levels so the
/// top class keeps full opacity.
pub fn alpha_for(population: f64, populations: &[f64], scale: &AlphaScale) -> Result<f64> {
    let breaks = quantile_breaks(populations, scale.len())?;
    let class = classify(population, &breaks);
    if breaks.effective_k <= 1 {
        return Ok(1.0);
    }
    let idx = if breaks.effective_k == scale.len() {
        class
    } else {
        ((class as f64) * (scale.len() - 1) as f64 / (breaks.effective_k - 1) as f64).round()
            as usize
    };
    Ok(scale.levels[idx.min(scale.len() - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle for distinct values: sort and assign class
    /// indices directly by rank, floor(rank * k / n) capped at k-1, then
    /// dense-rank the labels so merged classes (n < k) stay contiguous.
    pub(crate) fn brute_force_classes(values: &[f64], k: usize) -> Vec<usize> {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let raw: Vec<usize> = values
            .iter()
            .map(|v| {
                let rank = sorted.iter().position(|s| s == v).unwrap();
                (rank * k / n).min(k - 1)
            })
            .collect();
        let mut labels: Vec<usize> = raw.clone();
        labels.sort_unstable();
        labels.dedup();
        raw.iter()
            .map(|c| labels.iter().position(|l| l == c).unwrap())
            .collect()
    }

    #[test]
    fn breaks_for_one_to_ten() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let breaks = quantile_breaks(&values, 5).unwrap();
        assert_eq!(breaks.boundaries, vec![3.0, 5.0, 7.0, 9.0]);
        assert_eq!(breaks.effective_k, 5);

        let classes: Vec<usize> = values.iter().map(|&v| classify(v, &breaks)).collect();
        assert_eq!(classes, brute_force_classes(&values, 5));
    }

    #[test]
    fn all_equal_collapses_to_one_class() {
        let breaks = quantile_breaks(&[5.0; 12], 5).unwrap();
        assert!(breaks.boundaries.is_empty());
        assert_eq!(breaks.effective_k, 1);
    }

    #[test]
    fn k_one_has_no_boundaries() {
        let breaks = quantile_breaks(&[1.0, 2.0, 3.0], 1).unwrap();
        assert!(breaks.boundaries.is_empty());
        assert_eq!(breaks.effective_k, 1);
    }

    #[test]
    fn classify_given_boundaries() {
        let breaks = Breaks {
            k: 5,
            boundaries: vec![2.0, 4.0, 6.0, 8.0],
            effective_k: 5,
            low: 1.0,
            high: 10.0,
        };
        assert_eq!(classify(5.0, &breaks), 2);
        assert_eq!(classify(1.0, &breaks), 0);
        // Boundary value belongs to the upper bin.
        assert_eq!(classify(4.0, &breaks), 2);
        assert_eq!(classify(8.0, &breaks), 4);
        assert_eq!(classify(99.0, &breaks), 4);
    }

    #[test]
    fn classify_matches_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.random_range(1..=200);
            let k = rng.random_range(1..=9);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1000.0)).collect();
            let breaks = quantile_breaks(&values, k).unwrap();
            let got: Vec<usize> = values.iter().map(|&v| classify(v, &breaks)).collect();
            assert_eq!(got, brute_force_classes(&values, k), "n={n} k={k}");
        }
    }

    #[test]
    fn equal_counts_when_divisible() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for &(n, k) in &[(10usize, 5usize), (40, 4), (200, 8), (9, 3)] {
            let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            values.dedup();
            if values.len() != n {
                continue;
            }
            let breaks = quantile_breaks(&values, k).unwrap();
            let mut counts = vec![0usize; breaks.effective_k];
            for &v in &values {
                counts[classify(v, &breaks)] += 1;
            }
            assert!(counts.iter().all(|&c| c == n / k), "{counts:?}");
        }
    }

    #[test]
    fn classify_monotone() {
        let values = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.3];
        let breaks = quantile_breaks(&values, 3).unwrap();
        let mut sorted = values;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let classes: Vec<usize> = sorted.iter().map(|&v| classify(v, &breaks)).collect();
        assert!(classes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn alpha_levels_follow_population_quantiles() {
        let scale = AlphaScale::default_region();
        let populations = [1.0, 2.0, 3.0];
        let alphas: Vec<f64> = populations
            .iter()
            .map(|&p| alpha_for(p, &populations, &scale).unwrap())
            .collect();
        assert_eq!(alphas, vec![0.30, 0.65, 1.00]);
    }

    #[test]
    fn alpha_extremes() {
        let scale = AlphaScale::default_region();
        let populations: Vec<f64> = (1..=12).map(f64::from).collect();
        let max = populations.iter().copied().fold(0.0, f64::max);
        let min = populations.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(alpha_for(max, &populations, &scale).unwrap(), 1.00);
        assert_eq!(alpha_for(min, &populations, &scale).unwrap(), 0.30);
    }

    #[test]
    fn palette_sizes() {
        assert_eq!(Palette::sequential(5).colors.len(), 5);
        assert_eq!(Palette::sequential(3).colors.len(), 3);
        assert_eq!(Palette::sequential(7).colors.len(), 7);
        let p = Palette::sequential(5);
        assert!(p.fitted(6).is_err());
        assert_eq!(p.fitted(2).unwrap().colors.len(), 2);
    }

    #[test]
    fn rgb_hex_round_trip() {
        let c = Rgb::from_hex("#2c7fb8").unwrap();
        assert_eq!(c.hex(), "#2c7fb8");
        assert!(Rgb::from_hex("#xyzxyz").is_err());
        assert_eq!(Rgb::new(100, 200, 50).scaled(0.7), Rgb::new(70, 140, 35));
    }
}
