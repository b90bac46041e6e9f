//! Cross-orientation normalization, dimension composites, bands and the
//! active / latent / void classification.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::Orientation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    GroupDegreeCentralization,
    GroupBetweennessCentralization,
    Density,
    ArtHours,
    Nudges,
    ActorCount,
    Activity,
    AvgActivityPerActor,
    RotatingLeadership,
    Sentiment,
    Emotionality,
    Complexity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Connectivity,
    Interactivity,
    Language,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsMore,
    LowerIsMore,
}

impl Metric {
    pub const ALL: [Metric; 12] = [
        Metric::GroupDegreeCentralization,
        Metric::GroupBetweennessCentralization,
        Metric::Density,
        Metric::ArtHours,
        Metric::Nudges,
        Metric::ActorCount,
        Metric::Activity,
        Metric::AvgActivityPerActor,
        Metric::RotatingLeadership,
        Metric::Sentiment,
        Metric::Emotionality,
        Metric::Complexity,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::GroupDegreeCentralization => "group_degree_centralization",
            Metric::GroupBetweennessCentralization => "group_betweenness_centralization",
            Metric::Density => "density",
            Metric::ArtHours => "art_hours",
            Metric::Nudges => "nudges",
            Metric::ActorCount => "actor_count",
            Metric::Activity => "activity",
            Metric::AvgActivityPerActor => "avg_activity_per_actor",
            Metric::RotatingLeadership => "rotating_leadership",
            Metric::Sentiment => "sentiment",
            Metric::Emotionality => "emotionality",
            Metric::Complexity => "complexity",
        }
    }

    pub fn from_key(key: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.key() == key)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn dimension(self) -> Dimension {
        use Metric::*;
        match self {
            GroupDegreeCentralization | GroupBetweennessCentralization | Density => {
                Dimension::Connectivity
            }
            ArtHours | Nudges | ActorCount | Activity | AvgActivityPerActor
            | RotatingLeadership => Dimension::Interactivity,
            Sentiment | Emotionality | Complexity => Dimension::Language,
        }
    }

    /// Intrinsic direction; only response time is better when lower.
    pub fn direction(self) -> Direction {
        match self {
            Metric::ArtHours => Direction::LowerIsMore,
            _ => Direction::HigherIsMore,
        }
    }

    pub fn is_centralization(self) -> bool {
        matches!(
            self,
            Metric::GroupDegreeCentralization | Metric::GroupBetweennessCentralization
        )
    }
}

impl Dimension {
    pub fn metrics(self) -> impl Iterator<Item = Metric> {
        Metric::ALL
            .into_iter()
            .filter(move |m| m.dimension() == self)
    }
}

/// The twelve raw scores of one orientation; absent values are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricVector([Option<f64>; 12]);

impl MetricVector {
    pub fn get(&self, m: Metric) -> Option<f64> {
        self.0[m.index()]
    }

    pub fn set(&mut self, m: Metric, v: Option<f64>) {
        self.0[m.index()] = v;
    }

    pub fn with(mut self, m: Metric, v: f64) -> Self {
        self.set(m, Some(v));
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (Metric, Option<f64>)> + '_ {
        Metric::ALL.into_iter().map(|m| (m, self.get(m)))
    }

    pub fn map(&self, f: impl Fn(Metric, f64) -> f64) -> Self {
        let mut out = MetricVector::default();
        for (m, v) in self.iter() {
            out.set(m, v.map(|x| f(m, x)));
        }
        out
    }
}

impl Serialize for MetricVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(12))?;
        for (m, v) in self.iter() {
            map.serialize_entry(m.key(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for MetricVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, Option<f64>> = BTreeMap::deserialize(d)?;
        let mut out = MetricVector::default();
        for (k, v) in raw {
            let m = Metric::from_key(&k)
                .ok_or_else(|| D::Error::custom(format!("unknown metric `{k}`")))?;
            out.set(m, v);
        }
        Ok(out)
    }
}

/// `(x - min) / (max - min)` over the present values.
///
/// Fewer than two present values leave every entry absent; a constant metric
/// maps to 0.5.
pub fn min_max_normalize(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.len() < 2 {
        return vec![None; values.len()];
    }
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    values
        .iter()
        .map(|v| v.map(|x| if span > 0.0 { (x - min) / span } else { 0.5 }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    Low,
    Intermediate,
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Low, Band::Intermediate, Band::High];
}

/// Band cutoffs: `Low` below `low`, `High` from `high` up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub low: f64,
    pub high: f64,
}

impl Thresholds {
    pub fn validate(&self, what: &str) -> Result<()> {
        if 0.0 < self.low && self.low < self.high && self.high < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "{what} thresholds need 0 < low < high < 1, got low={} high={}",
                self.low, self.high
            )))
        }
    }
}

pub fn band(value: f64, t: Thresholds) -> Band {
    if value < t.low {
        Band::Low
    } else if value >= t.high {
        Band::High
    } else {
        Band::Intermediate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attitude {
    Negative,
    Neutral,
    Positive,
}

impl Attitude {
    pub const ALL: [Attitude; 3] = [Attitude::Negative, Attitude::Neutral, Attitude::Positive];
}

/// Sentiment at or below `negative_max` is negative, at or above
/// `positive_min` positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttitudeBand {
    pub negative_max: f64,
    pub positive_min: f64,
}

impl Default for AttitudeBand {
    fn default() -> Self {
        AttitudeBand {
            negative_max: 0.45,
            positive_min: 0.55,
        }
    }
}

impl AttitudeBand {
    pub fn validate(&self) -> Result<()> {
        if 0.0 <= self.negative_max
            && self.negative_max < self.positive_min
            && self.positive_min <= 1.0
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "attitude band needs 0 <= negative_max < positive_min <= 1, got {} / {}",
                self.negative_max, self.positive_min
            )))
        }
    }
}

pub fn attitude(sentiment: f64, b: AttitudeBand) -> Attitude {
    if sentiment <= b.negative_max {
        Attitude::Negative
    } else if sentiment >= b.positive_min {
        Attitude::Positive
    } else {
        Attitude::Neutral
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Active,
    ActiveNeutralOrNegative,
    ActiveDisaggregated,
    Latent,
    LatentNegative,
    LatentDisaggregated,
    Void,
}

impl Class {
    pub const ALL: [Class; 7] = [
        Class::Active,
        Class::ActiveNeutralOrNegative,
        Class::ActiveDisaggregated,
        Class::Latent,
        Class::LatentNegative,
        Class::LatentDisaggregated,
        Class::Void,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Class::Active => "Active",
            Class::ActiveNeutralOrNegative => "Active but with neutral or negative feelings",
            Class::ActiveDisaggregated => "Active but on disaggregated groups",
            Class::Latent => "Latent",
            Class::LatentNegative => "Latent but with negative feelings",
            Class::LatentDisaggregated => "Latent but on disaggregated groups",
            Class::Void => "Void",
        }
    }

    pub fn hint(self) -> &'static str {
        match self {
            Class::Active => "At the heart of any strategic process",
            Class::ActiveNeutralOrNegative => "Immediate attention, consider to gradually divest",
            Class::ActiveDisaggregated => {
                "Immediate attention, verify the convergence among stakeholders"
            }
            Class::Latent => "Periodic attention",
            Class::LatentNegative => "Periodic attention, consider to gradually divest",
            Class::LatentDisaggregated => {
                "Periodic attention, verify the convergence among stakeholders"
            }
            Class::Void => "Consider to gradually divest",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: Class,
    pub hint: &'static str,
}

/// Decision order: low interactivity is void; high interactivity is the
/// active family, intermediate the latent family; low connectivity selects
/// the disaggregated variant, except that a negative latent discourse is
/// always `LatentNegative`.
pub fn classify(connectivity: Band, interactivity: Band, att: Attitude) -> Classification {
    let class = match interactivity {
        Band::Low => Class::Void,
        Band::High => match (connectivity, att) {
            (Band::Low, _) => Class::ActiveDisaggregated,
            (_, Attitude::Positive) => Class::Active,
            _ => Class::ActiveNeutralOrNegative,
        },
        Band::Intermediate => match (connectivity, att) {
            (_, Attitude::Negative) => Class::LatentNegative,
            (Band::Low, _) => Class::LatentDisaggregated,
            _ => Class::Latent,
        },
    };
    Classification {
        class,
        hint: class.hint(),
    }
}

/// Thresholds, weights and switches of the hierarchy stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyConfig {
    pub interactivity: Thresholds,
    pub connectivity: Thresholds,
    pub attitude: AttitudeBand,
    /// Per-metric composite weights; unlisted metrics weigh 1.
    pub weights: BTreeMap<Metric, f64>,
    /// Count centralization towards connectivity as is (`true`) or inverted.
    pub centralization_positive: bool,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig {
            interactivity: Thresholds {
                low: 0.30,
                high: 0.45,
            },
            connectivity: Thresholds {
                low: 0.50,
                high: 0.75,
            },
            attitude: AttitudeBand::default(),
            weights: BTreeMap::new(),
            centralization_positive: true,
        }
    }
}

impl HierarchyConfig {
    pub fn validate(&self) -> Result<()> {
        self.interactivity.validate("interactivity")?;
        self.connectivity.validate("connectivity")?;
        self.attitude.validate()?;
        for (m, w) in &self.weights {
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "weight of {} is {w}",
                    m.key()
                )));
            }
        }
        for d in [Dimension::Connectivity, Dimension::Interactivity] {
            if d.metrics().all(|m| self.weight(m) == 0.0) {
                return Err(Error::InvalidConfig(format!("all {d:?} weights are zero")));
            }
        }
        Ok(())
    }

    pub fn weight(&self, m: Metric) -> f64 {
        self.weights.get(&m).copied().unwrap_or(1.0)
    }

    /// Direction used when folding `m` into its composite.
    pub fn direction(&self, m: Metric) -> Direction {
        if m.is_centralization() && !self.centralization_positive {
            Direction::LowerIsMore
        } else {
            m.direction()
        }
    }
}

/// Weighted mean of the present direction-corrected values of a dimension.
pub fn composite(
    dimension: Dimension,
    corrected: &MetricVector,
    cfg: &HierarchyConfig,
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for m in dimension.metrics() {
        if let Some(v) = corrected.get(m) {
            let w = cfg.weight(m);
            num += w * v;
            den += w;
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Hierarchy outcome for one orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assessment {
    pub orientation: Orientation,
    pub raw: MetricVector,
    pub mm: MetricVector,
    /// MM with lower-is-more metrics flipped to `1 - MM`.
    pub corrected: MetricVector,
    pub connectivity_composite: Option<f64>,
    pub interactivity_composite: Option<f64>,
    pub connectivity_band: Option<Band>,
    pub interactivity_band: Option<Band>,
    pub attitude: Option<Attitude>,
    pub classification: Option<Classification>,
}

/// Normalizes every metric across the given orientations and classifies each.
///
/// This is the barrier stage of the pipeline: it needs every orientation's
/// raw vector.
pub fn assess(raw: &[(Orientation, MetricVector)], cfg: &HierarchyConfig) -> Vec<Assessment> {
    let mut mm = vec![MetricVector::default(); raw.len()];
    for m in Metric::ALL {
        let column: Vec<Option<f64>> = raw.iter().map(|(_, v)| v.get(m)).collect();
        for (slot, v) in mm.iter_mut().zip(min_max_normalize(&column)) {
            slot.set(m, v);
        }
    }
    raw.iter()
        .zip(mm)
        .map(|(&(orientation, raw), mm)| {
            let corrected = mm.map(|m, v| match cfg.direction(m) {
                Direction::HigherIsMore => v,
                Direction::LowerIsMore => 1.0 - v,
            });
            let connectivity_composite = composite(Dimension::Connectivity, &corrected, cfg);
            let interactivity_composite = composite(Dimension::Interactivity, &corrected, cfg);
            let connectivity_band = connectivity_composite.map(|v| band(v, cfg.connectivity));
            let interactivity_band = interactivity_composite.map(|v| band(v, cfg.interactivity));
            let attitude = raw
                .get(Metric::Sentiment)
                .map(|s| attitude(s, cfg.attitude));
            let classification = match (connectivity_band, interactivity_band, attitude) {
                (Some(c), Some(i), Some(a)) => Some(classify(c, i, a)),
                _ => None,
            };
            Assessment {
                orientation,
                raw,
                mm,
                corrected,
                connectivity_composite,
                interactivity_composite,
                connectivity_band,
                interactivity_band,
                attitude,
                classification,
            }
        })
        .collect()
}
