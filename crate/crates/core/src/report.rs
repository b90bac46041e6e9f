//! Machine-readable run report and its CSV companion.
//!
//! Floating-point values are written with six significant digits so reports
//! compare byte for byte across platforms. Count metrics are written exactly.

use std::io::Write;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::corpus::Orientation;
use crate::error::Result;
use crate::hierarchy::{Assessment, Attitude, Band, Class, Metric, MetricVector};

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

fn is_count(m: Metric) -> bool {
    matches!(
        m,
        Metric::ActorCount | Metric::Activity | Metric::RotatingLeadership
    )
}

fn ser_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&sig6(*x)),
        None => s.serialize_none(),
    }
}

/// Count metrics as integers, everything else at six significant digits.
fn ser_raw<S: Serializer>(v: &MetricVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(Metric::ALL.len()))?;
    for (m, x) in v.iter() {
        match x {
            Some(x) if is_count(m) && x.fract() == 0.0 && x.abs() < 2f64.powi(53) => {
                map.serialize_entry(m.key(), &(x as i64))?
            }
            x => map.serialize_entry(m.key(), &x.map(sig6))?,
        }
    }
    map.end()
}

fn ser_scaled<S: Serializer>(v: &MetricVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(Metric::ALL.len()))?;
    for (m, x) in v.iter() {
        map.serialize_entry(m.key(), &x.map(sig6))?;
    }
    map.end()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Corpus,
    Replay,
}

/// Corpus-level counts of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMetadata {
    pub mode: RunMode,
    /// Valid messages parsed from the corpus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_records: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded_untagged: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kept_messages: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dangling_references: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_hours: Option<u32>,
}

impl RunMetadata {
    pub fn replay() -> Self {
        RunMetadata {
            mode: RunMode::Replay,
            corpus_size: None,
            skipped_records: None,
            discarded_untagged: None,
            kept_messages: None,
            dangling_references: None,
            window_count: None,
            window_hours: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Composites {
    #[serde(serialize_with = "ser_opt")]
    pub connectivity: Option<f64>,
    #[serde(serialize_with = "ser_opt")]
    pub interactivity: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Bands {
    pub connectivity: Option<Band>,
    pub interactivity: Option<Band>,
}

/// Everything reported for one orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationReport {
    pub orientation: Orientation,
    /// Tagged messages (corpus runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub messages: Option<usize>,
    #[serde(serialize_with = "ser_raw")]
    pub raw: MetricVector,
    #[serde(serialize_with = "ser_scaled")]
    pub mm: MetricVector,
    #[serde(serialize_with = "ser_scaled")]
    pub corrected: MetricVector,
    pub composites: Composites,
    pub bands: Bands,
    pub attitude: Option<Attitude>,
    pub class: Option<Class>,
    pub label: Option<&'static str>,
    pub hint: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_class: Option<Class>,
}

impl OrientationReport {
    pub fn from_assessment(a: &Assessment) -> Self {
        let class = a.classification.map(|c| c.class);
        OrientationReport {
            orientation: a.orientation,
            messages: None,
            raw: a.raw,
            mm: a.mm,
            corrected: a.corrected,
            composites: Composites {
                connectivity: a.connectivity_composite,
                interactivity: a.interactivity_composite,
            },
            bands: Bands {
                connectivity: a.connectivity_band,
                interactivity: a.interactivity_band,
            },
            attitude: a.attitude,
            class,
            label: class.map(Class::label),
            hint: a.classification.map(|c| c.hint),
            expected_class: None,
        }
    }
}

/// Per-orientation metrics, normalization and classification of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub metadata: RunMetadata,
    /// Canonical orientation order.
    pub orientations: Vec<OrientationReport>,
    pub warnings: Vec<String>,
}

impl HierarchyReport {
    pub fn get(&self, o: Orientation) -> Option<&OrientationReport> {
        self.orientations.iter().find(|r| r.orientation == o)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }

    /// One row per orientation: raw and MM value of every metric, then the
    /// composites, bands, attitude and class.
    pub fn write_metrics_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["orientation".to_string()];
        for m in Metric::ALL {
            header.push(m.key().to_string());
            header.push(format!("{}_mm", m.key()));
        }
        header.extend(
            [
                "connectivity_composite",
                "interactivity_composite",
                "connectivity_band",
                "interactivity_band",
                "attitude",
                "class",
            ]
            .map(String::from),
        );
        w.write_record(&header)?;
        let num = |x: Option<f64>| x.map(|v| sig6(v).to_string()).unwrap_or_default();
        let raw = |m: Metric, x: Option<f64>| match x {
            Some(v) if is_count(m) => v.to_string(),
            x => num(x),
        };
        let dbg = |x: Option<String>| x.unwrap_or_default();
        for r in &self.orientations {
            let mut row = vec![r.orientation.name().to_string()];
            for m in Metric::ALL {
                row.push(raw(m, r.raw.get(m)));
                row.push(num(r.mm.get(m)));
            }
            row.push(num(r.composites.connectivity));
            row.push(num(r.composites.interactivity));
            row.push(dbg(r.bands.connectivity.map(|b| format!("{b:?}"))));
            row.push(dbg(r.bands.interactivity.map(|b| format!("{b:?}"))));
            row.push(dbg(r.attitude.map(|a| format!("{a:?}").to_lowercase())));
            row.push(dbg(r.class.map(|c| format!("{c:?}"))));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
