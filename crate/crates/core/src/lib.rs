//! Stakeholder discourse analysis around six core-value orientations.
//!
//! A corpus of timestamped posts is tagged by orientation, turned into
//! interaction graphs, and measured along three dimensions: connectivity
//! ([`graph`]), interactivity ([`dynamics`]) and use of language
//! ([`language`]). The [`hierarchy`] stage min-max normalizes the twelve
//! metrics across orientations and classifies each orientation as active,
//! latent or void with a strategy hint. [`pipeline`] runs the whole chain and
//! [`synth`] generates seeded corpora with planted structure.

pub mod config;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod graph;
pub mod hierarchy;
pub mod language;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod text;

pub use corpus::{Message, Orientation, OrientationLexicon, OrientationSet};
pub use error::{Error, Result};
pub use exec::Exec;
pub use hierarchy::{Class, Metric, MetricVector};
