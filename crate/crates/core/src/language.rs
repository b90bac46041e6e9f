//! Sentiment, emotionality and complexity of the discourse.
//!
//! Sentiment scores live in `[0, 1]` with 0.5 neutral. The scorer is a trait
//! so other models can replace the bundled polar-term baseline.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::tokenize;

const DEFAULT_POLARITY: &str = include_str!("../data/polarity.json");

/// Maps a message to a sentiment in `[0, 1]`; below 0.5 is negative, above
/// is positive.
pub trait SentimentScorer: Sync {
    fn score_tokens(&self, tokens: &[String]) -> f64;

    fn score(&self, text: &str) -> f64 {
        self.score_tokens(&tokenize(text))
    }
}

/// Positive and negative single-token terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarityLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

#[derive(Deserialize)]
struct PolarityFile {
    positive: Vec<String>,
    negative: Vec<String>,
}

impl PolarityLexicon {
    pub fn new<P, N, S, T>(positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator<Item = S>,
        N: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        fn terms<I: IntoIterator<Item = S>, S: AsRef<str>>(it: I) -> Result<HashSet<String>> {
            let mut set = HashSet::new();
            for raw in it {
                let raw = raw.as_ref();
                let mut toks = tokenize(raw);
                if toks.len() != 1 {
                    return Err(Error::InvalidLexicon(format!(
                        "polar term `{raw}` must be a single token"
                    )));
                }
                set.insert(toks.remove(0));
            }
            Ok(set)
        }
        let positive = terms(positive)?;
        let negative = terms(negative)?;
        if let Some(both) = positive.intersection(&negative).min() {
            return Err(Error::InvalidLexicon(format!(
                "`{both}` is both positive and negative"
            )));
        }
        Ok(PolarityLexicon { positive, negative })
    }

    /// Parses `{"positive": [...], "negative": [...]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: PolarityFile = serde_json::from_str(s)?;
        Self::new(f.positive, f.negative)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    /// The same lexicon with the two polarities exchanged.
    pub fn swapped(&self) -> Self {
        PolarityLexicon {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.contains(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.contains(token)
    }

    /// Positive and negative terms, each sorted.
    pub fn terms(&self) -> (Vec<&str>, Vec<&str>) {
        let mut p: Vec<&str> = self.positive.iter().map(String::as_str).collect();
        let mut n: Vec<&str> = self.negative.iter().map(String::as_str).collect();
        p.sort_unstable();
        n.sort_unstable();
        (p, n)
    }
}

impl Default for PolarityLexicon {
    fn default() -> Self {
        Self::from_json(DEFAULT_POLARITY).expect("bundled polarity lexicon is valid")
    }
}

impl SentimentScorer for PolarityLexicon {
    /// `0.5 + (p - q) / (2 (p + q))` over positive and negative term counts;
    /// 0.5 when no polar term occurs.
    fn score_tokens(&self, tokens: &[String]) -> f64 {
        let p = tokens.iter().filter(|t| self.is_positive(t)).count();
        let q = tokens.iter().filter(|t| self.is_negative(t)).count();
        if p + q == 0 {
            return 0.5;
        }
        0.5 + (p as f64 - q as f64) / (2.0 * (p + q) as f64)
    }
}

pub fn score_sentiment(text: &str, lex: &PolarityLexicon) -> f64 {
    lex.score(text)
}

/// Arithmetic mean, `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean absolute deviation of the sentiments from neutral; in `[0, 0.5]`.
pub fn emotionality(sentiments: &[f64]) -> Option<f64> {
    let dev: Vec<f64> = sentiments.iter().map(|s| (s - 0.5).abs()).collect();
    mean(&dev)
}

/// Unigram reference probabilities with a single mass for unseen tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceDictionary {
    probs: HashMap<String, f64>,
    unseen: f64,
}

impl ReferenceDictionary {
    /// Add-one smoothed model: `p(w) = (c(w) + 1) / (N + V + 1)` and unseen
    /// mass `1 / (N + V + 1)`, for `N` tokens over `V` distinct types.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (w, c) in counts {
            *merged.entry(w.into()).or_default() += c;
        }
        let n: u64 = merged.values().sum();
        let denom = (n + merged.len() as u64 + 1) as f64;
        let probs = merged
            .into_iter()
            .map(|(w, c)| (w, (c + 1) as f64 / denom))
            .collect();
        ReferenceDictionary {
            probs,
            unseen: 1.0 / denom,
        }
    }

    pub fn from_tokens<'a, I>(tokens: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for t in tokens {
            *counts.entry(t).or_default() += 1;
        }
        Self::from_counts(counts)
    }

    /// Uses the given probabilities as they are. Every probability must be
    /// positive and the total mass, unseen included, at most one.
    pub fn from_probabilities<I, S>(probs: I, unseen: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let probs: HashMap<String, f64> = probs.into_iter().map(|(w, p)| (w.into(), p)).collect();
        if let Some((w, p)) = probs.iter().find(|(_, p)| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidInput(format!("probability of `{w}` is {p}")));
        }
        if !(unseen >= 0.0 && unseen.is_finite()) {
            return Err(Error::InvalidInput(format!("unseen mass is {unseen}")));
        }
        let dict = ReferenceDictionary { probs, unseen };
        if dict.total_mass() > 1.0 + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {}",
                dict.total_mass()
            )));
        }
        Ok(dict)
    }

    /// Reads a JSON object of token counts and smooths it like
    /// [`ReferenceDictionary::from_counts`].
    pub fn from_counts_json(s: &str) -> Result<Self> {
        let raw: HashMap<String, u64> = serde_json::from_str(s)?;
        Ok(Self::from_counts(
            raw.into_iter().map(|(w, c)| (w.to_lowercase(), c)),
        ))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_counts_json(&s)
    }

    pub fn probability(&self, token: &str) -> f64 {
        self.probs.get(token).copied().unwrap_or(self.unseen)
    }

    pub fn unseen_mass(&self) -> f64 {
        self.unseen
    }

    pub fn vocabulary_size(&self) -> usize {
        self.probs.len()
    }

    /// Vocabulary mass plus unseen mass, summed in sorted token order.
    pub fn total_mass(&self) -> f64 {
        let mut words: Vec<(&String, &f64)> = self.probs.iter().collect();
        words.sort_unstable_by(|a, b| a.0.cmp(b.0));
        words.iter().map(|(_, p)| **p).sum::<f64>() + self.unseen
    }
}

/// Mean surprisal `-ln p(token)` in nats; `None` for no tokens.
pub fn complexity<'a, I>(tokens: I, reference: &ReferenceDictionary) -> Option<f64>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut sum = 0.0;
    let mut n = 0u64;
    for t in tokens {
        sum += -reference.probability(t).ln();
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Language scores of one orientation, message weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LanguageScores {
    pub sentiment: Option<f64>,
    pub emotionality: Option<f64>,
    pub complexity: Option<f64>,
}
