//! Seeded synthetic corpora with planted structure.
//!
//! Each orientation gets its own actor pool and its own random stream, so
//! adding or changing one plan leaves the other orientations' messages
//! untouched.

use std::io::Write;

use chrono::{DateTime, NaiveDate, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Message, Orientation, OrientationLexicon};
use crate::error::{Error, Result};
use crate::language::PolarityLexicon;

const DAY: i64 = 86_400;
/// Threads start in the first half of their day.
const THREAD_START_SPAN: i64 = DAY / 2;
/// Follow-up pings land within an hour of the first one.
const PING_SPREAD: i64 = 3_600;
/// Longest lag; keeps every response inside the thread's day.
const MAX_LAG: i64 = 11 * 3_600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Every contact touches one hub.
    Star,
    /// Most contacts fall inside a small core; the rest link the periphery to it.
    DenseCore,
    /// Actors are paired up and only talk to their partner.
    FragmentedDyads,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LagDistribution {
    Constant { hours: f64 },
    Exponential { mean_hours: f64 },
}

impl LagDistribution {
    fn sample(self, rng: &mut impl Rng) -> i64 {
        let hours = match self {
            LagDistribution::Constant { hours } => hours,
            LagDistribution::Exponential { mean_hours } => Exp::new(1.0 / mean_hours)
                .expect("validated mean")
                .sample(rng),
        };
        ((hours * 3600.0).round() as i64).clamp(1, MAX_LAG)
    }

    fn validate(self) -> Result<()> {
        let (h, max) = match self {
            LagDistribution::Constant { hours } => (hours, MAX_LAG as f64 / 3600.0),
            LagDistribution::Exponential { mean_hours } => (mean_hours, f64::INFINITY),
        };
        if !(h > 0.0 && h.is_finite() && h <= max) {
            return Err(Error::InvalidConfig(format!(
                "invalid response lag of {h} hours"
            )));
        }
        Ok(())
    }
}

/// Filler tokens `w1..wN` drawn from a Zipf law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Vocabulary {
    pub size: u32,
    pub zipf_exponent: f64,
    pub min_tokens: u32,
    pub max_tokens: u32,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            size: 5_000,
            zipf_exponent: 1.0,
            min_tokens: 4,
            max_tokens: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrientationPlan {
    pub orientation: Orientation,
    pub actors: u32,
    pub messages: u32,
    pub shape: Shape,
    pub lag: LagDistribution,
    /// Chance that a contacted actor answers.
    pub response_rate: f64,
    /// Chance of each further ping before the answer.
    pub extra_ping_rate: f64,
    /// Chance that a message is a standalone post without contacts.
    pub isolated_rate: f64,
    /// In `[-1, 1]`; the share of positive polar terms is `(1 + bias) / 2`.
    pub sentiment_bias: f64,
    /// Upper bound on polar terms per message.
    pub polar_terms: u32,
    pub vocabulary: Vocabulary,
    /// Alternates star days and cycle days with this period, which plants a
    /// known oscillation in the daily group betweenness centralization.
    pub oscillation_period: Option<u32>,
}

impl Default for OrientationPlan {
    fn default() -> Self {
        OrientationPlan {
            orientation: Orientation::Customers,
            actors: 50,
            messages: 500,
            shape: Shape::DenseCore,
            lag: LagDistribution::Exponential { mean_hours: 3.0 },
            response_rate: 0.6,
            extra_ping_rate: 0.1,
            isolated_rate: 0.1,
            sentiment_bias: 0.3,
            polar_terms: 2,
            vocabulary: Vocabulary::default(),
            oscillation_period: None,
        }
    }
}

impl OrientationPlan {
    fn rate(name: &str, v: f64) -> Result<()> {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "{name} must be in [0, 1], got {v}"
            )))
        }
    }

    fn validate(&self, days: u32) -> Result<()> {
        if self.actors < 2 || self.messages == 0 {
            return Err(Error::InvalidConfig(format!(
                "{}: need at least 2 actors and 1 message",
                self.orientation
            )));
        }
        Self::rate("response_rate", self.response_rate)?;
        Self::rate("extra_ping_rate", self.extra_ping_rate)?;
        Self::rate("isolated_rate", self.isolated_rate)?;
        if !(-1.0..=1.0).contains(&self.sentiment_bias) {
            return Err(Error::InvalidConfig(
                "sentiment_bias must be in [-1, 1]".into(),
            ));
        }
        if self.extra_ping_rate >= 1.0 {
            return Err(Error::InvalidConfig(
                "extra_ping_rate must be below 1".into(),
            ));
        }
        self.lag.validate()?;
        let v = self.vocabulary;
        if v.size == 0
            || v.zipf_exponent.is_nan()
            || v.zipf_exponent < 0.0
            || v.min_tokens > v.max_tokens
        {
            return Err(Error::InvalidConfig("invalid vocabulary profile".into()));
        }
        if let Some(p) = self.oscillation_period {
            if p < 2 {
                return Err(Error::InvalidConfig(
                    "oscillation_period must be at least 2".into(),
                ));
            }
            if self.actors < 3 || self.messages / days < 6 {
                return Err(Error::InvalidConfig(format!(
                    "{}: a planted oscillation needs 3 actors and 6 messages per day",
                    self.orientation
                )));
            }
        }
        Ok(())
    }

    /// Whether day `d` of a planted oscillation is a star day.
    fn high_day(period: u32, d: u32) -> bool {
        d % period < period.div_ceil(2)
    }
}

/// Extrema a planted period produces over `days` daily windows: the series is
/// piecewise constant, so every run of equal days except the two at the ends
/// is one extremum.
pub fn planted_extrema(period: u32, days: u32) -> u64 {
    if days < 3 {
        return 0;
    }
    let runs = 1
        + (1..days)
            .filter(|&d| {
                OrientationPlan::high_day(period, d) != OrientationPlan::high_day(period, d - 1)
            })
            .count() as u64;
    runs.saturating_sub(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    /// First day; messages fall in `[start, start + days)`.
    pub start: NaiveDate,
    pub days: u32,
    /// Messages that match no orientation.
    pub noise_messages: u32,
    pub noise_actors: u32,
    /// Chance that a message also carries a phrase of another orientation.
    /// Orientations with a planted oscillation never receive these.
    pub cross_tag_rate: f64,
    pub orientations: Vec<OrientationPlan>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            start: NaiveDate::from_ymd_opt(2017, 3, 1).expect("valid date"),
            days: 60,
            noise_messages: 0,
            noise_actors: 100,
            cross_tag_rate: 0.0,
            orientations: Vec::new(),
        }
    }
}

/// Reference corpus profile per orientation, canonical order.
const REFERENCE_ACTIVITY: [u32; 6] = [19_153, 10_957, 2_812, 13_437, 4_239, 2_604];
const REFERENCE_ACTORS: [u32; 6] = [12_070, 8_041, 2_105, 7_872, 3_270, 1_809];
const REFERENCE_ART: [f64; 6] = [5.674, 3.402, 2.884, 4.136, 2.75, 4.009];
const REFERENCE_SENTIMENT: [f64; 6] = [0.695, 0.63, 0.719, 0.754, 0.688, 0.664];

impl SynthSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("synth spec: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::InvalidConfig("days must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.cross_tag_rate) {
            return Err(Error::InvalidConfig(
                "cross_tag_rate must be in [0, 1]".into(),
            ));
        }
        if self.noise_messages > 0 && self.noise_actors == 0 {
            return Err(Error::InvalidConfig(
                "noise messages need noise actors".into(),
            ));
        }
        let mut seen = Vec::new();
        for p in &self.orientations {
            if seen.contains(&p.orientation) {
                return Err(Error::InvalidConfig(format!(
                    "{} planned twice",
                    p.orientation
                )));
            }
            seen.push(p.orientation);
            p.validate(self.days)?;
        }
        Ok(())
    }

    /// About `total` messages over 60 days: 70% spread over the six
    /// orientations in proportion to the reference activity, with actor pools,
    /// lags and sentiment scaled from the same profile; 30% untagged noise.
    pub fn reference_scale(total: u32) -> Self {
        let tagged = f64::from(total) * 0.7;
        let activity_sum: u32 = REFERENCE_ACTIVITY.iter().sum();
        let scale = tagged / f64::from(activity_sum);
        let shapes = [
            Shape::DenseCore,
            Shape::DenseCore,
            Shape::Star,
            Shape::DenseCore,
            Shape::Star,
            Shape::FragmentedDyads,
        ];
        let orientations = Orientation::ALL
            .iter()
            .map(|&o| {
                let i = o.index();
                OrientationPlan {
                    orientation: o,
                    actors: ((f64::from(REFERENCE_ACTORS[i]) * scale).round() as u32).max(2),
                    messages: ((f64::from(REFERENCE_ACTIVITY[i]) * scale).round() as u32).max(1),
                    shape: shapes[i],
                    lag: LagDistribution::Exponential {
                        mean_hours: REFERENCE_ART[i],
                    },
                    sentiment_bias: (REFERENCE_SENTIMENT[i] - 0.5) * 2.0,
                    ..OrientationPlan::default()
                }
            })
            .collect();
        SynthSpec {
            noise_messages: (f64::from(total) * 0.3).round() as u32,
            noise_actors: (total / 10).max(1),
            cross_tag_rate: 0.02,
            orientations,
            ..SynthSpec::default()
        }
    }

    fn start_ts(&self) -> i64 {
        self.start
            .and_hms_opt(0, 0, 0)
            .expect("midnight exists")
            .and_utc()
            .timestamp()
    }
}

struct Draft {
    author: usize,
    target: Option<usize>,
    reply_to: Option<usize>,
    at: i64,
}

fn handle(o: Orientation, i: usize) -> String {
    format!("{}_{:05}", o.slug(), i)
}

/// Contact pair for a thread in an unplanted day.
/// Dyads are visited in turn, `k` counting threads.
fn pick_pair(shape: Shape, actors: usize, k: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let (a, b) = match shape {
        Shape::Star => (0, rng.random_range(1..actors)),
        Shape::DenseCore => {
            let core = (actors / 10).clamp(2, actors);
            let a = rng.random_range(0..core);
            let mut b = if core < actors && rng.random_bool(0.4) {
                rng.random_range(core..actors)
            } else {
                rng.random_range(0..core)
            };
            if b == a {
                b = (a + 1) % core;
            }
            (a, b)
        }
        Shape::FragmentedDyads => {
            let i = k % (actors / 2);
            (2 * i, 2 * i + 1)
        }
    };
    if rng.random_bool(0.5) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Contact pair `k` of a planted day over actors `0..m`.
fn planted_pair(high: bool, m: usize, k: usize) -> (usize, usize) {
    if high {
        (0, 1 + k % (m - 1))
    } else {
        let i = k % m;
        (i, (i + 1) % m)
    }
}

fn day_counts(total: u32, days: u32) -> impl Iterator<Item = u32> {
    let (base, extra) = (total / days, total % days);
    (0..days).map(move |d| base + u32::from(d < extra))
}

fn draft_orientation(plan: &OrientationPlan, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<Draft> {
    let actors = plan.actors as usize;
    let start = spec.start_ts();
    let mut drafts = Vec::with_capacity(plan.messages as usize);
    let thread = |drafts: &mut Vec<Draft>,
                  day_start: i64,
                  a: usize,
                  b: usize,
                  budget: u32,
                  rng: &mut ChaCha8Rng| {
        let t0 = day_start + rng.random_range(0..THREAD_START_SPAN);
        let mut used = 1;
        let first = drafts.len();
        drafts.push(Draft {
            author: a,
            target: Some(b),
            reply_to: None,
            at: t0,
        });
        let mut last = t0;
        while used < budget && rng.random_bool(plan.extra_ping_rate) {
            last = (last + rng.random_range(1..=PING_SPREAD / 4)).min(t0 + PING_SPREAD);
            drafts.push(Draft {
                author: a,
                target: Some(b),
                reply_to: None,
                at: last,
            });
            used += 1;
        }
        if used < budget && rng.random_bool(plan.response_rate) {
            drafts.push(Draft {
                author: b,
                target: None,
                reply_to: Some(drafts.len() - 1),
                at: last + plan.lag.sample(rng),
            });
            used += 1;
        }
        debug_assert!(drafts[first..].iter().all(|d| d.at < day_start + DAY));
        used
    };

    match plan.oscillation_period {
        Some(period) => {
            let threads = (plan.messages / spec.days / 2) as usize;
            let m = actors.min(threads);
            for d in 0..spec.days {
                let day_start = start + i64::from(d) * DAY;
                let high = OrientationPlan::high_day(period, d);
                for k in 0..threads {
                    let (a, b) = planted_pair(high, m, k);
                    thread(&mut drafts, day_start, a, b, 2, rng);
                }
            }
        }
        None => {
            let mut threads = 0;
            for (d, mut budget) in day_counts(plan.messages, spec.days).enumerate() {
                let day_start = start + d as i64 * DAY;
                while budget > 0 {
                    if rng.random_bool(plan.isolated_rate) {
                        drafts.push(Draft {
                            author: rng.random_range(0..actors),
                            target: None,
                            reply_to: None,
                            at: day_start + rng.random_range(0..DAY),
                        });
                        budget -= 1;
                        continue;
                    }
                    let (a, b) = pick_pair(plan.shape, actors, threads, rng);
                    budget -= thread(&mut drafts, day_start, a, b, budget, rng);
                    threads += 1;
                }
            }
        }
    }
    drafts
}

struct TextGen<'a> {
    lexicon: &'a OrientationLexicon,
    positive: Vec<&'a str>,
    negative: Vec<&'a str>,
}

impl TextGen<'_> {
    fn filler(&self, v: Vocabulary, rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
        let zipf = Zipf::new(f64::from(v.size), v.zipf_exponent).expect("validated vocabulary");
        let n = rng.random_range(v.min_tokens..=v.max_tokens);
        for _ in 0..n {
            let rank = zipf.sample(rng) as u64;
            out.push(format!("w{rank}"));
        }
    }

    fn phrase(&self, o: Orientation, rng: &mut ChaCha8Rng) -> Vec<String> {
        self.lexicon
            .phrases(o)
            .choose(rng)
            .cloned()
            .unwrap_or_default()
    }

    fn polar(&self, plan: &OrientationPlan, rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
        let p = (1.0 + plan.sentiment_bias) / 2.0;
        for _ in 0..rng.random_range(0..=plan.polar_terms) {
            let pool = if rng.random_bool(p) {
                &self.positive
            } else {
                &self.negative
            };
            if let Some(t) = pool.choose(rng) {
                out.push((*t).to_string());
            }
        }
    }
}

fn insert_phrase(tokens: &mut Vec<String>, phrase: Vec<String>, rng: &mut ChaCha8Rng) {
    let at = rng.random_range(0..=tokens.len());
    tokens.splice(at..at, phrase);
}

fn to_datetime(t: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(t, 0).expect("timestamp in range")
}

/// Generates a corpus in canonical order. The same spec, seed and lexicons
/// always give the same messages.
pub fn generate_corpus(
    spec: &SynthSpec,
    seed: u64,
    lexicon: &OrientationLexicon,
    polarity: &PolarityLexicon,
) -> Result<Vec<Message>> {
    spec.validate()?;
    let (positive, negative) = polarity.terms();
    let text = TextGen {
        lexicon,
        positive,
        negative,
    };
    let cross_targets: Vec<Orientation> = Orientation::ALL
        .into_iter()
        .filter(|o| {
            !spec
                .orientations
                .iter()
                .any(|p| p.orientation == *o && p.oscillation_period.is_some())
        })
        .collect();

    let mut messages = Vec::new();
    for plan in &spec.orientations {
        let o = plan.orientation;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(o.index() as u64);
        let drafts = draft_orientation(plan, spec, &mut rng);
        let ids: Vec<String> = drafts
            .iter()
            .enumerate()
            .map(|(i, d)| {
                format!(
                    "{}-{:03}-{:06}",
                    o.slug(),
                    (d.at - spec.start_ts()) / DAY,
                    i
                )
            })
            .collect();
        for (i, d) in drafts.iter().enumerate() {
            let mut tokens = Vec::new();
            text.filler(plan.vocabulary, &mut rng, &mut tokens);
            text.polar(plan, &mut rng, &mut tokens);
            let phrase = text.phrase(o, &mut rng);
            insert_phrase(&mut tokens, phrase, &mut rng);
            if plan.oscillation_period.is_none() && rng.random_bool(spec.cross_tag_rate) {
                if let Some(&other) = cross_targets
                    .iter()
                    .filter(|&&c| c != o)
                    .collect::<Vec<_>>()
                    .choose(&mut rng)
                {
                    let phrase = text.phrase(*other, &mut rng);
                    insert_phrase(&mut tokens, phrase, &mut rng);
                }
            }
            messages.push(Message {
                id: ids[i].clone(),
                author: handle(o, d.author),
                created_at: to_datetime(d.at),
                text: tokens.join(" "),
                reply_to: d.reply_to.map(|r| ids[r].clone()),
                retweet_of: None,
                mentions: d.target.map(|t| vec![handle(o, t)]).unwrap_or_default(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(Orientation::ALL.len() as u64);
    let start = spec.start_ts();
    let noise_plan = OrientationPlan {
        sentiment_bias: 0.0,
        ..OrientationPlan::default()
    };
    for i in 0..spec.noise_messages {
        let mut tokens = Vec::new();
        text.filler(noise_plan.vocabulary, &mut rng, &mut tokens);
        text.polar(&noise_plan, &mut rng, &mut tokens);
        messages.push(Message {
            id: format!("noise-{i:06}"),
            author: format!("noise_{:05}", rng.random_range(0..spec.noise_actors)),
            created_at: to_datetime(start + rng.random_range(0..i64::from(spec.days) * DAY)),
            text: tokens.join(" "),
            reply_to: None,
            retweet_of: None,
            mentions: Vec::new(),
        });
    }
    messages.sort_by(|a, b| a.canonical_cmp(b));
    Ok(messages)
}

/// Writes messages as newline-delimited corpus records.
pub fn write_jsonl<W: Write>(messages: &[Message], mut out: W) -> std::io::Result<()> {
    for m in messages {
        out.write_all(m.to_record_json().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(spec: &SynthSpec, seed: u64) -> Vec<Message> {
        generate_corpus(
            spec,
            seed,
            &OrientationLexicon::default(),
            &PolarityLexicon::default(),
        )
        .unwrap()
    }

    #[test]
    fn planted_extrema_counts_runs() {
        // high x3, low x2, high x3: only the low run is interior
        assert_eq!(planted_extrema(5, 8), 1);
        assert_eq!(planted_extrema(2, 6), 4);
        assert_eq!(planted_extrema(7, 60), 15);
        assert_eq!(planted_extrema(7, 2), 0);
    }

    #[test]
    fn same_seed_same_output() {
        let spec = SynthSpec::reference_scale(3_000);
        let a = gen(&spec, 7);
        let b = gen(&spec, 7);
        assert_eq!(a, b);
        let c = gen(&spec, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn reference_scale_proportions() {
        let spec = SynthSpec::reference_scale(100_000);
        let tagged: u32 = spec.orientations.iter().map(|p| p.messages).sum();
        assert!((69_990..=70_010).contains(&tagged));
        assert_eq!(spec.noise_messages, 30_000);
        spec.validate().unwrap();
    }

    #[test]
    fn messages_stay_in_range() {
        let spec = SynthSpec {
            days: 10,
            noise_messages: 50,
            orientations: vec![OrientationPlan {
                lag: LagDistribution::Exponential { mean_hours: 30.0 },
                ..OrientationPlan::default()
            }],
            ..SynthSpec::default()
        };
        let lo = spec.start_ts();
        let msgs = gen(&spec, 1);
        assert_eq!(msgs.len(), 550);
        for m in &msgs {
            assert!(m.timestamp() >= lo && m.timestamp() < lo + 10 * DAY);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = SynthSpec {
            orientations: vec![OrientationPlan {
                oscillation_period: Some(7),
                messages: 100,
                ..OrientationPlan::default()
            }],
            ..SynthSpec::default()
        };
        assert!(spec.validate().unwrap_err().is_config());
        spec.orientations[0].messages = 600;
        spec.validate().unwrap();
        spec.orientations.push(spec.orientations[0].clone());
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = SynthSpec::reference_scale(1_000);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(SynthSpec::from_json(&s).unwrap(), spec);
    }
}
