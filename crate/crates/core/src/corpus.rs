//! Corpus ingestion, orientation tagging and partitioning.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::text::tokenize;

/// Longest keyword phrase accepted by a lexicon, in tokens.
pub const MAX_PHRASE_TOKENS: usize = 5;

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.json");

/// The six core-value orientations, in canonical report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Customers,
    Employees,
    EconomicFinancialGrowth,
    Excellence,
    Citizenship,
    SocialResponsibility,
}

impl Orientation {
    pub const ALL: [Orientation; 6] = [
        Orientation::Customers,
        Orientation::Employees,
        Orientation::EconomicFinancialGrowth,
        Orientation::Excellence,
        Orientation::Citizenship,
        Orientation::SocialResponsibility,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Customers => "Customers",
            Orientation::Employees => "Employees",
            Orientation::EconomicFinancialGrowth => "EconomicFinancialGrowth",
            Orientation::Excellence => "Excellence",
            Orientation::Citizenship => "Citizenship",
            Orientation::SocialResponsibility => "SocialResponsibility",
        }
    }

    /// Short lowercase tag, used for file names and synthetic handles.
    pub fn slug(self) -> &'static str {
        match self {
            Orientation::Customers => "customers",
            Orientation::Employees => "employees",
            Orientation::EconomicFinancialGrowth => "growth",
            Orientation::Excellence => "excellence",
            Orientation::Citizenship => "citizenship",
            Orientation::SocialResponsibility => "social",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Orientation::ALL
            .into_iter()
            .find(|o| o.name() == s || o.slug() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown orientation `{s}`")))
    }
}

/// A set of orientations stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OrientationSet(u8);

impl OrientationSet {
    pub const fn empty() -> Self {
        OrientationSet(0)
    }

    pub fn single(o: Orientation) -> Self {
        OrientationSet(1 << o.index())
    }

    pub fn insert(&mut self, o: Orientation) {
        self.0 |= 1 << o.index();
    }

    pub fn contains(self, o: Orientation) -> bool {
        self.0 & (1 << o.index()) != 0
    }

    pub fn union(self, other: OrientationSet) -> Self {
        OrientationSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in canonical order.
    pub fn iter(self) -> impl Iterator<Item = Orientation> {
        Orientation::ALL
            .into_iter()
            .filter(move |o| self.contains(*o))
    }
}

impl fmt::Debug for OrientationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Orientation> for OrientationSet {
    fn from_iter<I: IntoIterator<Item = Orientation>>(iter: I) -> Self {
        let mut set = OrientationSet::empty();
        for o in iter {
            set.insert(o);
        }
        set
    }
}

/// One social-media post.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub id: String,
    /// Lowercased handle without the leading `@`.
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub reply_to: Option<String>,
    pub retweet_of: Option<String>,
    /// Lowercased handles, in the order they appear in the record.
    pub mentions: Vec<String>,
}

impl Message {
    /// Seconds since the Unix epoch.
    pub fn timestamp(&self) -> i64 {
        self.created_at.timestamp()
    }

    /// Orders by `(created_at, id)`, the canonical corpus order.
    pub fn canonical_cmp(&self, other: &Message) -> std::cmp::Ordering {
        self.created_at
            .cmp(&other.created_at)
            .then_with(|| self.id.cmp(&other.id))
    }

    /// Serializes the message as one corpus record (no trailing newline).
    pub fn to_record_json(&self) -> String {
        let record = RecordOut {
            id: &self.id,
            author: &self.author,
            created_at: self.created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            text: &self.text,
            reply_to: self.reply_to.as_deref(),
            retweet_of: self.retweet_of.as_deref(),
            mentions: &self.mentions,
        };
        serde_json::to_string(&record).expect("record serialization is infallible")
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    author: &'a str,
    created_at: String,
    text: &'a str,
    reply_to: Option<&'a str>,
    retweet_of: Option<&'a str>,
    mentions: &'a [String],
}

#[derive(Deserialize)]
struct RecordIn {
    id: Option<String>,
    author: Option<String>,
    created_at: Option<String>,
    text: Option<String>,
    #[serde(default)]
    reply_to: Option<String>,
    #[serde(default)]
    retweet_of: Option<String>,
    #[serde(default)]
    mentions: Option<Vec<String>>,
}

fn normalize_handle(h: &str) -> String {
    h.trim().trim_start_matches('@').to_lowercase()
}

impl RecordIn {
    fn into_message(self) -> Option<Message> {
        let id = self.id.filter(|s| !s.is_empty())?;
        let author = normalize_handle(&self.author?);
        if author.is_empty() {
            return None;
        }
        let created_at = DateTime::parse_from_rfc3339(self.created_at?.trim()).ok()?;
        let created_at = DateTime::<Utc>::from_timestamp(created_at.timestamp(), 0)?;
        let text = self.text?;
        let reply_to = self.reply_to.filter(|s| !s.is_empty());
        let retweet_of = self.retweet_of.filter(|s| !s.is_empty());
        if reply_to.as_deref() == Some(id.as_str()) || retweet_of.as_deref() == Some(id.as_str()) {
            return None;
        }
        let mentions = self
            .mentions
            .unwrap_or_default()
            .iter()
            .map(|h| normalize_handle(h))
            .filter(|h| !h.is_empty())
            .collect();
        Some(Message {
            id,
            author,
            created_at,
            text,
            reply_to,
            retweet_of,
            mentions,
        })
    }
}

/// Result of parsing a corpus stream.
#[derive(Clone, Debug, Default)]
pub struct ParsedCorpus {
    /// Valid messages in input order.
    pub messages: Vec<Message>,
    /// Records that were malformed and skipped.
    pub skipped: usize,
}

/// Parses newline-delimited JSON records.
///
/// Blank lines are ignored. Malformed records are counted and skipped; a
/// repeated message id aborts the parse.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<ParsedCorpus> {
    let mut out = ParsedCorpus::default();
    let mut seen = HashSet::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let msg = serde_json::from_str::<RecordIn>(line)
            .ok()
            .and_then(RecordIn::into_message);
        match msg {
            Some(m) => {
                if !seen.insert(m.id.clone()) {
                    return Err(Error::DuplicateId(m.id));
                }
                out.messages.push(m);
            }
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

pub fn parse_corpus_str(s: &str) -> Result<ParsedCorpus> {
    parse_corpus(s.as_bytes())
}

pub fn read_corpus(path: &Path) -> Result<ParsedCorpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(std::io::BufReader::new(file))
}

/// Keyword phrases for each orientation.
#[derive(Clone, Debug)]
pub struct OrientationLexicon {
    phrases: [Vec<Vec<String>>; 6],
    index: HashMap<Vec<String>, OrientationSet>,
    max_len: usize,
}

impl OrientationLexicon {
    /// Builds a lexicon; every orientation must be present exactly once.
    pub fn new<I, P, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Orientation, P)>,
        P: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut phrases: [Option<Vec<Vec<String>>>; 6] = Default::default();
        for (o, list) in entries {
            if phrases[o.index()].is_some() {
                return Err(Error::InvalidLexicon(format!(
                    "orientation {o} listed twice"
                )));
            }
            let mut seen = HashSet::new();
            let mut toks = Vec::new();
            for raw in list {
                let raw = raw.as_ref();
                let t = tokenize(raw);
                if t.is_empty() {
                    return Err(Error::InvalidLexicon(format!(
                        "empty keyword `{raw}` under {o}"
                    )));
                }
                if t.len() > MAX_PHRASE_TOKENS {
                    return Err(Error::InvalidLexicon(format!(
                        "keyword `{raw}` under {o} has {} tokens (max {MAX_PHRASE_TOKENS})",
                        t.len()
                    )));
                }
                if !seen.insert(t.clone()) {
                    return Err(Error::InvalidLexicon(format!(
                        "duplicate keyword `{raw}` under {o}"
                    )));
                }
                toks.push(t);
            }
            phrases[o.index()] = Some(toks);
        }
        let mut missing = Vec::new();
        for o in Orientation::ALL {
            if phrases[o.index()].is_none() {
                missing.push(o.name());
            }
        }
        if !missing.is_empty() {
            return Err(Error::InvalidLexicon(format!(
                "missing orientations: {}",
                missing.join(", ")
            )));
        }
        let phrases = phrases.map(Option::unwrap);

        let mut index: HashMap<Vec<String>, OrientationSet> = HashMap::new();
        let mut max_len = 0;
        for o in Orientation::ALL {
            for p in &phrases[o.index()] {
                max_len = max_len.max(p.len());
                index.entry(p.clone()).or_default().insert(o);
            }
        }
        Ok(OrientationLexicon {
            phrases,
            index,
            max_len,
        })
    }

    /// Parses a JSON object mapping orientation name to an array of phrases.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: serde_json::Map<String, serde_json::Value> = serde_json::from_str(s)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let o: Orientation = k
                .parse()
                .map_err(|_| Error::InvalidLexicon(format!("unknown orientation `{k}`")))?;
            let list: Vec<String> = serde_json::from_value(v)
                .map_err(|_| Error::InvalidLexicon(format!("`{k}` must be an array of strings")))?;
            entries.push((o, list));
        }
        Self::new(entries)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    /// Tokenized phrases for one orientation.
    pub fn phrases(&self, o: Orientation) -> &[Vec<String>] {
        &self.phrases[o.index()]
    }

    /// Orientations whose phrases occur as contiguous token runs in `tokens`.
    pub fn tag_tokens(&self, tokens: &[String]) -> OrientationSet {
        let mut set = OrientationSet::empty();
        for start in 0..tokens.len() {
            let longest = self.max_len.min(tokens.len() - start);
            for len in 1..=longest {
                if let Some(hit) = self.index.get(&tokens[start..start + len]) {
                    set = set.union(*hit);
                }
            }
        }
        set
    }
}

impl Default for OrientationLexicon {
    fn default() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }
}

/// Orientations matched by the message text.
pub fn tag_message(m: &Message, lex: &OrientationLexicon) -> OrientationSet {
    lex.tag_tokens(&tokenize(&m.text))
}

#[derive(Clone, Copy, Debug)]
pub struct TaggedMessage<'a> {
    pub message: &'a Message,
    pub orientations: OrientationSet,
}

/// Messages grouped by orientation.
#[derive(Clone, Debug, Default)]
pub struct Partition<'a> {
    lists: [Vec<TaggedMessage<'a>>; 6],
    /// Messages that matched no orientation.
    pub discarded: usize,
    /// Messages that matched at least one orientation.
    pub kept: usize,
}

impl<'a> Partition<'a> {
    /// Messages tagged with `o`, sorted by `(created_at, id)`.
    pub fn get(&self, o: Orientation) -> &[TaggedMessage<'a>] {
        &self.lists[o.index()]
    }

    pub fn total_placements(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// Tags every message, drops untagged ones and groups the rest by orientation.
pub fn filter_and_partition<'a>(
    messages: &'a [Message],
    lex: &OrientationLexicon,
    exec: Exec,
) -> Partition<'a> {
    let tags = exec.map(messages, |m| tag_message(m, lex));
    let mut part = Partition::default();
    for (m, set) in messages.iter().zip(tags) {
        if set.is_empty() {
            part.discarded += 1;
            continue;
        }
        part.kept += 1;
        for o in set.iter() {
            part.lists[o.index()].push(TaggedMessage {
                message: m,
                orientations: set,
            });
        }
    }
    for list in &mut part.lists {
        list.sort_by(|a, b| a.message.canonical_cmp(b.message));
    }
    part
}

/// Message id to author lookup over a whole corpus.
pub fn author_index(messages: &[Message]) -> HashMap<&str, &str> {
    messages
        .iter()
        .map(|m| (m.id.as_str(), m.author.as_str()))
        .collect()
}
