//! Interactivity metrics: activity, response times, nudges and rotating
//! leadership over tumbling time windows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::Message;
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::{betweenness, betweenness_centralization_from, build_graph, InteractionGraph};

/// Interactivity scores of one orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractivityScores {
    pub activity: u64,
    pub actor_count: usize,
    pub avg_activity_per_actor: Option<f64>,
    pub art_hours: Option<f64>,
    pub nudges: Option<f64>,
    pub rotating_leadership: u64,
}

/// Messages plus every mention, reply reference and retweet reference.
pub fn activity<'a, I>(messages: I) -> u64
where
    I: IntoIterator<Item = &'a Message>,
{
    messages
        .into_iter()
        .map(|m| {
            1 + m.mentions.len() as u64
                + u64::from(m.reply_to.is_some())
                + u64::from(m.retweet_of.is_some())
        })
        .sum()
}

/// Options for matching contacts to responses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResponseOptions {
    /// Responses later than this many seconds after the contact are ignored.
    pub cutoff_secs: Option<i64>,
}

/// Directed contacts (mentions and replies) extracted from an ordered
/// message list. A message that both mentions and replies to the same actor
/// is one contact.
struct Contacts<'a> {
    /// `(from, to, position, timestamp)` in message order.
    list: Vec<(&'a str, &'a str, usize, i64)>,
    /// `(from, to)` to positions and timestamps, ascending.
    by_pair: HashMap<(&'a str, &'a str), Vec<(usize, i64)>>,
}

impl<'a> Contacts<'a> {
    fn collect(messages: &[&'a Message], authors: &HashMap<&str, &'a str>) -> Self {
        let mut list = Vec::new();
        let mut by_pair: HashMap<(&str, &str), Vec<(usize, i64)>> = HashMap::new();
        let mut targets: Vec<&str> = Vec::new();
        for (pos, m) in messages.iter().enumerate() {
            targets.clear();
            targets.extend(m.mentions.iter().map(String::as_str));
            if let Some(dst) = m.reply_to.as_deref().and_then(|id| authors.get(id)) {
                targets.push(dst);
            }
            targets.sort_unstable();
            targets.dedup();
            let from = m.author.as_str();
            let t = m.timestamp();
            for &to in targets.iter().filter(|&&to| to != from) {
                list.push((from, to, pos, t));
                by_pair.entry((from, to)).or_default().push((pos, t));
            }
        }
        Contacts { list, by_pair }
    }
}

fn check_sorted(messages: &[&Message]) {
    debug_assert!(
        messages
            .windows(2)
            .all(|w| w[0].canonical_cmp(w[1]).is_le()),
        "messages must be in canonical order"
    );
}

/// Mean lag in hours between a contact A->B and B's first later contact
/// back to A. `None` if no contact was answered.
///
/// `messages` must be in canonical `(created_at, id)` order; `authors`
/// resolves reply targets.
pub fn average_response_time(
    messages: &[&Message],
    authors: &HashMap<&str, &str>,
    opts: ResponseOptions,
) -> Option<f64> {
    check_sorted(messages);
    let contacts = Contacts::collect(messages, authors);
    let mut total: i64 = 0;
    let mut answered: u64 = 0;
    for &(from, to, pos, t) in &contacts.list {
        let Some(back) = contacts.by_pair.get(&(to, from)) else {
            continue;
        };
        let i = back.partition_point(|&(p, _)| p <= pos);
        if let Some(&(_, rt)) = back.get(i) {
            let lag = rt - t;
            if opts.cutoff_secs.is_none_or(|c| lag <= c) {
                total += lag;
                answered += 1;
            }
        }
    }
    (answered > 0).then(|| total as f64 / answered as f64 / 3600.0)
}

/// Mean number of consecutive contacts A->B issued before B answers A.
///
/// Chains that never get an answer are excluded; `None` if there are none.
pub fn nudges(
    messages: &[&Message],
    authors: &HashMap<&str, &str>,
    opts: ResponseOptions,
) -> Option<f64> {
    check_sorted(messages);
    let contacts = Contacts::collect(messages, authors);
    let pairs: BTreeSet<(&str, &str)> = contacts.by_pair.keys().copied().collect();
    let empty = Vec::new();
    let mut total: u64 = 0;
    let mut chains: u64 = 0;
    for &(a, b) in &pairs {
        let pings = &contacts.by_pair[&(a, b)];
        let answers = contacts.by_pair.get(&(b, a)).unwrap_or(&empty);
        let mut pending: Vec<i64> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < pings.len() || j < answers.len() {
            let ping_first = j == answers.len() || (i < pings.len() && pings[i].0 < answers[j].0);
            if ping_first {
                pending.push(pings[i].1);
                i += 1;
                continue;
            }
            let at = answers[j].1;
            j += 1;
            let live = match opts.cutoff_secs {
                Some(c) => pending.iter().filter(|&&t| at - t <= c).count(),
                None => pending.len(),
            };
            if live > 0 {
                total += live as u64;
                chains += 1;
            }
            pending.clear();
        }
    }
    (chains > 0).then(|| total as f64 / chains as f64)
}

/// How rotating leadership reads the window series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GbcoMode {
    /// Extrema of the per-window group betweenness centralization.
    #[default]
    Group,
    /// Extrema of every actor's per-window betweenness, summed over actors.
    PerActor,
}

/// Strict local extrema of `series` after collapsing runs of equal values.
pub fn count_extrema(series: &[f64]) -> u64 {
    let mut collapsed: Vec<f64> = Vec::with_capacity(series.len());
    for &v in series {
        if collapsed.last() != Some(&v) {
            collapsed.push(v);
        }
    }
    collapsed
        .windows(3)
        .filter(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
        .count() as u64
}

/// One tumbling window.
#[derive(Clone, Debug)]
pub struct Window {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub graph: InteractionGraph,
    /// Betweenness per node of `graph`.
    pub betweenness: Vec<f64>,
    pub group_betweenness_centralization: f64,
}

/// Contiguous fixed-length windows ordered by start time.
#[derive(Clone, Debug, Default)]
pub struct WindowSeries {
    pub windows: Vec<Window>,
}

/// `[start, end)` bounds, in epoch seconds, of the windows covering
/// `first..=last`, aligned to multiples of `len_secs`.
pub fn window_bounds(first: i64, last: i64, len_secs: i64) -> Vec<(i64, i64)> {
    assert!(len_secs > 0, "window length must be positive");
    if last < first {
        return Vec::new();
    }
    let start = first.div_euclid(len_secs) * len_secs;
    let count = (last - start).div_euclid(len_secs) + 1;
    (0..count)
        .map(|k| (start + k * len_secs, start + (k + 1) * len_secs))
        .collect()
}

fn to_datetime(t: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(t, 0).expect("timestamp in range")
}

impl WindowSeries {
    /// Builds one graph per window. Messages outside every window are ignored.
    pub fn build(
        messages: &[&Message],
        authors: &HashMap<&str, &str>,
        bounds: &[(i64, i64)],
        exec: Exec,
    ) -> Self {
        let mut buckets: Vec<Vec<&Message>> = vec![Vec::new(); bounds.len()];
        for &m in messages {
            let t = m.timestamp();
            let k = bounds.partition_point(|&(_, end)| end <= t);
            if k < bounds.len() && bounds[k].0 <= t {
                buckets[k].push(m);
            }
        }
        let items: Vec<_> = bounds.iter().zip(buckets).collect();
        // parallelism lives at the window level; each window runs sequentially
        let windows = exec.map(&items, |((start, end), msgs)| {
            let graph = build_graph(msgs.iter().copied(), authors);
            let scores = betweenness(graph.simple(), Exec::Sequential);
            let gbc = betweenness_centralization_from(&scores);
            Window {
                start: to_datetime(*start),
                end: to_datetime(*end),
                graph,
                betweenness: scores,
                group_betweenness_centralization: gbc,
            }
        });
        WindowSeries { windows }
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn group_series(&self) -> Vec<f64> {
        self.windows
            .iter()
            .map(|w| w.group_betweenness_centralization)
            .collect()
    }

    /// Writes `window_start,n_nodes,n_edges,group_betweenness_centralization`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "window_start",
            "n_nodes",
            "n_edges",
            "group_betweenness_centralization",
        ])?;
        for win in &self.windows {
            w.write_record([
                win.start.to_rfc3339_opts(SecondsFormat::Secs, true),
                win.graph.node_count().to_string(),
                win.graph.simple_edge_count().to_string(),
                format!("{}", win.group_betweenness_centralization),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of betweenness oscillations across the window series.
pub fn rotating_leadership(ws: &WindowSeries, mode: GbcoMode) -> u64 {
    if ws.len() < 3 {
        return 0;
    }
    match mode {
        GbcoMode::Group => count_extrema(&ws.group_series()),
        GbcoMode::PerActor => {
            let mut series: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for w in &ws.windows {
                for h in w.graph.nodes() {
                    series
                        .entry(h.as_str())
                        .or_insert_with(|| vec![0.0; ws.len()]);
                }
            }
            for (k, w) in ws.windows.iter().enumerate() {
                for (h, &b) in w.graph.nodes().iter().zip(&w.betweenness) {
                    series.get_mut(h.as_str()).expect("actor registered")[k] = b;
                }
            }
            series.values().map(|s| count_extrema(s)).sum()
        }
    }
}
