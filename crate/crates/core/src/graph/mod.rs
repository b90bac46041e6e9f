//! Interaction graphs and connectivity metrics.
//!
//! Arcs keep their direction, kind and timestamp for the interactivity
//! metrics and for export. All connectivity metrics run on the simple
//! undirected projection: distinct unordered pairs, self-pairs removed.

pub mod betweenness;
pub mod export;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::Message;
use crate::exec::Exec;

pub use betweenness::{betweenness, betweenness_generic};

/// Undirected simple graph stored as sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl SimpleGraph {
    /// Builds the simple projection of `edges`; duplicates and self-pairs are
    /// dropped. Panics if an endpoint is out of range.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        SimpleGraph {
            adj,
            edges: twice / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Distinct unordered pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Mention,
    Reply,
    Retweet,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Mention => "mention",
            ArcKind::Reply => "reply",
            ArcKind::Retweet => "retweet",
        }
    }
}

/// One directed interaction event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interaction {
    pub source: usize,
    pub target: usize,
    pub created_at: DateTime<Utc>,
    pub kind: ArcKind,
    /// Id of the message that produced the arc.
    pub message_id: String,
}

/// Actors and their interactions for one slice of the corpus.
#[derive(Clone, Debug, Default)]
pub struct InteractionGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    arcs: Vec<Interaction>,
    simple: SimpleGraph,
    dangling: usize,
}

impl InteractionGraph {
    /// Node handles in sorted order; node ids index into this slice.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, handle: &str) -> Option<usize> {
        self.index.get(handle).copied()
    }

    /// Arcs in message order, self-arcs included.
    pub fn arcs(&self) -> &[Interaction] {
        &self.arcs
    }

    pub fn simple(&self) -> &SimpleGraph {
        &self.simple
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn simple_edge_count(&self) -> usize {
        self.simple.edge_count()
    }

    /// Reply/retweet references whose target is not in the corpus.
    pub fn dangling_references(&self) -> usize {
        self.dangling
    }

    pub fn betweenness_by_actor(&self, exec: Exec) -> BTreeMap<String, f64> {
        self.nodes
            .iter()
            .cloned()
            .zip(betweenness(&self.simple, exec))
            .collect()
    }
}

/// Builds the interaction graph of `messages`.
///
/// `authors` maps every message id of the whole corpus to its author and
/// resolves reply and retweet targets, which may lie outside `messages`.
pub fn build_graph<'a, I>(messages: I, authors: &HashMap<&str, &str>) -> InteractionGraph
where
    I: IntoIterator<Item = &'a Message>,
{
    let mut pending: Vec<(&str, &str, DateTime<Utc>, ArcKind, &str)> = Vec::new();
    let mut names: BTreeSet<&str> = BTreeSet::new();
    let mut dangling = 0;
    for m in messages {
        let src = m.author.as_str();
        names.insert(src);
        for h in &m.mentions {
            pending.push((src, h, m.created_at, ArcKind::Mention, &m.id));
        }
        let refs = [
            (&m.reply_to, ArcKind::Reply),
            (&m.retweet_of, ArcKind::Retweet),
        ];
        for (target, kind) in refs {
            if let Some(id) = target {
                match authors.get(id.as_str()) {
                    Some(&dst) => pending.push((src, dst, m.created_at, kind, &m.id)),
                    None => dangling += 1,
                }
            }
        }
    }
    for &(_, dst, ..) in &pending {
        names.insert(dst);
    }
    let nodes: Vec<String> = names.into_iter().map(str::to_owned).collect();
    let index: HashMap<String, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, h)| (h.clone(), i))
        .collect();
    let arcs: Vec<Interaction> = pending
        .into_iter()
        .map(|(s, t, at, kind, id)| Interaction {
            source: index[s],
            target: index[t],
            created_at: at,
            kind,
            message_id: id.to_owned(),
        })
        .collect();
    let simple = SimpleGraph::from_edges(nodes.len(), arcs.iter().map(|a| (a.source, a.target)));
    InteractionGraph {
        nodes,
        index,
        arcs,
        simple,
        dangling,
    }
}

/// Realized fraction of the `n(n-1)/2` possible pairs; 0 below two nodes.
pub fn density(g: &SimpleGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / (n as f64 * (n - 1) as f64)
}

/// Freeman degree centralization; 1 on a star, 0 when all degrees agree.
pub fn group_degree_centralization(g: &SimpleGraph) -> f64 {
    let n = g.node_count();
    if n < 3 {
        return 0.0;
    }
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let spread: usize = degrees.iter().map(|&d| max - d).sum();
    spread as f64 / ((n - 1) * (n - 2)) as f64
}

/// Freeman betweenness centralization from raw betweenness scores.
///
/// Scores are first scaled by the pair count `(n-1)(n-2)/2` of the other
/// nodes, so the star center scores 1.
pub fn betweenness_centralization_from(scores: &[f64]) -> f64 {
    let n = scores.len();
    if n < 3 {
        return 0.0;
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    let scaled: Vec<f64> = scores.iter().map(|b| b / pairs).collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let spread: f64 = scaled.iter().map(|b| max - b).sum();
    spread / (n - 1) as f64
}

pub fn group_betweenness_centralization(g: &SimpleGraph, exec: Exec) -> f64 {
    if g.node_count() < 3 {
        return 0.0;
    }
    betweenness_centralization_from(&betweenness(g, exec))
}

/// The three connectivity metrics of one graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityScores {
    pub density: f64,
    pub group_degree_centralization: f64,
    pub group_betweenness_centralization: f64,
    pub node_count: usize,
    pub simple_edge_count: usize,
}

impl ConnectivityScores {
    pub fn compute(g: &SimpleGraph, exec: Exec) -> Self {
        ConnectivityScores {
            density: density(g),
            group_degree_centralization: group_degree_centralization(g),
            group_betweenness_centralization: group_betweenness_centralization(g, exec),
            node_count: g.node_count(),
            simple_edge_count: g.edge_count(),
        }
    }
}
