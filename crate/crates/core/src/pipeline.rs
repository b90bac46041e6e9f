//! End-to-end runs: corpus to report, and replay of externally computed raw scores.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::config::RunConfig;
use crate::corpus::{
    author_index, read_corpus, Message, Orientation, OrientationLexicon, ParsedCorpus,
};
use crate::dynamics::{self, rotating_leadership, window_bounds, WindowSeries};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{build_graph, export, ConnectivityScores, InteractionGraph};
use crate::hierarchy::{assess, Class, HierarchyConfig, Metric, MetricVector};
use crate::language::{
    complexity, emotionality, mean, PolarityLexicon, ReferenceDictionary, SentimentScorer,
};
use crate::report::{HierarchyReport, OrientationReport, RunMetadata, RunMode};
use crate::text::tokenize;

/// Lexicons and models a run reads besides the corpus.
pub struct Inputs {
    pub lexicon: OrientationLexicon,
    pub scorer: Box<dyn SentimentScorer>,
    /// Complexity reference; built from the corpus when `None`.
    pub reference: Option<ReferenceDictionary>,
}

impl Default for Inputs {
    fn default() -> Self {
        Inputs {
            lexicon: OrientationLexicon::default(),
            scorer: Box::new(PolarityLexicon::default()),
            reference: None,
        }
    }
}

impl Inputs {
    /// Loads the files named in `cfg`, falling back to the bundled lexicons.
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let lexicon = match &cfg.lexicon {
            Some(p) => OrientationLexicon::from_path(p)?,
            None => OrientationLexicon::default(),
        };
        let polarity = match &cfg.polarity_lexicon {
            Some(p) => PolarityLexicon::from_path(p)?,
            None => PolarityLexicon::default(),
        };
        let reference = cfg
            .reference_dictionary
            .as_deref()
            .map(ReferenceDictionary::from_path)
            .transpose()?;
        Ok(Inputs {
            lexicon,
            scorer: Box::new(polarity),
            reference,
        })
    }
}

/// Report plus the per-orientation structures behind it.
pub struct Analysis {
    pub report: HierarchyReport,
    /// Whole-corpus interaction graph of each orientation, canonical order.
    pub graphs: Vec<(Orientation, InteractionGraph)>,
    pub windows: Vec<(Orientation, WindowSeries)>,
}

struct Prepared<'a> {
    message: &'a Message,
    tokens: Vec<String>,
    sentiment: f64,
}

struct OrientationResult {
    raw: MetricVector,
    messages: usize,
    graph: InteractionGraph,
    windows: WindowSeries,
}

fn analyze_orientation(
    items: &[&Prepared<'_>],
    authors: &HashMap<&str, &str>,
    bounds: &[(i64, i64)],
    reference: &ReferenceDictionary,
    cfg: &RunConfig,
    exec: Exec,
) -> OrientationResult {
    let msgs: Vec<&Message> = items.iter().map(|p| p.message).collect();
    let graph = build_graph(msgs.iter().copied(), authors);
    let windows = WindowSeries::build(&msgs, authors, bounds, exec);
    let mut raw = MetricVector::default();
    if msgs.is_empty() {
        return OrientationResult {
            raw,
            messages: 0,
            graph,
            windows,
        };
    }
    let conn = ConnectivityScores::compute(graph.simple(), exec);
    raw.set(
        Metric::GroupDegreeCentralization,
        Some(conn.group_degree_centralization),
    );
    raw.set(
        Metric::GroupBetweennessCentralization,
        Some(conn.group_betweenness_centralization),
    );
    raw.set(Metric::Density, Some(conn.density));

    let opts = cfg.response_options();
    let activity = dynamics::activity(msgs.iter().copied());
    let actors = graph.node_count();
    raw.set(
        Metric::ArtHours,
        dynamics::average_response_time(&msgs, authors, opts),
    );
    raw.set(Metric::Nudges, dynamics::nudges(&msgs, authors, opts));
    raw.set(Metric::ActorCount, Some(actors as f64));
    raw.set(Metric::Activity, Some(activity as f64));
    raw.set(
        Metric::AvgActivityPerActor,
        (actors > 0).then(|| activity as f64 / actors as f64),
    );
    raw.set(
        Metric::RotatingLeadership,
        Some(rotating_leadership(&windows, cfg.gbco_mode) as f64),
    );

    let sentiments: Vec<f64> = items.iter().map(|p| p.sentiment).collect();
    raw.set(Metric::Sentiment, mean(&sentiments));
    raw.set(Metric::Emotionality, emotionality(&sentiments));
    raw.set(
        Metric::Complexity,
        complexity(
            items
                .iter()
                .flat_map(|p| p.tokens.iter().map(String::as_str)),
            reference,
        ),
    );
    OrientationResult {
        raw,
        messages: msgs.len(),
        graph,
        windows,
    }
}

/// Runs tagging, graph, interactivity, language and hierarchy stages over a
/// parsed corpus. The result does not depend on the input record order or on
/// `exec`.
pub fn analyze(
    parsed: &ParsedCorpus,
    inputs: &Inputs,
    cfg: &RunConfig,
    exec: Exec,
) -> Result<Analysis> {
    cfg.validate()?;
    let mut sorted: Vec<&Message> = parsed.messages.iter().collect();
    sorted.sort_by(|a, b| a.canonical_cmp(b));
    let authors = author_index(&parsed.messages);

    let prepared: Vec<Prepared<'_>> = exec.map(&sorted, |m| {
        let tokens = tokenize(&m.text);
        let sentiment = inputs.scorer.score_tokens(&tokens);
        Prepared {
            message: m,
            tokens,
            sentiment,
        }
    });
    let tags = exec.map(&prepared, |p| inputs.lexicon.tag_tokens(&p.tokens));

    let mut lists: Vec<Vec<&Prepared<'_>>> = vec![Vec::new(); Orientation::ALL.len()];
    let mut discarded = 0;
    for (p, set) in prepared.iter().zip(&tags) {
        if set.is_empty() {
            discarded += 1;
        }
        for o in set.iter() {
            lists[o.index()].push(p);
        }
    }
    let kept = prepared.len() - discarded;

    let built;
    let reference = match &inputs.reference {
        Some(r) => r,
        None => {
            built = ReferenceDictionary::from_tokens(
                prepared
                    .iter()
                    .flat_map(|p| p.tokens.iter().map(String::as_str)),
            );
            &built
        }
    };

    let bounds = match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) => window_bounds(a.timestamp(), b.timestamp(), cfg.window_secs()),
        _ => Vec::new(),
    };
    let dangling = parsed
        .messages
        .iter()
        .flat_map(|m| [&m.reply_to, &m.retweet_of])
        .flatten()
        .filter(|id| !authors.contains_key(id.as_str()))
        .count();

    let results = exec.map(&Orientation::ALL, |o| {
        analyze_orientation(&lists[o.index()], &authors, &bounds, reference, cfg, exec)
    });

    let raw: Vec<(Orientation, MetricVector)> = Orientation::ALL
        .iter()
        .zip(&results)
        .map(|(&o, r)| (o, r.raw))
        .collect();
    let assessments = assess(&raw, &cfg.hierarchy);
    let mut warnings = Vec::new();
    let mut orientations = Vec::new();
    for (a, r) in assessments.iter().zip(&results) {
        let mut rep = OrientationReport::from_assessment(a);
        rep.messages = Some(r.messages);
        if r.messages == 0 {
            warnings.push(format!(
                "{}: no tagged messages, metrics absent",
                a.orientation
            ));
        } else if rep.class.is_none() {
            warnings.push(format!("{}: not enough data to classify", a.orientation));
        }
        orientations.push(rep);
    }

    let report = HierarchyReport {
        metadata: RunMetadata {
            mode: RunMode::Corpus,
            corpus_size: Some(parsed.messages.len()),
            skipped_records: Some(parsed.skipped),
            discarded_untagged: Some(discarded),
            kept_messages: Some(kept),
            dangling_references: Some(dangling),
            window_count: Some(bounds.len()),
            window_hours: Some(cfg.window_hours),
        },
        orientations,
        warnings,
    };
    let mut graphs = Vec::new();
    let mut windows = Vec::new();
    for (o, r) in Orientation::ALL.into_iter().zip(results) {
        graphs.push((o, r.graph));
        windows.push((o, r.windows));
    }
    Ok(Analysis {
        report,
        graphs,
        windows,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes one GraphML and/or DOT file per orientation into `dir`.
pub fn export_graphs(
    analysis: &Analysis,
    dir: &Path,
    graphml: bool,
    dot: bool,
) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (o, g) in &analysis.graphs {
        if graphml {
            let p = dir.join(format!("graph_{}.graphml", o.slug()));
            write_file(&p, export::to_graphml(g, *o).as_bytes())?;
            written.push(p);
        }
        if dot {
            let p = dir.join(format!("graph_{}.dot", o.slug()));
            write_file(&p, export::to_dot(g, *o).as_bytes())?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Writes the report and the enabled exports into `dir`.
pub fn write_outputs(analysis: &Analysis, cfg: &RunConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(
        &dir.join("report.json"),
        analysis.report.to_json().as_bytes(),
    )?;
    if cfg.export.metrics_csv {
        let mut buf = Vec::new();
        analysis.report.write_metrics_csv(&mut buf)?;
        write_file(&dir.join("metrics.csv"), &buf)?;
    }
    if cfg.export.windows_csv {
        for (o, ws) in &analysis.windows {
            let mut buf = Vec::new();
            ws.write_csv(&mut buf)?;
            write_file(&dir.join(format!("windows_{}.csv", o.slug())), &buf)?;
        }
    }
    export_graphs(analysis, dir, cfg.export.graphml, cfg.export.dot)?;
    Ok(())
}

/// Full run driven by `cfg`: reads inputs, analyzes, writes outputs when an
/// output directory is configured.
pub fn run_pipeline(cfg: &RunConfig, exec: Exec) -> Result<Analysis> {
    cfg.validate()?;
    let corpus = cfg
        .corpus
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("no corpus given".into()))?;
    cfg.check_inputs()?;
    let inputs = Inputs::load(cfg)?;
    let parsed = read_corpus(corpus)?;
    let analysis = analyze(&parsed, &inputs, cfg, exec)?;
    if let Some(dir) = &cfg.output_dir {
        write_outputs(&analysis, cfg, dir)?;
    }
    Ok(analysis)
}

/// Raw scores of one orientation for a replay run.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayEntry {
    pub orientation: Orientation,
    pub metrics: MetricVector,
    /// Expected class for these scores, compared against the engine's.
    #[serde(default)]
    pub expected_class: Option<Class>,
    /// Expected MM values, given to two decimals.
    #[serde(default)]
    pub expected_mm: Option<MetricVector>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayInput {
    pub orientations: Vec<ReplayEntry>,
}

impl ReplayInput {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

/// Half a unit in the second decimal.
const EXPECTED_MM_TOLERANCE: f64 = 0.005;

/// Runs normalization and classification on injected raw scores.
pub fn replay_scores(input: &ReplayInput, cfg: &HierarchyConfig) -> Result<HierarchyReport> {
    cfg.validate()?;
    if input.orientations.len() < 2 {
        return Err(Error::InvalidInput(
            "replay needs at least two orientations".into(),
        ));
    }
    let mut entries: Vec<&ReplayEntry> = input.orientations.iter().collect();
    entries.sort_by_key(|e| e.orientation);
    if let Some(w) = entries
        .windows(2)
        .find(|w| w[0].orientation == w[1].orientation)
    {
        return Err(Error::InvalidInput(format!(
            "orientation {} listed twice",
            w[0].orientation
        )));
    }
    let raw: Vec<(Orientation, MetricVector)> =
        entries.iter().map(|e| (e.orientation, e.metrics)).collect();
    let assessments = assess(&raw, cfg);

    let mut warnings = Vec::new();
    let mut orientations = Vec::new();
    for (a, e) in assessments.iter().zip(&entries) {
        let mut rep = OrientationReport::from_assessment(a);
        rep.expected_class = e.expected_class;
        for m in Metric::ALL {
            if a.raw.get(m).is_none() {
                warnings.push(format!(
                    "{}: {} absent, weights renormalized",
                    a.orientation,
                    m.key()
                ));
            }
        }
        if let Some(expected) = &e.expected_mm {
            for m in Metric::ALL {
                if let (Some(p), Some(got)) = (expected.get(m), a.mm.get(m)) {
                    if (p - got).abs() > EXPECTED_MM_TOLERANCE {
                        warnings.push(format!(
                            "{}: {} MM {got:.4} differs from expected {p:.2}",
                            a.orientation,
                            m.key()
                        ));
                    }
                }
            }
        }
        if let (Some(want), Some(got)) = (e.expected_class, rep.class) {
            if want != got {
                let band = rep
                    .bands
                    .interactivity
                    .map(|b| format!("{b:?}"))
                    .unwrap_or_else(|| "absent".into());
                warnings.push(format!(
                    "{}: classified {got:?} but the reference classification is {want:?} (interactivity band {band})",
                    a.orientation
                ));
            }
        }
        orientations.push(rep);
    }
    Ok(HierarchyReport {
        metadata: RunMetadata::replay(),
        orientations,
        warnings,
    })
}
