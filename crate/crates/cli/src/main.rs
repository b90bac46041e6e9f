use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use corevalues::config::RunConfig;
use corevalues::corpus::{read_corpus, OrientationLexicon};
use corevalues::dynamics::GbcoMode;
use corevalues::language::PolarityLexicon;
use corevalues::pipeline::{self, Analysis, Inputs, ReplayInput};
use corevalues::report::HierarchyReport;
use corevalues::synth::{generate_corpus, write_jsonl, SynthSpec};
use corevalues::{Error, Exec, Metric, Result};

#[derive(Parser)]
#[command(
    name = "corevalues",
    version,
    about = "Core-value orientation metrics and hierarchy for social-media corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a corpus and write the report.
    Run(RunArgs),
    /// Normalize and classify raw metric scores read from a JSON file.
    Replay(ReplayArgs),
    /// Generate a seeded synthetic corpus.
    Synth(SynthArgs),
    /// Write one interaction graph per orientation.
    ExportGraph(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Group,
    PerActor,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Graphml,
    Dot,
    Both,
}

/// Settings shared by every verb that reads a config file.
#[derive(Args)]
struct HierarchyFlags {
    /// TOML config file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    interactivity_low: Option<f64>,
    #[arg(long)]
    interactivity_high: Option<f64>,
    #[arg(long)]
    connectivity_low: Option<f64>,
    #[arg(long)]
    connectivity_high: Option<f64>,
    #[arg(long)]
    attitude_negative_max: Option<f64>,
    #[arg(long)]
    attitude_positive_min: Option<f64>,
    /// Count centralization against connectivity instead of for it.
    #[arg(long)]
    centralization_negative: bool,
    /// Composite weight, e.g. `art_hours=2`. Repeatable.
    #[arg(long = "weight", value_name = "METRIC=W")]
    weights: Vec<String>,
}

#[derive(Args)]
struct CorpusFlags {
    /// Newline-delimited JSON corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    polarity_lexicon: Option<PathBuf>,
    #[arg(long)]
    reference_dictionary: Option<PathBuf>,
    #[arg(long)]
    window_hours: Option<u32>,
    #[arg(long)]
    response_cutoff_hours: Option<f64>,
    #[arg(long, value_enum)]
    gbco_mode: Option<Mode>,
    /// Run every stage on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    hierarchy: HierarchyFlags,
    #[command(flatten)]
    corpus: CorpusFlags,
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    windows_csv: bool,
    #[arg(long)]
    graphml: bool,
    #[arg(long)]
    dot: bool,
    #[arg(long)]
    no_metrics_csv: bool,
}

#[derive(Args)]
struct ReplayArgs {
    /// JSON file with raw scores per orientation.
    input: PathBuf,
    #[command(flatten)]
    hierarchy: HierarchyFlags,
    /// Writes report.json and metrics.csv here instead of printing the report.
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON synthesis spec.
    #[arg(long, conflicts_with = "reference_scale")]
    spec: Option<PathBuf>,
    /// Generate about this many messages shaped after the reference corpus profile.
    #[arg(long)]
    reference_scale: Option<u32>,
    /// TOML config file (for `seed` and the lexicons).
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    polarity_lexicon: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    hierarchy: HierarchyFlags,
    #[command(flatten)]
    corpus: CorpusFlags,
    #[arg(long, short)]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: GraphFormat,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_path(p),
        None => Ok(RunConfig::default()),
    }
}

fn apply_hierarchy(cfg: &mut RunConfig, f: &HierarchyFlags) -> Result<()> {
    let h = &mut cfg.hierarchy;
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut h.interactivity.low, f.interactivity_low);
    set(&mut h.interactivity.high, f.interactivity_high);
    set(&mut h.connectivity.low, f.connectivity_low);
    set(&mut h.connectivity.high, f.connectivity_high);
    set(&mut h.attitude.negative_max, f.attitude_negative_max);
    set(&mut h.attitude.positive_min, f.attitude_positive_min);
    if f.centralization_negative {
        h.centralization_positive = false;
    }
    for w in &f.weights {
        let (key, value) = w
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("weight `{w}` is not METRIC=W")))?;
        let metric = Metric::from_key(key.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric `{key}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("weight `{w}` is not a number")))?;
        h.weights.insert(metric, value);
    }
    Ok(())
}

fn apply_corpus(cfg: &mut RunConfig, f: &CorpusFlags) -> Exec {
    let replace = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
        if v.is_some() {
            slot.clone_from(v);
        }
    };
    replace(&mut cfg.corpus, &f.corpus);
    replace(&mut cfg.lexicon, &f.lexicon);
    replace(&mut cfg.polarity_lexicon, &f.polarity_lexicon);
    replace(&mut cfg.reference_dictionary, &f.reference_dictionary);
    if let Some(w) = f.window_hours {
        cfg.window_hours = w;
    }
    if f.response_cutoff_hours.is_some() {
        cfg.response_cutoff_hours = f.response_cutoff_hours;
    }
    if let Some(m) = f.gbco_mode {
        cfg.gbco_mode = match m {
            Mode::Group => GbcoMode::Group,
            Mode::PerActor => GbcoMode::PerActor,
        };
    }
    if f.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn log_warnings(report: &HierarchyReport) {
    for w in &report.warnings {
        warn!("{w}");
    }
}

fn analyze(cfg: &RunConfig, exec: Exec) -> Result<Analysis> {
    cfg.validate()?;
    if cfg.corpus.is_none() {
        return Err(Error::InvalidConfig(
            "no corpus given (use --corpus or set `corpus`)".into(),
        ));
    }
    cfg.check_inputs()?;
    let inputs = Inputs::load(cfg)?;
    let parsed = read_corpus(cfg.corpus.as_deref().expect("checked above"))?;
    info!(
        "read {} messages, skipped {} malformed records",
        parsed.messages.len(),
        parsed.skipped
    );
    pipeline::analyze(&parsed, &inputs, cfg, exec)
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load_config(args.hierarchy.config.as_deref())?;
    apply_hierarchy(&mut cfg, &args.hierarchy)?;
    let exec = apply_corpus(&mut cfg, &args.corpus);
    if args.output_dir.is_some() {
        cfg.output_dir = args.output_dir;
    }
    cfg.export.windows_csv |= args.windows_csv;
    cfg.export.graphml |= args.graphml;
    cfg.export.dot |= args.dot;
    if args.no_metrics_csv {
        cfg.export.metrics_csv = false;
    }
    let analysis = analyze(&cfg, exec)?;
    log_warnings(&analysis.report);
    match &cfg.output_dir {
        Some(dir) => {
            pipeline::write_outputs(&analysis, &cfg, dir)?;
            info!("wrote report to {}", dir.display());
        }
        None => print_stdout(&analysis.report.to_json())?,
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<()> {
    let mut cfg = load_config(args.hierarchy.config.as_deref())?;
    apply_hierarchy(&mut cfg, &args.hierarchy)?;
    cfg.validate()?;
    let input = ReplayInput::from_path(&args.input)?;
    let report = pipeline::replay_scores(&input, &cfg.hierarchy)?;
    log_warnings(&report);
    match args.output_dir.or(cfg.output_dir) {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            let path = dir.join("report.json");
            std::fs::write(&path, report.to_json()).map_err(|e| io_err(&path, e))?;
            let path = dir.join("metrics.csv");
            let file = File::create(&path).map_err(|e| io_err(&path, e))?;
            report.write_metrics_csv(file)?;
        }
        None => print_stdout(&report.to_json())?,
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let spec = match (&args.spec, args.reference_scale) {
        (Some(p), _) => {
            let s = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            SynthSpec::from_json(&s)?
        }
        (None, Some(n)) => SynthSpec::reference_scale(n),
        (None, None) => {
            return Err(Error::InvalidConfig(
                "give --spec or --reference-scale".into(),
            ))
        }
    };
    let seed = args.seed.unwrap_or(cfg.seed);
    let lexicon = match args.lexicon.as_ref().or(cfg.lexicon.as_ref()) {
        Some(p) => OrientationLexicon::from_path(p)?,
        None => OrientationLexicon::default(),
    };
    let polarity = match args
        .polarity_lexicon
        .as_ref()
        .or(cfg.polarity_lexicon.as_ref())
    {
        Some(p) => PolarityLexicon::from_path(p)?,
        None => PolarityLexicon::default(),
    };
    let messages = generate_corpus(&spec, seed, &lexicon, &polarity)?;
    info!("generated {} messages with seed {seed}", messages.len());
    match &args.output {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_err(p, e))?;
            write_jsonl(&messages, BufWriter::new(file)).map_err(|e| io_err(p, e))?;
        }
        None => write_jsonl(&messages, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn export_graph(args: ExportArgs) -> Result<()> {
    let mut cfg = load_config(args.hierarchy.config.as_deref())?;
    apply_hierarchy(&mut cfg, &args.hierarchy)?;
    let exec = apply_corpus(&mut cfg, &args.corpus);
    let analysis = analyze(&cfg, exec)?;
    let (graphml, dot) = match args.format {
        GraphFormat::Graphml => (true, false),
        GraphFormat::Dot => (false, true),
        GraphFormat::Both => (true, true),
    };
    let written = pipeline::export_graphs(&analysis, &args.output_dir, graphml, dot)?;
    info!("wrote {} graph files", written.len());
    Ok(())
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn print_stdout(s: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Replay(a) => replay(a),
        Command::Synth(a) => synth(a),
        Command::ExportGraph(a) => export_graph(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
