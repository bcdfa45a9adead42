//! Command-line interface: argument parsing, config overrides and dispatch.

use std::path::PathBuf;

use anyhow::Result;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use newsgraph_core::cluster::CutMode;
use newsgraph_core::mapping::Window;
use newsgraph_core::store::SearchEngine;

use crate::config::PipelineConfig;
use crate::stages::{load_service_snapshot, Pipeline, Stage, StageReport, SERVICE_SNAPSHOT};

#[derive(Debug, Parser)]
#[command(name = "newsgraph", version, about = "Link news articles to knowledge-base events and search them")]
pub struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, short, global = true, env = "NEWSGRAPH_CONFIG")]
    pub config: Option<PathBuf>,

    /// Directory holding snapshots and reports.
    #[arg(long, global = true)]
    pub workdir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse NewsML/JSONL articles into the corpus snapshot.
    IngestArticles(IngestArticlesArgs),
    /// Load knowledge-base events and apply the period filter.
    IngestEvents(IngestEventsArgs),
    /// Count token statistics over media topics.
    BuildStats,
    /// Link articles to events.
    Map(MapArgs),
    /// Cluster event types into schemas.
    Cluster(ClusterArgs),
    /// Annotate mapped articles with event property values.
    Annotate(AnnotateArgs),
    /// Write the RDF graph and the service snapshot.
    ExportRdf(ExportArgs),
    /// Score mappings against the gold standard for every sentence window.
    Evaluate(EvaluateArgs),
    /// Serve the search API from the service snapshot.
    Serve(ServeArgs),
    /// Run every batch stage in order.
    Run(Box<RunArgs>),
}

#[derive(Debug, Default, Args)]
pub struct IngestArticlesArgs {
    /// Article file or directory.
    #[arg(long)]
    pub articles: Option<PathBuf>,
    /// Media topic taxonomy CSV.
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct IngestEventsArgs {
    /// Event JSONL file.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// First day of the period (YYYY-MM-DD).
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Last day of the period (YYYY-MM-DD).
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Debug, Default, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Sentence window: 3, 5 or all.
    #[arg(long)]
    pub window: Option<Window>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct ClusterArgs {
    /// elbow or fixed.
    #[arg(long)]
    pub cut: Option<CutMode>,
    #[arg(long)]
    pub fixed_threshold: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub min_filter_coverage: Option<f64>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub quantity_tolerance: Option<f64>,
    #[arg(long)]
    pub max_sentence: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct ExportArgs {
    /// Base IRI for article and event nodes.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct EvaluateArgs {
    /// Gold standard TSV (article id, event qid).
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub host: Option<String>,
    /// Service snapshot written by export-rdf.
    #[arg(long, env = "NEWSGRAPH_SNAPSHOT")]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub articles: IngestArticlesArgs,
    #[command(flatten)]
    pub events: IngestEventsArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[command(flatten)]
    pub annotate: AnnotateArgs,
    #[command(flatten)]
    pub export: ExportArgs,
    #[command(flatten)]
    pub evaluate: EvaluateArgs,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_some<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

impl IngestArticlesArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set_some(&mut c.paths.articles, self.articles);
        set_some(&mut c.paths.taxonomy, self.taxonomy);
    }
}

impl IngestEventsArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set_some(&mut c.paths.events, self.events);
        set_some(&mut c.period.start, self.from);
        set_some(&mut c.period.end, self.to);
    }
}

impl MapArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set(&mut c.mapping.threshold, self.threshold);
        set(&mut c.mapping.window, self.window);
        set_some(&mut c.paths.aliases, self.aliases);
    }
}

impl ClusterArgs {
    fn apply(self, c: &mut PipelineConfig) {
        let k = &mut c.clustering;
        set(&mut k.cut, self.cut);
        set(&mut k.fixed_threshold, self.fixed_threshold);
        set(&mut k.alpha, self.alpha);
        set(&mut k.beta, self.beta);
        set(&mut k.gamma, self.gamma);
        set(&mut k.min_filter_coverage, self.min_filter_coverage);
        set_some(&mut c.paths.embeddings, self.embeddings);
    }
}

impl AnnotateArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set(&mut c.annotation.quantity_tolerance, self.quantity_tolerance);
        set(&mut c.annotation.max_sentence, self.max_sentence);
    }
}

impl ExportArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set(&mut c.rdf.base, self.base);
    }
}

impl EvaluateArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set_some(&mut c.paths.gold, self.gold);
    }
}

impl ServeArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set(&mut c.serve.port, self.port);
        set(&mut c.serve.host, self.host);
        set_some(&mut c.serve.snapshot, self.snapshot);
    }
}

/// Config file (if any) with command-line overrides applied. Flags win.
pub fn resolve_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(w) = &cli.workdir {
        config.paths.workdir = w.clone();
    }
    Ok(config)
}

enum Action {
    Stage(Stage),
    All,
    Serve,
}

/// Executes a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    let mut config = resolve_config(&cli)?;
    let action = match cli.command {
        Command::IngestArticles(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::IngestArticles)
        }
        Command::IngestEvents(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::IngestEvents)
        }
        Command::BuildStats => Action::Stage(Stage::BuildStats),
        Command::Map(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::Map)
        }
        Command::Cluster(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::Cluster)
        }
        Command::Annotate(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::Annotate)
        }
        Command::ExportRdf(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::ExportRdf)
        }
        Command::Evaluate(a) => {
            a.apply(&mut config);
            Action::Stage(Stage::Evaluate)
        }
        Command::Serve(a) => {
            a.apply(&mut config);
            Action::Serve
        }
        Command::Run(a) => {
            a.articles.apply(&mut config);
            a.events.apply(&mut config);
            a.map.apply(&mut config);
            a.cluster.apply(&mut config);
            a.annotate.apply(&mut config);
            a.export.apply(&mut config);
            a.evaluate.apply(&mut config);
            Action::All
        }
    };
    let pipeline = Pipeline::new(config)?;
    match action {
        Action::Stage(s) => print_report(&pipeline.run(s)?),
        Action::All => {
            for r in pipeline.run_all()? {
                print_report(&r);
            }
        }
        Action::Serve => serve(&pipeline)?,
    }
    Ok(())
}

fn print_report(r: &StageReport) {
    print!("{}", r.to_text());
}

fn serve(pipeline: &Pipeline) -> Result<()> {
    let config = pipeline.config();
    let path = config
        .serve
        .snapshot
        .clone()
        .unwrap_or_else(|| pipeline.path(SERVICE_SNAPSHOT));
    let engine = SearchEngine::from_snapshot(load_service_snapshot(&path)?)?;
    let addr = format!("{}:{}", config.serve.host, config.serve.port);
    tokio::runtime::Runtime::new()?.block_on(crate::http::serve(engine, &addr))
}
