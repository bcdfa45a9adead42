//! Pipeline stages. Each reads upstream snapshots from the workdir and writes its own.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use newsgraph_core::annotate::{
    annotate_corpus, annotations_to_jsonl, serialize_rdf, to_ntriples, to_turtle, AliasTable, Annotation, EventLink,
};
use newsgraph_core::cluster::{cluster_event_types, Clustering, EmbeddingTable, Recognizer};
use newsgraph_core::corpus::{parse_article_jsonl, parse_newsml, Corpus, NewsArticle, Taxonomy};
use newsgraph_core::kb::{filter_by_period, load_events, EventCollection, KbEvent, Reject};
use newsgraph_core::mapping::{evaluate, EvalReport, GoldStandard, Mapper, MappingResult, Window};
use newsgraph_core::snapshot;
use newsgraph_core::stats::{build_imt_stats, build_imt_vocab_stats, build_wet_stats, ImtStats, ImtVocabStats, WetStats};
use newsgraph_core::store::ServiceSnapshot;

use crate::config::{ConfigError, PipelineConfig};

/// A stage was run before the one producing its input.
#[derive(Debug)]
pub struct MissingSnapshot {
    pub what: &'static str,
    pub producer: Stage,
}

impl std::fmt::Display for MissingSnapshot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "missing {} snapshot (run `newsgraph {}` first)", self.what, self.producer)
    }
}

impl std::error::Error for MissingSnapshot {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    IngestArticles,
    IngestEvents,
    BuildStats,
    Map,
    Cluster,
    Annotate,
    ExportRdf,
    Evaluate,
}

impl Stage {
    pub const ORDER: [Stage; 8] = [
        Stage::IngestArticles,
        Stage::IngestEvents,
        Stage::BuildStats,
        Stage::Map,
        Stage::Cluster,
        Stage::Annotate,
        Stage::ExportRdf,
        Stage::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::IngestArticles => "ingest-articles",
            Stage::IngestEvents => "ingest-events",
            Stage::BuildStats => "build-stats",
            Stage::Map => "map",
            Stage::Cluster => "cluster",
            Stage::Annotate => "annotate",
            Stage::ExportRdf => "export-rdf",
            Stage::Evaluate => "evaluate",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Snapshot files in the workdir: (file name, envelope format, label used in errors, producer).
struct Artifact {
    file: &'static str,
    format: &'static str,
    what: &'static str,
    producer: Stage,
}

const ARTICLES: Artifact = Artifact { file: "articles.json", format: "articles", what: "articles", producer: Stage::IngestArticles };
const EVENTS: Artifact = Artifact { file: "events.json", format: "events", what: "events", producer: Stage::IngestEvents };
const STATS: Artifact = Artifact { file: "stats.json", format: "imt-stats", what: "stats", producer: Stage::BuildStats };
const MAPPINGS: Artifact = Artifact { file: "mappings.json", format: "mappings", what: "mappings", producer: Stage::Map };
const WET_STATS: Artifact = Artifact { file: "wet-stats.json", format: "wet-stats", what: "clustering", producer: Stage::Cluster };
const IMT_VOCAB: Artifact =
    Artifact { file: "imt-vocab-stats.json", format: "imt-vocab-stats", what: "clustering", producer: Stage::Cluster };
const CLUSTERING: Artifact = Artifact { file: "clustering.json", format: "clustering", what: "clustering", producer: Stage::Cluster };
const ANNOTATIONS: Artifact =
    Artifact { file: "annotations.json", format: "annotations", what: "annotations", producer: Stage::Annotate };
const SERVICE: Artifact = Artifact { file: "service.json", format: "service", what: "service", producer: Stage::ExportRdf };
const EVALUATION: Artifact = Artifact { file: "evaluation.json", format: "evaluation", what: "evaluation", producer: Stage::Evaluate };

pub const SERVICE_SNAPSHOT: &str = SERVICE.file;

/// Counts, rejects and timing of one stage run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub counts: BTreeMap<String, usize>,
    pub rejects: Vec<Reject>,
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl StageReport {
    fn new(stage: Stage) -> Self {
        StageReport {
            stage: stage.name().to_string(),
            ..Default::default()
        }
    }

    fn count(&mut self, key: &str, n: usize) {
        self.counts.insert(key.to_string(), n);
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("stage: {}\n", self.stage);
        for (k, v) in &self.counts {
            writeln!(out, "{k}: {v}").unwrap();
        }
        if !self.rejects.is_empty() {
            writeln!(out, "rejects:").unwrap();
            for r in &self.rejects {
                writeln!(out, "  line {}: {}", r.line, r.reason).unwrap();
            }
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        writeln!(out, "elapsed: {} ms", self.elapsed_ms).unwrap();
        out
    }
}

/// The stage runner: a validated config plus lazily loaded auxiliary inputs.
pub struct Pipeline {
    config: PipelineConfig,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Pipeline { config })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn workdir(&self) -> &Path {
        self.config.workdir()
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.workdir().join(file)
    }

    /// Runs one stage and writes its report next to its snapshot.
    pub fn run(&self, stage: Stage) -> Result<StageReport> {
        let started = Instant::now();
        let mut report = StageReport::new(stage);
        match stage {
            Stage::IngestArticles => self.ingest_articles(&mut report),
            Stage::IngestEvents => self.ingest_events(&mut report),
            Stage::BuildStats => self.build_stats(&mut report),
            Stage::Map => self.map(&mut report),
            Stage::Cluster => self.cluster(&mut report),
            Stage::Annotate => self.annotate(&mut report),
            Stage::ExportRdf => self.export_rdf(&mut report),
            Stage::Evaluate => self.evaluate(&mut report),
        }
        .with_context(|| format!("stage {stage} failed"))?;
        report.elapsed_ms = started.elapsed().as_millis();
        fs::create_dir_all(self.workdir())?;
        fs::write(
            self.path(&format!("{stage}.report.json")),
            serde_json::to_string_pretty(&report)? + "\n",
        )?;
        fs::write(self.path(&format!("{stage}.report.txt")), report.to_text())?;
        Ok(report)
    }

    /// Runs every stage in order. `evaluate` is skipped when no gold file is configured.
    pub fn run_all(&self) -> Result<Vec<StageReport>> {
        Stage::ORDER
            .iter()
            .filter(|&&s| s != Stage::Evaluate || self.config.paths.gold.is_some())
            .map(|&s| self.run(s))
            .collect()
    }

    fn read<T: DeserializeOwned>(&self, artifact: &Artifact) -> Result<T> {
        let path = self.path(artifact.file);
        if !path.exists() {
            bail!(MissingSnapshot {
                what: artifact.what,
                producer: artifact.producer,
            });
        }
        Ok(snapshot::read(&path, artifact.format)?)
    }

    fn write<T: Serialize>(&self, artifact: &Artifact, data: &T) -> Result<()> {
        Ok(snapshot::write(&self.path(artifact.file), artifact.format, data)?)
    }

    fn required_input(&self, field: &str, value: &Option<PathBuf>) -> Result<PathBuf> {
        value
            .clone()
            .ok_or_else(|| ConfigError(format!("paths.{field} is not set")).into())
    }

    fn corpus(&self) -> Result<Corpus> {
        let articles: Vec<NewsArticle> = self.read(&ARTICLES)?;
        Ok(Corpus::new(articles)?)
    }

    fn events(&self) -> Result<EventCollection> {
        let events: Vec<KbEvent> = self.read(&EVENTS)?;
        Ok(EventCollection::new(events))
    }

    fn aliases(&self) -> Result<AliasTable> {
        match &self.config.paths.aliases {
            None => Ok(AliasTable::default()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(AliasTable::from_json(&text)?)
            }
        }
    }

    fn embeddings(&self) -> Result<EmbeddingTable> {
        let p = self.required_input("embeddings", &self.config.paths.embeddings)?;
        let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        Ok(EmbeddingTable::parse(&text)?)
    }

    fn ingest_articles(&self, report: &mut StageReport) -> Result<()> {
        let source = self.required_input("articles", &self.config.paths.articles)?;
        let files = article_files(&source)?;
        let mut articles = Vec::new();
        let mut rejects = Vec::new();
        for file in &files {
            let name = file.display();
            if file.extension().is_some_and(|e| e == "jsonl") {
                let text = fs::read_to_string(file).with_context(|| format!("reading {name}"))?;
                for (i, line) in text.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    match parse_article_jsonl(line) {
                        Ok(a) => articles.push(a),
                        Err(e) => rejects.push(Reject {
                            line: i + 1,
                            reason: format!("{name}: {e}"),
                        }),
                    }
                }
            } else {
                let bytes = fs::read(file).with_context(|| format!("reading {name}"))?;
                match parse_newsml(&bytes) {
                    Ok(a) => articles.push(a),
                    Err(e) => rejects.push(Reject {
                        line: 0,
                        reason: format!("{name}: {e}"),
                    }),
                }
            }
        }
        articles.sort_by(|a, b| a.id.cmp(&b.id));
        let mut unique: Vec<NewsArticle> = Vec::with_capacity(articles.len());
        for a in articles {
            if unique.last().is_some_and(|u| u.id == a.id) {
                rejects.push(Reject {
                    line: 0,
                    reason: format!("duplicate article id {}", a.id),
                });
            } else {
                unique.push(a);
            }
        }
        if let Some(p) = &self.config.paths.taxonomy {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            let taxonomy = Taxonomy::from_csv(&bytes)?;
            let unknown: std::collections::BTreeSet<&str> = unique
                .iter()
                .flat_map(|a| a.iptc_codes.iter())
                .filter(|c| !taxonomy.contains(c))
                .map(String::as_str)
                .collect();
            report.count("taxonomy_topics", taxonomy.len());
            report.count("unknown_topic_codes", unknown.len());
            if !unknown.is_empty() {
                let list: Vec<&str> = unknown.into_iter().collect();
                report.notes.push(format!("codes missing from the taxonomy: {}", list.join(", ")));
            }
        }
        let corpus = Corpus::new(unique)?;
        report.count("files", files.len());
        report.count("articles", corpus.len());
        report.count("sentences", corpus.texts().iter().map(|t| t.sentence_count()).sum());
        report.count("rejected", rejects.len());
        report.rejects = rejects;
        self.write(&ARTICLES, &corpus.articles())
    }

    fn ingest_events(&self, report: &mut StageReport) -> Result<()> {
        let source = self.required_input("events", &self.config.paths.events)?;
        let text = fs::read_to_string(&source).with_context(|| format!("reading {}", source.display()))?;
        let outcome = load_events(text.lines());
        let loaded = outcome.events.len();
        let dated = EventCollection::new(outcome.events.into_events().into_iter().filter(|e| e.has_dates()).collect());
        let kept = match self.config.period() {
            Some(p) => filter_by_period(&dated, p),
            None => dated.clone(),
        };
        report.count("loaded", loaded);
        report.count("undated", loaded - dated.len());
        report.count("outside_period", dated.len() - kept.len());
        report.count("events", kept.len());
        report.count("rejected", outcome.rejects.len());
        report.rejects = outcome.rejects;
        self.write(&EVENTS, &kept.events())
    }

    fn build_stats(&self, report: &mut StageReport) -> Result<()> {
        let corpus = self.corpus()?;
        let stats = build_imt_stats(&corpus)?;
        report.count("imts", stats.n_imts);
        report.count("tokens", stats.df.len());
        self.write(&STATS, &stats)
    }

    fn mapper_inputs(&self) -> Result<(Corpus, EventCollection, ImtStats, AliasTable)> {
        let stats: ImtStats = self.read(&STATS)?;
        Ok((self.corpus()?, self.events()?, stats, self.aliases()?))
    }

    fn map(&self, report: &mut StageReport) -> Result<()> {
        let (corpus, events, stats, aliases) = self.mapper_inputs()?;
        let mapper = Mapper::new(&events, &stats, &aliases);
        let m = &self.config.mapping;
        let mappings = mapper.map_corpus(&corpus, m.threshold, m.window);
        let linked: std::collections::BTreeSet<&str> = mappings.iter().map(|r| r.qid.as_str()).collect();
        report.count("articles", corpus.len());
        report.count("mapped", mappings.len());
        report.count("events_linked", linked.len());
        report.notes.push(format!("threshold {} window {}", m.threshold, m.window));
        self.write(&MAPPINGS, &mappings)
    }

    fn cluster(&self, report: &mut StageReport) -> Result<()> {
        let corpus = self.corpus()?;
        let events = self.events()?;
        let mappings: Vec<MappingResult> = self.read(&MAPPINGS)?;
        let table = self.embeddings()?;
        let wet_stats = build_wet_stats(&corpus, &events, &mappings);
        let vocab = build_imt_vocab_stats(&corpus, &events, &mappings);
        let clustering = cluster_event_types(
            &events,
            &table,
            Recognizer::shipped(),
            &wet_stats,
            &vocab,
            &self.config.clustering_config(),
        )?;
        report.count("wets_clustered", clustering.dendrogram.leaves.len());
        report.count("wets_excluded", clustering.excluded.len());
        report.count("schemas", clustering.schemas.len());
        report.notes.push(format!(
            "cut {} at {} (knee found: {})",
            clustering.cut, clustering.threshold, clustering.knee_found
        ));
        for e in &clustering.excluded {
            report.notes.push(format!("excluded {} ({}): {}", e.qid, e.label, e.reason));
        }
        self.write(&WET_STATS, &wet_stats)?;
        self.write(&IMT_VOCAB, &vocab)?;
        self.write(&CLUSTERING, &clustering)?;
        let plain = serde_json::to_string_pretty(&clustering.schemas)? + "\n";
        fs::write(self.path("clusters.json"), plain)?;
        fs::write(self.path("dendrogram.txt"), clustering.dendrogram.to_text())?;
        Ok(())
    }

    fn annotate(&self, report: &mut StageReport) -> Result<()> {
        let corpus = self.corpus()?;
        let events = self.events()?;
        let mappings: Vec<MappingResult> = self.read(&MAPPINGS)?;
        let table = self.embeddings()?;
        let aliases = self.aliases()?;
        let annotations = annotate_corpus(&corpus, &events, &mappings, &aliases, &table, self.config.quantity_rules());
        let articles: std::collections::BTreeSet<&str> = annotations.iter().map(|a| a.article_id.as_str()).collect();
        report.count("mapped", mappings.len());
        report.count("annotated_articles", articles.len());
        report.count("annotations", annotations.len());
        report.count(
            "quantity_annotations",
            annotations.iter().filter(|a| a.context_score.is_some()).count(),
        );
        self.write(&ANNOTATIONS, &annotations)?;
        fs::write(self.path("annotations.jsonl"), annotations_to_jsonl(&annotations)?)?;
        Ok(())
    }

    fn export_rdf(&self, report: &mut StageReport) -> Result<()> {
        let corpus = self.corpus()?;
        let events = self.events()?;
        let mappings: Vec<MappingResult> = self.read(&MAPPINGS)?;
        let annotations: Vec<Annotation> = self.read(&ANNOTATIONS)?;
        let clustering: Clustering = self.read(&CLUSTERING)?;
        let base = self.config.rdf.base.trim_end_matches('/').to_string();

        let by_article: BTreeMap<&str, &MappingResult> = mappings.iter().map(|m| (m.article_id.as_str(), m)).collect();
        let mut grouped: BTreeMap<&str, Vec<Annotation>> = BTreeMap::new();
        for a in &annotations {
            grouped.entry(a.article_id.as_str()).or_default().push(a.clone());
        }
        let mut triples = Vec::new();
        let mut linked = 0;
        for article in corpus.articles() {
            let event = by_article.get(article.id.as_str()).and_then(|m| events.get(&m.qid));
            let link = event.map(|event| EventLink {
                event,
                annotations: grouped.get(article.id.as_str()).map_or(&[][..], Vec::as_slice),
                schema_id: clustering.schema_of(event),
            });
            linked += usize::from(link.is_some());
            triples.extend(serialize_rdf(article, link, &base));
        }
        report.count("articles", corpus.len());
        report.count("linked_articles", linked);
        report.count("triples", triples.len());
        fs::write(self.path("graph.nt"), to_ntriples(&triples))?;
        fs::write(self.path("graph.ttl"), to_turtle(&triples))?;
        let service = ServiceSnapshot {
            base,
            articles: corpus.into_articles(),
            events: events.into_events(),
            annotations,
            schemas: clustering.schemas,
            triples,
        };
        self.write(&SERVICE, &service)
    }

    fn evaluate(&self, report: &mut StageReport) -> Result<()> {
        let gold_path = self.required_input("gold", &self.config.paths.gold)?;
        let text = fs::read_to_string(&gold_path).with_context(|| format!("reading {}", gold_path.display()))?;
        let gold = GoldStandard::from_tsv(&text)?;
        let (corpus, events, stats, aliases) = self.mapper_inputs()?;
        let mapper = Mapper::new(&events, &stats, &aliases);
        let mut predictions = Vec::new();
        for w in Window::ALL_WINDOWS {
            predictions.extend(mapper.map_corpus(&corpus, self.config.mapping.threshold, w));
        }
        let restricted = gold.restrict(&predictions);
        let eval: EvalReport = evaluate(restricted.iter().copied(), &gold)?;
        report.count("gold_pairs", gold.len());
        for (w, s) in &eval.windows {
            report.count(&format!("tp_{w}"), s.tp);
            report.count(&format!("fp_{w}"), s.fp);
            report.count(&format!("fn_{w}"), s.fn_);
        }
        self.write(&EVALUATION, &eval)?;
        fs::write(self.path("evaluation.txt"), eval.to_table())?;
        Ok(())
    }

    /// Loads the service snapshot written by `export-rdf`.
    pub fn service_snapshot(&self) -> Result<ServiceSnapshot> {
        self.read(&SERVICE)
    }

    pub fn wet_stats(&self) -> Result<WetStats> {
        self.read(&WET_STATS)
    }

    pub fn imt_vocab_stats(&self) -> Result<ImtVocabStats> {
        self.read(&IMT_VOCAB)
    }

    pub fn clustering(&self) -> Result<Clustering> {
        self.read(&CLUSTERING)
    }

    pub fn mappings(&self) -> Result<Vec<MappingResult>> {
        self.read(&MAPPINGS)
    }

    pub fn annotations(&self) -> Result<Vec<Annotation>> {
        self.read(&ANNOTATIONS)
    }

    pub fn evaluation(&self) -> Result<EvalReport> {
        self.read(&EVALUATION)
    }
}

/// Reads a snapshot file directly, e.g. the service snapshot for `serve`.
pub fn load_service_snapshot(path: &Path) -> Result<ServiceSnapshot> {
    if !path.exists() {
        bail!(MissingSnapshot {
            what: SERVICE.what,
            producer: SERVICE.producer,
        });
    }
    Ok(snapshot::read(path, SERVICE.format)?)
}

/// `.xml` and `.jsonl` files of a directory in name order, or the single given file.
fn article_files(source: &Path) -> Result<Vec<PathBuf>> {
    if source.is_file() {
        return Ok(vec![source.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(source)
        .with_context(|| format!("reading {}", source.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "xml" || e == "jsonl"));
    files.sort();
    Ok(files)
}
