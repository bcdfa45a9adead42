//! Pipeline configuration: a TOML file with flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use newsgraph_core::annotate::QuantityRules;
use newsgraph_core::cluster::{ClusteringConfig, CutMode, Weights};
use newsgraph_core::kb::Period;
use newsgraph_core::mapping::Window;

/// A configuration problem; reported with exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub articles: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub workdir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            articles: None,
            events: None,
            embeddings: None,
            aliases: None,
            taxonomy: None,
            gold: None,
            workdir: PathBuf::from("work"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodConfig {
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    pub threshold: f64,
    pub window: Window,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            threshold: 0.04,
            window: Window::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cut: CutMode,
    pub fixed_threshold: f64,
    pub min_filter_coverage: f64,
}

impl Default for ClusterSection {
    fn default() -> Self {
        let d = ClusteringConfig::default();
        ClusterSection {
            alpha: d.weights.alpha,
            beta: d.weights.beta,
            gamma: d.weights.gamma,
            cut: d.cut,
            fixed_threshold: d.threshold,
            min_filter_coverage: d.min_coverage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotationConfig {
    pub quantity_tolerance: f64,
    pub max_sentence: usize,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        let d = QuantityRules::default();
        AnnotationConfig {
            quantity_tolerance: d.tolerance,
            max_sentence: d.max_sentences,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RdfConfig {
    pub base: String,
}

impl Default for RdfConfig {
    fn default() -> Self {
        RdfConfig {
            base: "http://example.org/newsgraph".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub host: String,
    pub port: u16,
    pub snapshot: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            snapshot: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub period: PeriodConfig,
    pub mapping: MappingConfig,
    pub clustering: ClusterSection,
    pub annotation: AnnotationConfig,
    pub rdf: RdfConfig,
    pub serve: ServeConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_relative(base);
        Ok(config)
    }

    pub fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let paths = &mut self.paths;
        for p in [
            &mut paths.articles,
            &mut paths.events,
            &mut paths.embeddings,
            &mut paths.aliases,
            &mut paths.taxonomy,
            &mut paths.gold,
            &mut self.serve.snapshot,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut paths.workdir);
    }

    /// Checks the invariants every stage relies on.
    pub fn validate(&self) -> Result<()> {
        if !(self.mapping.threshold.is_finite() && self.mapping.threshold > 0.0) {
            bail!(config_error("mapping.threshold must be > 0"));
        }
        self.weights()
            .validate()
            .map_err(|e| config_error(format!("clustering: {e}")))?;
        let c = &self.clustering;
        if !(c.fixed_threshold.is_finite() && c.fixed_threshold >= 0.0) {
            bail!(config_error("clustering.fixed_threshold must be a non-negative number"));
        }
        if !(0.0..=1.0).contains(&c.min_filter_coverage) {
            bail!(config_error("clustering.min_filter_coverage must lie in [0, 1]"));
        }
        let t = self.annotation.quantity_tolerance;
        if !(t > 0.0 && t < 1.0) {
            bail!(config_error("annotation.quantity_tolerance must lie in (0, 1)"));
        }
        if self.annotation.max_sentence == 0 {
            bail!(config_error("annotation.max_sentence must be at least 1"));
        }
        if let (Some(s), Some(e)) = (self.period.start, self.period.end) {
            if s > e {
                bail!(config_error("period.start is after period.end"));
            }
        }
        let base = &self.rdf.base;
        let scheme_ok = base
            .split_once("://")
            .is_some_and(|(s, rest)| !s.is_empty() && !rest.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric()));
        if !scheme_ok || base.chars().any(|c| c.is_whitespace() || "<>\"{}|^`\\".contains(c)) {
            bail!(config_error(format!("rdf.base {base:?} is not an absolute IRI")));
        }
        Ok(())
    }

    pub fn weights(&self) -> Weights {
        Weights {
            alpha: self.clustering.alpha,
            beta: self.clustering.beta,
            gamma: self.clustering.gamma,
        }
    }

    pub fn clustering_config(&self) -> ClusteringConfig {
        ClusteringConfig {
            weights: self.weights(),
            cut: self.clustering.cut,
            threshold: self.clustering.fixed_threshold,
            min_coverage: self.clustering.min_filter_coverage,
        }
    }

    pub fn quantity_rules(&self) -> QuantityRules {
        QuantityRules {
            tolerance: self.annotation.quantity_tolerance,
            max_sentences: self.annotation.max_sentence,
        }
    }

    /// The configured period, open ends widened to the calendar limits.
    pub fn period(&self) -> Option<Period> {
        if self.period.start.is_none() && self.period.end.is_none() {
            return None;
        }
        let start = self.period.start.unwrap_or(NaiveDate::MIN);
        let end = self.period.end.unwrap_or(NaiveDate::MAX);
        Period::new(start, end).ok()
    }

    pub fn workdir(&self) -> &Path {
        &self.paths.workdir
    }
}
