//! Grouping fine-grained event types into coarse schemas.

mod cut;
mod embedding;
mod filters;
mod genericize;
mod repr;
mod similarity;
mod ward;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use cut::{
    display_label, elbow_cut, elbow_threshold, fixed_cut, flat_clusters, name_schemas, Cut, CutMode, SchemaCluster,
    DEFAULT_THRESHOLD, FLAT_TOLERANCE,
};
pub use embedding::{cosine_dense, EmbeddingTable};
pub use filters::{derive_schema_filters, SchemaFilter, DEFAULT_MIN_COVERAGE};
pub use genericize::{genericize_label, EntityKind, EntityMatch, Recognizer};
pub use repr::{
    build_representations, content_repr, imt_repr, label_repr, wet_representation, ExcludedWet, SparseVec,
    WetRepresentation,
};
pub use similarity::{cosine_sparse, pair_similarity, Weights};
pub use ward::{distance_matrix, ward_cluster, ward_linkage, Dendrogram, Merge};

use crate::error::Result;
use crate::kb::{EventCollection, KbEvent};
use crate::stats::{ImtVocabStats, WetStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub weights: Weights,
    pub cut: CutMode,
    /// Threshold of the fixed cut, and fallback of the elbow cut.
    pub threshold: f64,
    pub min_coverage: f64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            weights: Weights::default(),
            cut: CutMode::Elbow,
            threshold: DEFAULT_THRESHOLD,
            min_coverage: DEFAULT_MIN_COVERAGE,
        }
    }
}

/// Everything produced by the clustering stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub cut: CutMode,
    pub threshold: f64,
    pub knee_found: bool,
    pub dendrogram: Dendrogram,
    pub schemas: Vec<SchemaCluster>,
    pub excluded: Vec<ExcludedWet>,
}

impl Clustering {
    /// WET qid -> schema id.
    pub fn schema_index(&self) -> BTreeMap<&str, &str> {
        self.schemas
            .iter()
            .flat_map(|s| s.wets.iter().map(move |w| (w.as_str(), s.schema_id.as_str())))
            .collect()
    }

    /// Schema of the first of the event's types that was clustered.
    pub fn schema_of(&self, event: &KbEvent) -> Option<&str> {
        let index = self.schema_index();
        event.wet_qids().find_map(|w| index.get(w).copied())
    }

    pub fn schema(&self, id: &str) -> Option<&SchemaCluster> {
        self.schemas.iter().find(|s| s.schema_id == id)
    }
}

/// Represents, clusters, cuts and names the event types of `events`.
pub fn cluster_event_types(
    events: &EventCollection,
    table: &EmbeddingTable,
    recognizer: &Recognizer,
    wet_stats: &WetStats,
    imt_stats: &ImtVocabStats,
    config: &ClusteringConfig,
) -> Result<Clustering> {
    config.weights.validate()?;
    let wets: Vec<_> = events.iter().flat_map(|e| e.wets.iter().cloned()).collect();
    let (reprs, excluded) = build_representations(&wets, table, recognizer, wet_stats, imt_stats);
    let dendrogram = ward_cluster(&reprs, config.weights)?;
    let cut = match config.cut {
        CutMode::Elbow => elbow_cut(&dendrogram, config.threshold),
        CutMode::Fixed => fixed_cut(&dendrogram, config.threshold),
    };
    let labels: BTreeMap<String, String> = reprs.iter().map(|r| (r.qid.clone(), r.label.clone())).collect();
    let mut schemas = name_schemas(&dendrogram, &cut, &labels, recognizer);
    for s in &mut schemas {
        s.filters = derive_schema_filters(&s.wets, events, config.min_coverage);
    }
    Ok(Clustering {
        cut: cut.mode,
        threshold: cut.threshold,
        knee_found: cut.knee_found,
        dendrogram,
        schemas,
        excluded,
    })
}
