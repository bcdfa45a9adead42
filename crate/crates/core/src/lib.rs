//! Linking newswire articles to knowledge-base events, grouping event types
//! into schemas, annotating articles and searching the resulting graph.

pub mod annotate;
pub mod cluster;
pub mod corpus;
pub mod error;
pub mod kb;
pub mod mapping;
pub mod snapshot;
pub mod stats;
pub mod store;

pub use error::{Error, Result};

pub use annotate::{Annotation, AnnotationKind, Triple};
pub use cluster::{Clustering, ClusteringConfig, Dendrogram, Weights};
pub use corpus::{ArticleText, Corpus, NewsArticle, Token};
pub use kb::{Claim, EventCollection, KbEvent, Period};
pub use mapping::{MappingResult, Window};
pub use stats::{ImtStats, ImtVocabStats, WetStats};
pub use store::{SearchEngine, SearchQuery, ServiceSnapshot};
