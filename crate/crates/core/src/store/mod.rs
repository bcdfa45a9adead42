//! Embedded triple store, full-text index and the search service state.

mod engine;
mod fulltext;
mod query;
mod triples;

pub use engine::{
    infobox, ArticleDetail, EventDetail, Hit, InfoboxEntity, SchemaDetail, SchemaSummary, SearchEngine, SearchResult,
    ServiceSnapshot, WetSummary, INFOBOX_SIZE, SNIPPET_CHARS,
};
pub use fulltext::{query_terms, FullTextIndex, Posting};
pub use query::{Comparator, PropertyFilter, SearchQuery, DEFAULT_PAGE_SIZE, MAX_PAGE_SIZE};
pub use triples::{Pattern, TripleStore};
