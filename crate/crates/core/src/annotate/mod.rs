//! Grounding event property values in article text, and RDF output.

mod aliases;
mod annotation;
mod ntriples;
mod rdf;

use rayon::prelude::*;

use crate::cluster::EmbeddingTable;
use crate::corpus::{ArticleText, Corpus, NewsArticle};
use crate::kb::{EventCollection, KbEvent};
use crate::mapping::MappingResult;

pub use aliases::AliasTable;
pub use annotation::{
    annotate_entities, annotate_quantities, context_score, context_window, within_tolerance, Annotation,
    AnnotationKind, QuantityRules, CONTEXT_RADIUS,
};
pub use ntriples::{parse_line, parse_ntriples};
pub use rdf::{
    about_predicate, article_iri, encode_segment, event_iri, property_predicate, schema_predicate, serialize_rdf,
    to_ntriples, to_turtle, EventLink, Term, Triple, DC, IPTC_SUBJECT, OWL_SAME_AS, RDFS_LABEL, RDF_TYPE, RNEWS,
    SCHEMA_ORG, WD, WDT, XSD_DATE_TIME,
};

/// Annotations as JSON lines, one object per annotation.
pub fn annotations_to_jsonl(annotations: &[Annotation]) -> crate::Result<String> {
    let mut out = String::new();
    for a in annotations {
        out.push_str(&serde_json::to_string(a)?);
        out.push('\n');
    }
    Ok(out)
}

/// Entity and quantity annotations of one article, ordered by position.
pub fn annotate_article(
    article: &NewsArticle,
    text: &ArticleText,
    event: &KbEvent,
    aliases: &AliasTable,
    table: &EmbeddingTable,
    rules: QuantityRules,
) -> Vec<Annotation> {
    let mut out = annotate_entities(article, text, event, aliases);
    out.extend(annotate_quantities(article, text, event, table, rules));
    out.sort_by(|a, b| a.span.start.cmp(&b.span.start).then_with(|| a.pid.cmp(&b.pid)));
    out
}

/// Annotates every mapped article, in article id order.
pub fn annotate_corpus(
    corpus: &Corpus,
    events: &EventCollection,
    mappings: &[MappingResult],
    aliases: &AliasTable,
    table: &EmbeddingTable,
    rules: QuantityRules,
) -> Vec<Annotation> {
    let mut sorted: Vec<&MappingResult> = mappings.iter().collect();
    sorted.sort_by(|a, b| a.article_id.cmp(&b.article_id));
    sorted
        .par_iter()
        .map(|m| match (corpus.get(&m.article_id), events.get(&m.qid)) {
            (Some((article, text)), Some(event)) => annotate_article(article, text, event, aliases, table, rules),
            _ => Vec::new(),
        })
        .flatten()
        .collect()
}
