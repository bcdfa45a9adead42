use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::fulltext::{query_terms, FullTextIndex};
use super::query::{Comparator, PropertyFilter, SearchQuery};
use super::triples::{Pattern, TripleStore};
use crate::annotate::{about_predicate, article_iri, property_predicate, schema_predicate, Annotation, Term, Triple, OWL_SAME_AS, WD};
use crate::cluster::{EntityKind, Recognizer, SchemaCluster, SchemaFilter};
use crate::corpus::{find_phrase, phrase_tokens, tokenize, ArticleText, Corpus, NewsArticle};
use crate::error::{Error, Result};
use crate::kb::{ClaimKind, EventCollection, KbEvent};

pub const SNIPPET_CHARS: usize = 240;
pub const INFOBOX_SIZE: usize = 12;

/// Everything the service needs, as persisted by the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceSnapshot {
    pub base: String,
    pub articles: Vec<NewsArticle>,
    pub events: Vec<KbEvent>,
    pub annotations: Vec<Annotation>,
    pub schemas: Vec<SchemaCluster>,
    pub triples: Vec<Triple>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub article_id: String,
    pub headline: String,
    pub created: DateTime<Utc>,
    pub qid: Option<String>,
    pub schema_id: Option<String>,
    pub snippet: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub total: usize,
    pub page: usize,
    pub size: usize,
    pub hits: Vec<Hit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoboxEntity {
    pub kind: EntityKind,
    pub text: String,
    pub mentions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleDetail {
    pub article: NewsArticle,
    /// Canonical text the annotation spans point into.
    pub text: String,
    pub qid: Option<String>,
    pub event_label: Option<String>,
    pub schema_id: Option<String>,
    pub annotations: Vec<Annotation>,
    pub entities: Vec<InfoboxEntity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaSummary {
    pub schema_id: String,
    pub label: String,
    pub wet_count: usize,
    pub article_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WetSummary {
    pub qid: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaDetail {
    pub schema_id: String,
    pub label: String,
    pub wets: Vec<WetSummary>,
    pub filters: Vec<SchemaFilter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDetail {
    pub event: KbEvent,
    pub schema_id: Option<String>,
    pub articles: Vec<String>,
}

#[derive(Debug, Clone, Default)]
struct Link {
    qid: Option<String>,
    schema: Option<String>,
}

/// Read-only search service state.
#[derive(Debug)]
pub struct SearchEngine {
    corpus: Corpus,
    store: TripleStore,
    index: FullTextIndex,
    events: EventCollection,
    schemas: Vec<SchemaCluster>,
    annotations: BTreeMap<String, Vec<Annotation>>,
    links: BTreeMap<String, Link>,
    node_article: HashMap<Term, String>,
    properties: BTreeMap<String, ClaimKind>,
}

impl SearchEngine {
    pub fn from_snapshot(snapshot: ServiceSnapshot) -> Result<Self> {
        let corpus = Corpus::new(snapshot.articles)?;
        let mut store = TripleStore::new();
        store.insert_all(&snapshot.triples)?;
        store.freeze();
        let index = FullTextIndex::build(corpus.iter().map(|(a, t)| (a.id.as_str(), t)));

        let about = Term::iri(about_predicate());
        let same_as = Term::iri(OWL_SAME_AS);
        let schema_pred = Term::iri(schema_predicate());
        let mut links = BTreeMap::new();
        let mut node_article = HashMap::new();
        for (article, _) in corpus.iter() {
            let subject = Term::iri(article_iri(&snapshot.base, &article.id));
            let nodes = store.matches(Pattern { subject: Some(&subject), predicate: Some(&about), object: None });
            let Some(node) = nodes.into_iter().map(|t| t.object).next() else { continue };
            let first_object = |p: &Term| {
                store
                    .matches(Pattern { subject: Some(&node), predicate: Some(p), object: None })
                    .into_iter()
                    .next()
                    .map(|t| t.object)
            };
            let qid = first_object(&same_as)
                .and_then(|o| o.as_iri().and_then(|i| i.strip_prefix(WD)).map(str::to_string));
            let schema = first_object(&schema_pred).and_then(|o| o.lexical().map(str::to_string));
            node_article.insert(node.clone(), article.id.clone());
            links.insert(article.id.clone(), Link { qid, schema });
        }

        let mut properties: BTreeMap<String, ClaimKind> = BTreeMap::new();
        for s in &snapshot.schemas {
            for f in &s.filters {
                properties.entry(f.pid.clone()).or_insert(f.kind);
            }
        }
        for e in &snapshot.events {
            for c in &e.claims {
                properties.entry(c.pid.clone()).or_insert(c.kind());
            }
        }
        let mut annotations: BTreeMap<String, Vec<Annotation>> = BTreeMap::new();
        for a in snapshot.annotations {
            annotations.entry(a.article_id.clone()).or_default().push(a);
        }
        Ok(SearchEngine {
            corpus,
            store,
            index,
            events: EventCollection::new(snapshot.events),
            schemas: snapshot.schemas,
            annotations,
            links,
            node_article,
            properties,
        })
    }

    pub fn store(&self) -> &TripleStore {
        &self.store
    }

    pub fn index(&self) -> &FullTextIndex {
        &self.index
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn property_kind(&self, pid: &str) -> Option<ClaimKind> {
        self.properties.get(pid).copied()
    }

    pub fn article_schema(&self, id: &str) -> Option<&str> {
        self.links.get(id).and_then(|l| l.schema.as_deref())
    }

    pub fn article_qid(&self, id: &str) -> Option<&str> {
        self.links.get(id).and_then(|l| l.qid.as_deref())
    }

    fn check(&self, q: &SearchQuery) -> Result<()> {
        q.validate()?;
        if let Some(s) = &q.schema {
            if !self.schemas.iter().any(|c| &c.schema_id == s) {
                return Err(Error::UnknownSchema(s.clone()));
            }
        }
        for f in &q.filters {
            let kind = self.property_kind(&f.pid).ok_or_else(|| Error::UnknownProperty(f.pid.clone()))?;
            if kind == ClaimKind::Quantity {
                f.value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::InvalidQuery(format!("{f}: value must be a number")))?;
            } else if f.op != Comparator::Eq {
                return Err(Error::InvalidQuery(format!("{f}: range comparison on a non-quantity property")));
            }
        }
        Ok(())
    }

    /// Articles satisfying a property filter, via the store indexes.
    fn filter_articles(&self, f: &PropertyFilter) -> Result<BTreeSet<&str>> {
        let predicate = Term::iri(property_predicate(&f.pid));
        let nodes: BTreeSet<Term> = if self.property_kind(&f.pid) == Some(ClaimKind::Quantity) {
            let v: f64 = f.value.parse().map_err(|_| Error::InvalidQuery(format!("{f}: value must be a number")))?;
            let (lo, hi) = match f.op {
                Comparator::Eq => (Some(v), Some(v)),
                Comparator::Gte => (Some(v), None),
                Comparator::Lte => (None, Some(v)),
            };
            self.store.numeric_range(&predicate, lo, hi)?
        } else {
            let wanted = f.value.to_lowercase();
            self.store
                .matches(Pattern { predicate: Some(&predicate), ..Pattern::default() })
                .into_iter()
                .filter(|t| t.object.lexical().is_some_and(|l| l.to_lowercase() == wanted))
                .map(|t| t.subject)
                .collect()
        };
        Ok(nodes.iter().filter_map(|n| self.node_article.get(n).map(String::as_str)).collect())
    }

    fn location_match(&self, article: &NewsArticle, text: &ArticleText, phrase: &[String]) -> bool {
        if find_phrase(&text.tokens.tokens, phrase).is_some() {
            return true;
        }
        if let Some(d) = &article.dateline {
            if find_phrase(&tokenize(d).tokens, phrase).is_some() {
                return true;
            }
        }
        let Some(event) = self.article_qid(&article.id).and_then(|q| self.events.get(q)) else {
            return false;
        };
        event
            .countries
            .iter()
            .chain(&event.locations)
            .any(|l| phrase_tokens(l) == phrase)
    }

    pub fn search(&self, q: &SearchQuery) -> Result<SearchResult> {
        self.check(q)?;
        let terms = q.keywords.as_deref().map(query_terms).unwrap_or_default();
        let mut hits: Vec<(&NewsArticle, &ArticleText, f64)> = if terms.is_empty() {
            self.corpus.iter().map(|(a, t)| (a, t, 0.0)).collect()
        } else {
            self.index
                .search(&terms)
                .into_iter()
                .filter_map(|(id, s)| self.corpus.get(&id).map(|(a, t)| (a, t, s)))
                .collect()
        };
        if q.from.is_some() || q.to.is_some() {
            hits.retain(|(a, _, _)| {
                let d = a.created_date();
                q.from.is_none_or(|f| d >= f) && q.to.is_none_or(|t| d <= t)
            });
        }
        if let Some(loc) = &q.location {
            let phrase = phrase_tokens(loc);
            if phrase.is_empty() {
                return Err(Error::InvalidQuery(format!("location {loc:?} has no searchable token")));
            }
            hits.retain(|(a, t, _)| self.location_match(a, t, &phrase));
        }
        if let Some(schema) = &q.schema {
            hits.retain(|(a, _, _)| self.article_schema(&a.id) == Some(schema.as_str()));
        }
        for f in &q.filters {
            let allowed = self.filter_articles(f)?;
            hits.retain(|(a, _, _)| allowed.contains(a.id.as_str()));
        }
        hits.sort_by(|x, y| {
            y.2.total_cmp(&x.2)
                .then_with(|| y.0.created.cmp(&x.0.created))
                .then_with(|| x.0.id.cmp(&y.0.id))
        });
        let total = hits.len();
        let page = hits
            .into_iter()
            .skip((q.page - 1).saturating_mul(q.size))
            .take(q.size)
            .map(|(a, t, score)| Hit {
                article_id: a.id.clone(),
                headline: a.headline.clone(),
                created: a.created,
                qid: self.article_qid(&a.id).map(str::to_string),
                schema_id: self.article_schema(&a.id).map(str::to_string),
                snippet: self.snippet(&a.id, t, &terms),
                score,
            })
            .collect();
        Ok(SearchResult {
            total,
            page: q.page,
            size: q.size,
            hits: page,
        })
    }

    /// Sentence holding the query term weighted highest in the article, or the
    /// lead sentence when there is no query.
    fn snippet(&self, id: &str, text: &ArticleText, terms: &[String]) -> String {
        let best = terms
            .iter()
            .map(|t| (t, self.index.weight(t, id)))
            .fold(None::<(&String, f64)>, |acc, (t, w)| match acc {
                Some((_, bw)) if bw >= w => acc,
                _ => Some((t, w)),
            });
        let sentence = best
            .and_then(|(term, _)| text.tokens.iter().find(|t| &t.normalized == term))
            .map(|t| t.sentence)
            .unwrap_or(if text.sentence_count() > 1 { 1 } else { 0 });
        let s = text.sentence_text(sentence).unwrap_or_default().trim();
        s.chars().take(SNIPPET_CHARS).collect()
    }

    pub fn article_detail(&self, id: &str) -> Result<ArticleDetail> {
        let (article, text) = self.corpus.get(id).ok_or_else(|| Error::NotFound { kind: "article", id: id.to_string() })?;
        let qid = self.article_qid(id).map(str::to_string);
        Ok(ArticleDetail {
            article: article.clone(),
            text: text.text.clone(),
            event_label: qid.as_deref().and_then(|q| self.events.get(q)).map(|e| e.label.clone()),
            qid,
            schema_id: self.article_schema(id).map(str::to_string),
            annotations: self.annotations.get(id).cloned().unwrap_or_default(),
            entities: infobox(text, Recognizer::shipped()),
        })
    }

    pub fn schema_list(&self) -> Vec<SchemaSummary> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for l in self.links.values() {
            if let Some(s) = &l.schema {
                *counts.entry(s.as_str()).or_default() += 1;
            }
        }
        self.schemas
            .iter()
            .map(|s| SchemaSummary {
                schema_id: s.schema_id.clone(),
                label: s.label.clone(),
                wet_count: s.wets.len(),
                article_count: counts.get(s.schema_id.as_str()).copied().unwrap_or(0),
            })
            .collect()
    }

    pub fn schema_detail(&self, id: &str) -> Result<SchemaDetail> {
        let s = self
            .schemas
            .iter()
            .find(|s| s.schema_id == id)
            .ok_or_else(|| Error::NotFound { kind: "schema", id: id.to_string() })?;
        let labels: HashMap<&str, &str> = self
            .events
            .iter()
            .flat_map(|e| e.wets.iter().map(|w| (w.qid.as_str(), w.label.as_str())))
            .collect();
        Ok(SchemaDetail {
            schema_id: s.schema_id.clone(),
            label: s.label.clone(),
            wets: s
                .wets
                .iter()
                .map(|q| WetSummary {
                    qid: q.clone(),
                    label: labels.get(q.as_str()).copied().unwrap_or_default().to_string(),
                })
                .collect(),
            filters: s.filters.clone(),
        })
    }

    pub fn event_detail(&self, qid: &str) -> Result<EventDetail> {
        let event = self.events.get(qid).ok_or_else(|| Error::NotFound { kind: "event", id: qid.to_string() })?;
        let articles: Vec<String> = self
            .links
            .iter()
            .filter(|(_, l)| l.qid.as_deref() == Some(qid))
            .map(|(id, _)| id.clone())
            .collect();
        let schema_id = event
            .wet_qids()
            .find_map(|w| self.schemas.iter().find(|s| s.wets.iter().any(|x| x == w)))
            .map(|s| s.schema_id.clone());
        Ok(EventDetail {
            event: event.clone(),
            schema_id,
            articles,
        })
    }
}

/// Named entities of an article, most mentioned first.
pub fn infobox(text: &ArticleText, recognizer: &Recognizer) -> Vec<InfoboxEntity> {
    let tokens = &text.tokens.tokens;
    let mut groups: Vec<(EntityKind, String, String, usize)> = Vec::new();
    for m in recognizer.recognize_tokens(tokens) {
        let key: Vec<&str> = tokens[m.tokens.clone()].iter().map(|t| t.normalized.as_str()).collect();
        let key = key.join(" ");
        match groups.iter_mut().find(|g| g.0 == m.kind && g.1 == key) {
            Some(g) => g.3 += 1,
            None => {
                let span = tokens[m.tokens.start].span.start..tokens[m.tokens.end - 1].span.end;
                groups.push((m.kind, key, text.text[span].to_string(), 1));
            }
        }
    }
    groups.sort_by_key(|g| std::cmp::Reverse(g.3));
    groups
        .into_iter()
        .take(INFOBOX_SIZE)
        .map(|(kind, _, text, mentions)| InfoboxEntity { kind, text, mentions })
        .collect()
}
