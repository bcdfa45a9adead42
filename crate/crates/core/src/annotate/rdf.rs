use std::fmt;

use serde::{Deserialize, Serialize};

use super::annotation::Annotation;
use crate::corpus::NewsArticle;
use crate::kb::KbEvent;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
pub const RNEWS: &str = "http://iptc.org/std/rNews/2011-10-07#";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";
pub const SCHEMA_ORG: &str = "http://schema.org/";
pub const WD: &str = "http://www.wikidata.org/entity/";
pub const WDT: &str = "http://www.wikidata.org/prop/direct/";
pub const IPTC_SUBJECT: &str = "http://cv.iptc.org/newscodes/subjectcode/";

/// Predicate carrying the schema id on event nodes.
pub fn schema_predicate() -> String {
    format!("{WDT}schema")
}

pub fn property_predicate(pid: &str) -> String {
    format!("{WDT}{pid}")
}

pub fn about_predicate() -> String {
    format!("{RNEWS}about")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Term {
    Iri { value: String },
    Blank { id: String },
    Literal {
        lexical: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lang: Option<String>,
    },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri { value: value.into() }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            lang: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: Some(lang.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn lexical(&self) -> Option<&str> {
        match self {
            Term::Literal { lexical, .. } => Some(lexical),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri { value } => write!(f, "<{}>", escape_iri(value)),
            Term::Blank { id } => write!(f, "_:{id}"),
            Term::Literal { lexical, datatype, lang } => {
                write!(f, "\"{}\"", escape_literal(lexical))?;
                if let Some(lang) = lang {
                    write!(f, "@{lang}")
                } else if let Some(dt) = datatype {
                    write!(f, "^^<{}>", escape_iri(dt))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: &str, object: Term) -> Self {
        Triple {
            subject,
            predicate: Term::iri(predicate),
            object,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

fn escape_iri(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len());
    for c in iri.chars() {
        if c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            out.push_str(&format!("\\u{:04X}", c as u32));
        } else {
            out.push(c);
        }
    }
    out
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Percent-encodes a path segment, keeping RFC 3986 unreserved characters.
pub fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~' | b':') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn article_iri(base: &str, id: &str) -> String {
    format!("{}/news/{}", base.trim_end_matches('/'), encode_segment(id))
}

pub fn event_iri(base: &str, article_id: &str) -> String {
    format!("{}/event/{}", base.trim_end_matches('/'), encode_segment(article_id))
}

/// The event an article was linked to, with what is known about it.
#[derive(Debug, Clone, Copy)]
pub struct EventLink<'a> {
    pub event: &'a KbEvent,
    pub annotations: &'a [Annotation],
    pub schema_id: Option<&'a str>,
}

/// RDF description of an article and, when mapped, of the event it reports.
///
/// The event node is local to the article (`<base>/event/<article id>`) and is
/// tied to the knowledge base through `owl:sameAs`.
pub fn serialize_rdf(article: &NewsArticle, link: Option<EventLink<'_>>, base: &str) -> Vec<Triple> {
    let news = Term::iri(article_iri(base, &article.id));
    let mut out = vec![
        Triple::new(news.clone(), RDF_TYPE, Term::iri(format!("{RNEWS}Article"))),
        Triple::new(
            news.clone(),
            &format!("{RNEWS}dateCreated"),
            Term::typed(article.created.format("%Y-%m-%dT%H:%M:%SZ").to_string(), XSD_DATE_TIME),
        ),
        Triple::new(news.clone(), &format!("{RNEWS}headline"), Term::lang(article.headline.clone(), "en")),
    ];
    for code in &article.iptc_codes {
        out.push(Triple::new(
            news.clone(),
            &format!("{DC}subject"),
            Term::iri(format!("{IPTC_SUBJECT}{}", encode_segment(code))),
        ));
    }
    for slug in &article.slugs {
        out.push(Triple::new(news.clone(), &format!("{SCHEMA_ORG}keywords"), Term::literal(slug.clone())));
    }
    let Some(link) = link else { return out };
    let node = Term::iri(event_iri(base, &article.id));
    out.push(Triple::new(news, &about_predicate(), node.clone()));
    out.push(Triple::new(node.clone(), RDF_TYPE, Term::iri(format!("{SCHEMA_ORG}Event"))));
    for wet in &link.event.wets {
        out.push(Triple::new(node.clone(), RDF_TYPE, Term::iri(format!("{WD}{}", wet.qid))));
    }
    out.push(Triple::new(node.clone(), RDF_TYPE, Term::iri(format!("{RNEWS}Concept"))));
    out.push(Triple::new(node.clone(), RDFS_LABEL, Term::literal(article.headline.clone())));
    out.push(Triple::new(node.clone(), &format!("{DC}identifier"), Term::literal(article.id.clone())));
    out.push(Triple::new(node.clone(), OWL_SAME_AS, Term::iri(format!("{WD}{}", link.event.qid))));
    for a in link.annotations {
        out.push(Triple::new(node.clone(), &property_predicate(&a.pid), Term::literal(a.value.clone())));
    }
    if let Some(schema) = link.schema_id {
        out.push(Triple::new(node, &schema_predicate(), Term::literal(schema)));
    }
    out
}

/// Canonical N-Triples: one statement per line, no prefixes.
pub fn to_ntriples<'a, I: IntoIterator<Item = &'a Triple>>(triples: I) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

const PREFIXES: [(&str, &str); 10] = [
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ("rnews", RNEWS),
    ("dc", DC),
    ("schema", SCHEMA_ORG),
    ("wd", WD),
    ("wdt", WDT),
    ("iptc", IPTC_SUBJECT),
];

fn turtle_term(term: &Term) -> String {
    if let Term::Iri { value } = term {
        if value == RDF_TYPE {
            return "a".into();
        }
        for (prefix, ns) in PREFIXES {
            if let Some(local) = value.strip_prefix(ns) {
                let simple = local.chars().next().is_some_and(|c| c.is_ascii_alphanumeric())
                    && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                if simple {
                    return format!("{prefix}:{local}");
                }
            }
        }
    }
    if let Term::Literal { lexical, datatype: Some(dt), lang: None } = term {
        if let Some(local) = dt.strip_prefix(PREFIXES[3].1) {
            return format!("\"{}\"^^xsd:{local}", escape_literal(lexical));
        }
    }
    term.to_string()
}

/// Human-oriented Turtle rendering grouped by subject.
pub fn to_turtle(triples: &[Triple]) -> String {
    let mut out = String::new();
    for (prefix, ns) in PREFIXES {
        out.push_str(&format!("@prefix {prefix}: <{ns}> .\n"));
    }
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        let end = triples[i..]
            .iter()
            .position(|t| &t.subject != subject)
            .map_or(triples.len(), |p| i + p);
        out.push('\n');
        out.push_str(&turtle_term(subject));
        for (k, t) in triples[i..end].iter().enumerate() {
            out.push_str(if k == 0 { "\n    " } else { " ;\n    " });
            out.push_str(&turtle_term(&t.predicate));
            out.push(' ');
            out.push_str(&turtle_term(&t.object));
        }
        out.push_str(" .\n");
        i = end;
    }
    out
}
