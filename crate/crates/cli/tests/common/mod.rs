//! Shared helpers for the CLI integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

use newsgraph_cli::{Pipeline, PipelineConfig};
use newsgraph_core::annotate::{annotate_corpus, serialize_rdf, AliasTable, EventLink, QuantityRules};
use newsgraph_core::cluster::{derive_schema_filters, EmbeddingTable, SchemaCluster};
use newsgraph_core::corpus::{Corpus, NewsArticle};
use newsgraph_core::kb::{Claim, ClaimValue, EventCollection, KbEvent, Wet};
use newsgraph_core::mapping::{MappingResult, Window};
use newsgraph_core::store::ServiceSnapshot;

pub const GERMANWINGS_ID: &str = "71e6c1b5-cbfa-3f85-8510-e200652f6735";
pub const GERMANWINGS_QID: &str = "Q19671417";
pub const AVIATION_ACCIDENT: &str = "Q744913";
pub const BASE: &str = "http://example.org/newsgraph";

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// The fixture configuration with its workdir moved to `workdir`.
pub fn fixture_config(workdir: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&fixtures_dir().join("pipeline.toml")).expect("fixture config");
    config.paths.workdir = workdir.to_path_buf();
    config
}

/// Runs every stage on the fixtures inside `workdir`.
pub fn run_fixture_pipeline(workdir: &Path) -> Pipeline {
    let pipeline = Pipeline::new(fixture_config(workdir)).expect("valid config");
    pipeline.run_all().expect("pipeline run");
    pipeline
}

pub fn fixture_embeddings() -> EmbeddingTable {
    EmbeddingTable::parse(&std::fs::read_to_string(fixtures_dir().join("embeddings.txt")).unwrap()).unwrap()
}

pub fn article(id: &str, day: NaiveDate, codes: &[&str], headline: &str, paragraphs: &[&str]) -> NewsArticle {
    NewsArticle {
        id: id.to_string(),
        headline: headline.to_string(),
        created: Utc.from_utc_datetime(&day.and_hms_opt(12, 0, 0).unwrap()),
        dateline: None,
        iptc_codes: codes.iter().map(|c| c.to_string()).collect(),
        slugs: vec![],
        paragraphs: paragraphs.iter().map(|p| p.to_string()).collect(),
    }
}

pub fn quantity(pid: &str, label: &str, amount: f64) -> Claim {
    Claim {
        pid: pid.into(),
        label: label.into(),
        value: ClaimValue::Quantity { amount, unit: None },
    }
}

pub fn item(pid: &str, label: &str, qid: &str, value: &str) -> Claim {
    Claim {
        pid: pid.into(),
        label: label.into(),
        value: ClaimValue::Item {
            qid: qid.into(),
            label: value.into(),
        },
    }
}

pub fn event(qid: &str, label: &str, wets: &[(&str, &str)], day: NaiveDate, countries: &[&str], claims: Vec<Claim>) -> KbEvent {
    KbEvent {
        qid: qid.into(),
        label: label.into(),
        aliases: vec![],
        wets: wets
            .iter()
            .map(|(q, l)| Wet {
                qid: q.to_string(),
                label: l.to_string(),
            })
            .collect(),
        point_in_time: Some(day),
        start_time: None,
        end_time: None,
        countries: countries.iter().map(|c| c.to_string()).collect(),
        locations: vec![],
        claims,
    }
}

pub const COUNTRIES: [&str; 5] = ["France", "Spain", "New Zealand", "Nepal", "Chile"];
pub const WORDS: [&str; 16] = [
    "crash", "plane", "vote", "summit", "quake", "rescue", "minister", "police", "storm", "market", "talks", "border",
    "fire", "court", "strike", "river",
];
pub const SEARCH_WETS: [(&str, &str); 4] = [
    ("Q9001", "plane crash"),
    ("Q9002", "aviation accident"),
    ("Q9003", "earthquake"),
    ("Q9004", "federal election"),
];

/// A random service snapshot: articles, events, mappings, annotations, schemas and triples.
pub fn random_snapshot<R: Rng>(rng: &mut R, n_articles: usize) -> ServiceSnapshot {
    let day0 = NaiveDate::from_ymd_opt(2015, 3, 1).unwrap();
    let n_events = 8;
    let events: Vec<KbEvent> = (0..n_events)
        .map(|i| {
            let wet = SEARCH_WETS[i % SEARCH_WETS.len()];
            let country = COUNTRIES[rng.gen_range(0..COUNTRIES.len())];
            let mut claims = vec![item("P17", "country", "Q1", country)];
            if i % 4 != 3 {
                claims.push(quantity("P1120", "number of deaths", rng.gen_range(1..400) as f64));
            }
            event(&format!("Q{}", 100 + i), &format!("event {i}"), &[wet], day0, &[country], claims)
        })
        .collect();

    let mut articles = Vec::with_capacity(n_articles);
    let mut mappings = Vec::new();
    for i in 0..n_articles {
        let id = format!("a{i:03}");
        let day = day0 + Duration::days(rng.gen_range(0..20));
        let linked = rng.gen_bool(0.7).then(|| &events[rng.gen_range(0..n_events)]);
        let mut sentences = Vec::new();
        for s in 0..rng.gen_range(2..7) {
            let mut words: Vec<String> = (0..rng.gen_range(3..9))
                .map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_string())
                .collect();
            if rng.gen_bool(0.25) {
                words.push(format!("in {}", COUNTRIES[rng.gen_range(0..COUNTRIES.len())]));
            }
            if let Some(ev) = linked {
                if let Some(v) = ev.claims.iter().find_map(Claim::quantity) {
                    if s < 6 && rng.gen_bool(0.4) {
                        let shown = (v * rng.gen_range(0.8..1.2)).round().max(1.0);
                        words.push(format!("with {shown} people killed"));
                    }
                }
            }
            let mut sentence = words.join(" ");
            sentence.push('.');
            sentences.push(sentence[..1].to_uppercase() + &sentence[1..]);
        }
        let codes = ["c1", "c2", "c3", "c4"];
        let mut a = article(
            &id,
            day,
            &[codes[rng.gen_range(0..codes.len())]],
            &format!("{} {}", WORDS[rng.gen_range(0..WORDS.len())], WORDS[rng.gen_range(0..WORDS.len())]),
            &[&sentences.join(" ")],
        );
        if rng.gen_bool(0.3) {
            a.dateline = Some(COUNTRIES[rng.gen_range(0..COUNTRIES.len())].to_uppercase());
        }
        if let Some(ev) = linked {
            mappings.push(MappingResult {
                article_id: id.clone(),
                qid: ev.qid.clone(),
                score: 1.0,
                window: Window::All,
            });
        }
        articles.push(a);
    }

    let collection = EventCollection::new(events.clone());
    let corpus = Corpus::new(articles.clone()).unwrap();
    let annotations = annotate_corpus(
        &corpus,
        &collection,
        &mappings,
        &AliasTable::default(),
        &fixture_embeddings(),
        QuantityRules::default(),
    );
    let mut schemas = vec![
        SchemaCluster {
            schema_id: "S1".into(),
            label: "plane crash".into(),
            wets: vec!["Q9001".into(), "Q9002".into()],
            filters: vec![],
        },
        SchemaCluster {
            schema_id: "S2".into(),
            label: "earthquake".into(),
            wets: vec!["Q9003".into()],
            filters: vec![],
        },
        SchemaCluster {
            schema_id: "S3".into(),
            label: "election".into(),
            wets: vec!["Q9004".into()],
            filters: vec![],
        },
    ];
    for s in &mut schemas {
        s.filters = derive_schema_filters(&s.wets, &collection, 0.2);
    }
    let schema_of = |ev: &KbEvent| -> Option<String> {
        schemas
            .iter()
            .find(|s| ev.wet_qids().any(|w| s.wets.iter().any(|x| x == w)))
            .map(|s| s.schema_id.clone())
    };
    let by_article: BTreeMap<&str, &str> = mappings.iter().map(|m| (m.article_id.as_str(), m.qid.as_str())).collect();
    let mut triples = Vec::new();
    for a in corpus.articles() {
        let ev = by_article.get(a.id.as_str()).and_then(|q| collection.get(q));
        let own: Vec<_> = annotations.iter().filter(|x| x.article_id == a.id).cloned().collect();
        let schema = ev.and_then(schema_of);
        let link = ev.map(|event| EventLink {
            event,
            annotations: &own,
            schema_id: schema.as_deref(),
        });
        triples.extend(serialize_rdf(a, link, BASE));
    }
    ServiceSnapshot {
        base: BASE.into(),
        articles,
        events,
        annotations,
        schemas,
        triples,
    }
}

/// Distinct normalized tokens of a string, for brute-force checks.
pub fn token_set(text: &str) -> BTreeSet<String> {
    newsgraph_core::corpus::phrase_tokens(text).into_iter().collect()
}

pub fn shuffle<T, R: Rng>(rng: &mut R, v: &mut [T]) {
    v.shuffle(rng);
}
