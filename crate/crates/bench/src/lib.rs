//! Synthetic inputs for the benchmarks.

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use newsgraph_core::annotate::{serialize_rdf, EventLink};
use newsgraph_core::cluster::SchemaCluster;
use newsgraph_core::corpus::NewsArticle;
use newsgraph_core::kb::{load_events, KbEvent};
use newsgraph_core::ServiceSnapshot;

const WORDS: [&str; 24] = [
    "crash", "plane", "vote", "summit", "quake", "rescue", "minister", "police", "storm", "market", "talks", "border",
    "fire", "court", "strike", "river", "airline", "victims", "leaders", "ballot", "tremor", "pilot", "france", "spain",
];

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn sentence<R: Rng>(rng: &mut R) -> String {
    let words: Vec<&str> = (0..rng.gen_range(6..16)).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s.push('.');
    s
}

/// A paragraph-sized chunk of plausible newswire text.
pub fn paragraph<R: Rng>(rng: &mut R, sentences: usize) -> String {
    (0..sentences).map(|_| sentence(rng)).collect::<Vec<_>>().join(" ")
}

pub fn articles<R: Rng>(rng: &mut R, n: usize) -> Vec<NewsArticle> {
    let codes = ["04015001", "11000000", "03015000", "16000000", "15000000"];
    (0..n)
        .map(|i| NewsArticle {
            id: format!("n{i:05}"),
            headline: sentence(rng),
            created: Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap() + Duration::hours(rng.gen_range(0..24 * 365)),
            dateline: None,
            iptc_codes: (0..rng.gen_range(1..3)).map(|_| codes[rng.gen_range(0..codes.len())].to_string()).collect::<BTreeSet<_>>(),
            slugs: Vec::new(),
            paragraphs: (0..rng.gen_range(2..6)).map(|_| paragraph(rng, 3)).collect(),
        })
        .collect()
}

/// Symmetric distance matrix in [0, 2) and leaf keys.
pub fn distances<R: Rng>(rng: &mut R, n: usize) -> (Vec<Vec<f64>>, Vec<String>) {
    let upper: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if j > i { rng.gen_range(0.0..2.0) } else { 0.0 }).collect())
        .collect();
    let d = (0..n)
        .map(|i| (0..n).map(|j| if j >= i { upper[i][j] } else { upper[j][i] }).collect())
        .collect();
    (d, (0..n).map(|i| format!("Q{}", 1000 + i)).collect())
}

fn events(n: usize) -> Vec<KbEvent> {
    let types = [("Q744913", "aviation accident"), ("Q7944", "earthquake"), ("Q40231", "election")];
    let lines: Vec<String> = (0..n)
        .map(|i| {
            let (wet, label) = types[i % types.len()];
            let day = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap() + Duration::days(i as i64 * 7);
            format!(
                r#"{{"qid":"Q{}","label":"event {i}","instance_of":[{{"qid":"{wet}","label":"{label}"}}],"point_in_time":"{day}","country":["France"],"claims":[{{"pid":"P1120","label":"number of deaths","kind":"quantity","value":{}}}]}}"#,
                5000 + i,
                i * 3
            )
        })
        .collect();
    load_events(lines.iter().map(String::as_str)).events.into_events()
}

/// A service snapshot over `n` synthetic articles, a third of them linked to events.
pub fn snapshot<R: Rng>(rng: &mut R, n: usize) -> ServiceSnapshot {
    let base = "http://example.org/newsgraph";
    let articles = articles(rng, n);
    let events = events(50);
    let schemas = vec![SchemaCluster {
        schema_id: "S1".into(),
        label: "aviation accident".into(),
        wets: vec!["Q744913".into()],
        filters: Vec::new(),
    }];
    let mut triples = Vec::new();
    for (i, a) in articles.iter().enumerate() {
        let link = (i % 3 == 0).then(|| {
            let event = &events[i % events.len()];
            EventLink {
                event,
                annotations: &[],
                schema_id: event.wet_qids().any(|w| w == "Q744913").then_some("S1"),
            }
        });
        triples.extend(serialize_rdf(a, link, base));
    }
    ServiceSnapshot {
        base: base.into(),
        articles,
        events,
        annotations: Vec::new(),
        schemas,
        triples,
    }
}
