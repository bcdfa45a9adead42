use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::kb::{ClaimKind, EventCollection};

pub const DEFAULT_MIN_COVERAGE: f64 = 0.2;

/// A property suggested as a search filter for a schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaFilter {
    pub pid: String,
    pub label: String,
    pub kind: ClaimKind,
    /// Fraction of the schema's event instances carrying the property.
    pub coverage: f64,
    #[serde(default)]
    pub range: bool,
}

/// Properties carried by at least `min_coverage` of the events typed with any
/// of `wets`, most common first (ties by pid).
pub fn derive_schema_filters(wets: &[String], events: &EventCollection, min_coverage: f64) -> Vec<SchemaFilter> {
    let members: BTreeSet<&str> = wets.iter().map(String::as_str).collect();
    let instances: Vec<_> = events
        .iter()
        .filter(|e| e.wet_qids().any(|w| members.contains(w)))
        .collect();
    if instances.is_empty() {
        return Vec::new();
    }
    struct Tally<'a> {
        label: &'a str,
        events: usize,
        kinds: BTreeMap<ClaimKind, usize>,
    }
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for event in &instances {
        let mut seen = BTreeSet::new();
        for claim in &event.claims {
            let t = tallies.entry(claim.pid.as_str()).or_insert(Tally {
                label: &claim.label,
                events: 0,
                kinds: BTreeMap::new(),
            });
            *t.kinds.entry(claim.kind()).or_default() += 1;
            if seen.insert(claim.pid.as_str()) {
                t.events += 1;
            }
        }
    }
    let total = instances.len() as f64;
    let mut out: Vec<SchemaFilter> = tallies
        .into_iter()
        .map(|(pid, t)| {
            let kind = t
                .kinds
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(k, _)| *k)
                .unwrap_or(ClaimKind::String);
            SchemaFilter {
                pid: pid.to_string(),
                label: t.label.to_string(),
                kind,
                coverage: t.events as f64 / total,
                range: kind == ClaimKind::Quantity,
            }
        })
        .filter(|f| f.coverage >= min_coverage)
        .collect();
    out.sort_by(|a, b| b.coverage.total_cmp(&a.coverage).then_with(|| a.pid.cmp(&b.pid)));
    out
}
