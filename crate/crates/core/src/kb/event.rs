use std::collections::HashMap;
use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// An event type: one `instance_of` value of an event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wet {
    pub qid: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Quantity,
    String,
    Item,
}

impl ClaimKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimKind::Quantity => "quantity",
            ClaimKind::String => "string",
            ClaimKind::Item => "item",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClaimValue {
    Quantity { amount: f64, unit: Option<String> },
    Text(String),
    Item { qid: String, label: String },
}

/// A property statement on an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClaimRecord", into = "ClaimRecord")]
pub struct Claim {
    pub pid: String,
    pub label: String,
    pub value: ClaimValue,
}

impl Claim {
    pub fn kind(&self) -> ClaimKind {
        match self.value {
            ClaimValue::Quantity { .. } => ClaimKind::Quantity,
            ClaimValue::Text(_) => ClaimKind::String,
            ClaimValue::Item { .. } => ClaimKind::Item,
        }
    }

    pub fn quantity(&self) -> Option<f64> {
        match self.value {
            ClaimValue::Quantity { amount, .. } => Some(amount),
            _ => None,
        }
    }

    /// Text searched for in articles (string value or item label).
    pub fn text(&self) -> Option<&str> {
        match &self.value {
            ClaimValue::Text(s) => Some(s),
            ClaimValue::Item { label, .. } => Some(label),
            ClaimValue::Quantity { .. } => None,
        }
    }

    /// Canonical lexical form of the value.
    pub fn lexical(&self) -> String {
        match &self.value {
            ClaimValue::Quantity { amount, .. } => format_number(*amount),
            ClaimValue::Text(s) => s.clone(),
            ClaimValue::Item { label, .. } => label.clone(),
        }
    }
}

/// `150.0` prints as `150`; other values use the shortest round-trip form.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[derive(Serialize, Deserialize)]
struct ClaimRecord {
    pid: String,
    label: String,
    kind: ClaimKind,
    value: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
}

impl TryFrom<ClaimRecord> for Claim {
    type Error = String;

    fn try_from(r: ClaimRecord) -> std::result::Result<Self, String> {
        let value = match r.kind {
            ClaimKind::Quantity => {
                let amount = match &r.value {
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => s.trim().parse().ok(),
                    _ => None,
                }
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| format!("claim {}: quantity value must be a finite number", r.pid))?;
                ClaimValue::Quantity { amount, unit: r.unit }
            }
            ClaimKind::String => match r.value {
                Value::String(s) => ClaimValue::Text(s),
                _ => return Err(format!("claim {}: string value must be text", r.pid)),
            },
            ClaimKind::Item => {
                let qid = r.value.get("qid").and_then(Value::as_str);
                let label = r.value.get("label").and_then(Value::as_str);
                match (qid, label) {
                    (Some(q), Some(l)) if !q.is_empty() && !l.is_empty() => ClaimValue::Item {
                        qid: q.to_string(),
                        label: l.to_string(),
                    },
                    _ => return Err(format!("claim {}: item value needs qid and label", r.pid)),
                }
            }
        };
        Ok(Claim {
            pid: r.pid,
            label: r.label,
            value,
        })
    }
}

impl From<Claim> for ClaimRecord {
    fn from(c: Claim) -> Self {
        let kind = c.kind();
        let (value, unit) = match c.value {
            ClaimValue::Quantity { amount, unit } => (serde_json::json!(amount), unit),
            ClaimValue::Text(s) => (Value::String(s), None),
            ClaimValue::Item { qid, label } => (serde_json::json!({ "qid": qid, "label": label }), None),
        };
        ClaimRecord {
            pid: c.pid,
            label: c.label,
            kind,
            value,
            unit,
        }
    }
}

/// One knowledge-base event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbEvent {
    pub qid: String,
    pub label: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(rename = "instance_of")]
    pub wets: Vec<Wet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_in_time: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_time: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_time: Option<NaiveDate>,
    #[serde(rename = "country", default)]
    pub countries: Vec<String>,
    #[serde(rename = "location", default)]
    pub locations: Vec<String>,
    #[serde(default)]
    pub claims: Vec<Claim>,
}

pub(crate) fn is_qid(s: &str) -> bool {
    static QID: OnceLock<Regex> = OnceLock::new();
    QID.get_or_init(|| Regex::new(r"^Q[0-9]+$").unwrap()).is_match(s)
}

impl KbEvent {
    fn validate(&self) -> std::result::Result<(), String> {
        if !is_qid(&self.qid) {
            return Err(format!("qid {:?} does not match Q[0-9]+", self.qid));
        }
        if self.wets.is_empty() {
            return Err(format!("{}: no instance_of value", self.qid));
        }
        if let Some(w) = self.wets.iter().find(|w| !is_qid(&w.qid)) {
            return Err(format!("{}: event type qid {:?} is invalid", self.qid, w.qid));
        }
        if let (Some(s), Some(e)) = (self.start_time, self.end_time) {
            if s > e {
                return Err(format!("{}: start_time {s} after end_time {e}", self.qid));
            }
        }
        Ok(())
    }

    /// Whether the event has a usable date: a point in time or a closed duration.
    pub fn has_dates(&self) -> bool {
        self.point_in_time.is_some() || (self.start_time.is_some() && self.end_time.is_some())
    }

    pub fn wet_qids(&self) -> impl Iterator<Item = &str> {
        self.wets.iter().map(|w| w.qid.as_str())
    }
}

/// A line that could not be loaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub line: usize,
    pub reason: String,
}

/// Events indexed by qid, ordered by qid.
#[derive(Debug, Clone, Default)]
pub struct EventCollection {
    events: Vec<KbEvent>,
    by_qid: HashMap<String, usize>,
}

impl EventCollection {
    pub fn new(mut events: Vec<KbEvent>) -> Self {
        events.sort_by(|a, b| a.qid.cmp(&b.qid));
        events.dedup_by(|b, a| a.qid == b.qid);
        let by_qid = events.iter().enumerate().map(|(i, e)| (e.qid.clone(), i)).collect();
        EventCollection { events, by_qid }
    }

    pub fn get(&self, qid: &str) -> Option<&KbEvent> {
        self.by_qid.get(qid).map(|&i| &self.events[i])
    }

    pub fn events(&self) -> &[KbEvent] {
        &self.events
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KbEvent> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn into_events(self) -> Vec<KbEvent> {
        self.events
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOutcome {
    pub events: EventCollection,
    pub rejects: Vec<Reject>,
}

/// Loads event JSONL. Malformed lines are reported, not fatal. Blank lines are skipped.
pub fn load_events<I, S>(lines: I) -> LoadOutcome
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut events = Vec::new();
    let mut rejects = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines.into_iter().enumerate() {
        let line = line.as_ref().trim();
        if line.is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<KbEvent>(line)
            .map_err(|e| e.to_string())
            .and_then(|ev| ev.validate().map(|_| ev));
        match parsed {
            Ok(ev) if !seen.insert(ev.qid.clone()) => rejects.push(Reject {
                line: i + 1,
                reason: format!("duplicate qid {}", ev.qid),
            }),
            Ok(ev) => events.push(ev),
            Err(reason) => rejects.push(Reject { line: i + 1, reason }),
        }
    }
    LoadOutcome {
        events: EventCollection::new(events),
        rejects,
    }
}

/// Inclusive date window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Period {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!("period start {start} is after end {end}")));
        }
        Ok(Period { start, end })
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

/// Keeps events whose point in time, or whose start and end, fall in `period`.
pub fn filter_by_period(events: &EventCollection, period: Period) -> EventCollection {
    let kept = events
        .iter()
        .filter(|e| {
            let one_off = e.point_in_time.is_some_and(|d| period.contains(d));
            let duration = matches!((e.start_time, e.end_time), (Some(s), Some(t)) if period.contains(s) && period.contains(t));
            one_off || duration
        })
        .cloned()
        .collect();
    EventCollection::new(kept)
}
