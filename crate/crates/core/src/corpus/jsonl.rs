//! Canonical one-object-per-line article records.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::article::{parse_timestamp, NewsArticle};
use crate::error::{Error, Result};

/// Wire form of an article in JSONL files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub headline: String,
    pub created: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dateline: Option<String>,
    pub iptc: Vec<String>,
    pub slugs: Vec<String>,
    pub body: Vec<String>,
}

impl From<&NewsArticle> for ArticleRecord {
    fn from(a: &NewsArticle) -> Self {
        ArticleRecord {
            id: a.id.clone(),
            headline: a.headline.clone(),
            created: a.created.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true),
            dateline: a.dateline.clone(),
            iptc: a.iptc_codes.iter().cloned().collect(),
            slugs: a.slugs.clone(),
            body: a.paragraphs.clone(),
        }
    }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .filter(|v| !v.is_null())
        .ok_or_else(|| Error::Schema(format!("missing field {name:?}")))
}

fn string_field(obj: &serde_json::Map<String, Value>, name: &str) -> Result<String> {
    field(obj, name)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Schema(format!("field {name:?} must be a string")))
}

fn string_list(obj: &serde_json::Map<String, Value>, name: &str) -> Result<Vec<String>> {
    field(obj, name)?
        .as_array()
        .and_then(|items| items.iter().map(|v| v.as_str().map(str::to_string)).collect())
        .ok_or_else(|| Error::Schema(format!("field {name:?} must be a list of strings")))
}

/// Parses one JSONL article line.
pub fn parse_article_jsonl(line: &str) -> Result<NewsArticle> {
    let value: Value = serde_json::from_str(line)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Schema("article record must be a JSON object".into()))?;
    let created_raw = string_field(obj, "created")?;
    let created = parse_timestamp(&created_raw)
        .ok_or_else(|| Error::Schema(format!("field \"created\": {created_raw:?} is not ISO-8601")))?;
    let dateline = match obj.get("dateline") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.trim().is_empty() => None,
        Some(Value::String(s)) => Some(s.trim().to_string()),
        Some(_) => return Err(Error::Schema("field \"dateline\" must be a string".into())),
    };
    NewsArticle {
        id: string_field(obj, "id")?,
        headline: string_field(obj, "headline")?,
        created,
        dateline,
        iptc_codes: string_list(obj, "iptc")?.into_iter().collect::<BTreeSet<_>>(),
        slugs: string_list(obj, "slugs")?,
        paragraphs: string_list(obj, "body")?,
    }
    .validate()
}

/// Serializes an article to its canonical JSONL line (no trailing newline).
pub fn to_jsonl(article: &NewsArticle) -> String {
    serde_json::to_string(&ArticleRecord::from(article)).expect("article record serializes")
}
