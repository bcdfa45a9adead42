use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PAGE_SIZE: usize = 10;
pub const MAX_PAGE_SIZE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    Eq,
    Gte,
    Lte,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "eq",
            Comparator::Gte => "gte",
            Comparator::Lte => "lte",
        })
    }
}

impl FromStr for Comparator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq" => Ok(Comparator::Eq),
            "gte" => Ok(Comparator::Gte),
            "lte" => Ok(Comparator::Lte),
            other => Err(Error::InvalidQuery(format!("unknown comparator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyFilter {
    pub pid: String,
    pub op: Comparator,
    pub value: String,
}

impl fmt::Display for PropertyFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.pid, self.op, self.value)
    }
}

impl FromStr for PropertyFilter {
    type Err = Error;

    /// Parses `PID:op:value`, e.g. `P1120:gte:50`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let (Some(pid), Some(op), Some(value)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::InvalidQuery(format!("filter {s:?} is not PID:op:value")));
        };
        let pid = pid.trim();
        if !pid.starts_with('P') || pid.len() < 2 || !pid[1..].bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidQuery(format!("filter {s:?}: bad property id")));
        }
        Ok(PropertyFilter {
            pid: pid.to_string(),
            op: op.trim().parse()?,
            value: value.trim().to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub keywords: Option<String>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub location: Option<String>,
    pub schema: Option<String>,
    pub filters: Vec<PropertyFilter>,
    /// 1-based.
    pub page: usize,
    pub size: usize,
}

impl Default for SearchQuery {
    fn default() -> Self {
        SearchQuery {
            keywords: None,
            from: None,
            to: None,
            location: None,
            schema: None,
            filters: Vec::new(),
            page: 1,
            size: DEFAULT_PAGE_SIZE,
        }
    }
}

fn non_empty(v: &str) -> Option<String> {
    let v = v.trim();
    (!v.is_empty()).then(|| v.to_string())
}

fn date(name: &str, v: &str) -> Result<Option<NaiveDate>> {
    match non_empty(v) {
        None => Ok(None),
        Some(v) => NaiveDate::parse_from_str(&v, "%Y-%m-%d")
            .map(Some)
            .map_err(|_| Error::InvalidQuery(format!("{name}: expected YYYY-MM-DD, got {v:?}"))),
    }
}

fn count(name: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidQuery(format!("{name}: expected a positive integer, got {v:?}")))
}

impl SearchQuery {
    /// Builds a query from URL parameters (`q`, `from`, `to`, `location`,
    /// `schema`, repeated `filter`, `page`, `size`). Unknown parameters are
    /// rejected.
    pub fn from_params<K: AsRef<str>, V: AsRef<str>>(params: &[(K, V)]) -> Result<Self> {
        let mut q = SearchQuery::default();
        for (k, v) in params {
            let v = v.as_ref();
            match k.as_ref() {
                "q" => q.keywords = non_empty(v),
                "from" => q.from = date("from", v)?,
                "to" => q.to = date("to", v)?,
                "location" => q.location = non_empty(v),
                "schema" => q.schema = non_empty(v),
                "filter" => {
                    if non_empty(v).is_some() {
                        q.filters.push(v.parse()?);
                    }
                }
                "page" => q.page = count("page", v)?,
                "size" => q.size = count("size", v)?,
                other => return Err(Error::InvalidQuery(format!("unknown parameter {other:?}"))),
            }
        }
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.page == 0 {
            return Err(Error::InvalidQuery("page is 1-based".into()));
        }
        if self.size == 0 || self.size > MAX_PAGE_SIZE {
            return Err(Error::InvalidQuery(format!("size must be between 1 and {MAX_PAGE_SIZE}")));
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            if from > to {
                return Err(Error::InvalidQuery("from is after to".into()));
            }
        }
        Ok(())
    }
}
