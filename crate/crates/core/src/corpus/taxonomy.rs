//! IPTC Media Topic taxonomy loaded from `code,label,parent_code` CSV.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IptcTopic {
    pub code: String,
    pub label: String,
    pub parent_code: Option<String>,
}

/// A forest of media topics indexed by code.
#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    topics: BTreeMap<String, IptcTopic>,
}

#[derive(Deserialize)]
struct Row {
    code: String,
    label: String,
    #[serde(default)]
    parent_code: Option<String>,
}

impl Taxonomy {
    pub fn from_csv(bytes: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
        let headers = reader.headers()?.clone();
        for required in ["code", "label", "parent_code"] {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::Taxonomy(format!("missing column {required:?}")));
            }
        }
        let mut topics = BTreeMap::new();
        for row in reader.deserialize::<Row>() {
            let row = row?;
            if row.code.is_empty() {
                return Err(Error::Taxonomy("empty code".into()));
            }
            let topic = IptcTopic {
                code: row.code.clone(),
                label: row.label,
                parent_code: row.parent_code.filter(|p| !p.is_empty()),
            };
            if topics.insert(row.code.clone(), topic).is_some() {
                return Err(Error::Taxonomy(format!("duplicate code {}", row.code)));
            }
        }
        let dangling: Vec<&str> = topics
            .values()
            .filter_map(|t| t.parent_code.as_deref())
            .filter(|p| !topics.contains_key(*p))
            .collect();
        if !dangling.is_empty() {
            return Err(Error::Taxonomy(format!("dangling parent_code: {}", dangling.join(", "))));
        }
        let taxonomy = Taxonomy { topics };
        taxonomy.check_acyclic()?;
        Ok(taxonomy)
    }

    fn check_acyclic(&self) -> Result<()> {
        let mut cleared: HashSet<&str> = HashSet::new();
        for start in self.topics.keys() {
            let mut path: Vec<&str> = Vec::new();
            let mut cur = Some(start.as_str());
            while let Some(code) = cur {
                if cleared.contains(code) {
                    break;
                }
                if path.contains(&code) {
                    return Err(Error::Taxonomy(format!("cycle through {code}")));
                }
                path.push(code);
                cur = self.topics[code].parent_code.as_deref();
            }
            cleared.extend(path);
        }
        Ok(())
    }

    pub fn get(&self, code: &str) -> Option<&IptcTopic> {
        self.topics.get(code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.topics.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    /// Parent chain of `code`, nearest first. Unknown codes have no ancestors.
    pub fn ancestors(&self, code: &str) -> Vec<&IptcTopic> {
        let mut out = Vec::new();
        let mut cur = self.topics.get(code).and_then(|t| t.parent_code.as_deref());
        while let Some(parent) = cur {
            let topic = &self.topics[parent];
            out.push(topic);
            cur = topic.parent_code.as_deref();
        }
        out
    }

    pub fn roots(&self) -> impl Iterator<Item = &IptcTopic> {
        self.topics.values().filter(|t| t.parent_code.is_none())
    }
}
