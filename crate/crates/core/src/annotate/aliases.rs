use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surface variants for canonical labels, read from `{"canonical": ["alias", ...]}`.
///
/// Lookups are case-insensitive on the canonical label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AliasTable {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl AliasTable {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> = serde_json::from_str(text)?;
        let mut entries: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (canonical, aliases) in raw {
            let key = canonical.trim().to_lowercase();
            if key.is_empty() {
                return Err(Error::Schema("alias table: empty canonical label".into()));
            }
            let set = entries.entry(key).or_default();
            for alias in aliases {
                let alias = alias.trim();
                if alias.is_empty() {
                    return Err(Error::Schema(format!("alias table: empty alias for {canonical:?}")));
                }
                set.insert(alias.to_string());
            }
        }
        Ok(AliasTable { entries })
    }

    pub fn aliases(&self, canonical: &str) -> impl Iterator<Item = &str> {
        self.entries
            .get(&canonical.trim().to_lowercase())
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// The label itself followed by its aliases.
    pub fn variants(&self, canonical: &str) -> Vec<String> {
        std::iter::once(canonical.to_string())
            .chain(self.aliases(canonical).map(str::to_string))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
