use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;

use crate::annotate::{Term, Triple};
use crate::error::{Error, Result};

type Id = u32;

/// In-memory triple store with three index permutations.
///
/// Writable until [`TripleStore::freeze`]; afterwards read-only, which also
/// builds a numeric index over literal objects.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    spo: BTreeSet<(Id, Id, Id)>,
    pos: BTreeSet<(Id, Id, Id)>,
    osp: BTreeSet<(Id, Id, Id)>,
    numeric: HashMap<Id, Vec<(f64, Id)>>,
    frozen: bool,
}

/// A triple pattern; `None` positions are wildcards.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pattern<'a> {
    pub subject: Option<&'a Term>,
    pub predicate: Option<&'a Term>,
    pub object: Option<&'a Term>,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, t: &Term) -> Id {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = self.terms.len() as Id;
        self.terms.push(t.clone());
        self.ids.insert(t.clone(), id);
        id
    }

    /// Inserts a triple; returns false if it was already present.
    pub fn insert(&mut self, t: &Triple) -> Result<bool> {
        if self.frozen {
            return Err(Error::Frozen);
        }
        let (s, p, o) = (self.intern(&t.subject), self.intern(&t.predicate), self.intern(&t.object));
        if !self.spo.insert((s, p, o)) {
            return Ok(false);
        }
        self.pos.insert((p, o, s));
        self.osp.insert((o, s, p));
        Ok(true)
    }

    /// Inserts many triples; returns how many were new.
    pub fn insert_all<'a, I: IntoIterator<Item = &'a Triple>>(&mut self, triples: I) -> Result<usize> {
        let mut added = 0;
        for t in triples {
            added += usize::from(self.insert(t)?);
        }
        Ok(added)
    }

    pub fn freeze(&mut self) {
        if self.frozen {
            return;
        }
        let mut numeric: HashMap<Id, Vec<(f64, Id)>> = HashMap::new();
        for &(s, p, o) in &self.spo {
            if let Some(v) = self.terms[o as usize].lexical().and_then(|l| l.trim().parse::<f64>().ok()) {
                if v.is_finite() {
                    numeric.entry(p).or_default().push((v, s));
                }
            }
        }
        for list in numeric.values_mut() {
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        self.numeric = numeric;
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn triple(&self, (s, p, o): (Id, Id, Id)) -> Triple {
        Triple {
            subject: self.terms[s as usize].clone(),
            predicate: self.terms[p as usize].clone(),
            object: self.terms[o as usize].clone(),
        }
    }

    fn id(&self, t: Option<&Term>) -> Option<Option<Id>> {
        match t {
            None => Some(None),
            Some(t) => self.ids.get(t).map(|&id| Some(id)),
        }
    }

    /// All triples matching the pattern, in subject–predicate–object id order.
    pub fn matches(&self, pattern: Pattern<'_>) -> Vec<Triple> {
        let (Some(s), Some(p), Some(o)) = (self.id(pattern.subject), self.id(pattern.predicate), self.id(pattern.object))
        else {
            return Vec::new();
        };
        fn prefix(
            index: &BTreeSet<(Id, Id, Id)>,
            a: Id,
            b: Option<Id>,
        ) -> impl Iterator<Item = &(Id, Id, Id)> {
            let (lo, hi) = match b {
                Some(b) => ((a, b, 0), Bound::Included((a, b, Id::MAX))),
                None => ((a, 0, 0), Bound::Included((a, Id::MAX, Id::MAX))),
            };
            index.range((Bound::Included(lo), hi))
        }
        let mut ids: Vec<(Id, Id, Id)> = match (s, p, o) {
            (Some(s), Some(p), Some(o)) => self.spo.get(&(s, p, o)).copied().into_iter().collect(),
            (Some(s), p, None) => prefix(&self.spo, s, p).copied().collect(),
            (None, Some(p), o) => prefix(&self.pos, p, o).map(|&(p, o, s)| (s, p, o)).collect(),
            (s, None, Some(o)) => prefix(&self.osp, o, s).map(|&(o, s, p)| (s, p, o)).collect(),
            (None, None, None) => self.spo.iter().copied().collect(),
        };
        ids.sort_unstable();
        ids.into_iter().map(|t| self.triple(t)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&t| self.triple(t))
    }

    /// Subjects whose numeric object for `predicate` lies in `[lo, hi]`.
    /// Only available once frozen.
    pub fn numeric_range(&self, predicate: &Term, lo: Option<f64>, hi: Option<f64>) -> Result<BTreeSet<Term>> {
        if !self.frozen {
            return Err(Error::InvalidQuery("numeric index is built on freeze".into()));
        }
        let Some(list) = self.ids.get(predicate).and_then(|p| self.numeric.get(p)) else {
            return Ok(BTreeSet::new());
        };
        let start = lo.map_or(0, |lo| list.partition_point(|(v, _)| *v < lo));
        let end = hi.map_or(list.len(), |hi| list.partition_point(|(v, _)| *v <= hi));
        Ok(list[start..end.max(start)]
            .iter()
            .map(|(_, s)| self.terms[*s as usize].clone())
            .collect())
    }

    /// Distinct objects per subject for a predicate.
    pub fn objects_by_subject(&self, predicate: &Term) -> BTreeMap<Term, Vec<Term>> {
        let mut out: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
        for t in self.matches(Pattern { predicate: Some(predicate), ..Pattern::default() }) {
            out.entry(t.subject).or_default().push(t.object);
        }
        out
    }
}
