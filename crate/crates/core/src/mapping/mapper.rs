use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use chrono::{Days, NaiveDate};
use rayon::prelude::*;

use super::gates::{date_match, location_match};
use super::{MappingResult, Window};
use crate::annotate::AliasTable;
use crate::corpus::{ArticleText, Corpus, NewsArticle, Token};
use crate::kb::{event_keywords, EventCollection, EventKeywordSet, KbEvent};
use crate::stats::{tfidf_imt, ImtStats};

/// Sum of `weight(t)` over the window tokens that are keywords, counted per occurrence.
pub fn subject_score_with<F>(tokens: &[Token], keywords: &EventKeywordSet, weight: F) -> f64
where
    F: Fn(&str) -> f64,
{
    tokens
        .iter()
        .filter(|t| keywords.contains(&t.normalized))
        .map(|t| weight(&t.normalized))
        .sum()
}

/// Subject score of an article for an event's keywords.
pub fn subject_score(
    article: &NewsArticle,
    text: &ArticleText,
    keywords: &EventKeywordSet,
    stats: &ImtStats,
    window: Window,
) -> f64 {
    subject_score_with(text.window(window.limit()), keywords, |t| {
        tfidf_imt(t, &article.iptc_codes, stats)
    })
}

/// Shared read-only inputs for mapping.
#[derive(Clone, Copy)]
pub struct MappingContext<'a> {
    pub stats: &'a ImtStats,
    pub keywords: &'a HashMap<String, EventKeywordSet>,
    pub aliases: &'a AliasTable,
}

impl MappingContext<'_> {
    fn keywords_for<'e>(&'e self, event: &KbEvent) -> Cow<'e, EventKeywordSet> {
        match self.keywords.get(&event.qid) {
            Some(k) => Cow::Borrowed(k),
            None => Cow::Owned(event_keywords(event)),
        }
    }
}

/// Picks the best event for an article among `candidates`.
///
/// Candidates must pass the date and location gates and score strictly above
/// `threshold`; the highest score wins and ties go to the smallest qid.
pub fn map_article(
    article: &NewsArticle,
    text: &ArticleText,
    candidates: &[&KbEvent],
    ctx: &MappingContext<'_>,
    threshold: f64,
    window: Window,
) -> Option<MappingResult> {
    candidates
        .iter()
        .filter(|ev| date_match(article, ev) && location_match(text, ev, ctx.aliases))
        .map(|ev| {
            let kw = ctx.keywords_for(ev);
            (ev, subject_score(article, text, &kw, ctx.stats, window))
        })
        .filter(|(_, score)| *score > threshold)
        .min_by(|(a, sa), (b, sb)| {
            sb.partial_cmp(sa)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.qid.cmp(&b.qid))
        })
        .map(|(ev, score)| MappingResult {
            article_id: article.id.clone(),
            qid: ev.qid.clone(),
            score,
            window,
        })
}

/// Maps whole corpora against an event collection, using a date index to
/// restrict candidates.
pub struct Mapper<'a> {
    events: &'a EventCollection,
    stats: &'a ImtStats,
    aliases: &'a AliasTable,
    keywords: HashMap<String, EventKeywordSet>,
    by_day: BTreeMap<NaiveDate, Vec<usize>>,
    durations: Vec<usize>,
}

impl<'a> Mapper<'a> {
    pub fn new(events: &'a EventCollection, stats: &'a ImtStats, aliases: &'a AliasTable) -> Self {
        let mut by_day: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
        let mut durations = Vec::new();
        for (i, ev) in events.iter().enumerate() {
            if let Some(pit) = ev.point_in_time {
                by_day.entry(pit).or_default().push(i);
            }
            if ev.start_time.is_some() && ev.end_time.is_some() {
                durations.push(i);
            }
        }
        let keywords = events.iter().map(|e| (e.qid.clone(), event_keywords(e))).collect();
        Mapper {
            events,
            stats,
            aliases,
            keywords,
            by_day,
            durations,
        }
    }

    pub fn context(&self) -> MappingContext<'_> {
        MappingContext {
            stats: self.stats,
            keywords: &self.keywords,
            aliases: self.aliases,
        }
    }

    pub fn keywords(&self, qid: &str) -> Option<&EventKeywordSet> {
        self.keywords.get(qid)
    }

    /// Events passing the date gate for `article`, in qid order.
    pub fn candidates(&self, article: &NewsArticle) -> Vec<&'a KbEvent> {
        let day = article.created_date();
        let prev = day.checked_sub_days(Days::new(1)).unwrap_or(day);
        let mut idx: Vec<usize> = self
            .by_day
            .range(prev..=day)
            .flat_map(|(_, v)| v.iter().copied())
            .chain(self.durations.iter().copied())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        let events = self.events.events();
        idx.into_iter()
            .map(|i| &events[i])
            .filter(|e| date_match(article, e))
            .collect()
    }

    pub fn map_one(&self, article: &NewsArticle, text: &ArticleText, threshold: f64, window: Window) -> Option<MappingResult> {
        let candidates = self.candidates(article);
        map_article(article, text, &candidates, &self.context(), threshold, window)
    }

    /// Maps every article; results are in article id order.
    pub fn map_corpus(&self, corpus: &Corpus, threshold: f64, window: Window) -> Vec<MappingResult> {
        let articles: Vec<_> = corpus.iter().collect();
        articles
            .par_iter()
            .filter_map(|(a, t)| self.map_one(a, t, threshold, window))
            .collect()
    }
}
