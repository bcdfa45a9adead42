use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::aliases::AliasTable;
use crate::cluster::{cosine_dense, EmbeddingTable};
use crate::corpus::{find_phrase, phrase_tokens, ArticleText, NewsArticle, Token};
use crate::kb::{is_stopword, Claim, KbEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Entity,
    Quantity,
}

/// A claim value grounded in an article's text.
///
/// `span` is a byte range into the article's canonical text (headline and
/// paragraphs separated by blank lines).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub article_id: String,
    pub pid: String,
    pub label: String,
    pub kind: AnnotationKind,
    pub surface: String,
    pub sentence: usize,
    pub span: Range<usize>,
    /// Canonical claim value in lexical form.
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityRules {
    /// Relative tolerance around the claim value (inclusive).
    pub tolerance: f64,
    /// Number of leading sentences searched, headline included.
    pub max_sentences: usize,
}

impl Default for QuantityRules {
    fn default() -> Self {
        QuantityRules {
            tolerance: 0.10,
            max_sentences: 5,
        }
    }
}

/// Inclusive relative-tolerance test used for quantity candidates.
pub fn within_tolerance(value: f64, claim: f64, tolerance: f64) -> bool {
    (value - claim).abs() <= tolerance * claim.abs() * (1.0 + 1e-12)
}

/// Claims grouped by property, in order of first appearance.
fn claims_by_pid<'a>(claims: impl Iterator<Item = &'a Claim>) -> Vec<Vec<&'a Claim>> {
    let mut groups: Vec<Vec<&Claim>> = Vec::new();
    for c in claims {
        match groups.iter_mut().find(|g| g[0].pid == c.pid) {
            Some(g) => g.push(c),
            None => groups.push(vec![c]),
        }
    }
    groups
}

/// Finds textual claim values (or their aliases) in the article. Per property
/// the earliest occurrence over all of its values wins.
pub fn annotate_entities(article: &NewsArticle, text: &ArticleText, event: &KbEvent, aliases: &AliasTable) -> Vec<Annotation> {
    let tokens = &text.tokens.tokens;
    claims_by_pid(event.claims.iter().filter(|c| c.text().is_some()))
        .into_iter()
        .filter_map(|group| {
            let (start, len, claim) = group
                .iter()
                .flat_map(|claim| {
                    aliases
                        .variants(claim.text().unwrap_or_default())
                        .into_iter()
                        .map(move |variant| (claim, variant))
                })
                .filter_map(|(claim, variant)| {
                    let phrase = phrase_tokens(&variant);
                    find_phrase(tokens, &phrase).map(|i| (i, phrase.len(), *claim))
                })
                .min_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))?;
            let span = tokens[start].span.start..tokens[start + len - 1].span.end;
            Some(Annotation {
                article_id: article.id.clone(),
                pid: claim.pid.clone(),
                label: claim.label.clone(),
                kind: AnnotationKind::Entity,
                surface: text.text[span.clone()].to_string(),
                sentence: tokens[start].sentence,
                span,
                value: claim.lexical(),
                context_score: None,
            })
        })
        .collect()
}

/// Number of content tokens taken on each side of a quantity.
pub const CONTEXT_RADIUS: usize = 5;

fn is_content(t: &Token) -> bool {
    !is_stopword(&t.normalized) && t.number().is_none()
}

/// Up to [`CONTEXT_RADIUS`] content tokens on each side of `tokens[at]`,
/// staying inside its sentence.
pub fn context_window(tokens: &[Token], at: usize) -> Vec<&str> {
    let sentence = tokens[at].sentence;
    let before = tokens[..at]
        .iter()
        .rev()
        .take_while(|t| t.sentence == sentence)
        .filter(|t| is_content(t))
        .take(CONTEXT_RADIUS);
    let after = tokens[at + 1..]
        .iter()
        .take_while(|t| t.sentence == sentence)
        .filter(|t| is_content(t))
        .take(CONTEXT_RADIUS);
    let mut words: Vec<&str> = before.map(|t| t.normalized.as_str()).collect();
    words.reverse();
    words.extend(after.map(|t| t.normalized.as_str()));
    words
}

/// Cosine between the mean embedding of the context words and the mean
/// embedding of the property label's content words; 0 if either side has no
/// known word.
pub fn context_score(context: &[&str], claim_label: &str, table: &EmbeddingTable) -> f64 {
    let label: Vec<String> = phrase_tokens(claim_label)
        .into_iter()
        .filter(|t| !is_stopword(t))
        .collect();
    let (Some(ctx), Some(lab)) = (
        table.mean(context.iter().copied()),
        table.mean(label.iter().map(String::as_str)),
    ) else {
        return 0.0;
    };
    cosine_dense(&ctx, &lab).unwrap_or(0.0)
}

/// Grounds quantity claims on numbers found early in the article.
///
/// A number is a candidate when it lies within the tolerance of the claim and
/// sits in one of the first `max_sentences` sentences. Candidates are ranked by
/// context score, then by earliest sentence and offset.
pub fn annotate_quantities(
    article: &NewsArticle,
    text: &ArticleText,
    event: &KbEvent,
    table: &EmbeddingTable,
    rules: QuantityRules,
) -> Vec<Annotation> {
    let tokens = &text.tokens.tokens;
    let early = text.window(Some(rules.max_sentences)).len();
    claims_by_pid(event.claims.iter().filter(|c| c.quantity().is_some()))
        .into_iter()
        .filter_map(|group| {
            let (i, score, claim) = group
                .iter()
                .flat_map(|claim| (0..early).map(move |i| (i, *claim)))
                .filter_map(|(i, claim)| {
                    let v = tokens[i].number()?;
                    let target = claim.quantity()?;
                    within_tolerance(v, target, rules.tolerance).then(|| {
                        let score = context_score(&context_window(tokens, i), &claim.label, table);
                        (i, score, claim)
                    })
                })
                .min_by(|(ia, sa, _), (ib, sb, _)| {
                    sb.total_cmp(sa)
                        .then(tokens[*ia].sentence.cmp(&tokens[*ib].sentence))
                        .then(tokens[*ia].span.start.cmp(&tokens[*ib].span.start))
                })?;
            Some(Annotation {
                article_id: article.id.clone(),
                pid: claim.pid.clone(),
                label: claim.label.clone(),
                kind: AnnotationKind::Quantity,
                surface: tokens[i].surface.clone(),
                sentence: tokens[i].sentence,
                span: tokens[i].span.clone(),
                value: claim.lexical(),
                context_score: Some(score),
            })
        })
        .collect()
}
