use chrono::Days;

use crate::annotate::AliasTable;
use crate::corpus::{find_phrase, phrase_tokens, ArticleText, NewsArticle};
use crate::kb::KbEvent;

/// Date criterion: the article is written on the event day or the day after,
/// or within the event's start/end dates.
pub fn date_match(article: &NewsArticle, event: &KbEvent) -> bool {
    let dct = article.created_date();
    if let Some(pit) = event.point_in_time {
        let next = pit.checked_add_days(Days::new(1)).unwrap_or(pit);
        if pit <= dct && dct <= next {
            return true;
        }
    }
    matches!((event.start_time, event.end_time), (Some(s), Some(e)) if s <= dct && dct <= e)
}

/// Location criterion: a country or location label of the event, or one of
/// its aliases, occurs in the article as a whole-token, case-insensitive match.
///
/// Events without any country or location fail.
pub fn location_match(text: &ArticleText, event: &KbEvent, aliases: &AliasTable) -> bool {
    let tokens = &text.tokens.tokens;
    event
        .countries
        .iter()
        .chain(&event.locations)
        .flat_map(|place| aliases.variants(place))
        .any(|variant| find_phrase(tokens, &phrase_tokens(&variant)).is_some())
}
