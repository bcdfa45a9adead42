//! Knowledge-base events: loading, temporal filtering and subject keywords.

mod event;
mod keywords;

pub use event::{
    filter_by_period, format_number, load_events, Claim, ClaimKind, ClaimValue, EventCollection, KbEvent,
    LoadOutcome, Period, Reject, Wet,
};
pub use keywords::{event_keywords, is_stopword, stopwords, EventKeywordSet};
