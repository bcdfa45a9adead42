//! Newswire corpus ingestion: article model, parsers, taxonomy and text analysis.

mod article;
mod jsonl;
mod newsml;
mod sentences;
mod taxonomy;
mod tokenize;

pub use article::{parse_timestamp, Corpus, NewsArticle};
pub use jsonl::{parse_article_jsonl, to_jsonl, ArticleRecord};
pub use newsml::parse_newsml;
pub use sentences::{sentence_ranges, split_sentences, ArticleText, BLOCK_SEPARATOR};
pub use taxonomy::{IptcTopic, Taxonomy};
pub use tokenize::{find_phrase, normalize, parse_number, phrase_tokens, tokenize, Token, TokenStream};
