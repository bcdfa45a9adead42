//! Linking articles to knowledge-base events, and scoring links against a gold standard.

mod eval;
mod gates;
mod mapper;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use eval::{evaluate, evaluate_pairs, EvalReport, GoldStandard, Scores};
pub use gates::{date_match, location_match};
pub use mapper::{map_article, subject_score, subject_score_with, Mapper, MappingContext};

/// How many leading sentences of an article are scored (headline included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Window {
    First3,
    First5,
    #[default]
    All,
}

impl Window {
    pub const ALL_WINDOWS: [Window; 3] = [Window::First3, Window::First5, Window::All];

    pub fn limit(self) -> Option<usize> {
        match self {
            Window::First3 => Some(3),
            Window::First5 => Some(5),
            Window::All => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Window::First3 => "3",
            Window::First5 => "5",
            Window::All => "all",
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "3" => Ok(Window::First3),
            "5" => Ok(Window::First5),
            "all" => Ok(Window::All),
            other => Err(format!("unknown sentence window {other:?} (expected 3, 5 or all)")),
        }
    }
}

impl From<Window> for String {
    fn from(w: Window) -> String {
        w.as_str().to_string()
    }
}

impl TryFrom<String> for Window {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// An article linked to an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingResult {
    pub article_id: String,
    pub qid: String,
    pub score: f64,
    pub window: Window,
}
