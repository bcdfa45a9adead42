//! Reader for the NewsML subset used by the newswire corpus.
//!
//! Recognized elements (matched by local name, at any depth under the
//! `NewsItem` root): `Identification`, `DateCreated`, `Dateline`,
//! `SubjectCode code=".."`, `Keyword`, `HeadLine` and body `p` paragraphs.
//! Documents declaring a non-UTF-8 encoding are transcoded first.

use std::borrow::Cow;
use std::collections::BTreeSet;

use encoding_rs::Encoding;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::article::{parse_timestamp, NewsArticle};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Identification,
    DateCreated,
    Dateline,
    Keyword,
    HeadLine,
    Paragraph,
}

impl Field {
    fn from_name(name: &[u8]) -> Option<Field> {
        Some(match name {
            b"Identification" => Field::Identification,
            b"DateCreated" => Field::DateCreated,
            b"Dateline" | b"DateLine" => Field::Dateline,
            b"Keyword" => Field::Keyword,
            b"HeadLine" | b"Headline" => Field::HeadLine,
            b"p" => Field::Paragraph,
            _ => return None,
        })
    }
}

#[derive(Default)]
struct Collected {
    id: Option<String>,
    created: Option<String>,
    dateline: Option<String>,
    headline: Option<String>,
    subjects: BTreeSet<String>,
    keywords: Vec<String>,
    paragraphs: Vec<String>,
}

impl Collected {
    fn finish(&mut self, field: Field, text: String) {
        let text = collapse_whitespace(&text);
        match field {
            Field::Identification => {
                if self.id.is_none() && !text.is_empty() {
                    self.id = Some(text);
                }
            }
            Field::DateCreated => {
                self.created.get_or_insert(text);
            }
            Field::Dateline => {
                if !text.is_empty() {
                    self.dateline.get_or_insert(text);
                }
            }
            Field::HeadLine => {
                self.headline.get_or_insert(text);
            }
            Field::Keyword => {
                if !text.is_empty() {
                    self.keywords.push(text);
                }
            }
            Field::Paragraph => self.paragraphs.push(text),
        }
    }
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Transcodes to UTF-8 according to a BOM or the XML declaration.
fn to_utf8(bytes: &[u8]) -> Result<Cow<'_, str>> {
    if let Some((enc, bom_len)) = Encoding::for_bom(bytes) {
        let (text, _, bad) = enc.decode(&bytes[bom_len..]);
        if bad {
            return Err(Error::Xml { offset: 0, message: format!("invalid {} byte sequence", enc.name()) });
        }
        return Ok(text);
    }
    let head = &bytes[..bytes.len().min(200)];
    let declared = std::str::from_utf8(head)
        .ok()
        .or_else(|| std::str::from_utf8(&head[..head.iter().rposition(|b| b.is_ascii()).unwrap_or(0)]).ok())
        .and_then(declared_encoding);
    let enc = match declared {
        Some(label) => Encoding::for_label(label.as_bytes()).ok_or_else(|| Error::Xml {
            offset: 0,
            message: format!("unsupported encoding {label:?}"),
        })?,
        None => encoding_rs::UTF_8,
    };
    if enc == encoding_rs::UTF_8 {
        return std::str::from_utf8(bytes).map(Cow::Borrowed).map_err(|e| Error::Xml {
            offset: e.valid_up_to() as u64,
            message: "invalid UTF-8".into(),
        });
    }
    let (text, _, bad) = enc.decode(bytes);
    if bad {
        return Err(Error::Xml { offset: 0, message: format!("invalid {} byte sequence", enc.name()) });
    }
    Ok(text)
}

fn declared_encoding(head: &str) -> Option<String> {
    let decl = head.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let at = decl.find("encoding")?;
    let rest = decl[at + "encoding".len()..].trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let rest = &rest[1..];
    Some(rest[..rest.find(quote)?].to_string())
}

fn subject_code(e: &BytesStart<'_>, offset: u64) -> Result<Option<String>> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Xml { offset, message: err.to_string() })?;
        if attr.key.local_name().as_ref() == b"code" {
            let v = attr
                .unescape_value()
                .map_err(|err| Error::Xml { offset, message: err.to_string() })?;
            let v = v.trim();
            return Ok((!v.is_empty()).then(|| v.to_string()));
        }
    }
    Ok(None)
}

fn predefined_entity(name: &str) -> Option<char> {
    Some(match name {
        "lt" => '<',
        "gt" => '>',
        "amp" => '&',
        "apos" => '\'',
        "quot" => '"',
        "nbsp" => '\u{a0}',
        _ => return None,
    })
}

/// Parses one NewsML document into a [`NewsArticle`].
pub fn parse_newsml(xml_bytes: &[u8]) -> Result<NewsArticle> {
    let text = to_utf8(xml_bytes)?;
    let mut reader = Reader::from_str(&text);
    reader.config_mut().check_end_names = true;

    let mut out = Collected::default();
    // open fields with their depth and accumulated text
    let mut open: Vec<(Field, usize, String)> = Vec::new();
    let mut depth = 0usize;
    let mut saw_root = false;

    let xml_err = |reader: &Reader<&[u8]>, message: String| Error::Xml {
        offset: reader.error_position(),
        message,
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = e.local_name();
                if depth == 0 {
                    if saw_root {
                        return Err(Error::Xml {
                            offset: reader.buffer_position(),
                            message: "content after root element".into(),
                        });
                    }
                    if name.as_ref() != b"NewsItem" {
                        return Err(Error::Schema(format!(
                            "root element is {:?}, expected NewsItem",
                            String::from_utf8_lossy(name.as_ref())
                        )));
                    }
                    saw_root = true;
                }
                if name.as_ref() == b"SubjectCode" {
                    if let Some(code) = subject_code(e, reader.buffer_position())? {
                        out.subjects.insert(code);
                    }
                }
                if is_empty {
                    if let Some(field) = Field::from_name(name.as_ref()) {
                        if open.is_empty() {
                            out.finish(field, String::new());
                        }
                    }
                    continue;
                }
                depth += 1;
                if let Some(field) = Field::from_name(name.as_ref()) {
                    if open.is_empty() {
                        open.push((field, depth, String::new()));
                    }
                }
            }
            Event::End(_) => {
                if let Some((field, d, _)) = open.last() {
                    if *d == depth {
                        let field = *field;
                        let (_, _, text) = open.pop().unwrap();
                        out.finish(field, text);
                    }
                }
                depth -= 1;
            }
            Event::Text(t) => {
                let s = t.decode().map_err(|e| xml_err(&reader, e.to_string()))?;
                if depth == 0 {
                    if !s.trim().is_empty() {
                        return Err(Error::Xml {
                            offset: reader.buffer_position(),
                            message: "text outside root element".into(),
                        });
                    }
                } else if let Some((_, _, buf)) = open.last_mut() {
                    buf.push_str(&s);
                }
            }
            Event::CData(t) => {
                if let Some((_, _, buf)) = open.last_mut() {
                    buf.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::GeneralRef(r) => {
                let ch = match r.resolve_char_ref().map_err(|e| xml_err(&reader, e.to_string()))? {
                    Some(c) => c,
                    None => {
                        let name = r.decode().map_err(|e| xml_err(&reader, e.to_string()))?;
                        predefined_entity(&name).ok_or_else(|| Error::Xml {
                            offset: reader.buffer_position(),
                            message: format!("undefined entity &{name};"),
                        })?
                    }
                };
                if let Some((_, _, buf)) = open.last_mut() {
                    buf.push(ch);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Xml {
            offset: reader.buffer_position(),
            message: "unexpected end of document: unclosed element".into(),
        });
    }
    if !saw_root {
        return Err(Error::Xml { offset: 0, message: "no root element".into() });
    }

    let id = out.id.ok_or_else(|| Error::Schema("missing Identification".into()))?;
    let created_raw = out.created.ok_or_else(|| Error::Schema("missing DateCreated".into()))?;
    let headline = out.headline.ok_or_else(|| Error::Schema("missing HeadLine".into()))?;
    let created = parse_timestamp(&created_raw)
        .ok_or_else(|| Error::Schema(format!("DateCreated {created_raw:?} is not ISO-8601")))?;
    NewsArticle {
        id,
        headline,
        created,
        dateline: out.dateline,
        iptc_codes: out.subjects,
        slugs: out.keywords,
        paragraphs: out.paragraphs,
    }
    .validate()
}
