use super::rdf::{Term, Triple};
use crate::error::{Error, Result};

/// Strict line-based N-Triples reader. Blank lines and `#` comment lines are
/// skipped; anything else must be exactly one statement.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_matches([' ', '\t']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let triple = parse_line(trimmed).map_err(|message| Error::NTriples { line: i + 1, message })?;
        out.push(triple);
    }
    Ok(out)
}

pub fn parse_line(line: &str) -> Result<Triple, String> {
    let mut p = Cursor { s: line, pos: 0 };
    let subject = match p.peek() {
        Some('<') => Term::iri(p.iri()?),
        Some('_') => p.blank()?,
        _ => return Err(p.fail("expected IRI or blank node as subject")),
    };
    p.ws();
    if p.peek() != Some('<') {
        return Err(p.fail("expected IRI as predicate"));
    }
    let predicate = Term::iri(p.iri()?);
    p.ws();
    let object = match p.peek() {
        Some('<') => Term::iri(p.iri()?),
        Some('_') => p.blank()?,
        Some('"') => p.literal()?,
        _ => return Err(p.fail("expected IRI, blank node or literal as object")),
    };
    p.ws();
    if p.peek() != Some('.') {
        return Err(p.fail("expected '.'"));
    }
    p.pos += 1;
    p.ws();
    if p.peek().is_some_and(|c| c != '#') {
        return Err(p.fail("trailing content after '.'"));
    }
    Ok(Triple { subject, predicate, object })
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn fail(&self, what: &str) -> String {
        format!("{what} at column {}", self.pos + 1)
    }

    fn uchar(&mut self, len: usize) -> Result<char, String> {
        let end = self.pos + len;
        let hex = self.s.get(self.pos..end).ok_or_else(|| self.fail("truncated \\u escape"))?;
        if !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(self.fail("invalid \\u escape"));
        }
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.fail("invalid \\u escape"))?;
        self.pos = end;
        char::from_u32(code).ok_or_else(|| self.fail("escape is not a scalar value"))
    }

    fn iri(&mut self) -> Result<String, String> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.next() {
                None => return Err(self.fail("unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = match self.next() {
                        Some('u') => self.uchar(4)?,
                        Some('U') => self.uchar(8)?,
                        _ => return Err(self.fail("invalid escape in IRI")),
                    };
                    out.push(c);
                }
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.fail("character not allowed in IRI"));
                }
                Some(c) => out.push(c),
            }
        }
        if !is_absolute(&out) {
            return Err(self.fail("IRI is not absolute"));
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<Term, String> {
        if !self.s[self.pos..].starts_with("_:") {
            return Err(self.fail("expected '_:'"));
        }
        self.pos += 2;
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.pos += self.peek().map_or(1, char::len_utf8);
        }
        while self.pos > start && self.s[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err(self.fail("empty blank node label"));
        }
        Ok(Term::Blank { id: self.s[start..self.pos].to_string() })
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.pos += 1;
        let mut lexical = String::new();
        loop {
            match self.next() {
                None => return Err(self.fail("unterminated literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.next() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.uchar(4)?,
                        Some('U') => self.uchar(8)?,
                        _ => return Err(self.fail("invalid escape in literal")),
                    };
                    lexical.push(c);
                }
                Some('\n' | '\r') => return Err(self.fail("raw line break in literal")),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                let tag = &self.s[start..self.pos];
                let valid = !tag.is_empty()
                    && tag.split('-').enumerate().all(|(i, part)| {
                        !part.is_empty()
                            && (i > 0 || part.bytes().all(|b| b.is_ascii_alphabetic()))
                    });
                if !valid {
                    return Err(self.fail("invalid language tag"));
                }
                Ok(Term::lang(lexical, tag))
            }
            Some('^') => {
                if !self.s[self.pos..].starts_with("^^<") {
                    return Err(self.fail("expected '^^<'"));
                }
                self.pos += 2;
                let dt = self.iri()?;
                Ok(Term::typed(lexical, dt))
            }
            _ => Ok(Term::literal(lexical)),
        }
    }
}

fn is_absolute(iri: &str) -> bool {
    let Some((scheme, _)) = iri.split_once(':') else { return false };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}
