//! Line classification, indentation measurement and the word scanner shared
//! by actions and queries.

use std::collections::HashSet;

use super::ast::{CallExpr, Part};

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(is_ident_char),
        _ => false,
    }
}

/// `ident` or `'ident'`, returning the bare name.
pub fn identifier_token(token: &str) -> Option<&str> {
    let bare = token
        .strip_prefix('\'')
        .and_then(|t| t.strip_suffix('\''))
        .unwrap_or(token);
    is_ident(bare).then_some(bare)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineKind<'a> {
    Blank,
    Comment(String),
    Code { indent: &'a str, content: &'a str },
}

#[derive(Debug, Clone)]
pub struct Line<'a> {
    pub number: u32,
    pub kind: LineKind<'a>,
}

pub fn lines(text: &str) -> Vec<Line<'_>> {
    text.split('\n')
        .enumerate()
        .map(|(idx, raw)| {
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            let content = raw.trim_start_matches([' ', '\t']);
            let indent = &raw[..raw.len() - content.len()];
            let content = content.trim_end();
            let kind = if content.is_empty() {
                LineKind::Blank
            } else if let Some(comment) = content.strip_prefix('#') {
                let comment = comment.strip_prefix(' ').unwrap_or(comment);
                LineKind::Comment(comment.trim_end().to_string())
            } else {
                LineKind::Code { indent, content }
            };
            Line {
                number: idx as u32 + 1,
                kind,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Tabs,
    Spaces(usize),
}

/// Tracks the indentation unit of one file. The first indented code line
/// fixes it.
#[derive(Debug, Default)]
pub struct Indentation {
    unit: Option<Unit>,
}

impl Indentation {
    pub fn depth(&mut self, indent: &str) -> Result<usize, String> {
        if indent.is_empty() {
            return Ok(0);
        }
        let tabs = indent.chars().all(|c| c == '\t');
        let spaces = indent.chars().all(|c| c == ' ');
        if !tabs && !spaces {
            return Err("indentation mixes tabs and spaces".into());
        }
        let found = if tabs {
            Unit::Tabs
        } else {
            Unit::Spaces(indent.len())
        };
        let unit = *self.unit.get_or_insert(found);
        match (unit, tabs) {
            (Unit::Tabs, true) => Ok(indent.len()),
            (Unit::Spaces(n), false) if indent.len().is_multiple_of(n) => Ok(indent.len() / n),
            (Unit::Spaces(n), false) => Err(format!(
                "indentation of {} spaces is not a multiple of the {n}-space unit",
                indent.len()
            )),
            _ => Err("file mixes tab and space indentation".into()),
        }
    }
}

/// Splits natural-language text into words, quoted identifier references
/// and (when `calls` is given) embedded calls to the named strategies.
pub fn scan_parts(text: &str, calls: Option<&HashSet<String>>) -> Vec<Part> {
    let mut parts = Vec::new();
    let mut word = String::new();
    let mut i = 0;
    let flush = |word: &mut String, parts: &mut Vec<Part>| {
        if !word.is_empty() {
            parts.push(Part::Word(std::mem::take(word)));
        }
    };
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            flush(&mut word, &mut parts);
            i += c.len_utf8();
            continue;
        }
        let at_boundary = word
            .chars()
            .last()
            .is_none_or(|prev| !is_ident_char(prev) && prev != '\'');
        if c == '\'' && at_boundary {
            if let Some((name, len)) = quoted_ident(rest) {
                flush(&mut word, &mut parts);
                parts.push(Part::Ref(name.to_string()));
                i += len;
                continue;
            }
        }
        if let Some(known) = calls {
            if word.is_empty() {
                if let Some((call, len)) = embedded_call(rest, known) {
                    if matches!(parts.last(), Some(Part::Word(w)) if w.eq_ignore_ascii_case("do")) {
                        parts.pop();
                    }
                    parts.push(Part::Call(call));
                    i += len;
                    continue;
                }
            }
        }
        word.push(c);
        i += c.len_utf8();
    }
    flush(&mut word, &mut parts);
    parts
}

/// `'ident'` at the start of `s`, not followed by another identifier
/// character or quote. Returns the name and the byte length consumed.
pub fn quoted_ident(s: &str) -> Option<(&str, usize)> {
    let body = s.strip_prefix('\'')?;
    let end = body.find(|c: char| !is_ident_char(c)).unwrap_or(body.len());
    let name = &body[..end];
    if !is_ident(name) || !body[end..].starts_with('\'') {
        return None;
    }
    let after = &body[end + 1..];
    match after.chars().next() {
        Some(c) if is_ident_char(c) || c == '\'' => None,
        _ => Some((name, end + 2)),
    }
}

/// Argument list `( 'a' 'b' )` starting at `s`. Arguments may be quoted or
/// bare identifiers, separated by whitespace or commas.
pub fn call_args(s: &str) -> Option<(Vec<String>, usize)> {
    let mut i = s.strip_prefix('(').map(|_| 1)?;
    let mut args = Vec::new();
    loop {
        let rest = &s[i..];
        let trimmed = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        i += rest.len() - trimmed.len();
        if trimmed.starts_with(')') {
            return Some((args, i + 1));
        }
        if let Some((name, len)) = quoted_ident(trimmed) {
            args.push(name.to_string());
            i += len;
            continue;
        }
        let end = trimmed
            .find(|c: char| !is_ident_char(c))
            .unwrap_or(trimmed.len());
        let name = &trimmed[..end];
        if !is_ident(name) {
            return None;
        }
        args.push(name.to_string());
        i += end;
    }
}

fn embedded_call(s: &str, known: &HashSet<String>) -> Option<(CallExpr, usize)> {
    let end = s.find(|c: char| !is_ident_char(c))?;
    let name = &s[..end];
    if !known.contains(name) || !s[end..].starts_with('(') {
        return None;
    }
    let (args, len) = call_args(&s[end..])?;
    Some((
        CallExpr {
            target: name.to_string(),
            args,
        },
        end + len,
    ))
}
