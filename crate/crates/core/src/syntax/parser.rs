use std::collections::HashSet;
use std::path::Path;

use super::ast::{CallExpr, Part, Query, SourceLocation, Statement, StatementKind, Strategy, StrategyDoc};
use super::diagnostic::{Code, Diagnostic};
use super::lexer::{self, call_args, identifier_token, is_ident, scan_parts, Indentation, LineKind};

/// Parses strategy source text. `file` only labels locations.
pub fn parse(text: &str) -> Result<StrategyDoc, Vec<Diagnostic>> {
    parse_file("<input>", text)
}

pub fn parse_file(file: impl AsRef<Path>, text: &str) -> Result<StrategyDoc, Vec<Diagnostic>> {
    let file = file.as_ref().display().to_string();
    Parser::new(&file).run(text)
}

/// A code line after indentation has been measured, with the comment lines
/// that precede it.
#[derive(Debug)]
struct Item<'a> {
    depth: usize,
    line: u32,
    column: u32,
    content: &'a str,
    comments: Vec<String>,
}

struct Parser<'f> {
    file: &'f str,
    diags: Vec<Diagnostic>,
    known: HashSet<String>,
}

impl<'f> Parser<'f> {
    fn new(file: &'f str) -> Self {
        Self {
            file,
            diags: Vec::new(),
            known: HashSet::new(),
        }
    }

    fn loc(&self, line: u32, column: u32) -> SourceLocation {
        SourceLocation::new(self.file, line, column)
    }

    fn error(&mut self, code: Code, message: impl Into<String>, line: u32, column: u32) {
        let loc = self.loc(line, column);
        self.diags.push(Diagnostic::error(code, message, loc));
    }

    fn run(mut self, text: &str) -> Result<StrategyDoc, Vec<Diagnostic>> {
        let items = self.items(text);

        // Strategy names are needed before bodies so that queries can
        // recognise embedded calls.
        for item in items.iter().filter(|i| i.depth == 0) {
            if let Some(Ok((name, _))) = header(item.content) {
                self.known.insert(name);
            }
        }

        let mut strategies: Vec<Strategy> = Vec::new();
        let mut idx = 0;
        while idx < items.len() {
            let item = &items[idx];
            idx += 1;
            if item.depth != 0 {
                self.error(
                    Code::IndentationError,
                    "statement outside of a strategy",
                    item.line,
                    item.column,
                );
                continue;
            }
            let (name, params) = match header(item.content) {
                Some(Ok(h)) => h,
                Some(Err(msg)) => {
                    self.error(Code::SyntaxError, msg, item.line, item.column);
                    skip_body(&items, &mut idx);
                    continue;
                }
                None => {
                    self.error(
                        Code::SyntaxError,
                        "expected `STRATEGY name (parameters)`",
                        item.line,
                        item.column,
                    );
                    continue;
                }
            };
            let mut seen = HashSet::new();
            for p in &params {
                if !seen.insert(p) {
                    self.error(
                        Code::DuplicateParameter,
                        format!("parameter '{p}' declared twice"),
                        item.line,
                        item.column,
                    );
                }
            }
            if strategies.iter().any(|s| s.name == name) {
                self.error(
                    Code::DuplicateStrategy,
                    format!("strategy `{name}` is already defined"),
                    item.line,
                    item.column,
                );
            }
            let location = self.loc(item.line, item.column);
            let leading_comment = item.comments.clone();
            let body = match items.get(idx) {
                Some(next) if next.depth == 1 => self.block(&items, &mut idx, 1),
                Some(next) if next.depth > 1 => {
                    self.error(
                        Code::IndentationError,
                        "strategy body must be indented one level",
                        next.line,
                        next.column,
                    );
                    skip_body(&items, &mut idx);
                    Vec::new()
                }
                _ => {
                    self.error(
                        Code::EmptyBlock,
                        format!("strategy `{name}` has no statements"),
                        item.line,
                        item.column,
                    );
                    Vec::new()
                }
            };
            strategies.push(Strategy {
                name,
                params,
                body,
                leading_comment,
                location,
            });
        }

        if strategies.is_empty() && self.diags.is_empty() {
            self.error(Code::SyntaxError, "no strategy defined", 1, 1);
        }
        if self.diags.iter().any(Diagnostic::is_error) {
            return Err(self.diags);
        }
        Ok(StrategyDoc {
            strategies,
            source_text: text.to_string(),
        })
    }

    fn items<'a>(&mut self, text: &'a str) -> Vec<Item<'a>> {
        let mut indentation = Indentation::default();
        let mut items = Vec::new();
        let mut comments: Vec<String> = Vec::new();
        let mut comment_line = 0;
        for line in lexer::lines(text) {
            match line.kind {
                LineKind::Blank => {}
                LineKind::Comment(c) => {
                    if comments.is_empty() {
                        comment_line = line.number;
                    }
                    comments.push(c);
                }
                LineKind::Code { indent, content } => {
                    let depth = match indentation.depth(indent) {
                        Ok(d) => d,
                        Err(msg) => {
                            self.error(Code::IndentationError, msg, line.number, 1);
                            comments.clear();
                            continue;
                        }
                    };
                    items.push(Item {
                        depth,
                        line: line.number,
                        column: indent.chars().count() as u32 + 1,
                        content,
                        comments: std::mem::take(&mut comments),
                    });
                }
            }
        }
        if !comments.is_empty() {
            self.error(
                Code::DanglingComment,
                "comment is not followed by a statement",
                comment_line,
                1,
            );
        }
        items
    }

    fn block(&mut self, items: &[Item<'_>], idx: &mut usize, depth: usize) -> Vec<Statement> {
        let mut out = Vec::new();
        while let Some(item) = items.get(*idx) {
            if item.depth < depth {
                break;
            }
            *idx += 1;
            if item.depth > depth {
                self.error(
                    Code::IndentationError,
                    "unexpected indentation",
                    item.line,
                    item.column,
                );
                continue;
            }
            let Some(mut kind) = self.statement(item) else {
                skip_deeper(items, idx, depth);
                continue;
            };
            if let Some(block) = kind.block_mut() {
                match items.get(*idx) {
                    Some(next) if next.depth == depth + 1 => {
                        *block = self.block(items, idx, depth + 1);
                    }
                    Some(next) if next.depth > depth + 1 => {
                        self.error(
                            Code::IndentationError,
                            "block is indented more than one level",
                            next.line,
                            next.column,
                        );
                        skip_deeper(items, idx, depth);
                    }
                    _ => self.error(
                        Code::EmptyBlock,
                        "block has no statements",
                        item.line,
                        item.column,
                    ),
                }
            }
            out.push(Statement {
                kind,
                comment: item.comments.clone(),
                location: self.loc(item.line, item.column),
            });
        }
        out
    }

    fn statement(&mut self, item: &Item<'_>) -> Option<StatementKind> {
        match self.statement_kind(item.content) {
            Ok(kind) => Some(kind),
            Err((code, msg)) => {
                self.error(code, msg, item.line, item.column);
                None
            }
        }
    }

    fn statement_kind(&self, content: &str) -> Result<StatementKind, (Code, String)> {
        let (keyword, rest) = split_word(content);
        let syntax = |msg: &str| (Code::SyntaxError, msg.to_string());
        match keyword.to_ascii_lowercase().as_str() {
            "strategy" => Err(syntax("strategy header must not be indented")),
            "if" => Ok(StatementKind::Conditional {
                query: self.query(rest, "IF")?,
                block: Vec::new(),
            }),
            "until" => Ok(StatementKind::Until {
                query: self.query(rest, "UNTIL")?,
                block: Vec::new(),
            }),
            "return" => Ok(StatementKind::Return {
                query: self.query(rest, "RETURN")?,
            }),
            "for" if split_word(rest).0.eq_ignore_ascii_case("each") => {
                let tokens: Vec<&str> = split_word(rest).1.split_whitespace().collect();
                match tokens.as_slice() {
                    [element, kw, list] if kw.eq_ignore_ascii_case("in") => {
                        match (identifier_token(element), identifier_token(list)) {
                            (Some(element), Some(list)) => Ok(StatementKind::ForEach {
                                element: element.to_string(),
                                list: list.to_string(),
                                block: Vec::new(),
                            }),
                            _ => Err(syntax("FOR EACH expects identifiers")),
                        }
                    }
                    _ => Err(syntax("expected `FOR EACH 'item' IN 'list'`")),
                }
            }
            "set" => {
                let (target, after) = split_word(rest);
                let (to, query) = split_word(after);
                match identifier_token(target) {
                    Some(name) if to.eq_ignore_ascii_case("to") => Ok(StatementKind::Assignment {
                        target: name.to_string(),
                        query: self.query(query, "SET ... TO")?,
                    }),
                    _ if target.starts_with('\'') => {
                        Err(syntax("expected `SET 'name' TO query`"))
                    }
                    _ => self.action(content),
                }
            }
            "do" => match call_statement(rest) {
                Some(Ok(call)) => Ok(StatementKind::Call(call)),
                Some(Err(msg)) => Err(syntax(&msg)),
                None => self.action(content),
            },
            _ => self.action(content),
        }
    }

    fn action(&self, content: &str) -> Result<StatementKind, (Code, String)> {
        let mut words = scan_parts(content, None);
        if let Some(Part::Word(last)) = words.last_mut() {
            if let Some(stripped) = last.strip_suffix('.') {
                *last = stripped.to_string();
                if last.is_empty() {
                    words.pop();
                }
            }
        }
        if words.is_empty() {
            return Err((Code::SyntaxError, "empty action".into()));
        }
        Ok(StatementKind::Action { words })
    }

    fn query(&self, text: &str, keyword: &str) -> Result<Query, (Code, String)> {
        let parts = scan_parts(text, Some(&self.known));
        if parts.is_empty() {
            return Err((Code::SyntaxError, format!("{keyword} requires a query")));
        }
        let calls = parts.iter().filter(|p| matches!(p, Part::Call(_))).count();
        if calls > 1 {
            return Err((
                Code::MultipleEmbeddedCalls,
                "a query may contain at most one sub-strategy call".into(),
            ));
        }
        Ok(Query::new(parts))
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

/// `STRATEGY name (a b c)`; `None` when the line is not a header at all.
fn header(content: &str) -> Option<Result<(String, Vec<String>), String>> {
    let (keyword, _) = split_word(content);
    let keyword_len = keyword.find('(').unwrap_or(keyword.len());
    if !keyword[..keyword_len].eq_ignore_ascii_case("strategy") {
        return None;
    }
    let rest = content[keyword_len..].trim_start();
    let name_end = rest
        .find(|c: char| !lexer::is_ident_char(c))
        .unwrap_or(rest.len());
    let name = &rest[..name_end];
    if !is_ident(name) {
        return Some(Err("expected a strategy name after STRATEGY".into()));
    }
    let after = rest[name_end..].trim_start();
    let Some((params, len)) = call_args(after) else {
        return Some(Err(format!(
            "expected a parenthesised parameter list after `{name}`"
        )));
    };
    if !after[len..].trim().is_empty() {
        return Some(Err("unexpected text after parameter list".into()));
    }
    Some(Ok((name.to_string(), params)))
}

/// The text after `DO`: `None` when it does not look like a call, in which
/// case the line is an ordinary action.
fn call_statement(rest: &str) -> Option<Result<CallExpr, String>> {
    let end = rest
        .find(|c: char| !lexer::is_ident_char(c))
        .unwrap_or(rest.len());
    let name = &rest[..end];
    let after = rest[end..].trim_start();
    if !is_ident(name) || !after.starts_with('(') {
        return None;
    }
    let Some((args, len)) = call_args(after) else {
        return Some(Err(format!("malformed argument list in call to `{name}`")));
    };
    if !after[len..].trim().is_empty() {
        return Some(Err("unexpected text after call".into()));
    }
    Some(Ok(CallExpr {
        target: name.to_string(),
        args,
    }))
}

fn skip_body(items: &[Item<'_>], idx: &mut usize) {
    while items.get(*idx).is_some_and(|i| i.depth > 0) {
        *idx += 1;
    }
}

fn skip_deeper(items: &[Item<'_>], idx: &mut usize, depth: usize) {
    while items.get(*idx).is_some_and(|i| i.depth > depth) {
        *idx += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Kind;

    fn kinds(block: &[Statement]) -> Vec<Kind> {
        block.iter().map(|s| s.kind.kind()).collect()
    }

    fn codes(text: &str) -> Vec<Code> {
        parse(text).unwrap_err().iter().map(|d| d.code).collect()
    }

    #[test]
    fn minimal_strategy() {
        let doc = parse("STRATEGY s ()\n  Do the thing").unwrap();
        let s = &doc.strategies[0];
        assert_eq!(s.name, "s");
        assert!(s.params.is_empty());
        assert_eq!(kinds(&s.body), [Kind::Action]);
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let doc = parse("strategy s (a)\n\tif 'a' holds\n\t\tset x to something\n\treturn nothing\n")
            .unwrap();
        assert_eq!(kinds(&doc.strategies[0].body), [Kind::Conditional, Kind::Return]);
    }

    #[test]
    fn comments_attach_to_following_statement_or_header() {
        let doc = parse("# intro\n\nSTRATEGY s ()\n  # why\n  #\n  Act now.\n").unwrap();
        let s = &doc.strategies[0];
        assert_eq!(s.leading_comment, ["intro"]);
        assert_eq!(s.body[0].comment, ["why", ""]);
        assert_eq!(
            s.body[0].kind,
            StatementKind::Action {
                words: vec![Part::Word("Act".into()), Part::Word("now".into())]
            }
        );
    }

    #[test]
    fn indentation_errors() {
        assert_eq!(codes("STRATEGY s ()\n  A\n      B\n"), [Code::IndentationError]);
        assert_eq!(codes("STRATEGY s ()\n\tA\n  B\n"), [Code::IndentationError]);
        assert_eq!(codes("STRATEGY s ()\n  IF x\n  B\n"), [Code::EmptyBlock]);
        assert_eq!(codes("STRATEGY s ()\n  IF x\n      B\n"), [Code::IndentationError]);
        assert_eq!(codes("STRATEGY s ()\n  A\nB\n"), [Code::SyntaxError]);
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            codes("STRATEGY s ()\n  A\nSTRATEGY s ()\n  B\n"),
            [Code::DuplicateStrategy]
        );
        assert_eq!(codes("STRATEGY s (a a)\n  A\n"), [Code::DuplicateParameter]);
        assert_eq!(codes("STRATEGY s ()\n  A\n# trailing\n"), [Code::DanglingComment]);
        assert_eq!(codes("STRATEGY s ()\n  IF\n    A\n"), [Code::SyntaxError]);
        assert_eq!(codes("STRATEGY s ()\n  SET 'x' = 1\n"), [Code::SyntaxError]);
        assert_eq!(codes("STRATEGY s ()\n  DO f('x'\n"), [Code::SyntaxError]);
        assert_eq!(codes(""), [Code::SyntaxError]);
    }

    #[test]
    fn two_embedded_calls_are_rejected() {
        let text = "STRATEGY f (a)\n  RETURN f('a') and f('a')\n";
        assert_eq!(codes(text), [Code::MultipleEmbeddedCalls]);
    }

    #[test]
    fn embedded_call_needs_no_do() {
        let doc = parse("STRATEGY f (a)\n  RETURN  f('a')\n").unwrap();
        let StatementKind::Return { query } = &doc.strategies[0].body[0].kind else {
            panic!()
        };
        assert_eq!(query.embedded_call().unwrap().target, "f");
    }

    #[test]
    fn lenient_set_and_do_fall_back_to_actions() {
        let doc = parse("STRATEGY s ()\n  Set up the project\n  Do it twice\n").unwrap();
        assert_eq!(kinds(&doc.strategies[0].body), [Kind::Action, Kind::Action]);
    }

    #[test]
    fn locations_point_at_statement_start() {
        let doc = parse_file("a.roboto", "STRATEGY s ()\n\n\tIF x\n\t\tY\n").unwrap();
        let stmt = &doc.strategies[0].body[0];
        assert_eq!(stmt.location, SourceLocation::new("a.roboto", 3, 2));
        assert_eq!(
            stmt.kind.block().unwrap()[0].location,
            SourceLocation::new("a.roboto", 4, 3)
        );
    }
}
