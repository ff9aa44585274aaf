use std::fmt;

use serde::{Deserialize, Serialize};

/// Position of a line or statement inside a source file. Lines and columns
/// are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Self {
            file: file.into(),
            line: line.max(1),
            column: column.max(1),
        }
    }
}

impl Default for SourceLocation {
    fn default() -> Self {
        Self::new("", 1, 1)
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// A parsed `.roboto` file: one or more strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyDoc {
    pub strategies: Vec<Strategy>,
    pub source_text: String,
}

impl StrategyDoc {
    pub fn strategy(&self, name: &str) -> Option<&Strategy> {
        self.strategies.iter().find(|s| s.name == name)
    }

    pub fn strategy_names(&self) -> Vec<String> {
        self.strategies.iter().map(|s| s.name.clone()).collect()
    }

    /// Copy with every location reset and the source text dropped, for
    /// comparing two documents by shape only.
    pub fn structure(&self) -> StrategyDoc {
        let mut doc = self.clone();
        doc.source_text.clear();
        for strategy in &mut doc.strategies {
            strategy.location = SourceLocation::default();
            strip_locations(&mut strategy.body);
        }
        doc
    }

    pub fn structurally_eq(&self, other: &StrategyDoc) -> bool {
        self.structure() == other.structure()
    }
}

fn strip_locations(block: &mut [Statement]) {
    for stmt in block {
        stmt.location = SourceLocation::default();
        if let Some(inner) = stmt.kind.block_mut() {
            strip_locations(inner);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Statement>,
    /// Comment lines directly above the header, without the `#`.
    pub leading_comment: Vec<String>,
    pub location: SourceLocation,
}

impl Strategy {
    /// The statement at `path`, where each index selects into the body and
    /// then into nested blocks.
    pub fn statement_at(&self, path: &[usize]) -> Option<&Statement> {
        let (first, rest) = path.split_first()?;
        let mut stmt = self.body.get(*first)?;
        for idx in rest {
            stmt = stmt.kind.block()?.get(*idx)?;
        }
        Some(stmt)
    }

    /// Sibling list containing the statement at `path`.
    pub fn block_at(&self, path: &[usize]) -> Option<&[Statement]> {
        match path.split_last() {
            None => None,
            Some((_, [])) => Some(&self.body),
            Some((_, parent)) => self.statement_at(parent)?.kind.block(),
        }
    }

    pub fn intro_text(&self) -> String {
        self.leading_comment.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    /// Comment lines attached above this statement.
    pub comment: Vec<String>,
    pub location: SourceLocation,
}

impl Statement {
    pub fn new(kind: StatementKind, location: SourceLocation) -> Self {
        Self {
            kind,
            comment: Vec::new(),
            location,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    Action { words: Vec<Part> },
    Call(CallExpr),
    Conditional { query: Query, block: Vec<Statement> },
    ForEach { element: String, list: String, block: Vec<Statement> },
    Until { query: Query, block: Vec<Statement> },
    Assignment { target: String, query: Query },
    Return { query: Query },
}

impl StatementKind {
    pub fn kind(&self) -> Kind {
        match self {
            StatementKind::Action { .. } => Kind::Action,
            StatementKind::Call(_) => Kind::Call,
            StatementKind::Conditional { .. } => Kind::Conditional,
            StatementKind::ForEach { .. } => Kind::ForEach,
            StatementKind::Until { .. } => Kind::Until,
            StatementKind::Assignment { .. } => Kind::Assignment,
            StatementKind::Return { .. } => Kind::Return,
        }
    }

    pub fn block(&self) -> Option<&[Statement]> {
        match self {
            StatementKind::Conditional { block, .. }
            | StatementKind::ForEach { block, .. }
            | StatementKind::Until { block, .. } => Some(block),
            _ => None,
        }
    }

    pub fn block_mut(&mut self) -> Option<&mut Vec<Statement>> {
        match self {
            StatementKind::Conditional { block, .. }
            | StatementKind::ForEach { block, .. }
            | StatementKind::Until { block, .. } => Some(block),
            _ => None,
        }
    }

    /// Identifier references read by this statement itself (not its block),
    /// in source order.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            StatementKind::Action { words } => collect_refs(words, &mut out),
            StatementKind::Call(call) => out.extend(call.args.iter().map(String::as_str)),
            StatementKind::Conditional { query, .. }
            | StatementKind::Until { query, .. }
            | StatementKind::Assignment { query, .. }
            | StatementKind::Return { query } => collect_refs(&query.parts, &mut out),
            StatementKind::ForEach { list, .. } => out.push(list),
        }
        out
    }

    /// The sub-strategy invocation made by this statement, if any.
    pub fn call(&self) -> Option<&CallExpr> {
        match self {
            StatementKind::Call(call) => Some(call),
            StatementKind::Assignment { query, .. } | StatementKind::Return { query } => {
                query.embedded_call()
            }
            _ => None,
        }
    }
}

fn collect_refs<'a>(parts: &'a [Part], out: &mut Vec<&'a str>) {
    for part in parts {
        match part {
            Part::Ref(name) => out.push(name),
            Part::Call(call) => out.extend(call.args.iter().map(String::as_str)),
            Part::Word(_) => {}
        }
    }
}

/// Statement kind without payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Action,
    Call,
    Conditional,
    ForEach,
    Until,
    Assignment,
    Return,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Action,
        Kind::Call,
        Kind::Conditional,
        Kind::ForEach,
        Kind::Until,
        Kind::Assignment,
        Kind::Return,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Action => "Action",
            Kind::Call => "Call",
            Kind::Conditional => "Conditional",
            Kind::ForEach => "ForEach",
            Kind::Until => "Until",
            Kind::Assignment => "Assignment",
            Kind::Return => "Return",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallExpr {
    pub target: String,
    pub args: Vec<String>,
}

/// One piece of natural-language text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Part {
    Word(String),
    /// A quoted `'identifier'`.
    Ref(String),
    /// `name('a' 'b')` inside a query.
    Call(CallExpr),
}

/// Information the developer retrieves from the world. Opaque text apart
/// from its identifier references and at most one embedded call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub parts: Vec<Part>,
}

impl Query {
    pub fn new(parts: Vec<Part>) -> Self {
        Self { parts }
    }

    pub fn embedded_call(&self) -> Option<&CallExpr> {
        self.parts.iter().find_map(|p| match p {
            Part::Call(call) => Some(call),
            _ => None,
        })
    }

    /// True for the single-word query `nothing`.
    pub fn is_nothing(&self) -> bool {
        matches!(self.parts.as_slice(), [Part::Word(w)] if w.eq_ignore_ascii_case("nothing"))
    }

    /// The name when the query is exactly one identifier reference.
    pub fn bare_ref(&self) -> Option<&str> {
        match self.parts.as_slice() {
            [Part::Ref(name)] => Some(name),
            _ => None,
        }
    }
}
