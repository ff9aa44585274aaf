//! Random strategy documents built directly as ASTs.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

use roboto_core::syntax::{CallExpr, Part, Query, SourceLocation, Statement, StatementKind, Strategy, StrategyDoc};

const WORDS: &[&str] = &[
    "check", "the", "value", "of", "all", "items", "carefully", "then", "report", "x1", "(note)",
    "done,", "a-b", "it's", "maybe?", "[list]", "50%",
];
const VARS: &[&str] = &["v0", "v1", "v2", "items", "line"];
const PARAMS: &[&str] = &["p0", "p1", "p2"];

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_strategies: usize,
    /// Deepest block nesting, counting the strategy body as level 1.
    pub max_depth: usize,
    pub max_width: usize,
    pub comments: bool,
}

impl GenConfig {
    pub fn round_trip() -> Self {
        Self {
            max_strategies: 3,
            max_depth: 5,
            max_width: 4,
            comments: true,
        }
    }

    pub fn executable() -> Self {
        Self {
            max_strategies: 3,
            max_depth: 4,
            max_width: 4,
            comments: false,
        }
    }
}

struct Gen<'r> {
    rng: &'r mut StdRng,
    cfg: GenConfig,
    names: Vec<String>,
    arity: Vec<usize>,
    current: usize,
}

/// A document whose calls only target strategies declared later, so every
/// run terminates. Validation finds no errors.
pub fn random_doc(rng: &mut StdRng, cfg: GenConfig) -> StrategyDoc {
    let count = rng.random_range(1..=cfg.max_strategies);
    let names: Vec<String> = (0..count).map(|i| format!("s{i}")).collect();
    let arity: Vec<usize> = (0..count).map(|_| rng.random_range(0..=PARAMS.len())).collect();
    let mut g = Gen {
        rng,
        cfg,
        names,
        arity,
        current: 0,
    };
    let mut strategies = Vec::new();
    for i in 0..count {
        g.current = i;
        let leading_comment = g.comment();
        let body = g.block(1);
        strategies.push(Strategy {
            name: g.names[i].clone(),
            params: PARAMS[..g.arity[i]].iter().map(|s| s.to_string()).collect(),
            body,
            leading_comment,
            location: SourceLocation::default(),
        });
    }
    StrategyDoc {
        strategies,
        source_text: String::new(),
    }
}

impl Gen<'_> {
    fn pick<'a>(&mut self, from: &'a [&'a str]) -> &'a str {
        from.choose(self.rng).unwrap()
    }

    fn var(&mut self) -> String {
        let arity = self.arity[self.current];
        if arity > 0 && self.rng.random_bool(0.4) {
            PARAMS[self.rng.random_range(0..arity)].to_string()
        } else {
            self.pick(VARS).to_string()
        }
    }

    fn comment(&mut self) -> Vec<String> {
        if !self.cfg.comments || self.rng.random_bool(0.6) {
            return Vec::new();
        }
        (0..self.rng.random_range(1..=2))
            .map(|_| {
                if self.rng.random_bool(0.2) {
                    String::new()
                } else {
                    let n = self.rng.random_range(1..=4);
                    (0..n).map(|_| self.pick(WORDS)).collect::<Vec<_>>().join(" ")
                }
            })
            .collect()
    }

    fn text(&mut self, first_word: bool) -> Vec<Part> {
        let n = self.rng.random_range(1..=4);
        let mut parts = Vec::new();
        for i in 0..n {
            if (i > 0 || !first_word) && self.rng.random_bool(0.3) {
                parts.push(Part::Ref(self.var()));
            } else {
                parts.push(Part::Word(self.pick(WORDS).to_string()));
            }
        }
        parts
    }

    fn call(&mut self) -> Option<CallExpr> {
        let later: Vec<usize> = (self.current + 1..self.names.len()).collect();
        let target = *later.choose(self.rng)?;
        let args = (0..self.arity[target]).map(|_| self.var()).collect();
        Some(CallExpr {
            target: self.names[target].clone(),
            args,
        })
    }

    fn query(&mut self, allow_call: bool) -> Query {
        let mut parts = self.text(false);
        if allow_call && self.rng.random_bool(0.3) {
            if let Some(call) = self.call() {
                let at = self.rng.random_range(0..=parts.len());
                parts.insert(at, Part::Call(call));
            }
        }
        Query::new(parts)
    }

    fn block(&mut self, depth: usize) -> Vec<Statement> {
        let width = if depth == 1 {
            self.rng.random_range(2..=self.cfg.max_width + 2)
        } else {
            self.rng.random_range(1..=self.cfg.max_width)
        };
        (0..width).map(|_| self.statement(depth)).collect()
    }

    fn statement(&mut self, depth: usize) -> Statement {
        let nested = depth < self.cfg.max_depth;
        let kind = loop {
            let choice = self.rng.random_range(0..10);
            let kind = match choice {
                0 | 1 => StatementKind::Action {
                    words: self.text(true),
                },
                2 => match self.call() {
                    Some(call) => StatementKind::Call(call),
                    None => continue,
                },
                3 if nested => StatementKind::Conditional {
                    query: self.query(false),
                    block: self.block(depth + 1),
                },
                4 if nested => StatementKind::ForEach {
                    element: self.var(),
                    list: self.var(),
                    block: self.block(depth + 1),
                },
                5 if nested => StatementKind::Until {
                    query: self.query(false),
                    block: self.block(depth + 1),
                },
                6 | 7 => StatementKind::Assignment {
                    target: self.var(),
                    query: self.query(true),
                },
                8 if self.rng.random_bool(0.3) => {
                    let query = match self.rng.random_range(0..4) {
                        0 => Query::new(vec![Part::Word("nothing".into())]),
                        1 => Query::new(vec![Part::Ref(self.var())]),
                        _ => self.query(true),
                    };
                    StatementKind::Return { query }
                }
                9 if nested && self.rng.random_bool(0.5) => StatementKind::Conditional {
                    query: self.query(false),
                    block: self.block(depth + 1),
                },
                _ => continue,
            };
            break kind;
        };
        Statement {
            kind,
            comment: self.comment(),
            location: SourceLocation::default(),
        }
    }
}
