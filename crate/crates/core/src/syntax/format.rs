use std::fmt::Write as _;

use super::ast::{CallExpr, Part, Query, Statement, StatementKind, Strategy, StrategyDoc};

/// Canonical source text: uppercase keywords, one tab per level, comments
/// on their own lines above what they describe, one blank line between
/// strategies.
pub fn format(doc: &StrategyDoc) -> String {
    let mut out = String::new();
    for (i, strategy) in doc.strategies.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_strategy(&mut out, strategy);
    }
    out
}

fn write_strategy(out: &mut String, strategy: &Strategy) {
    write_comment(out, &strategy.leading_comment, 0);
    let _ = writeln!(
        out,
        "STRATEGY {} ({})",
        strategy.name,
        strategy.params.join(" ")
    );
    write_block(out, &strategy.body, 1);
}

fn write_block(out: &mut String, block: &[Statement], depth: usize) {
    for stmt in block {
        write_comment(out, &stmt.comment, depth);
        indent(out, depth);
        out.push_str(&render_statement_line(&stmt.kind));
        out.push('\n');
        if let Some(inner) = stmt.kind.block() {
            write_block(out, inner, depth + 1);
        }
    }
}

fn write_comment(out: &mut String, lines: &[String], depth: usize) {
    for line in lines {
        indent(out, depth);
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    out.extend(std::iter::repeat_n('\t', depth));
}

/// One statement's own line, without indentation or its block.
pub fn render_statement_line(kind: &StatementKind) -> String {
    match kind {
        StatementKind::Action { words } => render_parts(words),
        StatementKind::Call(call) => format!("DO {}", render_call(call)),
        StatementKind::Conditional { query, .. } => format!("IF {}", render_query(query)),
        StatementKind::ForEach { element, list, .. } => {
            format!("FOR EACH '{element}' IN '{list}'")
        }
        StatementKind::Until { query, .. } => format!("UNTIL {}", render_query(query)),
        StatementKind::Assignment { target, query } => {
            format!("SET '{target}' TO {}", render_query(query))
        }
        StatementKind::Return { query } => format!("RETURN {}", render_query(query)),
    }
}

fn render_query(query: &Query) -> String {
    render_parts(&query.parts)
}

pub fn render_parts(parts: &[Part]) -> String {
    let mut out = String::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match part {
            Part::Word(w) => out.push_str(w),
            Part::Ref(name) => {
                let _ = write!(out, "'{name}'");
            }
            Part::Call(call) => out.push_str(&render_call(call)),
        }
    }
    out
}

fn render_call(call: &CallExpr) -> String {
    let args: Vec<String> = call.args.iter().map(|a| format!("'{a}'")).collect();
    format!("{}({})", call.target, args.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn keywords_are_uppercased() {
        let doc = parse("strategy s ()\n  set x to y\n  for each 'a' in xs\n    if 'a' ok\n      do s()\n").unwrap();
        assert_eq!(
            format(&doc),
            "STRATEGY s ()\n\tSET 'x' TO y\n\tFOR EACH 'a' IN 'xs'\n\t\tIF 'a' ok\n\t\t\tDO s()\n"
        );
    }

    #[test]
    fn strategies_separated_by_one_blank_line() {
        let doc = parse("# one\nSTRATEGY a ()\n  X\n\n\n\nSTRATEGY b (p q)\n  # c\n  Y\n").unwrap();
        assert_eq!(
            format(&doc),
            "# one\nSTRATEGY a ()\n\tX\n\nSTRATEGY b (p q)\n\t# c\n\tY\n"
        );
    }
}
