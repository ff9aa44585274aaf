use roboto_core::corpus;
use roboto_core::syntax::{format, parse, parse_file, validate, Code, Kind, Part, Severity, StatementKind, StrategyDoc};
use roboto_testkit::{checks, gen, rng};

fn doc(text: &str) -> StrategyDoc {
    parse(text).unwrap_or_else(|d| panic!("{d:?}"))
}

fn error_codes(text: &str) -> Vec<Code> {
    match parse(text) {
        Ok(d) => validate(&d).into_iter().filter(|d| d.is_error()).map(|d| d.code).collect(),
        Err(d) => d.into_iter().map(|d| d.code).collect(),
    }
}

fn kinds(body: &[roboto_core::syntax::Statement]) -> Vec<Kind> {
    body.iter().map(|s| s.kind.kind()).collect()
}

#[test]
fn corpus_fidelity() {
    checks::corpus_fidelity().unwrap();
}

#[test]
fn hanoi_shape_and_no_diagnostics() {
    let d = doc(corpus::TOWER_OF_HANOI);
    let s = &d.strategies[0];
    assert_eq!(kinds(&s.body), [Kind::Assignment, Kind::Conditional, Kind::Conditional]);
    assert_eq!(kinds(s.body[1].kind.block().unwrap()), [Kind::Call, Kind::Action]);
    assert_eq!(kinds(s.body[2].kind.block().unwrap()), [Kind::Call]);
    assert!(validate(&d).is_empty());
}

#[test]
fn minimal_strategy_with_empty_params() {
    let d = doc("STRATEGY s ()\n  Do the thing");
    assert_eq!(d.strategies[0].name, "s");
    assert!(d.strategies[0].params.is_empty());
    assert_eq!(kinds(&d.strategies[0].body), [Kind::Action]);
}

#[test]
fn lowercase_keywords_are_canonicalized() {
    let d = doc("strategy s (x)\n\tif 'x' is set\n\t\tset 'y' to 'x'\n\treturn 'y'\n");
    let out = format(&d);
    assert!(out.starts_with("STRATEGY s (x)\n"), "{out}");
    assert!(out.contains("\tIF 'x' is set\n\t\tSET 'y' TO 'x'\n\tRETURN 'y'\n"), "{out}");
}

#[test]
fn corpus_format_is_idempotent_and_structure_preserving() {
    for (file, text) in corpus::BUILTIN.iter().copied().chain([("corrected", corpus::TOWER_OF_HANOI_CORRECTED)]) {
        let first = doc(text);
        let once = format(&first);
        let second = doc(&once);
        assert!(second.structurally_eq(&first), "{file}");
        assert_eq!(format(&second), once, "{file}");
    }
}

#[test]
fn generated_asts_round_trip() {
    for seed in 0..200 {
        let d = gen::random_doc(&mut rng(seed), gen::GenConfig::round_trip());
        checks::round_trip(&d).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

/// Counts `'ident'` tokens that start at a word boundary, skipping comment
/// lines.
fn quoted_tokens(text: &str) -> usize {
    let mut count = 0;
    for line in text.lines().filter(|l| !l.trim_start().starts_with('#')) {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let boundary = i == 0 || !(chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
            if chars[i] == '\'' && boundary {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j > i + 1 && j < chars.len() && chars[j] == '\'' {
                    count += 1;
                    i = j + 1;
                    continue;
                }
            }
            i += 1;
        }
    }
    count
}

fn identifier_slots(d: &StrategyDoc) -> (usize, usize) {
    fn parts(ps: &[Part], refs: &mut usize, words_with_quotes: &mut usize) {
        for p in ps {
            match p {
                Part::Ref(_) => *refs += 1,
                Part::Call(c) => *refs += c.args.len(),
                Part::Word(w) => {
                    if w.starts_with('\'') && w.len() > 2 && w.ends_with('\'') {
                        *words_with_quotes += 1;
                    }
                }
            }
        }
    }
    fn walk(body: &[roboto_core::syntax::Statement], refs: &mut usize, bad: &mut usize) {
        for s in body {
            match &s.kind {
                StatementKind::Action { words } => parts(words, refs, bad),
                StatementKind::Call(c) => *refs += c.args.len(),
                StatementKind::Conditional { query, block } | StatementKind::Until { query, block } => {
                    parts(&query.parts, refs, bad);
                    walk(block, refs, bad);
                }
                StatementKind::ForEach { block, .. } => {
                    *refs += 2;
                    walk(block, refs, bad);
                }
                StatementKind::Assignment { query, .. } => {
                    *refs += 1;
                    parts(&query.parts, refs, bad);
                }
                StatementKind::Return { query } => parts(&query.parts, refs, bad),
            }
        }
    }
    let (mut refs, mut bad) = (0, 0);
    for s in &d.strategies {
        walk(&s.body, &mut refs, &mut bad);
    }
    (refs, bad)
}

#[test]
fn quoted_identifiers_are_references_not_words() {
    for (file, text) in corpus::BUILTIN {
        let d = doc(text);
        let (refs, quoted_words) = identifier_slots(&d);
        assert_eq!(quoted_words, 0, "{file}");
        assert_eq!(quoted_tokens(&format(&d)), refs, "{file}");
    }
    // Hanoi's source already quotes every reference.
    let d = doc(corpus::TOWER_OF_HANOI);
    assert_eq!(quoted_tokens(corpus::TOWER_OF_HANOI), identifier_slots(&d).0);
}

#[test]
fn apostrophes_inside_words_are_not_references() {
    let d = doc("STRATEGY s (value)\n  IF 'value' isn't nothing\n    Stop\n");
    let StatementKind::Conditional { query, .. } = &d.strategies[0].body[0].kind else {
        panic!()
    };
    let refs: Vec<_> = query.parts.iter().filter(|p| matches!(p, Part::Ref(_))).collect();
    assert_eq!(refs.len(), 1);
}

#[test]
fn comments_attach_to_following_statement_or_header() {
    let d = doc("# intro\nSTRATEGY s ()\n  # first\n  # second\n  Act\n");
    assert_eq!(d.strategies[0].leading_comment, ["intro"]);
    assert_eq!(d.strategies[0].body[0].comment, ["first", "second"]);
}

#[test]
fn blocks_follow_indentation() {
    let d = doc("STRATEGY s (xs)\n\tFOR EACH 'x' IN 'xs'\n\t\tUNTIL done\n\t\t\tWork\n\t\tRest\n\tEnd\n");
    let body = &d.strategies[0].body;
    assert_eq!(kinds(body), [Kind::ForEach, Kind::Action]);
    let inner = body[0].kind.block().unwrap();
    assert_eq!(kinds(inner), [Kind::Until, Kind::Action]);
    assert_eq!(kinds(inner[0].kind.block().unwrap()), [Kind::Action]);
}

#[test]
fn trailing_period_is_stripped() {
    let d = doc("STRATEGY s ()\n  Run the tests.\n");
    assert_eq!(format(&d), "STRATEGY s ()\n\tRun the tests\n");
}

#[test]
fn parse_errors() {
    assert_eq!(error_codes("STRATEGY s ()\n\tA\n  B\n"), [Code::IndentationError]);
    assert_eq!(error_codes("STRATEGY s ()\n  A\n      B\n"), [Code::IndentationError]);
    assert_eq!(error_codes("STRATEGY s ()\n  A\nSTRATEGY s ()\n  B\n"), [Code::DuplicateStrategy]);
    assert_eq!(error_codes("STRATEGY s (a a)\n  A\n"), [Code::DuplicateParameter]);
    assert_eq!(error_codes("STRATEGY s ()\n  IF x\n  A\n"), [Code::EmptyBlock]);
    assert_eq!(error_codes("STRATEGY s ()\n  A\n  # trailing\n"), [Code::DanglingComment]);
    assert_eq!(error_codes("Act\n"), [Code::SyntaxError]);
    assert_eq!(error_codes(""), [Code::SyntaxError]);
    assert_eq!(
        error_codes("STRATEGY s ()\n  SET 'x' TO t() t()\nSTRATEGY t ()\n  A\n"),
        [Code::MultipleEmbeddedCalls]
    );
}

#[test]
fn validation_diagnostics() {
    assert_eq!(error_codes("STRATEGY s ()\n  DO missing('x')\n"), [Code::UnknownStrategy]);
    assert_eq!(error_codes("STRATEGY s ()\n  DO t()\nSTRATEGY t (a)\n  A\n"), [Code::ArityMismatch]);
    let d = doc("STRATEGY s ()\n  Use 'ghost'\n  RETURN nothing\n  After\n");
    let diags = validate(&d);
    let codes: Vec<_> = diags.iter().map(|d| (d.severity, d.code)).collect();
    assert_eq!(
        codes,
        [(Severity::Warning, Code::UndefinedReference), (Severity::Warning, Code::Unreachable)]
    );
}

#[test]
fn diagnostics_render_with_location() {
    let d = parse_file("corpus/debug.roboto", corpus::DEBUG).unwrap();
    let rendered = validate(&d)[0].to_string();
    assert!(
        rendered.starts_with("corpus/debug.roboto:76:4 warning UndefinedReference"),
        "{rendered}"
    );
}
