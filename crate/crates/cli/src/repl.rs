//! Text-mode tracker: renders the current statement and waits for
//! commands on a line-oriented reader.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use roboto_core::engine::{Actor, EngineError, ExecutionState, HumanInput, InputKind, Status, Value};
use roboto_core::syntax::StrategyDoc;

const HELP: &str = "commands: next [answer], back, vars, set <name> <value>, help, quit";

pub struct Repl<R, W> {
    doc: Arc<StrategyDoc>,
    root: String,
    input: R,
    out: W,
}

fn show_value(value: &Value) -> String {
    match value {
        Value::List(items) => format!("{} (list of {})", value.to_wire(), items.len()),
        _ => value.to_wire().to_string(),
    }
}

fn parse_decision(text: &str) -> Option<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "t" | "yes" | "y" => Some(true),
        "false" | "f" | "no" | "n" => Some(false),
        _ => None,
    }
}

fn unquote(text: &str) -> &str {
    let t = text.trim();
    t.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(t)
}

impl<R: BufRead, W: Write> Repl<R, W> {
    pub fn new(doc: Arc<StrategyDoc>, root: String, input: R, out: W) -> Self {
        Self { doc, root, input, out }
    }

    fn read_line(&mut self, prompt: &str) -> io::Result<Option<String>> {
        write!(self.out, "{prompt}")?;
        self.out.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Ok(Some(line.trim_end_matches(['\n', '\r']).to_string()))
    }

    /// Prompts for missing arguments, then runs the command loop until the
    /// strategy completes, `quit`, or end of input. Returns an exit code.
    pub fn run(mut self, mut args: BTreeMap<String, Value>) -> io::Result<u8> {
        let strategy = self.doc.strategy(&self.root).expect("root exists").clone();
        let intro = strategy.intro_text();
        if !intro.is_empty() {
            writeln!(self.out, "{intro}\n")?;
        }
        for param in &strategy.params {
            if !args.contains_key(param) {
                let Some(line) = self.read_line(&format!("Value for '{param}': "))? else {
                    writeln!(self.out)?;
                    return Ok(1);
                };
                args.insert(param.clone(), Value::from_entry(&line));
            }
        }
        let mut state = match ExecutionState::start(self.doc.clone(), &self.root, args) {
            Ok(s) => s,
            Err(e) => {
                writeln!(self.out, "error {}: {e}", e.code())?;
                return Ok(1);
            }
        };
        let mut changed = true;
        loop {
            if changed {
                if let Status::Completed(value) = state.status() {
                    writeln!(self.out, "Completed: {}", value)?;
                    return Ok(0);
                }
                self.render(&state)?;
            }
            let Some(line) = self.read_line("> ")? else {
                writeln!(self.out)?;
                return Ok(0);
            };
            let (cmd, rest) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
            let outcome = match cmd {
                "" | "next" | "n" => self.next(&mut state, rest)?,
                "back" | "b" => state.previous().map(|_| true),
                "vars" | "v" => {
                    self.vars(&state)?;
                    Ok(false)
                }
                "set" => {
                    let (name, value) = rest.trim().split_once(' ').unwrap_or((rest.trim(), ""));
                    state.set_variable(name, Value::from_entry(unquote(value))).map(|_| {
                        let _ = writeln!(self.out, "{name} = {}", show_value(&Value::from_entry(unquote(value))));
                        false
                    })
                }
                "help" | "?" => {
                    writeln!(self.out, "{HELP}")?;
                    Ok(false)
                }
                "quit" | "q" | "exit" => return Ok(0),
                other => {
                    writeln!(self.out, "unknown command `{other}`; {HELP}")?;
                    Ok(false)
                }
            };
            changed = match outcome {
                Ok(changed) => changed,
                Err(e) => {
                    writeln!(self.out, "error {}: {e}", e.code())?;
                    false
                }
            };
        }
    }

    fn next(&mut self, state: &mut ExecutionState, inline: &str) -> io::Result<Result<bool, EngineError>> {
        let input = match state.status() {
            Status::Completed(_) => return Ok(Err(EngineError::SessionCompleted)),
            Status::ReadyToAdvance => None,
            Status::AwaitingInput(pending) => match pending.kind {
                InputKind::ActionAcknowledge | InputKind::IterationAcknowledge => Some(HumanInput::Ack),
                InputKind::ConditionDecision => {
                    let text = if inline.trim().is_empty() {
                        match self.read_line("true or false? ")? {
                            Some(t) => t,
                            None => return Ok(Ok(false)),
                        }
                    } else {
                        inline.to_string()
                    };
                    match parse_decision(&text) {
                        Some(b) => Some(HumanInput::Decision(b)),
                        None => {
                            writeln!(self.out, "answer true or false")?;
                            return Ok(Ok(false));
                        }
                    }
                }
                InputKind::QueryAnswer => {
                    let text = if inline.trim().is_empty() {
                        match self.read_line("answer: ")? {
                            Some(t) => t,
                            None => return Ok(Ok(false)),
                        }
                    } else {
                        inline.to_string()
                    };
                    Some(HumanInput::answer(unquote(&text)))
                }
            },
        };
        Ok(state.next(input).map(|_| true))
    }

    fn vars(&mut self, state: &ExecutionState) -> io::Result<()> {
        let vars = state.visible_variables();
        if vars.is_empty() {
            writeln!(self.out, "(no visible variables)")?;
        }
        for (name, value) in vars {
            writeln!(self.out, "{name} = {}", show_value(&value))?;
        }
        Ok(())
    }

    fn render(&mut self, state: &ExecutionState) -> io::Result<()> {
        let Some((strategy, stmt)) = state.current() else {
            return Ok(());
        };
        writeln!(
            self.out,
            "\n[{} line {}, depth {}]",
            strategy.name,
            stmt.location.line,
            state.depth()
        )?;
        for line in &stmt.comment {
            writeln!(self.out, "  # {line}")?;
        }
        match state.status() {
            Status::AwaitingInput(p) => writeln!(self.out, "  > {}    ({})", p.prompt, p.kind)?,
            _ => writeln!(
                self.out,
                "  > {}    (no input needed)",
                roboto_core::syntax::render_statement_line(&stmt.kind)
            )?,
        }
        for step in state.responsibility_steps().unwrap_or_default() {
            let who = match step.actor {
                Actor::Developer => "you",
                Actor::Computer => "computer",
            };
            writeln!(self.out, "    - [{who}] {}", step.description)?;
        }
        Ok(())
    }
}
