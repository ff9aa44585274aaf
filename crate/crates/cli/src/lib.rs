//! The `roboto` command: check and format strategy files, step through a
//! strategy at the terminal, replay scripted runs, and start the service.

pub mod repl;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use roboto_core::engine::{run_scripted, HumanInput, Status, Trace, Value};
use roboto_core::syntax::{format, has_errors, parse_file, validate, Diagnostic, StrategyDoc};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "roboto", version, about = "Work with Roboto strategy files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate files, printing diagnostics to stderr.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print files in canonical form, or rewrite them in place.
    Fmt {
        #[arg(long)]
        write: bool,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Step through a strategy interactively.
    Run {
        path: PathBuf,
        /// Strategy to run; defaults to the first one in the file.
        #[arg(long)]
        strategy: Option<String>,
        /// Argument as name=value; missing arguments are prompted for.
        #[arg(long = "arg", value_name = "NAME=VALUE")]
        args: Vec<String>,
    },
    /// Run a strategy from a recorded script and print its trace as JSON lines.
    Replay {
        path: PathBuf,
        #[arg(long)]
        strategy: Option<String>,
        /// JSON object mapping parameter names to values.
        #[arg(long)]
        args_file: Option<PathBuf>,
        /// JSON array of inputs such as {"decision": true}.
        #[arg(long)]
        script_file: PathBuf,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "ROBOTO_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "ROBOTO_CATALOG", default_value = "roboto-data/catalog")]
        catalog: PathBuf,
        #[arg(long, env = "ROBOTO_STORE", default_value = "roboto-data/sessions")]
        store: PathBuf,
    },
}

pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Check { paths } => check(&paths),
        Command::Fmt { write, paths } => fmt(&paths, write),
        Command::Run { path, strategy, args } => run_interactive(&path, strategy, &args),
        Command::Replay {
            path,
            strategy,
            args_file,
            script_file,
        } => replay(&path, strategy, args_file.as_deref(), &script_file),
        Command::Serve { port, catalog, store } => serve(port, catalog, store),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("roboto: {message}");
            code
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn error(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    let mut err = io::stderr().lock();
    for d in diags {
        let _ = writeln!(err, "{d}");
    }
}

/// Parses and validates; prints every diagnostic. `None` when the file
/// has errors.
fn load(path: &Path) -> Result<Option<StrategyDoc>, Failure> {
    let text = read(path)?;
    let file = path.display().to_string();
    match parse_file(&file, &text) {
        Err(diags) => {
            print_diagnostics(&diags);
            Ok(None)
        }
        Ok(doc) => {
            let diags = validate(&doc);
            print_diagnostics(&diags);
            Ok((!has_errors(&diags)).then_some(doc))
        }
    }
}

fn load_runnable(path: &Path) -> Result<StrategyDoc, Failure> {
    load(path)?.ok_or_else(|| Failure::error(format!("{} has errors", path.display())))
}

fn check(paths: &[PathBuf]) -> CmdResult {
    for path in paths {
        if !path.is_file() {
            return Err(Failure::usage(format!("{}: no such file", path.display())));
        }
    }
    let mut failed = false;
    for path in paths {
        failed |= load(path)?.is_none();
    }
    Ok(if failed { EXIT_FAILURE } else { EXIT_OK })
}

fn fmt(paths: &[PathBuf], write: bool) -> CmdResult {
    let mut failed = false;
    let mut out = io::stdout().lock();
    for path in paths {
        let text = read(path)?;
        match parse_file(path.display().to_string(), &text) {
            Err(diags) => {
                print_diagnostics(&diags);
                failed = true;
            }
            Ok(doc) => {
                let formatted = format(&doc);
                if write {
                    if formatted != text {
                        fs::write(path, &formatted)
                            .map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
                    }
                } else {
                    let _ = out.write_all(formatted.as_bytes());
                }
            }
        }
    }
    Ok(if failed { EXIT_FAILURE } else { EXIT_OK })
}

fn root_name(doc: &StrategyDoc, strategy: Option<String>) -> Result<String, Failure> {
    let name = strategy.unwrap_or_else(|| doc.strategies[0].name.clone());
    if doc.strategy(&name).is_none() {
        return Err(Failure::usage(format!("no strategy named `{name}`")));
    }
    Ok(name)
}

fn run_interactive(path: &Path, strategy: Option<String>, raw_args: &[String]) -> CmdResult {
    let doc = load_runnable(path)?;
    let root = root_name(&doc, strategy)?;
    let mut args = BTreeMap::new();
    for raw in raw_args {
        let (k, v) = raw
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--arg expects NAME=VALUE, got `{raw}`")))?;
        args.insert(k.trim().to_string(), Value::from_entry(v));
    }
    let stdin = io::stdin().lock();
    let stdout = io::stdout().lock();
    repl::Repl::new(Arc::new(doc), root, stdin, stdout)
        .run(args)
        .map_err(|e| Failure::error(e.to_string()))
}

fn read_json(path: &Path) -> Result<Json, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn trace_lines(trace: &Trace) -> Vec<String> {
    trace
        .entries
        .iter()
        .map(|e| {
            json!({
                "location": e.location,
                "kind": e.kind,
                "input": e.input.as_ref().map(HumanInput::to_wire),
                "depth": e.depth,
            })
            .to_string()
        })
        .collect()
}

fn status_json(status: &Status) -> Json {
    match status {
        Status::Completed(v) => json!({"kind": "Completed", "value": v.to_wire()}),
        Status::ReadyToAdvance => json!({"kind": "ReadyToAdvance"}),
        Status::AwaitingInput(p) => json!({"kind": "AwaitingInput", "pending": p}),
    }
}

fn replay(path: &Path, strategy: Option<String>, args_file: Option<&Path>, script_file: &Path) -> CmdResult {
    let doc = load_runnable(path)?;
    let root = root_name(&doc, strategy)?;
    let args: BTreeMap<String, Value> = match args_file {
        None => BTreeMap::new(),
        Some(p) => {
            let json = read_json(p)?;
            let obj = json
                .as_object()
                .ok_or_else(|| Failure::usage("args file must hold a JSON object"))?;
            obj.iter()
                .map(|(k, v)| Value::from_wire(v).map(|v| (k.clone(), v)))
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::usage(format!("args file: {e}")))?
        }
    };
    let script_json = read_json(script_file)?;
    let script: Vec<HumanInput> = script_json
        .as_array()
        .ok_or_else(|| Failure::usage("script file must hold a JSON array"))?
        .iter()
        .map(HumanInput::from_wire)
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::usage(format!("script file: {e}")))?;

    let mut out = io::stdout().lock();
    let emit = |out: &mut io::StdoutLock, lines: Vec<String>, last: Json| {
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out, "{last}");
    };
    match run_scripted(Arc::new(doc), &root, args, &script) {
        Ok(trace) => {
            emit(&mut out, trace_lines(&trace), json!({ "status": status_json(&trace.status) }));
            Ok(EXIT_OK)
        }
        Err(failure) => {
            let error = json!({"code": failure.error.code(), "message": failure.error.to_string()});
            emit(&mut out, trace_lines(&failure.trace), json!({ "error": error }));
            eprintln!("roboto: {}", failure.error);
            Ok(EXIT_FAILURE)
        }
    }
}

fn serve(port: u16, catalog: PathBuf, store: PathBuf) -> CmdResult {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::error(e.to_string()))?;
    let config = roboto_service::Config {
        port,
        catalog_dir: catalog,
        store_dir: store,
    };
    runtime
        .block_on(roboto_service::serve(config))
        .map_err(Failure::error)?;
    Ok(EXIT_OK)
}
