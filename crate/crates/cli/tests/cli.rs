use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value as Json};

use roboto_core::engine::HumanInput;
use roboto_testkit::scripts;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn all_corpus() -> Vec<PathBuf> {
    ["renameVariable", "towerOfHanoi", "testDrivenDevelopment", "debug"]
        .iter()
        .map(|n| corpus(&format!("{n}.roboto")))
        .collect()
}

fn roboto(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_roboto"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn path_args(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

#[test]
fn check_corpus_reports_one_warning() {
    let paths = path_args(&all_corpus());
    let mut args = vec!["check"];
    args.extend(paths.iter().map(String::as_str));
    let out = roboto(&args, "");
    assert_eq!(out.status.code(), Some(0));
    let stderr = text(&out.stderr);
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("debug.roboto:76:4 warning UndefinedReference 'value'"), "{stderr}");
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.roboto");
    std::fs::write(&bad, "STRATEGY s ()\n\tA\n  B\n").unwrap();
    let out = roboto(&["check", bad.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains(":3:1 error IndentationError"));
    let out = roboto(&["check", dir.path().join("missing.roboto").to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(roboto(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(roboto(&["check"], "").status.code(), Some(2));
}

#[test]
fn fmt_is_idempotent_and_keeps_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    for src in all_corpus() {
        let copy = dir.path().join(src.file_name().unwrap());
        std::fs::copy(&src, &copy).unwrap();
        let p = copy.to_str().unwrap();
        let before = roboto(&["check", p], "");
        let printed = roboto(&["fmt", p], "");
        assert_eq!(printed.status.code(), Some(0));
        assert_eq!(roboto(&["fmt", "--write", p], "").status.code(), Some(0));
        let written = std::fs::read_to_string(&copy).unwrap();
        assert_eq!(text(&printed.stdout), written);
        assert_eq!(text(&roboto(&["fmt", p], "").stdout), written, "second pass changed {p}");
        let after = roboto(&["check", p], "");
        assert_eq!(after.status.code(), before.status.code());
        let strip = |o: &Output| -> Vec<String> {
            text(&o.stderr)
                .lines()
                .map(|l| l.split_once(' ').map_or("", |x| x.1).to_string())
                .collect()
        };
        assert_eq!(strip(&after), strip(&before));
    }
}

#[test]
fn run_hanoi_level_one_completes_with_nothing() {
    let out = roboto(
        &["run", corpus("towerOfHanoi.roboto").to_str().unwrap(), "--arg", "level=1"],
        "A\nC\nB\nnext 0\nnext false\nnext false\n",
    );
    let stdout = text(&out.stdout);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout.contains("Value for 'source': "), "{stdout}");
    assert!(stdout.contains("Completed: nothing"), "{stdout}");
}

#[test]
fn run_back_at_start_reports_at_start() {
    let out = roboto(
        &["run", corpus("debug.roboto").to_str().unwrap()],
        "back\nvars\nquit\n",
    );
    let stdout = text(&out.stdout);
    assert!(stdout.contains("error AtStart"), "{stdout}");
    assert!(stdout.contains("[debug line 18, depth 1]"), "{stdout}");
    assert_eq!(stdout.matches("[debug line").count(), 1);
}

#[test]
fn run_set_list_variable() {
    let out = roboto(
        &[
            "run",
            corpus("testDrivenDevelopment.roboto").to_str().unwrap(),
            "--arg",
            "requirements=a todo app",
        ],
        "next x\nset scenarios \"a, b\"\nvars\nquit\n",
    );
    let stdout = text(&out.stdout);
    assert!(stdout.contains("scenarios = [\"a\",\"b\"] (list of 2)"), "{stdout}");
}

fn write_json(dir: &std::path::Path, name: &str, value: &Json) -> String {
    let path = dir.join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.display().to_string()
}

fn script_json(script: &[HumanInput]) -> Json {
    Json::Array(script.iter().map(HumanInput::to_wire).collect())
}

fn hanoi_files(dir: &std::path::Path, level: u32, corrected: bool, truncate: usize) -> (String, String) {
    let args = json!({"level": level.to_string(), "source": "A", "target": "C", "auxiliary": "B"});
    let script = scripts::hanoi(level, corrected);
    let script = &script[..script.len() - truncate];
    (write_json(dir, "args.json", &args), write_json(dir, "script.json", &script_json(script)))
}

#[test]
fn replay_corrected_hanoi_moves_seven_times() {
    let dir = tempfile::tempdir().unwrap();
    let (args, script) = hanoi_files(dir.path(), 3, true, 0);
    let path = corpus("variants/towerOfHanoiCorrected.roboto");
    let run = || {
        roboto(
            &["replay", path.to_str().unwrap(), "--strategy", "towerOfHanoi", "--args-file", &args, "--script-file", &script],
            "",
        )
    };
    let out = run();
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let lines: Vec<Json> = text(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let moves = lines.iter().filter(|l| l["kind"] == "Action").count();
    assert_eq!(moves, 7);
    assert_eq!(lines.last().unwrap()["status"], json!({"kind": "Completed", "value": null}));
    assert_eq!(run().stdout, out.stdout);
}

#[test]
fn replay_short_script_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (args, script) = hanoi_files(dir.path(), 2, false, 1);
    let out = roboto(
        &["replay", corpus("towerOfHanoi.roboto").to_str().unwrap(), "--args-file", &args, "--script-file", &script],
        "",
    );
    assert_eq!(out.status.code(), Some(1));
    let last = text(&out.stdout).lines().last().unwrap().to_string();
    let last: Json = serde_json::from_str(&last).unwrap();
    assert_eq!(last["error"]["code"], "ScriptExhausted");
}

#[test]
fn replay_debug_returns_line() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_json(dir.path(), "s.json", &script_json(&scripts::debug_found_line("main.c:17")));
    let out = roboto(
        &["replay", corpus("debug.roboto").to_str().unwrap(), "--strategy", "debug", "--script-file", &script],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let last: Json = serde_json::from_str(text(&out.stdout).lines().last().unwrap()).unwrap();
    assert_eq!(last["status"]["value"], "main.c:17");
}

#[test]
fn replay_rejects_bad_script_file() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_json(dir.path(), "s.json", &json!({"not": "an array"}));
    let out = roboto(
        &["replay", corpus("debug.roboto").to_str().unwrap(), "--script-file", &script],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
}
