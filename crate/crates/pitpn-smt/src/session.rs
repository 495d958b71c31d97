//! Solver process management: launching, framing, and teardown.
//!
//! Every command is answered because sessions run with
//! `:print-success true`. A background thread slices solver stdout into
//! complete s-expressions or bare words and hands them over a channel,
//! so reads can carry a hard timeout even when the solver hangs.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::time::Duration;

use crate::sexpr::{self, Sexpr};
use crate::SmtError;

/// Known solver families, detected from the executable name. The family
/// decides launch arguments, the prelude, and feature availability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverFamily {
    Z3,
    Cvc5,
    Yices,
    /// Anything else; treated as a standard SMT-LIB2 solver without
    /// quantifier elimination support.
    Generic,
}

impl SolverFamily {
    pub fn detect(path: &Path) -> Self {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if stem.contains("z3") {
            SolverFamily::Z3
        } else if stem.contains("cvc") {
            SolverFamily::Cvc5
        } else if stem.contains("yices") {
            SolverFamily::Yices
        } else {
            SolverFamily::Generic
        }
    }

    /// Whether quantified assertions can be decided at all.
    pub fn supports_quantifiers(self) -> bool {
        !matches!(self, SolverFamily::Yices)
    }

    /// Whether the `(apply (then simplify qe))` tactic is available.
    pub fn supports_qe(self) -> bool {
        matches!(self, SolverFamily::Z3)
    }

    fn launch_args(self, timeout: Duration) -> Vec<String> {
        match self {
            SolverFamily::Z3 => vec!["-in".into()],
            SolverFamily::Cvc5 => vec![
                "--incremental".into(),
                format!("--tlimit-per={}", timeout.as_millis()),
            ],
            SolverFamily::Yices => vec![
                "--incremental".into(),
                format!("--timeout={}", timeout.as_secs().max(1)),
            ],
            SolverFamily::Generic => Vec::new(),
        }
    }

    fn prelude(self, timeout: Duration) -> Vec<String> {
        let mut cmds = vec![
            "(set-option :print-success true)".to_string(),
            "(set-option :produce-models true)".to_string(),
        ];
        match self {
            SolverFamily::Z3 => {
                cmds.push(format!("(set-option :timeout {})", timeout.as_millis()));
            }
            SolverFamily::Cvc5 | SolverFamily::Generic => {
                cmds.push("(set-logic ALL)".to_string());
            }
            SolverFamily::Yices => {
                cmds.push("(set-logic QF_LIRA)".to_string());
            }
        }
        cmds
    }
}

impl std::fmt::Display for SolverFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverFamily::Z3 => write!(f, "z3"),
            SolverFamily::Cvc5 => write!(f, "cvc5"),
            SolverFamily::Yices => write!(f, "yices"),
            SolverFamily::Generic => write!(f, "generic"),
        }
    }
}

/// How to reach and drive a solver binary.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub family: SolverFamily,
    /// Per-query budget. Enforced softly through solver options where
    /// supported and hard by killing the process when reads exceed it.
    pub timeout: Duration,
}

impl SolverConfig {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let family = SolverFamily::detect(&path);
        SolverConfig { path, family, timeout: Duration::from_secs(600) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Resolution order: explicit path, then the `PITPN_SOLVER`
    /// environment variable, then well-known names on `PATH`.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, SmtError> {
        if let Some(path) = explicit {
            return Ok(SolverConfig::new(find_executable(path)?));
        }
        if let Some(env) = std::env::var_os("PITPN_SOLVER") {
            return Ok(SolverConfig::new(find_executable(Path::new(&env))?));
        }
        for name in ["z3", "cvc5", "yices-smt2"] {
            if let Ok(path) = find_executable(Path::new(name)) {
                return Ok(SolverConfig::new(path));
            }
        }
        Err(SmtError::SolverNotFound)
    }
}

fn find_executable(name: &Path) -> Result<PathBuf, SmtError> {
    if name.components().count() > 1 {
        return if name.is_file() {
            Ok(name.to_path_buf())
        } else {
            Err(SmtError::Launch(
                name.display().to_string(),
                "no such file".into(),
            ))
        };
    }
    let paths = std::env::var_os("PATH").unwrap_or_default();
    for dir in std::env::split_paths(&paths) {
        let candidate = dir.join(name);
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    Err(SmtError::Launch(
        name.display().to_string(),
        "not found on PATH".into(),
    ))
}

/// One framed answer from the solver.
#[derive(Debug)]
pub(crate) enum Response {
    Success,
    Sat,
    Unsat,
    Unknown,
    Expr(Sexpr),
}

/// A live solver process. Dropped sessions are killed.
pub(crate) struct Session {
    child: Child,
    stdin: ChildStdin,
    rx: Receiver<String>,
    timeout: Duration,
}

impl Session {
    pub fn spawn(config: &SolverConfig) -> Result<Session, SmtError> {
        let mut child = Command::new(&config.path)
            .args(config.family.launch_args(config.timeout))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Launch(config.path.display().to_string(), e.to_string()))?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, rx) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            let mut scanner = MessageScanner::default();
            let mut line = String::new();
            loop {
                line.clear();
                match reader.read_line(&mut line) {
                    Ok(0) | Err(_) => return,
                    Ok(_) => {}
                }
                let mut messages = Vec::new();
                scanner.push_line(line.trim_end_matches(['\n', '\r']), &mut messages);
                for m in messages {
                    if tx.send(m).is_err() {
                        return;
                    }
                }
            }
        });
        // Reads during the prelude use a short budget: a healthy solver
        // acknowledges options immediately.
        let mut session = Session {
            child,
            stdin,
            rx,
            timeout: config.timeout + Duration::from_secs(5),
        };
        for cmd in config.family.prelude(config.timeout) {
            match session.command(&cmd)? {
                Response::Success => {}
                other => {
                    return Err(SmtError::Protocol(format!(
                        "solver rejected '{cmd}': {other:?}"
                    )))
                }
            }
        }
        Ok(session)
    }

    /// Sends one command and reads its framed answer.
    pub fn command(&mut self, cmd: &str) -> Result<Response, SmtError> {
        writeln!(self.stdin, "{cmd}").map_err(|e| SmtError::Io(e.to_string()))?;
        self.stdin.flush().map_err(|e| SmtError::Io(e.to_string()))?;
        let msg = match self.rx.recv_timeout(self.timeout) {
            Ok(msg) => msg,
            Err(RecvTimeoutError::Timeout) => return Err(SmtError::Timeout),
            Err(RecvTimeoutError::Disconnected) => {
                return Err(SmtError::Io("solver process exited".into()))
            }
        };
        match msg.as_str() {
            "success" => Ok(Response::Success),
            "sat" => Ok(Response::Sat),
            "unsat" => Ok(Response::Unsat),
            "unknown" => Ok(Response::Unknown),
            "unsupported" => Err(SmtError::Unsupported(format!(
                "solver does not support '{cmd}'"
            ))),
            _ => {
                let sx = sexpr::parse_one(&msg)?;
                if sx.is_call("error") {
                    let detail = sx.list().unwrap().get(1).and_then(|s| s.atom());
                    return Err(SmtError::Solver(
                        detail
                            .map(|d| d.trim_matches('"').to_string())
                            .unwrap_or(msg),
                    ));
                }
                Ok(Response::Expr(sx))
            }
        }
    }

    pub fn expect_success(&mut self, cmd: &str) -> Result<(), SmtError> {
        match self.command(cmd)? {
            Response::Success => Ok(()),
            other => Err(SmtError::Protocol(format!(
                "expected success for '{cmd}', got {other:?}"
            ))),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Splits solver stdout into complete messages: balanced s-expressions
/// or bare words. Parentheses inside `"..."` strings and `|...|`
/// symbols carry no structure.
#[derive(Default)]
struct MessageScanner {
    depth: i64,
    in_string: bool,
    in_pipe: bool,
    buf: String,
}

impl MessageScanner {
    fn push_line(&mut self, line: &str, out: &mut Vec<String>) {
        for c in line.chars() {
            if self.in_string {
                self.buf.push(c);
                if c == '"' {
                    self.in_string = false;
                }
                continue;
            }
            if self.in_pipe {
                self.buf.push(c);
                if c == '|' {
                    self.in_pipe = false;
                }
                continue;
            }
            match c {
                '"' => {
                    self.in_string = true;
                    self.buf.push(c);
                }
                '|' => {
                    self.in_pipe = true;
                    self.buf.push(c);
                }
                '(' => {
                    self.depth += 1;
                    self.buf.push(c);
                }
                ')' => {
                    self.depth -= 1;
                    self.buf.push(c);
                    if self.depth == 0 {
                        self.flush(out);
                    }
                }
                c if c.is_whitespace() => {
                    if self.depth == 0 {
                        self.flush(out);
                    } else {
                        self.buf.push(c);
                    }
                }
                _ => self.buf.push(c),
            }
        }
        if self.depth == 0 {
            self.flush(out);
        } else {
            self.buf.push('\n');
        }
    }

    fn flush(&mut self, out: &mut Vec<String>) {
        if !self.buf.trim().is_empty() {
            out.push(std::mem::take(&mut self.buf));
        } else {
            self.buf.clear();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(lines: &[&str]) -> Vec<String> {
        let mut scanner = MessageScanner::default();
        let mut out = Vec::new();
        for line in lines {
            scanner.push_line(line, &mut out);
        }
        out
    }

    #[test]
    fn bare_words_split_per_line() {
        assert_eq!(scan(&["success", "sat"]), vec!["success", "sat"]);
    }

    #[test]
    fn multiline_sexprs_join() {
        let out = scan(&["(model ", "  (define-fun a () Real 5.0)", ")"]);
        assert_eq!(out.len(), 1);
        assert!(out[0].starts_with("(model"));
        assert!(out[0].ends_with(')'));
    }

    #[test]
    fn strings_and_pipes_hide_parens() {
        let out = scan(&["(error \"bad ) input\")", "(define-fun |a)b| () Real 1.0)"]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn two_messages_on_one_line_split() {
        assert_eq!(scan(&["success (goals)"]), vec!["success", "(goals)"]);
    }

    #[test]
    fn family_detection_and_resolution() {
        assert_eq!(SolverFamily::detect(Path::new("/usr/bin/z3")), SolverFamily::Z3);
        assert_eq!(SolverFamily::detect(Path::new("cvc5-1.0.8")), SolverFamily::Cvc5);
        assert_eq!(SolverFamily::detect(Path::new("yices-smt2")), SolverFamily::Yices);
        assert_eq!(SolverFamily::detect(Path::new("mathsat")), SolverFamily::Generic);
        assert!(SolverFamily::Z3.supports_qe());
        assert!(!SolverFamily::Yices.supports_quantifiers());
    }
}
