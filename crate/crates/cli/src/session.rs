//! A session holds the current group, field and alphabet dimension, named
//! declarations and the command history. Scripts and the REPL feed it lines.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use clap::Parser;
use nearca::pipeline::PipelineConfig;
use nearca::poly::DEFAULT_TERM_BUDGET;
use nearca::{Field, Group};

use crate::commands::{dispatch, Cli, Command, Env, Format, Global, Outcome, Status, REPORT_VERSION};
use crate::error::{CliError, CliResult};
use crate::spec::{parse_field, parse_group};
use crate::value::{print, Value};

const RESERVED: &[&str] = &["w", "X", "x", "phi", "psi", "Psi", "ca", "elementary", "rule", "compose", "restrict"];

pub struct Session {
    pub group: Group,
    pub field: Field,
    pub dim: usize,
    pub depth: u32,
    pub term_budget: usize,
    groups: HashMap<String, Group>,
    fields: HashMap<String, Field>,
    values: HashMap<String, Value>,
    pub history: Vec<String>,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            group: Group::integers(),
            field: Field::Rational,
            dim: 1,
            depth: PipelineConfig::default().depth,
            term_budget: DEFAULT_TERM_BUDGET,
            groups: HashMap::new(),
            fields: HashMap::new(),
            values: HashMap::new(),
            history: Vec::new(),
        }
    }
}

fn check_name(name: &str) -> CliResult<()> {
    let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok || RESERVED.contains(&name) {
        return Err(CliError::Usage(format!("{name:?} cannot be used as a name")));
    }
    Ok(())
}

fn check_limits(dim: usize, depth: u32, budget: usize) -> CliResult<()> {
    if !(1..=16).contains(&dim) {
        return Err(CliError::Usage("--dim must be in 1..=16".into()));
    }
    if !(1..=12).contains(&depth) {
        return Err(CliError::Usage("--depth must be in 1..=12".into()));
    }
    if budget == 0 {
        return Err(CliError::Usage("--budget-terms must be positive".into()));
    }
    Ok(())
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    fn group_named(&self, src: &str) -> CliResult<Group> {
        match self.groups.get(src.trim()) {
            Some(g) => Ok(g.clone()),
            None => parse_group(src),
        }
    }

    fn field_named(&self, src: &str) -> CliResult<Field> {
        match self.fields.get(src.trim()) {
            Some(f) => Ok(f.clone()),
            None => parse_field(src),
        }
    }

    /// Makes global flags the session defaults (used by `run` and `repl`).
    pub fn apply(&mut self, g: &Global) -> CliResult<()> {
        let env = self.resolve(g)?;
        (self.group, self.field, self.dim, self.depth, self.term_budget) = env;
        Ok(())
    }

    fn resolve(&self, g: &Global) -> CliResult<(Group, Field, usize, u32, usize)> {
        let group = g.group.as_deref().map(|s| self.group_named(s)).transpose()?.unwrap_or_else(|| self.group.clone());
        let field = g.field.as_deref().map(|s| self.field_named(s)).transpose()?.unwrap_or_else(|| self.field.clone());
        let dim = g.dim.unwrap_or(self.dim);
        let depth = g.depth.unwrap_or(self.depth);
        let budget = g.budget_terms.unwrap_or(self.term_budget);
        check_limits(dim, depth, budget)?;
        Ok((group, field, dim, depth, budget))
    }

    /// Runs one parsed command line; `run` and `repl` are handled by the caller.
    pub fn command(&mut self, cli: &Cli) -> Outcome {
        let name = command_name(&cli.command);
        let result = self.resolve(&cli.global).and_then(|(group, field, dim, depth, term_budget)| {
            let env = Env { group, field, dim, depth, term_budget, bindings: &self.values };
            dispatch(&cli.command, &env)
        });
        let outcome = result.unwrap_or_else(|e| Outcome::error(name, &e));
        if let Some(path) = &cli.global.emit {
            if let Err(e) = write_report(path, &outcome) {
                return Outcome::error(name, &e);
            }
        }
        outcome
    }

    /// One script line: a declaration, a command, or nothing.
    pub fn line(&mut self, line: &str) -> Option<Outcome> {
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            return None;
        }
        self.history.push(text.to_string());
        let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let declared = match head {
            "group" => Some(self.declare_group(rest)),
            "field" => Some(self.declare_field(rest)),
            "dim" => Some(self.declare_dim(rest)),
            "let" => Some(self.declare_value(rest)),
            _ => None,
        };
        if let Some(r) = declared {
            return Some(r.unwrap_or_else(|e| Outcome::error(head, &e)));
        }
        let words = match shlex::split(text) {
            Some(w) => w,
            None => return Some(Outcome::error("script", &CliError::Usage("unbalanced quotes".into()))),
        };
        let cli = match Cli::try_parse_from(std::iter::once("nearca".to_string()).chain(words)) {
            Ok(c) => c,
            Err(e) => return Some(Outcome::error("script", &CliError::Usage(e.to_string().trim().to_string()))),
        };
        if matches!(cli.command, Command::Run { .. } | Command::Repl) {
            return Some(Outcome::error("script", &CliError::Usage("run and repl cannot be nested".into())));
        }
        Some(self.command(&cli))
    }

    /// `NAME = SPEC` binds and selects; `SPEC` or `NAME` selects.
    fn split_binding<'a>(&self, rest: &'a str) -> CliResult<(Option<&'a str>, &'a str)> {
        match rest.split_once('=') {
            Some((name, spec)) => {
                let name = name.trim();
                check_name(name)?;
                Ok((Some(name), spec.trim()))
            }
            None => Ok((None, rest)),
        }
    }

    fn declare_group(&mut self, rest: &str) -> CliResult<Outcome> {
        let (name, spec) = self.split_binding(rest)?;
        let g = match name {
            Some(n) => {
                if self.groups.contains_key(n) {
                    return Err(CliError::Usage(format!("group {n} is already declared")));
                }
                let g = parse_group(spec)?.with_name(n);
                self.groups.insert(n.to_string(), g.clone());
                g
            }
            None => self.group_named(spec)?,
        };
        self.group = g;
        Ok(Outcome::new("group", true, serde_json::json!({ "group": self.group.name() }), format!("group {}", self.group.name())))
    }

    fn declare_field(&mut self, rest: &str) -> CliResult<Outcome> {
        let (name, spec) = self.split_binding(rest)?;
        let f = match name {
            Some(n) => {
                if self.fields.contains_key(n) {
                    return Err(CliError::Usage(format!("field {n} is already declared")));
                }
                let f = parse_field(spec)?;
                self.fields.insert(n.to_string(), f.clone());
                f
            }
            None => self.field_named(spec)?,
        };
        self.field = f;
        Ok(Outcome::new("field", true, serde_json::json!({ "field": self.field.to_string() }), format!("field {}", self.field)))
    }

    fn declare_dim(&mut self, rest: &str) -> CliResult<Outcome> {
        let dim: usize = rest.parse().map_err(|_| CliError::Usage(format!("dim {rest:?} is not a number")))?;
        check_limits(dim, self.depth, self.term_budget)?;
        self.dim = dim;
        Ok(Outcome::new("dim", true, serde_json::json!({ "dim": dim }), format!("dim {dim}")))
    }

    fn declare_value(&mut self, rest: &str) -> CliResult<Outcome> {
        let (name, expr) = rest.split_once('=').ok_or_else(|| CliError::Usage("expected let NAME = EXPR".into()))?;
        let name = name.trim();
        check_name(name)?;
        if self.values.contains_key(name) {
            return Err(CliError::Usage(format!("{name} is already bound")));
        }
        let env = Env {
            group: self.group.clone(),
            field: self.field.clone(),
            dim: self.dim,
            depth: self.depth,
            term_budget: self.term_budget,
            bindings: &self.values,
        };
        let v = env.eval_expr(expr.trim()).map_err(|e| e.in_arg(name))?;
        let shown = print(&v);
        let kind = v.kind().to_string();
        self.values.insert(name.to_string(), v);
        Ok(Outcome::new("let", true, serde_json::json!({ "name": name, "kind": kind, "value": shown }), format!("{name} = {shown}")))
    }

    /// Runs lines until the first error; the status is the worst seen.
    pub fn script(&mut self, src: &str) -> (Status, Vec<Outcome>) {
        let mut outcomes = Vec::new();
        let mut status = Status::Ok;
        for line in src.lines() {
            let Some(o) = self.line(line) else { continue };
            status = worst(status, o.status);
            let stop = o.status == Status::Error;
            outcomes.push(o);
            if stop {
                break;
            }
        }
        (status, outcomes)
    }

    pub fn repl(&mut self, input: impl BufRead, mut out: impl Write, format: Format) -> std::io::Result<()> {
        let prompt = format == Format::Text;
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        for line in input.lines() {
            let line = line?;
            if matches!(line.trim(), "quit" | "exit") {
                break;
            }
            if let Some(o) = self.line(&line) {
                writeln!(out, "{}", render(&o, format))?;
            }
            if prompt {
                write!(out, "> ")?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

fn worst(a: Status, b: Status) -> Status {
    if a.exit_code() >= b.exit_code() {
        a
    } else {
        b
    }
}

pub fn render(o: &Outcome, format: Format) -> String {
    match format {
        Format::Text => o.text.clone(),
        Format::Json => serde_json::to_string_pretty(&o.to_json()).expect("json"),
    }
}

fn write_report(path: &std::path::Path, o: &Outcome) -> CliResult<()> {
    write_json(path, &o.to_json())
}

fn write_json(path: &std::path::Path, j: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(j).expect("json");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Star { .. } => "star",
        Command::Grmul { .. } => "grmul",
        Command::CheckDf { .. } => "check-df",
        Command::FindRinv { .. } => "find-rinv",
        Command::TheoremA { .. } => "theoremA",
        Command::CaApply { .. } => "ca-apply",
        Command::CaCompose { .. } => "ca-compose",
        Command::CaEqual { .. } => "ca-equal",
        Command::CaSurjective { .. } => "ca-surjective",
        Command::CaInjective { .. } => "ca-injective",
        Command::GottschalkSweep { .. } => "gottschalk-sweep",
        Command::WindowMap { .. } => "window-map",
        Command::Pipeline { .. } => "pipeline",
        Command::Ladder { .. } => "ladder",
        Command::Run { .. } => "run",
        Command::Repl => "repl",
        Command::Schema => "schema",
    }
}

/// What a process should print and return.
#[derive(Debug, Default)]
pub struct Exit {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Exit {
    fn report(o: &Outcome, format: Format) -> Exit {
        Exit::with(o.status, render(o, format), format)
    }

    /// Text-mode errors go to stderr; JSON always goes to stdout.
    fn with(status: Status, text: String, format: Format) -> Exit {
        let code = status.exit_code();
        if status == Status::Error && format == Format::Text {
            Exit { code, stdout: String::new(), stderr: text }
        } else {
            Exit { code, stdout: text, stderr: String::new() }
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn run_args<I, T>(args: I, stdin: impl BufRead, stdout: impl Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Exit { code: 2, stdout: String::new(), stderr: e.to_string() },
        Err(e) => return Exit { code: 0, stdout: e.to_string(), stderr: String::new() },
    };
    let format = cli.global.format.unwrap_or_default();
    let mut session = Session::new();
    match &cli.command {
        Command::Run { file } => {
            if let Err(e) = session.apply(&cli.global) {
                return Exit::report(&Outcome::error("run", &e), format);
            }
            let src = match std::fs::read_to_string(file) {
                Ok(s) => s,
                Err(e) => {
                    let e = CliError::Io(format!("{}: {e}", file.display()));
                    return Exit::report(&Outcome::error("run", &e), format);
                }
            };
            let (status, outcomes) = session.script(&src);
            let summary = serde_json::json!({
                "version": REPORT_VERSION,
                "command": "run",
                "status": status.as_str(),
                "result": { "lines": outcomes.len(), "outcomes": outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>() },
            });
            if let Some(path) = &cli.global.emit {
                if let Err(e) = write_json(path, &summary) {
                    return Exit::report(&Outcome::error("run", &e), format);
                }
            }
            let out = match format {
                Format::Text => outcomes.iter().map(|o| o.text.as_str()).collect::<Vec<_>>().join("\n"),
                Format::Json => serde_json::to_string_pretty(&summary).expect("json"),
            };
            Exit::with(status, out, format)
        }
        Command::Repl => {
            if let Err(e) = session.apply(&cli.global) {
                return Exit::report(&Outcome::error("repl", &e), format);
            }
            match session.repl(stdin, stdout, format) {
                Ok(()) => Exit::default(),
                Err(e) => Exit { code: 2, stdout: String::new(), stderr: format!("error: {e}") },
            }
        }
        _ => Exit::report(&session.command(&cli), format),
    }
}
