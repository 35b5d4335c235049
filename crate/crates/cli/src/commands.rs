//! Subcommands and their reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use nearca::group_ring::{check_direct_finiteness, find_right_inverse, InverseSearch};
use nearca::near_ring::verify_theorem_a;
use nearca::pipeline::{bijectivity_ladder, conclude_two_sided, run_restriction_ladder, PipelineConfig};
use nearca::sca::{
    apply_pattern, compose_with_budget, rule_equal, window_map, Alphabet, CellularAutomaton, Pattern, Value as Letter, ENUMERATION_BUDGET,
};
use nearca::surjunctivity::{
    gottschalk_sweep, is_injective, is_injective_periodic, is_surjective, DecisionReport, LineRule, Oracles, Witness, GRAPH_BUDGET,
};
use nearca::{Error, Field, Group, GroupElem, MemorySet};

use crate::error::{CliError, CliResult};
use crate::value::{print, Ctx, Value};

#[derive(Parser, Debug)]
#[command(name = "nearca", version, about = "Group rings, the near ring R(k,G) and cellular automata over groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Z, Z^d, C<n>, D<n>, S<n>, Q8, F<r>, F(g,h,...), csv:PATH
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Q, GF(q), GF(p^r)
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Alphabet dimension n for rules in x[g,i]
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Largest restriction level for pipeline and ladder
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Monomial budget for polynomial products and substitutions
    #[arg(long = "budget-terms", global = true)]
    pub budget_terms: Option<usize>,
    /// Also write the JSON report to this file
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression and print its canonical form; the words are joined by spaces
    Eval {
        #[arg(required = true, num_args = 1.., trailing_var_arg = true, allow_hyphen_values = true)]
        expr: Vec<String>,
    },
    /// α ⋆ β in R(k,G)
    Star {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(allow_hyphen_values = true)]
        beta: String,
    },
    /// Product in k[G] or Mat_n(k[G])
    Grmul {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Whether ab = 1 and ba = 1
    CheckDf {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Search for b with ab = 1
    FindRinv {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 3)]
        support_radius: u32,
        #[arg(long, default_value_t = 4096)]
        max_unknowns: usize,
    },
    /// Whether α ⋆ β and β ⋆ α are both the identity X[1_G]
    #[command(name = "theoremA", alias = "theorem-a")]
    TheoremA {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(allow_hyphen_values = true)]
        beta: String,
    },
    /// Apply an automaton to a finite pattern
    CaApply {
        #[arg(allow_hyphen_values = true)]
        rule: String,
        /// Letters of a word on Z, separated by spaces
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        start: i64,
        /// `g=v` assignments for any group
        #[arg(long = "cell", allow_hyphen_values = true)]
        cells: Vec<String>,
    },
    /// σ ∘ τ
    CaCompose {
        #[arg(allow_hyphen_values = true)]
        sigma: String,
        #[arg(allow_hyphen_values = true)]
        tau: String,
    },
    /// Compare two local rules as polynomials and as functions
    CaEqual {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Decide surjectivity; a negative verdict comes with an orphan
    CaSurjective {
        #[arg(allow_hyphen_values = true)]
        rule: String,
    },
    /// Decide injectivity; a negative verdict comes with two configurations of equal image
    CaInjective {
        #[arg(allow_hyphen_values = true)]
        rule: String,
        /// Only on period-n configurations of Z
        #[arg(long)]
        period: Option<usize>,
    },
    /// Decide every rule with N letters; report injective-but-not-surjective rules
    GottschalkSweep {
        #[arg(long)]
        alphabet: u64,
        /// Neighbourhood {-R..R}
        #[arg(long, conflicts_with = "memory")]
        radius: Option<usize>,
        /// Neighbourhood {0..M-1}
        #[arg(long)]
        memory: Option<usize>,
        #[arg(long)]
        orphan_len: Option<usize>,
        #[arg(long)]
        max_period: Option<usize>,
    },
    /// The window map A^{M^2} -> A^M and whether it is onto
    WindowMap {
        #[arg(allow_hyphen_values = true)]
        rule: String,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Restriction ladder for σ ∘ τ = Id and the two-sided conclusion
    Pipeline {
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value = "2..8")]
        quotients: String,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Use linear algebra instead of tables for affine rules
        #[arg(long)]
        linear: bool,
    },
    /// Injectivity and surjectivity of every finite-field restriction of one automaton
    Ladder {
        #[arg(allow_hyphen_values = true)]
        rule: String,
    },
    /// Run a script: one declaration or command per line
    Run { file: PathBuf },
    /// Interactive session
    Repl,
    /// Print the JSON schema of reports
    Schema,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Error => "error",
        }
    }

    fn from_verdict(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Negative
        }
    }
}

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: String,
    pub status: Status,
    pub result: Json,
    pub text: String,
}

impl Outcome {
    pub fn new(command: &str, ok: bool, result: Json, text: String) -> Self {
        Outcome { command: command.to_string(), status: Status::from_verdict(ok), result, text }
    }

    pub fn error(command: &str, e: &CliError) -> Self {
        let span = e.span().map(|s| json!([s.start, s.end]));
        let result = json!({ "kind": e.kind(), "message": e.to_string(), "span": span });
        Outcome { command: command.to_string(), status: Status::Error, result, text: format!("error: {e}") }
    }

    pub fn to_json(&self) -> Json {
        let key = if self.status == Status::Error { "error" } else { "result" };
        json!({ "version": REPORT_VERSION, "command": self.command, "status": self.status.as_str(), key: self.result })
    }
}

/// The resolved context a command runs in.
pub struct Env<'a> {
    pub group: Group,
    pub field: Field,
    pub dim: usize,
    pub depth: u32,
    pub term_budget: usize,
    pub bindings: &'a std::collections::HashMap<String, Value>,
}

impl Env<'_> {
    fn ctx(&self) -> Ctx<'_> {
        Ctx { group: &self.group, field: &self.field, dim: self.dim, term_budget: self.term_budget, bindings: self.bindings }
    }

    pub fn eval_expr(&self, src: &str) -> CliResult<Value> {
        self.ctx().eval_str(src)
    }

    fn eval(&self, arg: &str, src: &str) -> CliResult<Value> {
        self.ctx().eval_str(src).map_err(|e| e.in_arg(arg))
    }

    fn automaton(&self, arg: &str, src: &str) -> CliResult<CellularAutomaton> {
        let v = self.eval(arg, src)?;
        self.ctx().as_automaton(v, &(0..src.len())).map_err(|e| e.in_arg(arg))
    }
}

fn decision_json(d: &DecisionReport, alphabet: &Alphabet) -> Json {
    let mut j = serde_json::to_value(d).expect("report serializes");
    if let Some(w) = &d.witness {
        j["witness_text"] = json!(witness_text(w, alphabet));
    }
    j
}

fn letters(word: &[u32], alphabet: &Alphabet) -> String {
    word.iter().map(|&s| alphabet.format_value(&alphabet.value_of(s))).collect::<Vec<_>>().join(" ")
}

fn witness_text(w: &Witness, a: &Alphabet) -> String {
    match w {
        Witness::Orphan { word } => format!("orphan word: {}", letters(word, a)),
        Witness::OrphanConfiguration { configuration } => format!("configuration outside the image: {}", letters(configuration, a)),
        Witness::Collision { left, right } => format!(
            "collision: ...({})* {} ({})*... and ...({})* {} ({})*...",
            letters(&left.left_period, a),
            letters(&left.center, a),
            letters(&left.right_period, a),
            letters(&right.left_period, a),
            letters(&right.center, a),
            letters(&right.right_period, a)
        ),
        Witness::FiniteCollision { left, right } => {
            format!("collision: {} and {}", letters(left, a), letters(right, a))
        }
    }
}

fn parse_letter(src: &str, alphabet: &Alphabet, env: &Env) -> CliResult<Letter> {
    match alphabet {
        Alphabet::Finite(labels) => labels
            .iter()
            .position(|l| l == src)
            .map(|i| Letter::Sym(i as u32))
            .ok_or_else(|| CliError::Usage(format!("{src:?} is not a letter of {alphabet}"))),
        Alphabet::Affine { field, dim } => {
            let ctx = Ctx { field, ..env.ctx() };
            let coords = match ctx.eval_str(src)? {
                Value::Scalar(c, _) => vec![c],
                Value::Cells(c) if c.outputs.iter().all(|p| p.variables().is_empty()) => {
                    c.outputs.iter().map(|p| p.constant_term(field)).collect()
                }
                other => return Err(CliError::Usage(format!("{src:?} is a {}, not a letter", other.kind()))),
            };
            if coords.len() != *dim {
                return Err(CliError::Usage(format!("{src:?} is not a letter of {alphabet}")));
            }
            Ok(Letter::Vector(coords))
        }
    }
}

/// Splits at commas and whitespace outside parentheses.
fn split_items(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' | ' ' | '\t' if depth <= 0 => {
                out.push(&src[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&src[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// `{a, b}` or `a, b`; elements with commas such as `(1,2)` stay whole.
pub fn parse_set(group: &Group, src: &str) -> CliResult<MemorySet> {
    let inner = src.trim();
    let inner = inner.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(inner);
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    let elems = parts
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| group.parse_elem(s))
        .collect::<nearca::Result<Vec<GroupElem>>>()?;
    if elems.is_empty() {
        return Err(CliError::Usage("empty window".into()));
    }
    Ok(MemorySet::new(elems))
}

fn pattern_text(group: &Group, alphabet: &Alphabet, p: &Pattern) -> Json {
    let cells: Vec<Json> =
        p.window.iter().zip(&p.values).map(|(g, v)| json!({ "at": group.format_elem(g), "value": alphabet.format_value(v) })).collect();
    json!(cells)
}

pub fn dispatch(cmd: &Command, env: &Env) -> CliResult<Outcome> {
    let budget = env.term_budget;
    match cmd {
        Command::Eval { expr } => {
            let v = env.eval("expr", &expr.join(" "))?;
            let s = print(&v);
            Ok(Outcome::new("eval", true, json!({ "kind": v.kind().to_string(), "value": s }), s.clone()))
        }
        Command::Star { alpha, beta } => {
            let ctx = env.ctx();
            let a = ctx.as_near_ring(env.eval("alpha", alpha)?, &(0..alpha.len()))?;
            let b = ctx.as_near_ring(env.eval("beta", beta)?, &(0..beta.len()))?;
            let p = a.star_with_budget(&b, budget)?;
            let s = p.format();
            Ok(Outcome::new("star", true, json!({ "product": s, "degree": p.degree(), "terms": p.poly().len() }), s.clone()))
        }
        Command::Grmul { a, b } => {
            let (x, y) = (env.eval("a", a)?, env.eval("b", b)?);
            let ctx = env.ctx();
            let s = match (x, y) {
                (x @ Value::Matrix(_), y) | (x, y @ Value::Matrix(_)) => {
                    let (x, y) = (ctx.as_matrix(x, &(0..a.len()))?, ctx.as_matrix(y, &(0..b.len()))?);
                    ctx.mat_mul(&x, &y, &(0..0)).map_err(CliError::unspanned)?.format()
                }
                (x, y) => {
                    let (x, y) = (ctx.as_group_ring(x, &(0..a.len()))?, ctx.as_group_ring(y, &(0..b.len()))?);
                    ctx.gr_mul(&x, &y, &(0..0)).map_err(CliError::unspanned)?.format()
                }
            };
            Ok(Outcome::new("grmul", true, json!({ "product": s }), s.clone()))
        }
        Command::CheckDf { a, b } => {
            let ctx = env.ctx();
            let x = ctx.as_matrix(env.eval("a", a)?, &(0..a.len()))?;
            let y = ctx.as_matrix(env.eval("b", b)?, &(0..b.len()))?;
            let r = check_direct_finiteness(&x, &y)?;
            let text = format!("ab = 1: {}\nba = 1: {}", r.ab_is_one, r.ba_is_one);
            Ok(Outcome::new(
                "check-df",
                r.ab_is_one && r.ba_is_one,
                json!({ "ab_is_one": r.ab_is_one, "ba_is_one": r.ba_is_one, "violation": r.is_violation() }),
                text,
            ))
        }
        Command::FindRinv { a, support_radius, max_unknowns } => {
            let x = env.ctx().as_matrix(env.eval("a", a)?, &(0..a.len()))?;
            let opts = InverseSearch { support_radius: *support_radius, max_unknowns: *max_unknowns };
            let exhaustive = x.group().is_finite();
            match find_right_inverse(&x, opts) {
                Ok(Some(b)) => {
                    let s = b.format();
                    Ok(Outcome::new(
                        "find-rinv",
                        true,
                        json!({ "found": true, "conclusive": true, "inverse": s }),
                        format!("right inverse: {s}"),
                    ))
                }
                Ok(None) => Ok(Outcome::new(
                    "find-rinv",
                    false,
                    json!({ "found": false, "conclusive": exhaustive, "inverse": null }),
                    "no right inverse exists".into(),
                )),
                Err(Error::SearchBudgetExceeded(why)) => Ok(Outcome::new(
                    "find-rinv",
                    false,
                    json!({ "found": false, "conclusive": false, "inverse": null, "reason": why }),
                    format!("inconclusive: {why}"),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::TheoremA { alpha, beta } => {
            let ctx = env.ctx();
            let a = ctx.as_near_ring(env.eval("alpha", alpha)?, &(0..alpha.len()))?;
            let b = ctx.as_near_ring(env.eval("beta", beta)?, &(0..beta.len()))?;
            let r = verify_theorem_a(&a, &b, budget)?;
            let one = format!("X[{}]", env.group.format_elem(&env.group.identity()));
            let text = format!("alpha ** beta = {one}: {}\nbeta ** alpha = {one}: {}", r.is_left_inverse, r.is_right_inverse);
            Ok(Outcome::new("theoremA", r.is_left_inverse && r.is_right_inverse, serde_json::to_value(r).unwrap(), text))
        }
        Command::CaApply { rule, word, start, cells } => {
            let t = env.automaton("rule", rule)?;
            let (group, alphabet) = (t.group(), t.alphabet());
            let pattern = match (word, cells.is_empty()) {
                (Some(w), true) => {
                    if !group.is_integers() {
                        return Err(CliError::Usage("--word needs the group Z; use --cell g=v".into()));
                    }
                    let values = split_items(w).into_iter().map(|s| parse_letter(s, alphabet, env)).collect::<CliResult<Vec<_>>>()?;
                    Pattern::word(*start, values)
                }
                (None, false) => {
                    let pairs = cells
                        .iter()
                        .map(|c| {
                            let (g, v) = c.split_once('=').ok_or_else(|| CliError::Usage(format!("--cell {c:?} is not g=v")))?;
                            Ok((group.parse_elem(g)?, parse_letter(v.trim(), alphabet, env)?))
                        })
                        .collect::<CliResult<Vec<_>>>()?;
                    Pattern::from_pairs(pairs)?
                }
                _ => return Err(CliError::Usage("give exactly one of --word or --cell".into())),
            };
            let out = apply_pattern(&t, &pattern)?;
            let text = out
                .window
                .iter()
                .zip(&out.values)
                .map(|(g, v)| format!("{}: {}", group.format_elem(g), alphabet.format_value(v)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::new(
                "ca-apply",
                true,
                json!({ "input": pattern_text(group, alphabet, &pattern), "output": pattern_text(group, alphabet, &out) }),
                text,
            ))
        }
        Command::CaCompose { sigma, tau } => {
            let s = env.automaton("sigma", sigma)?;
            let t = env.automaton("tau", tau)?;
            let c = compose_with_budget(&s, &t, budget, ENUMERATION_BUDGET)?;
            let memory = c.group().format_set(c.memory());
            Ok(Outcome::new("ca-compose", true, json!({ "rule": c.format_rule(), "memory": memory }), c.to_string()))
        }
        Command::CaEqual { a, b } => {
            let x = env.automaton("a", a)?;
            let y = env.automaton("b", b)?;
            let r = rule_equal(&x, &y)?;
            let j = serde_json::to_value(r).unwrap();
            let text = format!("as polynomials: {}\nas functions: {}", j["as_polynomials"], j["as_functions"]);
            Ok(Outcome::new("ca-equal", r.as_polynomials, j, text))
        }
        Command::CaSurjective { rule } => {
            let t = env.automaton("rule", rule)?;
            let d = is_surjective(&t)?;
            let text = surj_text("surjective", &d, t.alphabet());
            Ok(Outcome::new("ca-surjective", d.verdict, decision_json(&d, t.alphabet()), text))
        }
        Command::CaInjective { rule, period } => {
            let t = env.automaton("rule", rule)?;
            let d = match period {
                None => is_injective(&t)?,
                Some(n) => {
                    if *n == 0 {
                        return Err(CliError::Usage("--period must be positive".into()));
                    }
                    is_injective_periodic(&LineRule::new(&t, ENUMERATION_BUDGET)?, *n, GRAPH_BUDGET)?
                }
            };
            let text = surj_text("injective", &d, t.alphabet());
            Ok(Outcome::new("ca-injective", d.verdict, decision_json(&d, t.alphabet()), text))
        }
        Command::GottschalkSweep { alphabet, radius, memory, orphan_len, max_period } => {
            let m = match (radius, memory) {
                (Some(r), None) => {
                    r.checked_mul(2).and_then(|d| d.checked_add(1)).ok_or_else(|| CliError::Usage("radius too large".into()))?
                }
                (None, Some(m)) => *m,
                _ => return Err(CliError::Usage("give --radius or --memory".into())),
            };
            let oracles = match (orphan_len, max_period) {
                (None, None) => None,
                (o, p) => Some(Oracles { orphan_len: o.unwrap_or(8).min(16), max_period: p.unwrap_or(10).min(16) }),
            };
            let r = gottschalk_sweep(*alphabet, m, oracles)?;
            let text = format!(
                "{} rules: {} injective, {} surjective, {} violations, {} oracle disagreements",
                r.rules, r.injective, r.surjective, r.violations, r.oracle_disagreements
            );
            let ok = r.violations == 0 && r.oracle_disagreements == 0;
            Ok(Outcome::new("gottschalk-sweep", ok, serde_json::to_value(r).unwrap(), text))
        }
        Command::WindowMap { rule, window } => {
            let t = env.automaton("rule", rule)?;
            let m = match window {
                Some(w) => parse_set(t.group(), w)?,
                None => t.memory().clone(),
            };
            let w = window_map(&t, &m, ENUMERATION_BUDGET)?;
            let surjective = w.is_surjective();
            let j = json!({
                "domain": t.group().format_set(&w.domain),
                "codomain": t.group().format_set(&w.codomain),
                "image_size": w.image_size(),
                "surjective": surjective,
            });
            let text = format!(
                "window {} -> {}: {}",
                t.group().format_set(&w.domain),
                t.group().format_set(&w.codomain),
                match surjective {
                    Some(true) => "surjective",
                    Some(false) => "not surjective",
                    None => "unknown (infinite alphabet)",
                }
            );
            Ok(Outcome::new("window-map", surjective != Some(false), j, text))
        }
        Command::Pipeline { left, right, quotients, window, linear } => {
            let s = env.automaton("left", left)?;
            let t = env.automaton("right", right)?;
            let cfg = PipelineConfig {
                depth: env.depth,
                quotients: crate::spec::parse_range(quotients)?,
                window: window.as_deref().map(|w| parse_set(s.group(), w)).transpose()?,
                term_budget: budget,
                prefer_linear: *linear,
                ..Default::default()
            };
            let mut report = run_restriction_ladder(&s, &t, &cfg)?;
            let two_sided = conclude_two_sided(&s, &t, &mut report, &cfg)?;
            let mut text = String::new();
            for l in &report.levels {
                text.push_str(&format!(
                    "level {} ({}, {:?}): section {}, injective {}, quotients {}, window surjective {}, inverse {}\n",
                    l.r,
                    l.field,
                    l.method,
                    l.section_ok,
                    l.injective.map_or("n/a".into(), |b| b.to_string()),
                    if l.quotients.iter().all(|q| q.injective) { "ok" } else { "FAILED" },
                    l.window_surjective,
                    l.inverse_ok.map_or("n/a".into(), |b| b.to_string()),
                ));
            }
            for d in &report.diagnostics {
                text.push_str(&format!("note: {d}\n"));
            }
            text.push_str(&format!("tau o sigma = Id: {two_sided}"));
            Ok(Outcome::new("pipeline", two_sided, serde_json::to_value(&report).unwrap(), text))
        }
        Command::Ladder { rule } => {
            let t = env.automaton("rule", rule)?;
            let recs = bijectivity_ladder(&t, &PipelineConfig { depth: env.depth, ..Default::default() })?;
            let ok = !recs.is_empty() && recs.iter().all(|r| r.injective && r.surjective);
            let text = recs
                .iter()
                .map(|r| format!("level {} ({}): injective {}, surjective {}", r.r, r.field, r.injective, r.surjective))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::new("ladder", ok, json!({ "levels": recs }), text))
        }
        Command::Schema => {
            let schema: Json = serde_json::from_str(SCHEMA).expect("schema is valid JSON");
            Ok(Outcome::new("schema", true, schema, SCHEMA.trim_end().to_string()))
        }
        Command::Run { .. } | Command::Repl => Err(CliError::Usage("run and repl cannot be nested".into())),
    }
}

fn surj_text(what: &str, d: &DecisionReport, alphabet: &Alphabet) -> String {
    let mut s = format!("{what}: {} (by {:?})", d.verdict, d.method);
    if let Some(w) = &d.witness {
        s.push('\n');
        s.push_str(&witness_text(w, alphabet));
    }
    s
}

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");
