//! Mutated and random malformed inputs; every entry point must reject them without panicking.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearca_cli::spec::{parse_field, parse_group};
use nearca_cli::value::{print, Ctx};
use nearca_cli::{CliError, Session};

pub const SEEDS: &[&str] = &[
    "X[g]*X[h]^2 + 1 ** X[s]^2 - X[t]^3",
    "[1] + 2*[-1]",
    "(2*[3])^-1",
    "[[1, [1]], [0, 1]] * [[1, -[1]], [0, 1]]",
    "x[0] + x[1]^2",
    "(x[0,1], x[1,2] + 1)",
    "ca(x[1] + x[0])",
    "compose(psi([1] + 1), Psi(X[-1] - 1))",
    "restrict(ca(w*x[0]), 2)",
    "elementary(110)",
    "rule(3, 2, 77)",
    "phi([1] - 1) ** phi([1] + 1)",
    "-2/3 * w^5",
    "X[(1,2)] ** X[(0,-1)]",
];

pub const TOKENS: &[&str] = &[
    "(",
    ")",
    "[",
    "]",
    "[[",
    "]]",
    "**",
    "*",
    "^",
    "^-",
    "-",
    "+",
    "/",
    ",",
    " ",
    "x[",
    "X[",
    "w",
    "0",
    "1",
    "-1",
    "99999999999999999999999",
    "4096",
    "0/0",
    "1/0",
    "ca(",
    "psi(",
    "Psi(",
    "phi(",
    "rule(",
    "elementary(",
    "restrict(",
    "compose(",
    "g",
    "(1,2)",
    "a^-1",
    "#",
    "é",
    "\u{0}",
    "]]]",
    "((",
    "x[0,",
    "x[0,0]",
    "x[0,99]",
    "^4097",
    "^-4097",
];

pub fn mutate(rng: &mut ChaCha8Rng, src: &str) -> String {
    let mut chars: Vec<char> = src.chars().collect();
    for _ in 0..rng.gen_range(1..4) {
        let at = rng.gen_range(0..=chars.len());
        match rng.gen_range(0..4) {
            0 if !chars.is_empty() => {
                let end = (at + rng.gen_range(1..4)).min(chars.len());
                chars.drain(at.min(end)..end);
            }
            1 if chars.len() > 1 => {
                let b = rng.gen_range(0..chars.len());
                let a = at.min(chars.len() - 1);
                chars.swap(a, b);
            }
            _ => {
                let tok = TOKENS.choose(rng).unwrap();
                for (i, c) in tok.chars().enumerate() {
                    chars.insert(at + i, c);
                }
            }
        }
    }
    chars.into_iter().collect()
}

pub fn mutated(rng: &mut ChaCha8Rng) -> String {
    let seed = *SEEDS.choose(rng).unwrap();
    mutate(rng, seed)
}

pub fn random_text(rng: &mut ChaCha8Rng) -> String {
    (0..rng.gen_range(0..12)).map(|_| *TOKENS.choose(rng).unwrap()).collect()
}

pub fn check_error(src: &str, e: &CliError) {
    assert!(!e.to_string().is_empty());
    if matches!(e.kind(), "syntax" | "unknown_name" | "type_mismatch") {
        let span = e.span().unwrap_or_else(|| panic!("{src:?}: {e} has no position"));
        assert!(span.start <= span.end && span.end <= src.len(), "{src:?}: span {span:?} out of range");
    }
}

/// Evaluates `cases` mutated or random expressions; returns how many were rejected.
pub fn expressions(cases: usize, seed: u64) -> usize {
    let settings = [("Z", "Q"), ("Z", "GF(2)"), ("Z^2", "GF(4)"), ("S3", "GF(3)"), ("F(g,h,s,t)", "Q")];
    let bindings = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0;
    for case in 0..cases {
        let src = if case % 5 == 0 { random_text(&mut rng) } else { mutated(&mut rng) };
        let (g, f) = settings[case % settings.len()];
        let (group, field) = (parse_group(g).unwrap(), parse_field(f).unwrap());
        let ctx = Ctx { group: &group, field: &field, dim: 1 + case % 2, term_budget: 20_000, bindings: &bindings };
        let result = catch_unwind(AssertUnwindSafe(|| match ctx.eval_str(&src) {
            Ok(v) => {
                let _ = ctx.eval_str(&print(&v));
            }
            Err(e) => {
                check_error(&src, &e);
                errors += 1;
            }
        }));
        assert!(result.is_ok(), "panicked on {src:?} over {g} / {f}");
    }
    errors
}

/// Runs `cases` command lines with mutated arguments; every report must match the schema.
pub fn command_lines(cases: usize, seed: u64) {
    let commands: &[(&str, usize)] = &[
        ("eval", 1),
        ("star", 2),
        ("grmul", 2),
        ("check-df", 2),
        ("theoremA", 2),
        ("ca-compose", 2),
        ("ca-equal", 2),
        ("ca-surjective", 1),
        ("ca-injective", 1),
        ("window-map", 1),
        ("ca-apply", 1),
    ];
    let flags = [
        vec!["--group", "C0"],
        vec!["--group", "Z^9"],
        vec!["--group", "S7"],
        vec!["--field", "GF(6)"],
        vec!["--field", "GF(2^70)"],
        vec!["--field", "GF(2)"],
        vec!["--dim", "0"],
        vec!["--depth", "99"],
        vec!["--budget-terms", "0"],
        vec!["--format", "yaml"],
        vec!["--period", "0"],
        vec!["--word", "0 1 q"],
        vec!["--cell", "0"],
        vec!["--window", "{0,,1}"],
        vec![],
    ];
    let schema = super::schema();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let (cmd, arity) = *commands.choose(&mut rng).unwrap();
        let mut args: Vec<String> = vec!["--format".into(), "json".into()];
        args.extend(flags.choose(&mut rng).unwrap().iter().map(|s| s.to_string()));
        args.push(cmd.into());
        for _ in 0..arity + rng.gen_range(0..2) - usize::from(rng.gen_bool(0.1)) {
            args.push(mutated(&mut rng));
        }
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let exit = catch_unwind(|| super::run(&argv)).unwrap_or_else(|_| panic!("panicked on {argv:?}"));
        assert!((0..=2).contains(&exit.code), "{argv:?}");
        if !exit.stdout.is_empty() {
            let report: serde_json::Value = serde_json::from_str(&exit.stdout).unwrap();
            super::assert_valid(&schema, &report);
        } else {
            assert_eq!(exit.code, 2, "{argv:?}");
            assert!(!exit.stderr.is_empty());
        }
    }
}

/// Feeds `cases` malformed lines to one session.
pub fn script_lines(cases: usize, seed: u64) {
    let heads = ["let a =", "let", "group", "group G =", "field", "field K = GF(", "dim", "eval", "#", "star", "run", "repl", "'", "\""];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut session = Session::new();
    for _ in 0..cases {
        let line = format!("{} {}", heads.choose(&mut rng).unwrap(), mutated(&mut rng));
        let outcome = catch_unwind(AssertUnwindSafe(|| session.line(&line))).unwrap_or_else(|_| panic!("panicked on {line:?}"));
        if let Some(o) = outcome {
            assert!((0..=2).contains(&o.status.exit_code()));
        }
    }
}
