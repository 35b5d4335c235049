//! Random well-formed sources for every value kind.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearca::{Field, Group};
use nearca_cli::spec::{parse_field, parse_group};
use nearca_cli::value::{print, Ctx, Value};

pub struct Setting {
    pub group: Group,
    pub field: Field,
    pub dim: usize,
}

pub fn settings() -> Vec<Setting> {
    let groups = ["Z", "Z^2", "C4", "S3", "Q8", "F2"];
    let fields = ["Q", "GF(5)", "GF(4)", "GF(9)", "GF(2)"];
    let mut out = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        for (j, f) in fields.iter().enumerate() {
            let dim = if (i + j) % 3 == 0 { 2 } else { 1 };
            out.push(Setting { group: parse_group(g).unwrap(), field: parse_field(f).unwrap(), dim });
        }
    }
    out
}

pub fn coeff(rng: &mut ChaCha8Rng, field: &Field) -> String {
    match field.order() {
        None => {
            let n = rng.gen_range(-9i64..=9);
            if rng.gen_bool(0.3) {
                format!("({n}/{})", rng.gen_range(1..=7))
            } else {
                format!("({n})")
            }
        }
        Some(q) if q == field.characteristic() => format!("{}", rng.gen_range(0..q)),
        Some(_) => format!("({}*w^{} + {})", rng.gen_range(1..3), rng.gen_range(0..6), rng.gen_range(0..3)),
    }
}

pub fn elem(rng: &mut ChaCha8Rng, group: &Group) -> String {
    group.format_elem(&group.random_elem(rng, 2))
}

pub fn sum(terms: Vec<String>) -> String {
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(if terms.len() % 2 == 0 { " + " } else { " - " })
    }
}

pub fn group_ring(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    let n = rng.gen_range(0..4);
    sum((0..n).map(|_| format!("{}*[{}]", coeff(rng, &s.field), elem(rng, &s.group))).collect())
}

pub fn matrix(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    let n = rng.gen_range(1..=2);
    square(rng, s, n)
}

pub fn square(rng: &mut ChaCha8Rng, s: &Setting, n: usize) -> String {
    let rows: Vec<String> = (0..n).map(|_| format!("[{}]", (0..n).map(|_| group_ring(rng, s)).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

pub fn monomial(rng: &mut ChaCha8Rng, s: &Setting, var: impl Fn(&mut ChaCha8Rng) -> String) -> String {
    let k = rng.gen_range(0..3);
    let mut parts = vec![coeff(rng, &s.field)];
    for _ in 0..k {
        let e = rng.gen_range(1..=3);
        parts.push(format!("{}^{e}", var(rng)));
    }
    parts.join("*")
}

pub fn near_ring(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    let n = rng.gen_range(0..4);
    sum((0..n).map(|_| monomial(rng, s, |r| format!("X[{}]", elem(r, &s.group)))).collect())
}

pub fn cell_poly(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    let n = rng.gen_range(0..4);
    let dim = s.dim;
    let var = |r: &mut ChaCha8Rng| {
        let g = elem(r, &s.group);
        if dim == 1 {
            format!("x[{g}]")
        } else {
            format!("x[{g}, {}]", r.gen_range(1..=dim))
        }
    };
    sum((0..n).map(|_| monomial(rng, s, var)).collect())
}

pub fn cells(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    if s.dim == 1 {
        cell_poly(rng, s)
    } else {
        format!("({})", (0..s.dim).map(|_| cell_poly(rng, s)).collect::<Vec<_>>().join(", "))
    }
}

pub fn automaton(rng: &mut ChaCha8Rng, s: &Setting) -> String {
    let choice = if s.dim == 1 { rng.gen_range(0..6) } else { [0, 1, 2, 5][rng.gen_range(0..4)] };
    match choice {
        0 => format!("ca({})", cells(rng, s)),
        1 => format!("compose(ca({}), ca({}))", cells(rng, s), cells(rng, s)),
        2 => ["elementary(30)", "elementary(110)", "rule(3, 2, 1234)", "rule(2, 1, 2)"][rng.gen_range(0..4)].to_string(),
        3 => format!("psi({})", group_ring(rng, s)),
        4 => format!("Psi({})", near_ring(rng, s)),
        _ => format!("psi({})", square(rng, s, s.dim)),
    }
}

pub fn source(rng: &mut ChaCha8Rng, s: &Setting, kind: usize) -> String {
    match kind {
        0 => format!("{} * {}", coeff(rng, &s.field), coeff(rng, &s.field)),
        1 => format!("({}) * ({})", group_ring(rng, s), group_ring(rng, s)),
        2 => matrix(rng, s),
        3 => {
            let (a, b) = (near_ring(rng, s), near_ring(rng, s));
            if rng.gen_bool(0.5) {
                format!("({a}) ** ({b})")
            } else {
                format!("X[{}] ** ({a}) + ({b})", s.group.format_elem(&s.group.identity()))
            }
        }
        4 => cells(rng, s),
        _ => automaton(rng, s),
    }
}

pub fn with_ctx<T>(s: &Setting, f: impl FnOnce(&Ctx) -> T) -> T {
    let bindings = HashMap::new();
    f(&Ctx { group: &s.group, field: &s.field, dim: s.dim, term_budget: 100_000, bindings: &bindings })
}

pub fn eval(s: &Setting, src: &str) -> Value {
    with_ctx(s, |ctx| ctx.eval_str(src)).unwrap_or_else(|e| panic!("{src:?} over {} / {}: {e}", s.group.name(), s.field))
}

/// Constants print as bare scalars; reading one back in the original kind recovers the value.
pub fn read_back(s: &Setting, shown: &str, like: &Value) -> Value {
    let v = eval(s, shown);
    with_ctx(s, |ctx| ctx.as_kind_of(v, like)).unwrap()
}

/// Evaluates a random source, prints it and reads it back; returns the three texts on mismatch.
pub fn round_trip(seed: u64, which: usize, kind: usize) -> std::result::Result<(), String> {
    let all = settings();
    let s = &all[which];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let src = source(&mut rng, s, kind);
    let v = eval(s, &src);
    let shown = print(&v);
    let back = read_back(s, &shown, &v);
    if back != v || print(&back) != shown {
        return Err(format!("{src} printed as {shown}, read back as {}", print(&back)));
    }
    Ok(())
}
