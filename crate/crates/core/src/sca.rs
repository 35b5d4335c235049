//! Cellular automata over groups with table or polynomial local rules.
//!
//! A configuration `c: G -> A` is mapped to `τ(c)(g) = μ(m ↦ c(g·m))` for
//! `m` in the memory set. Only finite windows are ever represented.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::fields::{Fe, Field};
use crate::group_ring::GroupRingMatrix;
use crate::groups::{Group, GroupElem, MemorySet};
use crate::linalg::Matrix;
use crate::near_ring::NearRingElem;
use crate::poly::{Monomial, Poly, DEFAULT_TERM_BUDGET};

/// Default cap on the rows of any materialized table.
pub const ENUMERATION_BUDGET: u64 = 1 << 22;

/// The variable `x_{at,coord}`: coordinate `coord` of the cell at offset `at`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub at: GroupElem,
    pub coord: usize,
}

impl Cell {
    pub fn new(at: GroupElem, coord: usize) -> Self {
        Cell { at, coord }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alphabet {
    Finite(Arc<[String]>),
    /// `k^dim`; finite when `k` is.
    Affine {
        field: Field,
        dim: usize,
    },
}

impl Alphabet {
    pub fn labels(labels: impl IntoIterator<Item = impl Into<String>>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidArgument("alphabet labels must be distinct".into()));
        }
        Ok(Alphabet::Finite(labels.into()))
    }

    /// Labels `0, 1, ..., k-1`.
    pub fn numbered(k: usize) -> Result<Self> {
        Self::labels((0..k).map(|i| i.to_string()))
    }

    pub fn affine(field: &Field, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("affine alphabet needs dimension at least 1".into()));
        }
        Ok(Alphabet::Affine { field: field.clone(), dim })
    }

    pub fn size(&self) -> Option<u64> {
        match self {
            Alphabet::Finite(l) => Some(l.len() as u64),
            Alphabet::Affine { field, dim } => field.order().and_then(|q| q.checked_pow(*dim as u32)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    pub fn dim(&self) -> usize {
        match self {
            Alphabet::Finite(_) => 1,
            Alphabet::Affine { dim, .. } => *dim,
        }
    }

    pub fn field(&self) -> Option<&Field> {
        match self {
            Alphabet::Affine { field, .. } => Some(field),
            Alphabet::Finite(_) => None,
        }
    }

    fn symbol_count(&self) -> Result<u32> {
        self.size()
            .and_then(|s| u32::try_from(s).ok())
            .ok_or_else(|| Error::EnumerationBudgetExceeded { budget: u32::MAX as u64, needed: self.size().unwrap_or(u64::MAX) as u128 })
    }

    /// Encodes a value as a symbol in `0..size`; vectors use base `q`, first coordinate lowest.
    pub fn symbol_of(&self, v: &Value) -> Result<u32> {
        self.check_value(v)?;
        match v {
            Value::Sym(s) => Ok(*s),
            Value::Vector(xs) => {
                let q = self.field().and_then(Field::order).ok_or_else(|| mismatch("alphabet is infinite"))?;
                let code = xs.iter().rev().fold(0u64, |acc, x| match x {
                    Fe::F(a) => acc * q + a,
                    Fe::Q(_) => unreachable!(),
                });
                u32::try_from(code).map_err(|_| Error::EnumerationBudgetExceeded { budget: u32::MAX as u64, needed: code as u128 })
            }
        }
    }

    pub fn value_of(&self, s: u32) -> Value {
        match self {
            Alphabet::Finite(_) => Value::Sym(s),
            Alphabet::Affine { field, dim } => {
                let q = field.order().expect("symbols exist only for finite alphabets");
                let mut s = s as u64;
                let mut out = Vec::with_capacity(*dim);
                for _ in 0..*dim {
                    out.push(Fe::F(s % q));
                    s /= q;
                }
                Value::Vector(out)
            }
        }
    }

    pub fn check_value(&self, v: &Value) -> Result<()> {
        match (self, v) {
            (Alphabet::Finite(l), Value::Sym(s)) if (*s as usize) < l.len() => Ok(()),
            (Alphabet::Affine { field, dim }, Value::Vector(xs)) if xs.len() == *dim => {
                xs.iter().try_for_each(|x| field.check(x)).map_err(|e| Error::AlphabetMismatch(e.to_string()))
            }
            _ => Err(Error::AlphabetMismatch(format!("value {v:?} is not a letter of {self}"))),
        }
    }

    pub fn format_value(&self, v: &Value) -> String {
        match (self, v) {
            (Alphabet::Finite(l), Value::Sym(s)) => l.get(*s as usize).cloned().unwrap_or_else(|| format!("?{s}")),
            (Alphabet::Affine { field, dim: 1 }, Value::Vector(xs)) => field.format(&xs[0]),
            (Alphabet::Affine { field, .. }, Value::Vector(xs)) => {
                let parts: Vec<String> = xs.iter().map(|x| field.format(x)).collect();
                format!("({})", parts.join(","))
            }
            _ => format!("{v:?}"),
        }
    }

    pub fn zero_value(&self) -> Value {
        match self {
            Alphabet::Finite(_) => Value::Sym(0),
            Alphabet::Affine { field, dim } => Value::Vector(vec![field.zero(); *dim]),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Finite(l) => write!(f, "{{{}}}", l.join(",")),
            Alphabet::Affine { field, dim: 1 } => write!(f, "{field}"),
            Alphabet::Affine { field, dim } => write!(f, "{field}^{dim}"),
        }
    }
}

/// One cell's letter: a label index for finite sets, a coordinate vector for affine alphabets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Sym(u32),
    Vector(Vec<Fe>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalRule {
    /// Output symbol for each input, indexed by `Σ s_j |A|^j` over the memory in order.
    Table(Arc<[u32]>),
    /// One polynomial per output coordinate in the variables `x_{m,i}`.
    Poly(Vec<Poly<Cell>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularAutomaton {
    group: Group,
    alphabet: Alphabet,
    memory: MemorySet,
    rule: LocalRule,
}

/// An assignment of letters to a finite window of the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub window: MemorySet,
    pub values: Vec<Value>,
}

impl Pattern {
    pub fn new(window: MemorySet, values: Vec<Value>) -> Result<Self> {
        if window.len() != values.len() {
            return Err(Error::InvalidArgument(format!("{} values for a window of {}", values.len(), window.len())));
        }
        Ok(Pattern { window, values })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (GroupElem, Value)>) -> Result<Self> {
        let mut pairs: Vec<(GroupElem, Value)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("pattern assigns a cell twice".into()));
        }
        let (window, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Ok(Pattern { window: MemorySet::new(window), values })
    }

    /// Consecutive integers starting at `start`, for patterns over ℤ.
    pub fn word(start: i64, values: Vec<Value>) -> Self {
        let window = MemorySet::ints(start..start + values.len() as i64);
        Pattern { window, values }
    }

    pub fn get(&self, g: &GroupElem) -> Option<&Value> {
        self.window.index_of(g).map(|i| &self.values[i])
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    /// `(g·p)(g·e) = p(e)`.
    pub fn translate(&self, group: &Group, g: &GroupElem) -> Result<Self> {
        Self::from_pairs(
            self.window.iter().zip(&self.values).map(|(e, v)| group.mul(g, e).map(|ge| (ge, v.clone()))).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn restrict_to(&self, window: &MemorySet) -> Result<Self> {
        let values = window
            .iter()
            .map(|g| self.get(g).cloned().ok_or_else(|| Error::InvalidArgument("window is not covered by the pattern".into())))
            .collect::<Result<_>>()?;
        Ok(Pattern { window: window.clone(), values })
    }
}

fn digits(mut idx: u64, base: u64, len: usize, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..len {
        out.push((idx % base) as u32);
        idx /= base;
    }
}

fn table_rows(size: u64, len: usize, budget: u64) -> Result<u64> {
    match size.checked_pow(len as u32) {
        Some(n) if n <= budget => Ok(n),
        Some(n) => Err(Error::EnumerationBudgetExceeded { budget, needed: n as u128 }),
        None => Err(Error::EnumerationBudgetExceeded { budget, needed: (size as u128).saturating_pow(len as u32) }),
    }
}

/// `x_{h,i} ↦ x_{g·h,i}`.
fn translate_poly(group: &Group, g: &GroupElem, p: &Poly<Cell>, field: &Field) -> Poly<Cell> {
    p.map_vars(|c| Cell::new(group.mul_unchecked(g, &c.at), c.coord), field)
}

impl CellularAutomaton {
    pub fn new(group: &Group, alphabet: Alphabet, memory: MemorySet, rule: LocalRule) -> Result<Self> {
        if memory.is_empty() {
            return Err(Error::InvalidArgument("memory set must be nonempty".into()));
        }
        for m in &memory {
            group.check(m)?;
        }
        match &rule {
            LocalRule::Table(t) => {
                let size = alphabet.size().ok_or_else(|| Error::AlphabetMismatch("table rules need a finite alphabet".into()))?;
                let rows = size.checked_pow(memory.len() as u32);
                if rows != Some(t.len() as u64) {
                    return Err(Error::InvalidArgument(format!("table has {} rows, expected {size}^{}", t.len(), memory.len())));
                }
                if t.iter().any(|&s| s as u64 >= size) {
                    return Err(Error::AlphabetMismatch("table output outside the alphabet".into()));
                }
            }
            LocalRule::Poly(outs) => {
                let Alphabet::Affine { field, dim } = &alphabet else {
                    return Err(Error::AlphabetMismatch("polynomial rules need an affine alphabet".into()));
                };
                if outs.len() != *dim {
                    return Err(Error::InvalidArgument(format!("{} output polynomials for dimension {dim}", outs.len())));
                }
                for p in outs {
                    p.check_coeffs(field)?;
                    for c in p.variables() {
                        if !memory.contains(&c.at) || c.coord >= *dim {
                            return Err(Error::InvalidArgument(format!(
                                "variable x[{},{}] is outside the declared memory",
                                group.format_elem(&c.at),
                                c.coord + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(CellularAutomaton { group: group.clone(), alphabet, memory, rule })
    }

    /// Builds a polynomial rule whose memory is exactly the set of offsets it mentions (or `{1_G}`).
    pub fn from_polys(group: &Group, field: &Field, outputs: Vec<Poly<Cell>>) -> Result<Self> {
        let mut memory: MemorySet = outputs.iter().flat_map(|p| p.variables()).map(|c| c.at).collect();
        if memory.is_empty() {
            memory = MemorySet::singleton(group.identity());
        }
        let dim = outputs.len();
        Self::new(group, Alphabet::affine(field, dim)?, memory, LocalRule::Poly(outputs))
    }

    pub fn identity(group: &Group, alphabet: Alphabet) -> Self {
        let memory = MemorySet::singleton(group.identity());
        let rule = match &alphabet {
            Alphabet::Finite(l) => LocalRule::Table((0..l.len() as u32).collect()),
            Alphabet::Affine { field, dim } => {
                LocalRule::Poly((0..*dim).map(|i| Poly::var(Cell::new(group.identity(), i), field)).collect())
            }
        };
        CellularAutomaton { group: group.clone(), alphabet, memory, rule }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn memory(&self) -> &MemorySet {
        &self.memory
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn table(&self) -> Option<&[u32]> {
        match &self.rule {
            LocalRule::Table(t) => Some(t),
            LocalRule::Poly(_) => None,
        }
    }

    pub fn polys(&self) -> Option<&[Poly<Cell>]> {
        match &self.rule {
            LocalRule::Poly(p) => Some(p),
            LocalRule::Table(_) => None,
        }
    }

    /// `μ` on one memory assignment, inputs aligned with `memory()`.
    pub fn local(&self, inputs: &[Value]) -> Result<Value> {
        match &self.rule {
            LocalRule::Table(t) => {
                let size = self.alphabet.size().unwrap();
                let mut idx = 0u64;
                for v in inputs.iter().rev() {
                    idx = idx * size + self.alphabet.symbol_of(v)? as u64;
                }
                Ok(self.alphabet.value_of(t[idx as usize]))
            }
            LocalRule::Poly(outs) => {
                for v in inputs {
                    self.alphabet.check_value(v)?;
                }
                let field = self.alphabet.field().unwrap();
                let vals = outs
                    .iter()
                    .map(|p| {
                        p.eval(
                            |c| {
                                let Value::Vector(xs) = &inputs[self.memory.index_of(&c.at).unwrap()] else { unreachable!() };
                                xs[c.coord].clone()
                            },
                            field,
                        )
                    })
                    .collect();
                Ok(Value::Vector(vals))
            }
        }
    }

    /// `μ` on symbols; the alphabet must be finite.
    pub fn local_sym(&self, syms: &[u32]) -> u32 {
        match &self.rule {
            LocalRule::Table(t) => {
                let size = self.alphabet.size().unwrap();
                let idx = syms.iter().rev().fold(0u64, |acc, &s| acc * size + s as u64);
                t[idx as usize]
            }
            LocalRule::Poly(_) => {
                let inputs: Vec<Value> = syms.iter().map(|&s| self.alphabet.value_of(s)).collect();
                let out = self.local(&inputs).expect("symbols decode to valid letters");
                self.alphabet.symbol_of(&out).expect("finite alphabet")
            }
        }
    }

    /// Same automaton with an explicit table rule.
    pub fn materialize(&self, budget: u64) -> Result<Self> {
        if let LocalRule::Table(_) = self.rule {
            return Ok(self.clone());
        }
        let size = self.alphabet.symbol_count()? as u64;
        let rows = table_rows(size, self.memory.len(), budget)?;
        let len = self.memory.len();
        let table: Vec<u32> = (0..rows)
            .into_par_iter()
            .map_init(Vec::new, |buf, idx| {
                digits(idx, size, len, buf);
                self.local_sym(buf)
            })
            .collect();
        Ok(CellularAutomaton { rule: LocalRule::Table(table.into()), ..self.clone() })
    }

    /// Same function with memory enlarged to `memory ⊇ self.memory`.
    pub fn with_memory(&self, memory: &MemorySet, budget: u64) -> Result<Self> {
        if !self.memory.is_subset(memory) {
            return Err(Error::InvalidArgument("new memory must contain the old one".into()));
        }
        if &self.memory == memory {
            return Ok(self.clone());
        }
        match &self.rule {
            LocalRule::Poly(_) => Ok(CellularAutomaton { memory: memory.clone(), ..self.clone() }),
            LocalRule::Table(_) => {
                let size = self.alphabet.size().unwrap();
                let rows = table_rows(size, memory.len(), budget)?;
                let pos: Vec<usize> = self.memory.iter().map(|m| memory.index_of(m).unwrap()).collect();
                let table: Vec<u32> = (0..rows)
                    .into_par_iter()
                    .map_init(
                        || (Vec::new(), Vec::new()),
                        |(buf, sub), idx| {
                            digits(idx, size, memory.len(), buf);
                            sub.clear();
                            sub.extend(pos.iter().map(|&p| buf[p]));
                            self.local_sym(sub)
                        },
                    )
                    .collect();
                Ok(CellularAutomaton { memory: memory.clone(), rule: LocalRule::Table(table.into()), ..self.clone() })
            }
        }
    }

    pub fn format_rule(&self) -> String {
        match &self.rule {
            LocalRule::Table(t) => format!("table[{}]", t.len()),
            LocalRule::Poly(outs) => {
                let field = self.alphabet.field().unwrap();
                let dim = self.alphabet.dim();
                let parts: Vec<String> = outs.iter().map(|p| p.format(field, |c| format_cell(&self.group, c, dim))).collect();
                if parts.len() == 1 {
                    parts.into_iter().next().unwrap()
                } else {
                    format!("({})", parts.join(", "))
                }
            }
        }
    }
}

/// `x[g]` in dimension 1, `x[g,i]` (1-based `i`) otherwise.
pub fn format_cell(group: &Group, c: &Cell, dim: usize) -> String {
    if dim == 1 {
        format!("x[{}]", group.format_elem(&c.at))
    } else {
        format!("x[{},{}]", group.format_elem(&c.at), c.coord + 1)
    }
}

impl fmt::Display for CellularAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ca over {} alphabet {} memory {} rule {}",
            self.group.name(),
            self.alphabet,
            self.group.format_set(&self.memory),
            self.format_rule()
        )
    }
}

fn same_setting(a: &CellularAutomaton, b: &CellularAutomaton) -> Result<()> {
    if a.group != b.group {
        return Err(mismatch(format!("groups {} and {} differ", a.group.name(), b.group.name())));
    }
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch(format!("alphabets {} and {} differ", a.alphabet, b.alphabet)));
    }
    Ok(())
}

/// Evaluates `τ` on a finite pattern; the output lives on `{g : gM ⊆ E}`.
pub fn apply_pattern(tau: &CellularAutomaton, p: &Pattern) -> Result<Pattern> {
    for v in &p.values {
        tau.alphabet.check_value(v)?;
    }
    let group = &tau.group;
    let candidates: MemorySet =
        p.window.iter().flat_map(|e| tau.memory.iter().map(move |m| group.mul_unchecked(e, &group.inv_unchecked(m)))).collect();
    let mut window = Vec::new();
    let mut values = Vec::new();
    let mut inputs = Vec::with_capacity(tau.memory.len());
    for g in &candidates {
        inputs.clear();
        for m in &tau.memory {
            match p.get(&group.mul_unchecked(g, m)) {
                Some(v) => inputs.push(v.clone()),
                None => break,
            }
        }
        if inputs.len() == tau.memory.len() {
            values.push(tau.local(&inputs)?);
            window.push(g.clone());
        }
    }
    Ok(Pattern { window: MemorySet::new(window), values })
}

/// `σ ∘ τ`, with memory `M_σ·M_τ`.
pub fn compose(sigma: &CellularAutomaton, tau: &CellularAutomaton) -> Result<CellularAutomaton> {
    compose_with_budget(sigma, tau, DEFAULT_TERM_BUDGET, ENUMERATION_BUDGET)
}

pub fn compose_with_budget(
    sigma: &CellularAutomaton,
    tau: &CellularAutomaton,
    term_budget: usize,
    table_budget: u64,
) -> Result<CellularAutomaton> {
    same_setting(sigma, tau)?;
    let group = &sigma.group;
    let memory = group.product_set(&sigma.memory, &tau.memory)?;
    match (&sigma.rule, &tau.rule) {
        (LocalRule::Poly(outer), LocalRule::Poly(inner)) => {
            let field = sigma.alphabet.field().unwrap();
            let outs = outer
                .iter()
                .map(|p| p.substitute(|c| Ok(translate_poly(group, &c.at, &inner[c.coord], field)), field, term_budget))
                .collect::<Result<Vec<_>>>()?;
            CellularAutomaton::new(group, sigma.alphabet.clone(), memory, LocalRule::Poly(outs))
        }
        _ => {
            let sigma = sigma.materialize(table_budget)?;
            let tau = tau.materialize(table_budget)?;
            let size = sigma.alphabet.size().unwrap();
            let rows = table_rows(size, memory.len(), table_budget)?;
            // positions in the composite memory of m·h, for m ∈ M_σ, h ∈ M_τ
            let pos: Vec<Vec<usize>> = sigma
                .memory
                .iter()
                .map(|m| tau.memory.iter().map(|h| memory.index_of(&group.mul_unchecked(m, h)).unwrap()).collect())
                .collect();
            let table: Vec<u32> = (0..rows)
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new(), Vec::new()),
                    |(buf, inner, outer), idx| {
                        digits(idx, size, memory.len(), buf);
                        outer.clear();
                        for row in &pos {
                            inner.clear();
                            inner.extend(row.iter().map(|&p| buf[p]));
                            outer.push(tau.local_sym(inner));
                        }
                        sigma.local_sym(outer)
                    },
                )
                .collect();
            CellularAutomaton::new(group, sigma.alphabet.clone(), memory, LocalRule::Table(table.into()))
        }
    }
}

/// The induced map `A^{M²} -> A^M`.
#[derive(Clone, Debug)]
pub struct WindowMap {
    pub domain: MemorySet,
    pub codomain: MemorySet,
    pub kind: WindowMapKind,
}

#[derive(Clone, Debug)]
pub enum WindowMapKind {
    /// Output index for every input index; indices are `Σ s_j |A|^j` over the window in order.
    Table { alphabet_size: u64, rows: Vec<u64> },
    /// For each `g ∈ M`, the output polynomials in the variables `x_{h,i}`, `h ∈ M²`.
    Poly(Vec<Vec<Poly<Cell>>>),
}

impl WindowMap {
    /// Number of distinct outputs, for table maps.
    pub fn image_size(&self) -> Option<u64> {
        match &self.kind {
            WindowMapKind::Table { alphabet_size, rows } => {
                let total = alphabet_size.pow(self.codomain.len() as u32) as usize;
                let mut seen = vec![false; total];
                let mut count = 0;
                for &r in rows {
                    if !std::mem::replace(&mut seen[r as usize], true) {
                        count += 1;
                    }
                }
                Some(count)
            }
            WindowMapKind::Poly(_) => None,
        }
    }

    /// `Γ_M = A^M`, for table maps.
    pub fn is_surjective(&self) -> Option<bool> {
        match &self.kind {
            WindowMapKind::Table { alphabet_size, .. } => Some(self.image_size()? == alphabet_size.pow(self.codomain.len() as u32)),
            WindowMapKind::Poly(_) => None,
        }
    }
}

/// Builds `τ⁺_M` after symmetrizing `M`; `M` must contain the memory of `τ`.
pub fn window_map(tau: &CellularAutomaton, m: &MemorySet, budget: u64) -> Result<WindowMap> {
    let group = &tau.group;
    let m = group.symmetrize(m)?;
    if !tau.memory.is_subset(&m) {
        return Err(Error::InvalidArgument(format!(
            "window {} does not contain the memory {}",
            group.format_set(&m),
            group.format_set(&tau.memory)
        )));
    }
    let domain = group.product_set(&m, &m)?;
    let too_many_rows = |s: u64| s.checked_pow(domain.len() as u32).map_or(true, |n| n > budget);
    match &tau.rule {
        LocalRule::Poly(outs) if tau.alphabet.size().map_or(true, too_many_rows) => {
            let field = tau.alphabet.field().unwrap();
            let per_cell = m.iter().map(|g| outs.iter().map(|p| translate_poly(group, g, p, field)).collect()).collect();
            Ok(WindowMap { domain, codomain: m, kind: WindowMapKind::Poly(per_cell) })
        }
        _ => {
            let size = tau.alphabet.symbol_count()? as u64;
            let rows_n = table_rows(size, domain.len(), budget)?;
            let pos: Vec<Vec<usize>> =
                m.iter().map(|g| tau.memory.iter().map(|h| domain.index_of(&group.mul_unchecked(g, h)).unwrap()).collect()).collect();
            let tau = tau.materialize(budget)?;
            let rows: Vec<u64> = (0..rows_n)
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new()),
                    |(buf, sub), idx| {
                        digits(idx, size, domain.len(), buf);
                        let mut out = 0u64;
                        for row in pos.iter().rev() {
                            sub.clear();
                            sub.extend(row.iter().map(|&p| buf[p]));
                            out = out * size + tau.local_sym(sub) as u64;
                        }
                        out
                    },
                )
                .collect();
            Ok(WindowMap { domain, codomain: m, kind: WindowMapKind::Table { alphabet_size: size, rows } })
        }
    }
}

/// `ψ(A)`: the linear automaton on `k^n` given by `x ↦ A·x`.
pub fn psi_from_matrix(a: &GroupRingMatrix) -> Result<CellularAutomaton> {
    let (group, field, n) = (a.group(), a.field(), a.size());
    let outs = (0..n)
        .map(|i| {
            Poly::from_terms(
                (0..n).flat_map(|j| a.get(i, j).terms().map(move |(h, c)| (Monomial::var(Cell::new(h.clone(), j)), c.clone()))),
                field,
            )
        })
        .collect();
    let mut memory = a.support();
    if memory.is_empty() {
        memory = MemorySet::singleton(group.identity());
    }
    CellularAutomaton::new(group, Alphabet::affine(field, n)?, memory, LocalRule::Poly(outs))
}

/// `Ψ(α)`: the automaton on `k` whose rule is `α` with `X_g ↦ x_g`.
pub fn psi_from_nearring(alpha: &NearRingElem) -> Result<CellularAutomaton> {
    let (group, field) = (alpha.group(), alpha.field());
    let rule = alpha.poly().map_vars(|g| Cell::new(g.clone(), 0), field);
    let memory = alpha.support().union(&MemorySet::singleton(group.identity()));
    CellularAutomaton::new(group, Alphabet::affine(field, 1)?, memory, LocalRule::Poly(vec![rule]))
}

/// Moves the rule coefficients of a polynomial automaton into `F_{p^level}`.
pub fn transfer(tau: &CellularAutomaton, level: u32) -> Result<CellularAutomaton> {
    let (Alphabet::Affine { field, dim }, LocalRule::Poly(outs)) = (&tau.alphabet, &tau.rule) else {
        return Err(Error::AlphabetMismatch("restriction needs a polynomial rule on an affine alphabet".into()));
    };
    if field.order().is_none() {
        return Err(Error::WrongCharacteristic);
    }
    let target = Field::gf(field.characteristic(), level)?;
    let outs = outs
        .iter()
        .map(|p| {
            let terms = p.terms().map(|(m, c)| field.transfer(c, &target).map(|c| (m.clone(), c))).collect::<Result<Vec<_>>>()?;
            Ok(Poly::from_terms(terms, &target))
        })
        .collect::<Result<Vec<_>>>()?;
    CellularAutomaton::new(&tau.group, Alphabet::affine(&target, *dim)?, tau.memory.clone(), LocalRule::Poly(outs))
}

/// `τ` restricted to `(F_{p^level})^n`, as a table.
pub fn restrict(tau: &CellularAutomaton, level: u32, budget: u64) -> Result<CellularAutomaton> {
    transfer(tau, level)?.materialize(budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleEquality {
    pub as_polynomials: bool,
    pub as_functions: Verdict,
}

/// Compares two local rules after padding to a common memory.
///
/// Table rules carry no polynomial, so for them `as_polynomials` reports function equality.
pub fn rule_equal(tau: &CellularAutomaton, sigma: &CellularAutomaton) -> Result<RuleEquality> {
    rule_equal_with_budget(tau, sigma, ENUMERATION_BUDGET)
}

pub fn rule_equal_with_budget(tau: &CellularAutomaton, sigma: &CellularAutomaton, budget: u64) -> Result<RuleEquality> {
    same_setting(tau, sigma)?;
    let memory = tau.memory.union(&sigma.memory);
    let symbolic = match (&tau.rule, &sigma.rule) {
        (LocalRule::Poly(a), LocalRule::Poly(b)) => Some(a == b),
        _ => None,
    };
    let as_functions = match (symbolic, tau.alphabet.size()) {
        // distinct polynomials over an infinite field are distinct functions
        (Some(eq), None) => Verdict::from(eq),
        (Some(true), _) => Verdict::True,
        (_, Some(_)) => match (tau.with_memory(&memory, budget), sigma.with_memory(&memory, budget)) {
            (Ok(a), Ok(b)) => match (a.materialize(budget), b.materialize(budget)) {
                (Ok(a), Ok(b)) => Verdict::from(a.rule == b.rule),
                _ => Verdict::Unknown,
            },
            _ => Verdict::Unknown,
        },
        (None, None) => unreachable!("table rules have finite alphabets"),
    };
    let as_polynomials = symbolic.unwrap_or(as_functions == Verdict::True);
    Ok(RuleEquality { as_polynomials, as_functions })
}

/// `out_i = Σ_m Σ_j L_m[i][j] x_{m,j} + b_i` for rules of degree ≤ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub memory: MemorySet,
    pub linear: Vec<Matrix>,
    pub constant: Vec<Fe>,
}

pub fn affine_form(tau: &CellularAutomaton) -> Option<AffineForm> {
    let (Alphabet::Affine { field, dim }, LocalRule::Poly(outs)) = (&tau.alphabet, &tau.rule) else {
        return None;
    };
    if !outs.iter().all(Poly::is_affine) {
        return None;
    }
    let mut linear = vec![Matrix::zeros(*dim, *dim, field); tau.memory.len()];
    let mut constant = vec![field.zero(); *dim];
    for (i, p) in outs.iter().enumerate() {
        for (m, c) in p.terms() {
            match m.powers() {
                [] => constant[i] = c.clone(),
                [(cell, 1)] => linear[tau.memory.index_of(&cell.at).unwrap()].set(i, cell.coord, c.clone()),
                _ => unreachable!("affine polynomials have degree ≤ 1"),
            }
        }
    }
    Some(AffineForm { memory: tau.memory.clone(), linear, constant })
}
