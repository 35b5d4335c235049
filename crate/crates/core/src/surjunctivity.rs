//! Injectivity and surjectivity decisions for finite-alphabet automata over
//! finite groups (exhaustive) and over ℤ (de Bruijn graph algorithms).

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{GroupElem, GroupKind, MemorySet};
use crate::sca::{Alphabet, CellularAutomaton, LocalRule, ENUMERATION_BUDGET};
use crate::Group;

/// Cap on subset-construction states and pair-graph edges.
pub const GRAPH_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    SubsetConstruction,
    PairGraph,
    PeriodicPairGraph,
}

/// `... p p p c p' p' p' ...` with `center[0]` at position 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventuallyPeriodic {
    pub left_period: Vec<u32>,
    pub center: Vec<u32>,
    pub right_period: Vec<u32>,
}

impl EventuallyPeriodic {
    pub fn at(&self, i: i64) -> u32 {
        let c = self.center.len() as i64;
        if i < 0 {
            let p = self.left_period.len() as i64;
            self.left_period[(p - 1 - ((-i - 1) % p)) as usize]
        } else if i < c {
            self.center[i as usize]
        } else {
            let p = self.right_period.len() as i64;
            self.right_period[((i - c) % p) as usize]
        }
    }

    pub fn window(&self, from: i64, to: i64) -> Vec<u32> {
        (from..to).map(|i| self.at(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A finite word over ℤ with no preimage.
    Orphan { word: Vec<u32> },
    /// A configuration of a finite group, indexed like its elements, outside the image.
    OrphanConfiguration { configuration: Vec<u32> },
    /// Two distinct configurations on ℤ with the same image.
    Collision { left: EventuallyPeriodic, right: EventuallyPeriodic },
    /// Two distinct configurations of a finite group (or of ℤ/n) with the same image.
    FiniteCollision { left: Vec<u32>, right: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecisionReport {
    pub verdict: bool,
    pub method: Method,
    pub witness: Option<Witness>,
}

/// An automaton on ℤ with memory shifted to `[0, m)`; the shift changes neither
/// injectivity nor surjectivity.
#[derive(Clone, Debug)]
pub struct LineRule {
    pub k: u64,
    pub m: usize,
    /// Output for each word `Σ s_j k^j`, `s_0` leftmost.
    pub table: Arc<[u32]>,
    pub offset: i64,
}

impl LineRule {
    pub fn new(tau: &CellularAutomaton, budget: u64) -> Result<Self> {
        if !tau.group().is_integers() {
            return Err(match tau.group().kind() {
                GroupKind::FreeAbelian { .. } => Error::Undecidable(format!(
                    "injectivity and surjectivity are undecidable over {}; use finite quotients",
                    tau.group().name()
                )),
                _ => Error::InvalidArgument(format!("de Bruijn methods need the group Z, not {}", tau.group().name())),
            });
        }
        let k = tau.alphabet().size().ok_or_else(|| Error::AlphabetMismatch("alphabet must be finite".into()))?;
        let ints: Vec<i64> = tau.memory().iter().map(|g| g.as_int().unwrap()).collect();
        let (lo, hi) = (ints[0], *ints.last().unwrap());
        let interval = MemorySet::ints(lo..=hi);
        let full = tau.with_memory(&interval, budget)?.materialize(budget)?;
        let table: Arc<[u32]> = full.table().unwrap().into();
        Ok(LineRule { k, m: interval.len(), table, offset: lo })
    }

    pub fn from_table(k: u64, m: usize, table: Vec<u32>) -> Result<Self> {
        if m == 0 || k.checked_pow(m as u32) != Some(table.len() as u64) || table.iter().any(|&s| s as u64 >= k) {
            return Err(Error::InvalidArgument("table does not match alphabet and memory".into()));
        }
        Ok(LineRule { k, m, table: table.into(), offset: 0 })
    }

    fn vertices(&self) -> u64 {
        self.k.pow(self.m as u32 - 1)
    }

    fn word_index(&self, letters: &[u32]) -> u64 {
        letters.iter().rev().fold(0u64, |acc, &s| acc * self.k + s as u64)
    }

    /// Image of a finite word; length shrinks by `m - 1`.
    pub fn apply_word(&self, word: &[u32]) -> Vec<u32> {
        if word.len() < self.m {
            return Vec::new();
        }
        word.windows(self.m).map(|w| self.table[self.word_index(w) as usize]).collect()
    }

    /// Image of an `n`-periodic configuration given by one period.
    pub fn apply_periodic(&self, period: &[u32]) -> Vec<u32> {
        let n = period.len();
        (0..n)
            .map(|i| {
                let w: Vec<u32> = (0..self.m).map(|j| period[(i + j) % n]).collect();
                self.table[self.word_index(&w) as usize]
            })
            .collect()
    }

    /// Edges `(source, target)` of the de Bruijn graph grouped by output letter.
    fn edges_by_label(&self) -> Vec<Vec<(u32, u32)>> {
        let v = self.vertices();
        let mut by_label = vec![Vec::new(); self.k as usize];
        for (w, &a) in self.table.iter().enumerate() {
            let w = w as u64;
            by_label[a as usize].push(((w % v) as u32, (w / self.k) as u32));
        }
        by_label
    }

    /// Words grouped by output letter.
    fn words_by_label(&self) -> Vec<Vec<u32>> {
        let mut by_label = vec![Vec::new(); self.k as usize];
        for (w, &a) in self.table.iter().enumerate() {
            by_label[a as usize].push(w as u32);
        }
        by_label
    }
}

/// Surjectivity over ℤ by determinizing the de Bruijn automaton; the witness is a shortest orphan.
pub fn is_surjective_z(tau: &CellularAutomaton) -> Result<DecisionReport> {
    surjective_line(&LineRule::new(tau, ENUMERATION_BUDGET)?, GRAPH_BUDGET)
}

pub fn surjective_line(rule: &LineRule, budget: u64) -> Result<DecisionReport> {
    let v = rule.vertices() as usize;
    let words = v.div_ceil(64);
    let by_label = rule.edges_by_label();
    let mut start = vec![u64::MAX; words];
    if v % 64 != 0 {
        start[words - 1] = (1u64 << (v % 64)) - 1;
    }
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, u32)>> = vec![None];
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for (a, edges) in by_label.iter().enumerate() {
            let mut next = vec![0u64; words];
            let cur = &states[s];
            for &(src, dst) in edges {
                if cur[src as usize / 64] >> (src % 64) & 1 == 1 {
                    next[dst as usize / 64] |= 1 << (dst % 64);
                }
            }
            if index.contains_key(&next) {
                continue;
            }
            let id = states.len();
            parent.push(Some((s, a as u32)));
            let empty = next.iter().all(|&x| x == 0);
            index.insert(next.clone(), id);
            states.push(next);
            if empty {
                let mut word = Vec::new();
                let mut cur = id;
                while let Some((p, a)) = parent[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Ok(DecisionReport { verdict: false, method: Method::SubsetConstruction, witness: Some(Witness::Orphan { word }) });
            }
            if states.len() as u64 > budget {
                return Err(Error::EnumerationBudgetExceeded { budget, needed: states.len() as u128 });
            }
            queue.push_back(id);
        }
    }
    Ok(DecisionReport { verdict: true, method: Method::SubsetConstruction, witness: None })
}

/// Pair graph: vertices are pairs of de Bruijn vertices, edges pairs of words with equal output.
struct PairGraph {
    v: u64,
    k: u64,
    /// `(word_a, word_b)` per edge.
    edges: Vec<(u32, u32)>,
}

impl PairGraph {
    fn new(rule: &LineRule, budget: u64) -> Result<Self> {
        let by_label = rule.words_by_label();
        let total: u128 = by_label.iter().map(|ws| (ws.len() as u128).pow(2)).sum();
        if total > budget as u128 {
            return Err(Error::EnumerationBudgetExceeded { budget, needed: total });
        }
        let mut edges = Vec::with_capacity(total as usize);
        for ws in &by_label {
            for &a in ws {
                for &b in ws {
                    edges.push((a, b));
                }
            }
        }
        Ok(PairGraph { v: rule.vertices(), k: rule.k, edges })
    }

    fn source(&self, e: usize) -> usize {
        let (a, b) = self.edges[e];
        ((a as u64 % self.v) * self.v + b as u64 % self.v) as usize
    }

    fn target(&self, e: usize) -> usize {
        let (a, b) = self.edges[e];
        ((a as u64 / self.k) * self.v + b as u64 / self.k) as usize
    }

    fn vertex_count(&self) -> usize {
        (self.v * self.v) as usize
    }

    /// Edges lying on some bi-infinite path: prune vertices without in- or out-edges until stable.
    fn core(&self) -> Vec<bool> {
        let n = self.vertex_count();
        let mut alive_edge = vec![true; self.edges.len()];
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in 0..self.edges.len() {
            let (s, t) = (self.source(e), self.target(e));
            outdeg[s] += 1;
            indeg[t] += 1;
            out_edges[s].push(e);
            in_edges[t].push(e);
        }
        let mut dead = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0 || outdeg[x] == 0).collect();
        while let Some(x) = stack.pop() {
            if dead[x] {
                continue;
            }
            dead[x] = true;
            for &e in out_edges[x].iter().chain(&in_edges[x]) {
                if !alive_edge[e] {
                    continue;
                }
                alive_edge[e] = false;
                let (s, t) = (self.source(e), self.target(e));
                outdeg[s] -= 1;
                indeg[t] -= 1;
                for y in [s, t] {
                    if !dead[y] && (indeg[y] == 0 || outdeg[y] == 0) {
                        stack.push(y);
                    }
                }
            }
        }
        alive_edge
    }
}

/// Injectivity over ℤ; the witness is a pair of eventually periodic configurations with equal images.
pub fn is_injective_z(tau: &CellularAutomaton) -> Result<DecisionReport> {
    injective_line(&LineRule::new(tau, ENUMERATION_BUDGET)?, GRAPH_BUDGET)
}

pub fn injective_line(rule: &LineRule, budget: u64) -> Result<DecisionReport> {
    let graph = PairGraph::new(rule, budget)?;
    let alive = graph.core();
    let Some(bad) = (0..graph.edges.len()).find(|&e| alive[e] && graph.edges[e].0 != graph.edges[e].1) else {
        return Ok(DecisionReport { verdict: true, method: Method::PairGraph, witness: None });
    };
    let n = graph.vertex_count();
    let mut first_out = vec![usize::MAX; n];
    let mut first_in = vec![usize::MAX; n];
    for e in (0..graph.edges.len()).filter(|&e| alive[e]) {
        let (s, t) = (graph.source(e), graph.target(e));
        if first_out[s] == usize::MAX {
            first_out[s] = e;
        }
        if first_in[t] == usize::MAX {
            first_in[t] = e;
        }
    }
    // walk backwards from the bad edge until a vertex repeats
    let mut back: Vec<usize> = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut x = graph.source(bad);
    while !seen.contains_key(&x) {
        seen.insert(x, back.len());
        let e = first_in[x];
        back.push(e);
        x = graph.source(e);
    }
    let i = seen[&x];
    // forward order: cycle = back[i..] reversed, lead-in = back[..i] reversed
    let left_cycle: Vec<usize> = back[i..].iter().rev().copied().collect();
    let lead_in: Vec<usize> = back[..i].iter().rev().copied().collect();
    let mut fwd: Vec<usize> = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut y = graph.target(bad);
    while !seen.contains_key(&y) {
        seen.insert(y, fwd.len());
        let e = first_out[y];
        fwd.push(e);
        y = graph.target(e);
    }
    let j = seen[&y];
    let mut center: Vec<usize> = lead_in;
    center.push(bad);
    center.extend_from_slice(&fwd[..j]);
    let right_cycle = &fwd[j..];
    let k = rule.k;
    let letters = |edges: &[usize], side: usize| -> Vec<u32> {
        edges
            .iter()
            .map(|&e| {
                let w = if side == 0 { graph.edges[e].0 } else { graph.edges[e].1 };
                (w as u64 % k) as u32
            })
            .collect()
    };
    let config = |side| EventuallyPeriodic {
        left_period: letters(&left_cycle, side),
        center: letters(&center, side),
        right_period: letters(right_cycle, side),
    };
    Ok(DecisionReport {
        verdict: false,
        method: Method::PairGraph,
        witness: Some(Witness::Collision { left: config(0), right: config(1) }),
    })
}

/// Injectivity on `n`-periodic configurations, i.e. over the quotient ℤ/n.
///
/// Such a pair is a closed walk of length `n` in the pair graph through an off-diagonal edge.
/// Closed walks stay inside the core, so the search only visits core edges.
pub fn is_injective_periodic(rule: &LineRule, n: usize, budget: u64) -> Result<DecisionReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    let graph = PairGraph::new(rule, budget)?;
    let alive = graph.core();
    let vc = graph.vertex_count();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); vc];
    for e in (0..graph.edges.len()).filter(|&e| alive[e]) {
        out_edges[graph.source(e)].push(e);
    }
    let mut targets: Vec<usize> = Vec::new();
    let mut off_by_target: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in (0..graph.edges.len()).filter(|&e| alive[e] && graph.edges[e].0 != graph.edges[e].1) {
        let t = graph.target(e);
        off_by_target.entry(t).or_insert_with(|| {
            targets.push(t);
            Vec::new()
        });
        off_by_target.get_mut(&t).unwrap().push(e);
    }
    for &t in &targets {
        // layers[l][x]: edge used to first reach x at step l (usize::MAX = unreachable)
        let mut layers: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut current = vec![false; vc];
        current[t] = true;
        for _ in 1..n {
            let mut via = vec![usize::MAX; vc];
            let mut next = vec![false; vc];
            for x in (0..vc).filter(|&x| current[x]) {
                for &e in &out_edges[x] {
                    let y = graph.target(e);
                    if !next[y] {
                        next[y] = true;
                        via[y] = e;
                    }
                }
            }
            layers.push(via);
            current = next;
        }
        if let Some(&bad) = off_by_target[&t].iter().find(|&&e| current[graph.source(e)]) {
            let mut walk = vec![bad];
            let mut x = graph.source(bad);
            for via in layers.iter().rev() {
                let e = via[x];
                walk.push(e);
                x = graph.source(e);
            }
            walk.reverse();
            // walk starts at `t`; rotate so the bad edge comes first
            walk.rotate_right(1);
            let k = rule.k;
            let side = |s: usize| -> Vec<u32> {
                walk.iter()
                    .map(|&e| {
                        let w = if s == 0 { graph.edges[e].0 } else { graph.edges[e].1 };
                        (w as u64 % k) as u32
                    })
                    .collect()
            };
            return Ok(DecisionReport {
                verdict: false,
                method: Method::PeriodicPairGraph,
                witness: Some(Witness::FiniteCollision { left: side(0), right: side(1) }),
            });
        }
    }
    Ok(DecisionReport { verdict: true, method: Method::PeriodicPairGraph, witness: None })
}

fn finite_setup(tau: &CellularAutomaton, budget: u64) -> Result<(Vec<GroupElem>, CellularAutomaton, u64, u64)> {
    let group: &Group = tau.group();
    let elems = group.elements().map_err(|_| Error::InfiniteGroup)?;
    let k = tau.alphabet().size().ok_or_else(|| Error::AlphabetMismatch("alphabet must be finite".into()))?;
    let total = k
        .checked_pow(elems.len() as u32)
        .filter(|&t| t <= budget)
        .ok_or(Error::EnumerationBudgetExceeded { budget, needed: (k as u128).saturating_pow(elems.len() as u32) })?;
    Ok((elems, tau.materialize(budget)?, k, total))
}

/// All images of `A^G -> A^G`, configurations indexed by `Σ c(g_i) k^i`.
fn finite_images(tau: &CellularAutomaton, budget: u64) -> Result<(Vec<u64>, u64, usize)> {
    let (elems, tau, k, total) = finite_setup(tau, budget)?;
    let group = tau.group().clone();
    let pos: Vec<Vec<usize>> = elems
        .iter()
        .map(|g| {
            tau.memory()
                .iter()
                .map(|m| match group.mul(g, m).unwrap() {
                    GroupElem::Id(i) => i as usize,
                    _ => unreachable!(),
                })
                .collect()
        })
        .collect();
    let n = elems.len();
    let images = (0..total)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(cfg, sub), idx| {
                cfg.clear();
                let mut t = idx;
                for _ in 0..n {
                    cfg.push((t % k) as u32);
                    t /= k;
                }
                let mut out = 0u64;
                for row in pos.iter().rev() {
                    sub.clear();
                    sub.extend(row.iter().map(|&p| cfg[p]));
                    out = out * k + tau.local_sym(sub) as u64;
                }
                out
            },
        )
        .collect();
    Ok((images, k, n))
}

fn unpack(mut idx: u64, k: u64, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = (idx % k) as u32;
            idx /= k;
            d
        })
        .collect()
}

pub fn is_injective_finite(tau: &CellularAutomaton) -> Result<DecisionReport> {
    let (images, k, n) = finite_images(tau, ENUMERATION_BUDGET)?;
    let mut first: HashMap<u64, u64> = HashMap::with_capacity(images.len());
    for (idx, &img) in images.iter().enumerate() {
        if let Some(&prev) = first.get(&img) {
            return Ok(DecisionReport {
                verdict: false,
                method: Method::BruteForce,
                witness: Some(Witness::FiniteCollision { left: unpack(prev, k, n), right: unpack(idx as u64, k, n) }),
            });
        }
        first.insert(img, idx as u64);
    }
    Ok(DecisionReport { verdict: true, method: Method::BruteForce, witness: None })
}

pub fn is_surjective_finite(tau: &CellularAutomaton) -> Result<DecisionReport> {
    let (images, k, n) = finite_images(tau, ENUMERATION_BUDGET)?;
    let mut hit = vec![false; images.len()];
    for &img in &images {
        hit[img as usize] = true;
    }
    let verdict = match hit.iter().position(|&h| !h) {
        Some(missing) => {
            return Ok(DecisionReport {
                verdict: false,
                method: Method::BruteForce,
                witness: Some(Witness::OrphanConfiguration { configuration: unpack(missing as u64, k, n) }),
            })
        }
        None => true,
    };
    Ok(DecisionReport { verdict, method: Method::BruteForce, witness: None })
}

pub fn is_injective(tau: &CellularAutomaton) -> Result<DecisionReport> {
    if tau.group().is_finite() {
        is_injective_finite(tau)
    } else {
        is_injective_z(tau)
    }
}

pub fn is_surjective(tau: &CellularAutomaton) -> Result<DecisionReport> {
    if tau.group().is_finite() {
        is_surjective_finite(tau)
    } else {
        is_surjective_z(tau)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GottschalkReport {
    pub injective: DecisionReport,
    pub surjective: DecisionReport,
    /// Injective but not surjective; never expected on finite groups or ℤ.
    pub violation: bool,
}

pub fn check_gottschalk(tau: &CellularAutomaton) -> Result<GottschalkReport> {
    let injective = is_injective(tau)?;
    let surjective = is_surjective(tau)?;
    let violation = injective.verdict && !surjective.verdict;
    Ok(GottschalkReport { injective, surjective, violation })
}

/// Exhaustive oracle: is there an orphan of length `len`?
pub fn brute_force_orphan(rule: &LineRule, len: usize) -> Option<Vec<u32>> {
    let in_len = len + rule.m - 1;
    let total = rule.k.pow(in_len as u32);
    let out_total = rule.k.pow(len as u32) as usize;
    let mut hit = vec![false; out_total];
    let mut word = vec![0u32; in_len];
    for idx in 0..total {
        let mut t = idx;
        for w in word.iter_mut() {
            *w = (t % rule.k) as u32;
            t /= rule.k;
        }
        let img = rule.apply_word(&word);
        let code = img.iter().rev().fold(0u64, |acc, &s| acc * rule.k + s as u64);
        hit[code as usize] = true;
    }
    hit.iter().position(|&h| !h).map(|c| unpack(c as u64, rule.k, len))
}

/// Exhaustive oracle: a collision among `n`-periodic configurations.
pub fn brute_force_periodic_collision(rule: &LineRule, n: usize) -> Option<(Vec<u32>, Vec<u32>)> {
    let total = rule.k.pow(n as u32);
    let mut seen: HashMap<Vec<u32>, u64> = HashMap::new();
    for idx in 0..total {
        let period = unpack(idx, rule.k, n);
        let img = rule.apply_periodic(&period);
        if let Some(&prev) = seen.get(&img) {
            return Some((unpack(prev, rule.k, n), period));
        }
        seen.insert(img, idx);
    }
    None
}

/// Every output word of length `len` has exactly `k^{m-1}` preimages of length `len + m - 1`.
pub fn is_balanced(rule: &LineRule, len: usize) -> bool {
    let in_len = len + rule.m - 1;
    let mut counts = vec![0u64; rule.k.pow(len as u32) as usize];
    for idx in 0..rule.k.pow(in_len as u32) {
        let img = rule.apply_word(&unpack(idx, rule.k, in_len));
        let code = img.iter().rev().fold(0u64, |acc, &s| acc * rule.k + s as u64);
        counts[code as usize] += 1;
    }
    let expected = rule.vertices();
    counts.iter().all(|&c| c == expected)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub alphabet: u64,
    pub memory: usize,
    pub rules: u64,
    pub injective: u64,
    pub surjective: u64,
    pub violations: u64,
    /// Disagreements with the brute-force oracles (only when oracles are enabled).
    pub oracle_disagreements: u64,
    /// Non-surjective rules whose shortest orphan is longer than the oracle's word bound.
    pub orphans_beyond_oracle: u64,
    pub violating_rules: Vec<u64>,
    pub disagreeing_rules: Vec<u64>,
}

/// Oracle settings for a sweep: orphan words up to `orphan_len`, periods up to `max_period`.
#[derive(Clone, Copy, Debug)]
pub struct Oracles {
    pub orphan_len: usize,
    pub max_period: usize,
}

/// Table for rule number `idx`: output of word `w` is digit `w` of `idx` in base `k`.
pub fn rule_from_number(k: u64, m: usize, mut idx: u64) -> LineRule {
    let rows = k.pow(m as u32) as usize;
    let mut table = Vec::with_capacity(rows);
    for _ in 0..rows {
        table.push((idx % k) as u32);
        idx /= k;
    }
    LineRule { k, m, table: table.into(), offset: 0 }
}

/// Elementary rule `n` (neighbourhood `x_{-1} x_0 x_1` read as a binary number, high bit left).
pub fn elementary_rule(n: u8) -> LineRule {
    let table: Vec<u32> = (0..8u32)
        .map(|w| {
            let (l, c, r) = (w & 1, (w >> 1) & 1, (w >> 2) & 1);
            ((n as u32) >> (4 * l + 2 * c + r)) & 1
        })
        .collect();
    LineRule { k: 2, m: 3, table: table.into(), offset: -1 }
}

fn verify_collision(rule: &LineRule, left: &EventuallyPeriodic, right: &EventuallyPeriodic) -> bool {
    let span = left.center.len() as i64 + 4 * rule.m as i64 + 12;
    let (from, to) = (-span, 2 * span);
    let (a, b) = (left.window(from, to), right.window(from, to));
    a != b && rule.apply_word(&a) == rule.apply_word(&b)
}

/// Decides every rule with `k` letters and memory `[0, m)`; checks `injective ⇒ surjective`.
pub fn gottschalk_sweep(k: u64, m: usize, oracles: Option<Oracles>) -> Result<SweepReport> {
    if k < 2 || m == 0 {
        return Err(Error::InvalidArgument("a sweep needs at least 2 letters and a nonempty memory".into()));
    }
    let too_many = Error::EnumerationBudgetExceeded { budget: ENUMERATION_BUDGET, needed: u128::MAX };
    let rows = u32::try_from(m).ok().and_then(|m| k.checked_pow(m)).ok_or(too_many.clone())?;
    let rules = u32::try_from(rows).ok().and_then(|rows| k.checked_pow(rows)).filter(|&r| r <= ENUMERATION_BUDGET).ok_or(too_many)?;
    let results: Vec<Result<(bool, bool, bool, bool)>> = (0..rules)
        .into_par_iter()
        .map(|idx| {
            let rule = rule_from_number(k, m, idx);
            let inj = injective_line(&rule, GRAPH_BUDGET)?;
            let sur = surjective_line(&rule, GRAPH_BUDGET)?;
            let mut agree = true;
            let mut long_orphan = false;
            if let Some(o) = oracles {
                let orphan = brute_force_orphan(&rule, o.orphan_len);
                if sur.verdict {
                    agree &= orphan.is_none();
                } else if let Some(Witness::Orphan { word }) = &sur.witness {
                    // the bounded search cannot see longer orphans; check the witness itself
                    agree &= brute_force_orphan_word(&rule, word);
                    agree &= orphan.is_some() == (word.len() <= o.orphan_len);
                    long_orphan = word.len() > o.orphan_len;
                } else {
                    agree = false;
                }
                if inj.verdict {
                    agree &= (1..=o.max_period).all(|n| brute_force_periodic_collision(&rule, n).is_none());
                } else if let Some(Witness::Collision { left, right }) = &inj.witness {
                    agree &= verify_collision(&rule, left, right);
                }
                for n in 1..=o.max_period.min(6) {
                    let periodic = is_injective_periodic(&rule, n, GRAPH_BUDGET)?;
                    agree &= periodic.verdict == brute_force_periodic_collision(&rule, n).is_none();
                }
            }
            Ok((inj.verdict, sur.verdict, agree, long_orphan))
        })
        .collect();
    let mut report = SweepReport { alphabet: k, memory: m, rules, ..Default::default() };
    for (idx, r) in results.into_iter().enumerate() {
        let (inj, sur, agree, long_orphan) = r?;
        report.injective += u64::from(inj);
        report.orphans_beyond_oracle += u64::from(long_orphan);
        report.surjective += u64::from(sur);
        if inj && !sur {
            report.violations += 1;
            report.violating_rules.push(idx as u64);
        }
        if !agree {
            report.oracle_disagreements += 1;
            report.disagreeing_rules.push(idx as u64);
        }
    }
    Ok(report)
}

/// Whether `word` has no preimage, by exhaustive search.
pub fn brute_force_orphan_word(rule: &LineRule, word: &[u32]) -> bool {
    let in_len = word.len() + rule.m - 1;
    (0..rule.k.pow(in_len as u32)).all(|idx| rule.apply_word(&unpack(idx, rule.k, in_len)) != word)
}

/// A table automaton on ℤ with letters `0..k` from a line rule.
pub fn line_rule_automaton(rule: &LineRule) -> Result<CellularAutomaton> {
    let memory = MemorySet::ints(rule.offset..rule.offset + rule.m as i64);
    CellularAutomaton::new(&Group::integers(), Alphabet::numbered(rule.k as usize)?, memory, LocalRule::Table(rule.table.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Field;
    use crate::groups::GroupElem;
    use crate::poly::Poly;
    use crate::sca::Cell;
    use proptest::prelude::*;

    fn xv(k: i64, f: &Field) -> Poly<Cell> {
        Poly::var(Cell::new(GroupElem::int(k), 0), f)
    }

    fn xor() -> CellularAutomaton {
        let f2 = Field::gf(2, 1).unwrap();
        CellularAutomaton::from_polys(&Group::integers(), &f2, vec![xv(0, &f2).add(&xv(1, &f2), &f2)]).unwrap()
    }

    #[test]
    fn z_examples() {
        let f2 = Field::gf(2, 1).unwrap();
        let z = Group::integers();
        let id = CellularAutomaton::identity(&z, Alphabet::numbered(2).unwrap());
        assert!(is_surjective_z(&id).unwrap().verdict);
        assert!(is_injective_z(&id).unwrap().verdict);

        assert!(is_surjective_z(&xor()).unwrap().verdict);
        let inj = is_injective_z(&xor()).unwrap();
        assert!(!inj.verdict);
        let Some(Witness::Collision { left, right }) = inj.witness else { panic!() };
        let rule = LineRule::new(&xor(), ENUMERATION_BUDGET).unwrap();
        assert!(verify_collision(&rule, &left, &right));
        // the two configurations differ by the constant 1 everywhere
        let (a, b) = (left.window(-20, 20), right.window(-20, 20));
        assert!(a.iter().zip(&b).all(|(x, y)| x != y));

        let and = CellularAutomaton::from_polys(&z, &f2, vec![xv(0, &f2).mul(&xv(1, &f2), &f2, 10).unwrap()]).unwrap();
        let sur = is_surjective_z(&and).unwrap();
        assert!(!sur.verdict);
        let Some(Witness::Orphan { word }) = sur.witness else { panic!() };
        let rule = LineRule::new(&and, ENUMERATION_BUDGET).unwrap();
        assert!(brute_force_orphan_word(&rule, &word));
        // shortest: every word of length len-1 has a preimage
        assert!(brute_force_orphan(&rule, word.len() - 1).is_none());

        let shift = CellularAutomaton::from_polys(&z, &f2, vec![xv(1, &f2)]).unwrap();
        assert!(is_injective_z(&shift).unwrap().verdict);
        let plus_one = CellularAutomaton::from_polys(&z, &f2, vec![xv(0, &f2).add(&Poly::constant(f2.one(), &f2), &f2)]).unwrap();
        assert!(is_injective_z(&plus_one).unwrap().verdict);
    }

    #[test]
    fn finite_examples() {
        let c2 = Group::cyclic(2);
        let id = CellularAutomaton::identity(&c2, Alphabet::numbered(3).unwrap());
        assert!(check_gottschalk(&id).unwrap().injective.verdict);
        assert!(is_surjective_finite(&id).unwrap().verdict);

        let constant = CellularAutomaton::new(
            &c2,
            Alphabet::numbered(2).unwrap(),
            MemorySet::singleton(c2.identity()),
            LocalRule::Table(vec![0, 0].into()),
        )
        .unwrap();
        let r = is_surjective_finite(&constant).unwrap();
        assert_eq!(r.witness, Some(Witness::OrphanConfiguration { configuration: vec![1, 0] }));

        let f2 = Field::gf(2, 1).unwrap();
        let a = c2.parse_elem("a").unwrap();
        let rule = Poly::var(Cell::new(c2.identity(), 0), &f2).add(&Poly::var(Cell::new(a, 0), &f2), &f2);
        let xor_c2 = CellularAutomaton::from_polys(&c2, &f2, vec![rule]).unwrap();
        let report = check_gottschalk(&xor_c2).unwrap();
        assert!(!report.injective.verdict && !report.surjective.verdict && !report.violation);
        let Some(Witness::FiniteCollision { left, right }) = report.injective.witness else { panic!() };
        assert_ne!(left, right);
    }

    #[test]
    fn higher_rank_is_undecidable() {
        let f2 = Field::gf(2, 1).unwrap();
        let z2 = Group::free_abelian(2);
        let ca = CellularAutomaton::identity(&z2, Alphabet::affine(&f2, 1).unwrap());
        assert!(matches!(is_injective(&ca), Err(Error::Undecidable(_))));
        assert!(matches!(check_gottschalk(&ca), Err(Error::Undecidable(_))));
    }

    #[test]
    fn normalization_ignores_shift() {
        let f2 = Field::gf(2, 1).unwrap();
        let z = Group::integers();
        let far = CellularAutomaton::from_polys(&z, &f2, vec![xv(5, &f2).add(&xv(7, &f2), &f2)]).unwrap();
        let near = CellularAutomaton::from_polys(&z, &f2, vec![xv(0, &f2).add(&xv(2, &f2), &f2)]).unwrap();
        assert_eq!(is_injective_z(&far).unwrap().verdict, is_injective_z(&near).unwrap().verdict);
        assert_eq!(is_surjective_z(&far).unwrap().verdict, is_surjective_z(&near).unwrap().verdict);
        assert_eq!(LineRule::new(&far, ENUMERATION_BUDGET).unwrap().m, 3);
    }

    #[test]
    fn elementary_numbering() {
        // rule 204 is the identity, rule 170 the left shift x_{i+1}
        assert_eq!(elementary_rule(204).apply_word(&[0, 1, 1, 0, 1]), vec![1, 1, 0]);
        assert_eq!(elementary_rule(170).apply_word(&[0, 1, 1, 0, 1]), vec![1, 0, 1]);
        let ca = line_rule_automaton(&elementary_rule(90)).unwrap();
        assert_eq!(ca.memory(), &MemorySet::ints([-1, 0, 1]));
    }

    #[test]
    fn full_sweeps_have_no_violation() {
        for (k, m) in [(2, 2), (2, 3)] {
            let r = gottschalk_sweep(k, m, Some(Oracles { orphan_len: 8, max_period: 10 })).unwrap();
            assert_eq!(r.violations, 0);
            assert_eq!(r.oracle_disagreements, 0, "{:?}", r.disagreeing_rules);
        }
        let r = gottschalk_sweep(2, 3, Some(Oracles { orphan_len: 8, max_period: 10 })).unwrap();
        assert_eq!(r.orphans_beyond_oracle, 4);
        for idx in [37, 91, 164, 218] {
            let rule = rule_from_number(2, 3, idx);
            assert!(brute_force_orphan(&rule, 8).is_none());
            assert!(brute_force_orphan(&rule, 9).is_some());
        }
        let r = gottschalk_sweep(3, 2, None).unwrap();
        assert_eq!(r.rules, 19683);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn periodic_injectivity_matches_brute_force() {
        let xor = LineRule::new(&xor(), ENUMERATION_BUDGET).unwrap();
        for n in 1..=8 {
            let r = is_injective_periodic(&xor, n, GRAPH_BUDGET).unwrap();
            assert!(!r.verdict);
            let Some(Witness::FiniteCollision { left, right }) = r.witness else { panic!() };
            assert_eq!(left.len(), n);
            assert_ne!(left, right);
            assert_eq!(xor.apply_periodic(&left), xor.apply_periodic(&right));
        }
        // x_0 + x_1 + x_2 over F_2 is injective on ℤ/n exactly when 3 ∤ n
        let r3 = rule_from_number(2, 3, 0b10010110);
        for n in 1..=9 {
            let got = is_injective_periodic(&r3, n, GRAPH_BUDGET).unwrap().verdict;
            assert_eq!(got, n % 3 != 0, "n = {n}");
            assert_eq!(got, brute_force_periodic_collision(&r3, n).is_none());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn three_letter_rules_match_oracles(idx in 0u64..19683) {
            let rule = rule_from_number(3, 2, idx);
            let sur = surjective_line(&rule, GRAPH_BUDGET).unwrap();
            prop_assert_eq!(sur.verdict, brute_force_orphan(&rule, 6).is_none());
            let inj = injective_line(&rule, GRAPH_BUDGET).unwrap();
            if inj.verdict {
                prop_assert!(sur.verdict);
                for n in 1..=7 {
                    prop_assert!(brute_force_periodic_collision(&rule, n).is_none());
                }
            } else if let Some(Witness::Collision { left, right }) = &inj.witness {
                prop_assert!(verify_collision(&rule, left, right));
            }
            if sur.verdict {
                prop_assert!(is_balanced(&rule, 4));
            }
        }

        #[test]
        fn balance_of_surjective_binary_rules(idx in 0u64..256) {
            let rule = rule_from_number(2, 3, idx);
            let sur = surjective_line(&rule, GRAPH_BUDGET).unwrap().verdict;
            prop_assert_eq!(sur, is_balanced(&rule, 5));
        }
    }
}
