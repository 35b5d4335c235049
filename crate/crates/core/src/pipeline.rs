//! From a one-sided inverse `σ∘τ = Id` to `τ∘σ = Id`: restrict both automata
//! to every finite field `F_{p^r}` up to a depth, and check section, injectivity
//! and window surjectivity at each level.
//!
//! Small levels are checked on explicit tables. When tables exceed the budget
//! and the rules are affine, the same properties are decided by exact linear
//! algebra over `F_{p^r}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::ntheory::lcm_u32;
use crate::fields::{Fe, Field};
use crate::groups::{Group, GroupElem, MemorySet};
use crate::linalg::Matrix;
use crate::poly::DEFAULT_TERM_BUDGET;
use crate::sca::{
    affine_form, compose_with_budget, restrict, rule_equal_with_budget, transfer, window_map, AffineForm, Alphabet, CellularAutomaton,
    Value, ENUMERATION_BUDGET,
};
use crate::surjunctivity::{
    injective_line, is_injective_finite, is_injective_periodic, is_surjective_finite, surjective_line, LineRule, GRAPH_BUDGET,
};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub depth: u32,
    /// Moduli `n` of the quotients ℤ/n used as extra injectivity probes.
    pub quotients: Vec<usize>,
    /// Window `M`; defaults to the symmetrized union of both memories.
    pub window: Option<MemorySet>,
    pub table_budget: u64,
    pub term_budget: usize,
    /// Skip tables and use the linear path whenever the rules are affine.
    pub prefer_linear: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            depth: 4,
            quotients: (2..=8).collect(),
            window: None,
            table_budget: ENUMERATION_BUDGET,
            term_budget: DEFAULT_TERM_BUDGET,
            prefer_linear: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMethod {
    Table,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientRecord {
    pub n: usize,
    pub injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub r: u32,
    pub field: String,
    pub method: CheckMethod,
    /// `σ_r ∘ τ_r = Id`
    pub section_ok: bool,
    /// `None` where injectivity is undecidable (ℤ^d, free groups).
    pub injective: Option<bool>,
    pub quotients: Vec<QuotientRecord>,
    /// `Γ_M = A^M`
    pub window_surjective: bool,
    /// `τ_r ∘ σ_r = Id`, filled in by [`conclude_two_sided`].
    pub inverse_ok: Option<bool>,
}

impl LevelRecord {
    pub fn passed(&self) -> bool {
        self.section_ok && self.injective != Some(false) && self.quotients.iter().all(|q| q.injective) && self.window_surjective
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub version: u32,
    pub group: String,
    pub alphabet: String,
    pub window: String,
    pub depth: u32,
    pub base_level: u32,
    pub levels: Vec<LevelRecord>,
    /// `σ∘τ = Id` as polynomials.
    pub left_identity_ok: bool,
    /// `τ∘σ = Id`; `None` until concluded.
    pub right_identity_ok: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl PipelineReport {
    pub fn all_levels_pass(&self) -> bool {
        !self.levels.is_empty() && self.levels.iter().all(LevelRecord::passed)
    }
}

/// Least `r₀` such that every rule coefficient lies in `F_{p^{r₀}}`.
pub fn coefficient_model(tau: &CellularAutomaton) -> Result<u32> {
    let Some(field) = tau.alphabet().field() else {
        return Err(Error::AlphabetMismatch("coefficient model needs an affine alphabet".into()));
    };
    if field.order().is_none() {
        return Err(Error::WrongCharacteristic);
    }
    let polys = tau.polys().ok_or_else(|| Error::InvalidArgument("coefficient model needs a polynomial rule".into()))?;
    let mut r0 = 1;
    for p in polys {
        for (_, c) in p.terms() {
            r0 = lcm_u32(r0, field.subfield_degree(c)?);
        }
    }
    Ok(r0)
}

/// Symmetrized union of both memories.
pub fn common_window(sigma: &CellularAutomaton, tau: &CellularAutomaton) -> Result<MemorySet> {
    sigma.group().symmetrize(&sigma.memory().union(tau.memory()))
}

fn projection(group: &Group, alphabet: &Alphabet) -> CellularAutomaton {
    CellularAutomaton::identity(group, alphabet.clone())
}

fn is_identity_rule(ca: &CellularAutomaton, budget: u64) -> Result<bool> {
    let id = projection(ca.group(), ca.alphabet());
    Ok(rule_equal_with_budget(ca, &id, budget)?.as_polynomials)
}

/// Whether `σ∘τ` is the projection onto the `1_G` cell, on the window `M`.
pub fn verify_section(sigma: &CellularAutomaton, tau: &CellularAutomaton, m: &MemorySet) -> Result<bool> {
    let group = sigma.group();
    let m = group.symmetrize(m)?;
    if !sigma.memory().is_subset(&m) || !tau.memory().is_subset(&m) {
        return Err(Error::InvalidArgument("window must contain both memories".into()));
    }
    let composite = compose_with_budget(sigma, tau, DEFAULT_TERM_BUDGET, ENUMERATION_BUDGET)?;
    is_identity_rule(&composite, ENUMERATION_BUDGET)
}

/// `σ(τ(x))` evaluated cell-wise on a composite-memory assignment.
fn eval_composite(sigma: &CellularAutomaton, tau: &CellularAutomaton, memory: &MemorySet, x: &[Value]) -> Result<Value> {
    let group = sigma.group();
    let outer = sigma
        .memory()
        .iter()
        .map(|m| {
            let inner: Vec<Value> = tau.memory().iter().map(|h| x[memory.index_of(&group.mul(m, h).unwrap()).unwrap()].clone()).collect();
            tau.local(&inner)
        })
        .collect::<Result<Vec<_>>>()?;
    sigma.local(&outer)
}

/// `σ∘τ = Id` as functions, for affine `σ`, `τ`: an affine map is fixed by its values at 0 and the basis vectors.
fn linear_section(sigma: &CellularAutomaton, tau: &CellularAutomaton) -> Result<bool> {
    let group = sigma.group();
    let memory = group.product_set(sigma.memory(), tau.memory())?;
    let Alphabet::Affine { field, dim } = sigma.alphabet() else { unreachable!() };
    let zero = sigma.alphabet().zero_value();
    let zeros = vec![zero.clone(); memory.len()];
    if eval_composite(sigma, tau, &memory, &zeros)? != zero {
        return Ok(false);
    }
    let one_pos = memory.index_of(&group.identity());
    for (pos, _) in memory.iter().enumerate() {
        for j in 0..*dim {
            let mut x = zeros.clone();
            let mut e = vec![field.zero(); *dim];
            e[j] = field.one();
            x[pos] = Value::Vector(e.clone());
            let expected = if Some(pos) == one_pos { Value::Vector(e) } else { zero.clone() };
            if eval_composite(sigma, tau, &memory, &x)? != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Injectivity of an affine automaton on ℤ: no nonzero bi-infinite path in the graph of kernel words.
fn linear_injective_z(form: &AffineForm, field: &Field, budget: u64) -> Result<bool> {
    let n = form.constant.len();
    let ints: Vec<i64> = form.memory.iter().map(|g| g.as_int().unwrap()).collect();
    let (lo, hi) = (ints[0], *ints.last().unwrap());
    let m = (hi - lo + 1) as usize;
    // L: F^{n·m} -> F^n on the normalized interval
    let mut l = Matrix::zeros(n, n * m, field);
    for (idx, &off) in ints.iter().enumerate() {
        let cell = (off - lo) as usize;
        for i in 0..n {
            for j in 0..n {
                l.set(i, cell * n + j, form.linear[idx].get(i, j).clone());
            }
        }
    }
    let basis = kernel_basis(&l, field);
    let q = field.order().unwrap();
    let count = q
        .checked_pow(basis.len() as u32)
        .filter(|&c| c <= budget)
        .ok_or(Error::EnumerationBudgetExceeded { budget, needed: (q as u128).saturating_pow(basis.len() as u32) })?;
    let width = n * m;
    let encode = |v: &[Fe]| -> Vec<u64> {
        v.iter()
            .map(|x| match x {
                Fe::F(a) => *a,
                Fe::Q(_) => unreachable!(),
            })
            .collect()
    };
    let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, bool)> = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut t = idx;
        let mut w = vec![field.zero(); width];
        for b in &basis {
            let c = Fe::F(t % q);
            t /= q;
            if field.is_zero(&c) {
                continue;
            }
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi = field.add(wi, &field.mul(&c, bi));
            }
        }
        let nonzero = w.iter().any(|x| !field.is_zero(x));
        let src = encode(&w[..width - n]);
        let dst = encode(&w[n..]);
        let next = ids.len();
        let s = *ids.entry(src).or_insert(next);
        let next = ids.len();
        let d = *ids.entry(dst).or_insert(next);
        edges.push((s, d, nonzero));
    }
    Ok(!has_biinfinite_marked_edge(ids.len(), &edges))
}

fn kernel_basis(a: &Matrix, field: &Field) -> Vec<Vec<Fe>> {
    let mut r = a.clone();
    let pivots = r.rref(field);
    let free: Vec<usize> = (0..a.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); a.cols()];
            v[f] = field.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = field.neg(r.get(row, f));
            }
            v
        })
        .collect()
}

/// Whether a marked edge survives pruning of vertices with no in- or out-edges.
fn has_biinfinite_marked_edge(vertices: usize, edges: &[(usize, usize, bool)]) -> bool {
    let mut indeg = vec![0usize; vertices];
    let mut outdeg = vec![0usize; vertices];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices];
    for (e, &(s, t, _)) in edges.iter().enumerate() {
        outdeg[s] += 1;
        indeg[t] += 1;
        incident[s].push(e);
        if t != s {
            incident[t].push(e);
        }
    }
    let mut alive = vec![true; edges.len()];
    let mut dead = vec![false; vertices];
    let mut stack: Vec<usize> = (0..vertices).filter(|&x| indeg[x] == 0 || outdeg[x] == 0).collect();
    while let Some(x) = stack.pop() {
        if std::mem::replace(&mut dead[x], true) {
            continue;
        }
        for &e in &incident[x] {
            if !std::mem::replace(&mut alive[e], false) {
                continue;
            }
            let (s, t, _) = edges[e];
            outdeg[s] -= 1;
            indeg[t] -= 1;
            for y in [s, t] {
                if !dead[y] && (indeg[y] == 0 || outdeg[y] == 0) {
                    stack.push(y);
                }
            }
        }
    }
    edges.iter().zip(&alive).any(|(&(_, _, marked), &a)| a && marked)
}

/// Injectivity on ℤ/n of an affine automaton: the block circulant matrix has full rank.
fn linear_injective_periodic(form: &AffineForm, field: &Field, n: usize) -> bool {
    let dim = form.constant.len();
    let mut a = Matrix::zeros(n * dim, n * dim, field);
    for i in 0..n {
        for (idx, g) in form.memory.iter().enumerate() {
            let j = (i as i64 + g.as_int().unwrap()).rem_euclid(n as i64) as usize;
            for r in 0..dim {
                for c in 0..dim {
                    let v = field.add(a.get(i * dim + r, j * dim + c), form.linear[idx].get(r, c));
                    a.set(i * dim + r, j * dim + c, v);
                }
            }
        }
    }
    a.rank(field) == n * dim
}

/// Injectivity of an affine automaton on a finite group: the global matrix has full rank.
fn linear_injective_finite(form: &AffineForm, group: &Group, field: &Field) -> Result<bool> {
    let elems = group.elements()?;
    let dim = form.constant.len();
    let size = elems.len() * dim;
    let mut a = Matrix::zeros(size, size, field);
    for (gi, g) in elems.iter().enumerate() {
        for (idx, m) in form.memory.iter().enumerate() {
            let GroupElem::Id(j) = group.mul(g, m)? else { unreachable!() };
            for r in 0..dim {
                for c in 0..dim {
                    let (row, col) = (gi * dim + r, j as usize * dim + c);
                    let v = field.add(a.get(row, col), form.linear[idx].get(r, c));
                    a.set(row, col, v);
                }
            }
        }
    }
    Ok(a.rank(field) == size)
}

/// `Γ_M = A^M` for an affine automaton: the window matrix `A^{M²} -> A^M` has full row rank.
fn linear_window_surjective(form: &AffineForm, group: &Group, field: &Field, m: &MemorySet) -> Result<bool> {
    let domain = group.product_set(m, m)?;
    let dim = form.constant.len();
    let mut a = Matrix::zeros(m.len() * dim, domain.len() * dim, field);
    for (gi, g) in m.iter().enumerate() {
        for (idx, h) in form.memory.iter().enumerate() {
            let col = domain.index_of(&group.mul(g, h)?).unwrap();
            for r in 0..dim {
                for c in 0..dim {
                    a.set(gi * dim + r, col * dim + c, form.linear[idx].get(r, c).clone());
                }
            }
        }
    }
    Ok(a.rank(field) == m.len() * dim)
}

fn is_budget(e: &Error) -> bool {
    matches!(e, Error::EnumerationBudgetExceeded { .. })
}

/// Runs a check on tables, falling back to linear algebra when tables are too large.
fn table_or_linear<T>(
    use_linear: bool,
    table: impl FnOnce() -> Result<T>,
    linear: impl FnOnce() -> Result<T>,
    used_linear: &mut bool,
) -> Result<T> {
    if use_linear {
        *used_linear = true;
        return linear();
    }
    match table() {
        Err(e) if is_budget(&e) => {
            *used_linear = true;
            linear()
        }
        other => other,
    }
}

struct Level<'a> {
    sigma: CellularAutomaton,
    tau: CellularAutomaton,
    field: Field,
    window: &'a MemorySet,
    cfg: &'a PipelineConfig,
}

impl Level<'_> {
    fn forms(&self) -> Option<(AffineForm, AffineForm)> {
        Some((affine_form(&self.sigma)?, affine_form(&self.tau)?))
    }

    fn linear_or_budget(&self) -> Result<(AffineForm, AffineForm)> {
        self.forms().ok_or(Error::EnumerationBudgetExceeded { budget: self.cfg.table_budget, needed: u128::MAX })
    }

    fn run(&self) -> Result<LevelRecord> {
        let budget = self.cfg.table_budget;
        let prefer = self.cfg.prefer_linear && self.forms().is_some();
        let mut linear = false;
        let group = self.tau.group();

        let section_ok = table_or_linear(
            prefer,
            || {
                let s = self.sigma.materialize(budget)?;
                let t = self.tau.materialize(budget)?;
                let comp = compose_with_budget(&s, &t, self.cfg.term_budget, budget)?;
                is_identity_rule(&comp, budget)
            },
            || {
                self.linear_or_budget()?;
                linear_section(&self.sigma, &self.tau)
            },
            &mut linear,
        )?;

        let injective = if group.is_integers() {
            Some(table_or_linear(
                prefer,
                || injective_line(&LineRule::new(&self.tau.materialize(budget)?, budget)?, GRAPH_BUDGET.min(budget)).map(|r| r.verdict),
                || linear_injective_z(&self.linear_or_budget()?.1, &self.field, budget),
                &mut linear,
            )?)
        } else if group.is_finite() {
            Some(table_or_linear(
                prefer,
                || is_injective_finite(&self.tau.materialize(budget)?).map(|r| r.verdict),
                || linear_injective_finite(&self.linear_or_budget()?.1, group, &self.field),
                &mut linear,
            )?)
        } else {
            None
        };

        let mut quotients = Vec::new();
        if group.is_integers() {
            for &n in &self.cfg.quotients {
                let inj = table_or_linear(
                    prefer,
                    || {
                        is_injective_periodic(&LineRule::new(&self.tau.materialize(budget)?, budget)?, n, GRAPH_BUDGET.min(budget))
                            .map(|r| r.verdict)
                    },
                    || Ok(linear_injective_periodic(&self.linear_or_budget()?.1, &self.field, n)),
                    &mut linear,
                )?;
                quotients.push(QuotientRecord { n, injective: inj });
            }
        }

        let window_surjective = table_or_linear(
            prefer,
            || {
                let w = window_map(&self.tau.materialize(budget)?, self.window, budget)?;
                Ok(w.is_surjective().expect("finite alphabets give table window maps"))
            },
            || linear_window_surjective(&self.linear_or_budget()?.1, group, &self.field, self.window),
            &mut linear,
        )?;

        Ok(LevelRecord {
            r: self.field.degree(),
            field: self.field.to_string(),
            method: if linear { CheckMethod::Linear } else { CheckMethod::Table },
            section_ok,
            injective,
            quotients,
            window_surjective,
            inverse_ok: None,
        })
    }

    fn inverse_ok(&self) -> Result<bool> {
        let budget = self.cfg.table_budget;
        let mut linear = false;
        table_or_linear(
            self.cfg.prefer_linear && self.forms().is_some(),
            || {
                let s = self.sigma.materialize(budget)?;
                let t = self.tau.materialize(budget)?;
                is_identity_rule(&compose_with_budget(&t, &s, self.cfg.term_budget, budget)?, budget)
            },
            || {
                self.linear_or_budget()?;
                linear_section(&self.tau, &self.sigma)
            },
            &mut linear,
        )
    }
}

fn ladder_levels(r0: u32, depth: u32) -> Vec<u32> {
    (1..=depth).filter(|r| r % r0 == 0).collect()
}

fn level_setup<'a>(
    sigma: &CellularAutomaton,
    tau: &CellularAutomaton,
    r: u32,
    window: &'a MemorySet,
    cfg: &'a PipelineConfig,
) -> Result<Level<'a>> {
    let (s, t) = (transfer(sigma, r)?, transfer(tau, r)?);
    let field = s.alphabet().field().unwrap().clone();
    Ok(Level { sigma: s, tau: t, field, window, cfg })
}

/// Restriction ladder over `F_{p^r}` for `r₀ | r ≤ depth`; requires `σ∘τ = Id`.
pub fn run_restriction_ladder(sigma: &CellularAutomaton, tau: &CellularAutomaton, cfg: &PipelineConfig) -> Result<PipelineReport> {
    if cfg.depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if sigma.group() != tau.group() || sigma.alphabet() != tau.alphabet() {
        return Err(Error::AlphabetMismatch("σ and τ must share group and alphabet".into()));
    }
    let group = sigma.group();
    let window = match &cfg.window {
        Some(w) => group.symmetrize(w)?,
        None => common_window(sigma, tau)?,
    };
    if !verify_section(sigma, tau, &window)? {
        return Err(Error::SectionFailed("σ∘τ is not the identity".into()));
    }
    let r0 = lcm_u32(coefficient_model(sigma)?, coefficient_model(tau)?);
    let mut diagnostics = Vec::new();
    let levels = ladder_levels(r0, cfg.depth);
    if levels.is_empty() {
        diagnostics.push(format!("coefficient field F_p^{r0} lies beyond depth {}", cfg.depth));
    }
    let records = levels.par_iter().map(|&r| level_setup(sigma, tau, r, &window, cfg)?.run()).collect::<Result<Vec<_>>>()?;
    for rec in &records {
        if !rec.passed() {
            diagnostics.push(format!("level {} failed", rec.r));
        }
    }
    Ok(PipelineReport {
        version: REPORT_VERSION,
        group: group.name().to_string(),
        alphabet: sigma.alphabet().to_string(),
        window: group.format_set(&window),
        depth: cfg.depth,
        base_level: r0,
        levels: records,
        left_identity_ok: true,
        right_identity_ok: None,
        diagnostics,
    })
}

/// `τ∘σ = Id`: the symbolic verdict, cross-checked at every ladder level.
pub fn conclude_two_sided(
    sigma: &CellularAutomaton,
    tau: &CellularAutomaton,
    report: &mut PipelineReport,
    cfg: &PipelineConfig,
) -> Result<bool> {
    if !report.all_levels_pass() {
        report.diagnostics.push("not every ladder level passed; no conclusion drawn".into());
        report.right_identity_ok = Some(false);
        return Ok(false);
    }
    let composite = compose_with_budget(tau, sigma, cfg.term_budget, cfg.table_budget)?;
    let symbolic = is_identity_rule(&composite, cfg.table_budget)?;
    let window = common_window(sigma, tau)?;
    let checks =
        report.levels.par_iter().map(|rec| level_setup(sigma, tau, rec.r, &window, cfg)?.inverse_ok()).collect::<Result<Vec<_>>>()?;
    for (rec, ok) in report.levels.iter_mut().zip(&checks) {
        rec.inverse_ok = Some(*ok);
        if *ok != symbolic {
            report.diagnostics.push(format!("level {} disagrees with the symbolic verdict", rec.r));
        }
    }
    let verdict = symbolic && checks.iter().all(|&ok| ok);
    report.right_identity_ok = Some(verdict);
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectivityRecord {
    pub r: u32,
    pub field: String,
    pub injective: bool,
    pub surjective: bool,
}

/// For a single automaton: injectivity and surjectivity of every restriction `τ_r`, `r₀ | r ≤ depth`.
pub fn bijectivity_ladder(tau: &CellularAutomaton, cfg: &PipelineConfig) -> Result<Vec<BijectivityRecord>> {
    let r0 = coefficient_model(tau)?;
    ladder_levels(r0, cfg.depth)
        .into_par_iter()
        .map(|r| {
            let t = restrict(tau, r, cfg.table_budget)?;
            let (injective, surjective) = if t.group().is_integers() {
                let line = LineRule::new(&t, cfg.table_budget)?;
                (injective_line(&line, GRAPH_BUDGET)?.verdict, surjective_line(&line, GRAPH_BUDGET)?.verdict)
            } else {
                (is_injective_finite(&t)?.verdict, is_surjective_finite(&t)?.verdict)
            };
            Ok(BijectivityRecord { r, field: t.alphabet().field().unwrap().to_string(), injective, surjective })
        })
        .collect()
}

/// Whether `x ↦ x^2`-style single-cell rules permute the alphabet (memory `{1_G}` only).
pub fn is_permutation_table(tau: &CellularAutomaton) -> Option<bool> {
    let table = tau.table()?;
    if tau.memory().len() != 1 {
        return None;
    }
    let mut seen = vec![false; table.len()];
    Some(table.iter().all(|&s| !std::mem::replace(&mut seen[s as usize], true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::{check_direct_finiteness, GroupRingElem, GroupRingMatrix};
    use crate::near_ring::{verify_theorem_a, NearRingElem};
    use crate::poly::{Monomial, Poly};
    use crate::sca::psi_from_matrix;
    use crate::sca::psi_from_nearring;
    use crate::sca::Cell;

    fn z() -> Group {
        Group::integers()
    }

    fn xv(k: i64, f: &Field) -> Poly<Cell> {
        Poly::var(Cell::new(GroupElem::int(k), 0), f)
    }

    fn shift_pair(f: &Field) -> (CellularAutomaton, CellularAutomaton) {
        let tau = CellularAutomaton::from_polys(&z(), f, vec![xv(1, f)]).unwrap();
        let sigma = CellularAutomaton::from_polys(&z(), f, vec![xv(-1, f)]).unwrap();
        (sigma, tau)
    }

    fn affine_pair() -> (CellularAutomaton, CellularAutomaton, NearRingElem, NearRingElem) {
        let f2 = Field::gf(2, 1).unwrap();
        let one = NearRingElem::constant(f2.one(), &z(), &f2);
        let a = NearRingElem::var(GroupElem::int(1), &z(), &f2).unwrap().add(&one).unwrap();
        let b = NearRingElem::var(GroupElem::int(-1), &z(), &f2).unwrap().sub(&one).unwrap();
        (psi_from_nearring(&b).unwrap(), psi_from_nearring(&a).unwrap(), b, a)
    }

    fn elementary_pair() -> (CellularAutomaton, CellularAutomaton, GroupRingMatrix, GroupRingMatrix) {
        let f2 = Field::gf(2, 1).unwrap();
        let one = GroupRingElem::one(&z(), &f2);
        let zero = GroupRingElem::zero(&z(), &f2);
        let t = GroupRingElem::basis(GroupElem::int(1), &z(), &f2).unwrap();
        let a = GroupRingMatrix::from_rows(vec![vec![one.clone(), t.clone()], vec![zero.clone(), one.clone()]]).unwrap();
        let b = GroupRingMatrix::from_rows(vec![vec![one.clone(), t.neg()], vec![zero, one]]).unwrap();
        (psi_from_matrix(&b).unwrap(), psi_from_matrix(&a).unwrap(), b, a)
    }

    #[test]
    fn coefficient_models() {
        let f2 = Field::gf(2, 1).unwrap();
        let xor = CellularAutomaton::from_polys(&z(), &f2, vec![xv(0, &f2).add(&xv(1, &f2), &f2)]).unwrap();
        assert_eq!(coefficient_model(&xor).unwrap(), 1);

        let f4 = Field::gf(2, 2).unwrap();
        let w = f4.generator().unwrap();
        let r = CellularAutomaton::from_polys(&z(), &f4, vec![xv(0, &f4).scale(&w, &f4).add(&xv(1, &f4), &f4)]).unwrap();
        assert_eq!(coefficient_model(&r).unwrap(), 2);

        let f64_ = Field::gf(2, 6).unwrap();
        let w4 = Field::gf(2, 2).unwrap().embed_into(&w, &f64_).unwrap();
        let w8 = Field::gf(2, 3).unwrap().embed_into(&Field::gf(2, 3).unwrap().generator().unwrap(), &f64_).unwrap();
        let mixed = xv(0, &f64_).scale(&w4, &f64_).add(&xv(1, &f64_).scale(&w8, &f64_), &f64_);
        let r = CellularAutomaton::from_polys(&z(), &f64_, vec![mixed]).unwrap();
        assert_eq!(coefficient_model(&r).unwrap(), 6);

        let q = Field::Rational;
        let rq = CellularAutomaton::from_polys(&z(), &q, vec![xv(0, &q)]).unwrap();
        assert!(matches!(coefficient_model(&rq), Err(Error::WrongCharacteristic)));
    }

    #[test]
    fn sections() {
        let f2 = Field::gf(2, 1).unwrap();
        let id = CellularAutomaton::identity(&z(), Alphabet::affine(&f2, 1).unwrap());
        assert!(verify_section(&id, &id, &MemorySet::ints([0])).unwrap());
        let (s, t) = shift_pair(&f2);
        assert!(verify_section(&s, &t, &common_window(&s, &t).unwrap()).unwrap());
        let (s, t) = shift_pair(&Field::gf(3, 1).unwrap());
        assert!(verify_section(&s, &t, &common_window(&s, &t).unwrap()).unwrap());
        let (s, t, _, _) = affine_pair();
        assert!(verify_section(&s, &t, &common_window(&s, &t).unwrap()).unwrap());
        assert!(!verify_section(&t, &t, &common_window(&s, &t).unwrap()).unwrap());
        assert!(matches!(run_restriction_ladder(&t, &t, &PipelineConfig::default()), Err(Error::SectionFailed(_))));
    }

    fn assert_full_pass(report: &PipelineReport, depth: u32) {
        assert_eq!(report.levels.len() as u32, depth);
        for rec in &report.levels {
            assert!(rec.passed(), "{rec:?}");
            assert_eq!(rec.quotients.len(), 7);
        }
    }

    #[test]
    fn shift_pair_ladder() {
        let f2 = Field::gf(2, 1).unwrap();
        let (s, t) = shift_pair(&f2);
        let cfg = PipelineConfig { depth: 3, ..Default::default() };
        let mut report = run_restriction_ladder(&s, &t, &cfg).unwrap();
        assert_full_pass(&report, 3);
        assert!(report.levels.iter().all(|r| r.method == CheckMethod::Table));
        assert!(conclude_two_sided(&s, &t, &mut report, &cfg).unwrap());
        assert_eq!(report.right_identity_ok, Some(true));
    }

    #[test]
    fn affine_pair_matches_near_ring() {
        let (s, t, b, a) = affine_pair();
        let cfg = PipelineConfig { depth: 2, ..Default::default() };
        let mut report = run_restriction_ladder(&s, &t, &cfg).unwrap();
        assert_full_pass(&report, 2);
        let two_sided = conclude_two_sided(&s, &t, &mut report, &cfg).unwrap();
        let direct = verify_theorem_a(&b, &a, DEFAULT_TERM_BUDGET).unwrap();
        assert!(two_sided);
        assert_eq!(two_sided, direct.is_left_inverse && direct.is_right_inverse);
    }

    #[test]
    fn elementary_pair_matches_direct_finiteness() {
        let (s, t, b, a) = elementary_pair();
        let cfg = PipelineConfig { depth: 2, ..Default::default() };
        let mut report = run_restriction_ladder(&s, &t, &cfg).unwrap();
        assert_full_pass(&report, 2);
        let two_sided = conclude_two_sided(&s, &t, &mut report, &cfg).unwrap();
        let direct = check_direct_finiteness(&b, &a).unwrap();
        assert!(two_sided);
        assert_eq!(two_sided, direct.ab_is_one && direct.ba_is_one);
    }

    #[test]
    fn linear_path_agrees_with_tables() {
        let (s1, t1) = shift_pair(&Field::gf(2, 1).unwrap());
        let (s2, t2, _, _) = affine_pair();
        let (s3, t3, _, _) = elementary_pair();
        for (s, t) in [(s1, t1), (s2, t2), (s3, t3)] {
            let table = run_restriction_ladder(&s, &t, &PipelineConfig { depth: 2, ..Default::default() }).unwrap();
            let linear = run_restriction_ladder(&s, &t, &PipelineConfig { depth: 2, prefer_linear: true, ..Default::default() }).unwrap();
            assert!(linear.levels.iter().all(|r| r.method == CheckMethod::Linear));
            for (a, b) in table.levels.iter().zip(&linear.levels) {
                assert_eq!(
                    (a.section_ok, a.injective, &a.quotients, a.window_surjective),
                    (b.section_ok, b.injective, &b.quotients, b.window_surjective)
                );
            }
        }
        // a non-injective linear rule: both paths must say so
        let f2 = Field::gf(2, 1).unwrap();
        let xor = CellularAutomaton::from_polys(&z(), &f2, vec![xv(0, &f2).add(&xv(1, &f2), &f2)]).unwrap();
        let form = affine_form(&xor).unwrap();
        assert!(!linear_injective_z(&form, &f2, 1 << 20).unwrap());
        assert!(!injective_line(&LineRule::new(&xor, 1 << 20).unwrap(), GRAPH_BUDGET).unwrap().verdict);
        let w = linear_window_surjective(&form, &z(), &f2, &MemorySet::ints([-1, 0, 1])).unwrap();
        assert_eq!(Some(w), window_map(&xor, &MemorySet::ints([0, 1]), ENUMERATION_BUDGET).unwrap().is_surjective());
        for n in 2..=8 {
            assert_eq!(
                linear_injective_periodic(&form, &f2, n),
                is_injective_periodic(&LineRule::new(&xor, 1 << 20).unwrap(), n, GRAPH_BUDGET).unwrap().verdict
            );
        }
        let r3 = CellularAutomaton::from_polys(&z(), &f2, vec![xv(-1, &f2).add(&xv(0, &f2), &f2).add(&xv(1, &f2), &f2)]).unwrap();
        let form = affine_form(&r3).unwrap();
        for n in 2..=9 {
            assert_eq!(linear_injective_periodic(&form, &f2, n), n % 3 != 0);
        }
    }

    #[test]
    fn frobenius_ladder() {
        let f2 = Field::gf(2, 1).unwrap();
        let frob = CellularAutomaton::from_polys(&z(), &f2, vec![xv(0, &f2).pow(2, &f2, 10).unwrap()]).unwrap();
        let cfg = PipelineConfig { depth: 6, ..Default::default() };
        let recs = bijectivity_ladder(&frob, &cfg).unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().all(|r| r.injective && r.surjective));
        for r in 1..=6 {
            assert_eq!(is_permutation_table(&restrict(&frob, r, ENUMERATION_BUDGET).unwrap()), Some(true));
        }
        // squaring is not a section partner of anything here; x^3 over F_4 is not bijective
        let f4 = Field::gf(2, 2).unwrap();
        let cube = CellularAutomaton::from_polys(&z(), &f4, vec![xv(0, &f4).pow(3, &f4, 10).unwrap()]).unwrap();
        let recs = bijectivity_ladder(&cube, &PipelineConfig { depth: 4, ..Default::default() }).unwrap();
        assert!(recs.iter().all(|r| r.injective == (r.r % 2 == 1)));
    }

    #[test]
    fn finite_group_ladder() {
        let c3 = Group::cyclic(3);
        let f2 = Field::gf(2, 1).unwrap();
        let g = GroupRingElem::basis(c3.parse_elem("a").unwrap(), &c3, &f2).unwrap();
        let ginv = GroupRingElem::basis(c3.parse_elem("a^2").unwrap(), &c3, &f2).unwrap();
        let t = psi_from_matrix(&GroupRingMatrix::scalar(g)).unwrap();
        let s = psi_from_matrix(&GroupRingMatrix::scalar(ginv)).unwrap();
        let cfg = PipelineConfig { depth: 3, ..Default::default() };
        let mut report = run_restriction_ladder(&s, &t, &cfg).unwrap();
        assert!(report.all_levels_pass());
        assert!(report.levels.iter().all(|r| r.quotients.is_empty() && r.injective == Some(true)));
        assert!(conclude_two_sided(&s, &t, &mut report, &cfg).unwrap());
        let linear = run_restriction_ladder(&s, &t, &PipelineConfig { prefer_linear: true, ..cfg }).unwrap();
        assert!(linear.all_levels_pass());
    }

    #[test]
    fn ladder_coherence() {
        let f4 = Field::gf(2, 2).unwrap();
        let w = f4.generator().unwrap();
        let rule = xv(0, &f4).scale(&w, &f4).add(&xv(1, &f4).pow(2, &f4, 10).unwrap(), &f4);
        let tau = CellularAutomaton::from_polys(&z(), &f4, vec![rule]).unwrap();
        let small = restrict(&tau, 2, ENUMERATION_BUDGET).unwrap();
        let big = restrict(&tau, 4, ENUMERATION_BUDGET).unwrap();
        let (f_small, f_big) = (Field::gf(2, 2).unwrap(), Field::gf(2, 4).unwrap());
        let embed = |s: u32| match f_small.embed_into(&Fe::F(s as u64), &f_big).unwrap() {
            Fe::F(x) => x as u32,
            _ => unreachable!(),
        };
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(embed(small.local_sym(&[a, b])), big.local_sym(&[embed(a), embed(b)]));
            }
        }
    }

    #[test]
    fn restriction_closure() {
        let f64_ = Field::gf(2, 6).unwrap();
        let w4 = Field::gf(2, 2).unwrap().embed_into(&Field::gf(2, 2).unwrap().generator().unwrap(), &f64_).unwrap();
        let w8 = Field::gf(2, 3).unwrap().embed_into(&Field::gf(2, 3).unwrap().generator().unwrap(), &f64_).unwrap();
        let rule = Poly::from_terms(
            [
                (Monomial::var(Cell::new(GroupElem::int(0), 0)), w4),
                (Monomial::from_powers([(Cell::new(GroupElem::int(0), 0), 3)]), w8),
                (Monomial::one(), f64_.one()),
            ],
            &f64_,
        );
        let tau = CellularAutomaton::from_polys(&z(), &f64_, vec![rule]).unwrap();
        assert_eq!(coefficient_model(&tau).unwrap(), 6);
        for r in 1..=12 {
            let res = restrict(&tau, r, ENUMERATION_BUDGET);
            if r % 6 == 0 {
                let t = res.unwrap();
                assert_eq!(t.table().unwrap().len() as u64, 1u64 << r);
            } else {
                assert!(matches!(res, Err(Error::CoefficientFieldTooLarge { .. })));
            }
        }
    }

    #[test]
    fn window_surjectivity_is_monotone() {
        let f2 = Field::gf(2, 1).unwrap();
        let xor = CellularAutomaton::from_polys(&z(), &f2, vec![xv(0, &f2).add(&xv(1, &f2), &f2)]).unwrap();
        let big = window_map(&xor, &MemorySet::ints([-2, -1, 0, 1, 2]), ENUMERATION_BUDGET).unwrap();
        let small = window_map(&xor, &MemorySet::ints([-1, 0, 1]), ENUMERATION_BUDGET).unwrap();
        assert_eq!(big.is_surjective(), Some(true));
        assert_eq!(small.is_surjective(), Some(true));
        let and = CellularAutomaton::from_polys(&z(), &f2, vec![xv(0, &f2).mul(&xv(1, &f2), &f2, 10).unwrap()]).unwrap();
        let w = window_map(&and, &MemorySet::ints([-1, 0, 1]), ENUMERATION_BUDGET).unwrap();
        assert_eq!(w.is_surjective(), Some(false));
    }

    #[test]
    fn report_serializes() {
        let (s, t) = shift_pair(&Field::gf(2, 1).unwrap());
        let cfg = PipelineConfig { depth: 1, quotients: vec![2], ..Default::default() };
        let mut report = run_restriction_ladder(&s, &t, &cfg).unwrap();
        conclude_two_sided(&s, &t, &mut report, &cfg).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["version"], REPORT_VERSION);
        assert_eq!(json["right_identity_ok"], true);
        assert_eq!(json["levels"][0]["method"], "table");
        assert_eq!(json["levels"][0]["quotients"][0]["n"], 2);
    }
}
