//! Sparse multivariate polynomials over a [`Field`] with commuting variables.
//!
//! Used both for elements of the near ring (variables `X_g`) and for local
//! rules of cellular automata (variables `x_{g,i}`). Monomials are ordered by
//! total degree, then lexicographically by their sorted variable sequences.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::fields::{Fe, Field};

/// Default cap on the number of monomials an intermediate product may hold.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

/// One product, power or substitution may form at most `WORK_PER_TERM * budget`
/// pairs of terms; a pair of rational coefficients counts once per 64 bits.
pub const WORK_PER_TERM: usize = 16;

/// `∏ v^e` with variables sorted and exponents positive; empty is the monomial 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial<V>(Vec<(V, u32)>);

impl<V: Ord + Clone> Monomial<V> {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: V) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut map: BTreeMap<V, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_default() += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Renames variables; collisions merge exponents.
    pub fn map_vars<W: Ord + Clone>(&self, mut f: impl FnMut(&V) -> W) -> Monomial<W> {
        Monomial::from_powers(self.0.iter().map(|(v, e)| (f(v), *e)))
    }

    fn expanded(&self) -> impl Iterator<Item = &V> + '_ {
        self.0.iter().flat_map(|(v, e)| std::iter::repeat(v).take(*e as usize))
    }
}

impl<V: Ord + Clone> Ord for Monomial<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.expanded().cmp(other.expanded()))
    }
}

impl<V: Ord + Clone> PartialOrd for Monomial<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial: finitely many monomials with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<V: Ord + Clone> {
    terms: BTreeMap<Monomial<V>, Fe>,
}

impl<V: Ord + Clone> Default for Poly<V> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<V: Ord + Clone + Hash> Poly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Fe, field: &Field) -> Self {
        Self::monomial(Monomial::one(), c, field)
    }

    pub fn var(v: V, field: &Field) -> Self {
        Self::monomial(Monomial::var(v), field.one(), field)
    }

    pub fn monomial(m: Monomial<V>, c: Fe, field: &Field) -> Self {
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// Collects terms, adding coefficients of repeated monomials and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial<V>, Fe)>, field: &Field) -> Self {
        let mut map: BTreeMap<Monomial<V>, Fe> = BTreeMap::new();
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(acc) => *acc = field.add(acc, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        map.retain(|_, c| !field.is_zero(c));
        Poly { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial<V>, &Fe)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial<V>) -> Option<&Fe> {
        self.terms.get(m)
    }

    pub fn constant_term(&self, field: &Field) -> Fe {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(|| field.zero())
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// True when every monomial has degree at most one.
    pub fn is_affine(&self) -> bool {
        self.terms.keys().all(|m| m.degree() <= 1)
    }

    pub fn variables(&self) -> BTreeSet<V> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn check_coeffs(&self, field: &Field) -> Result<()> {
        self.terms.values().try_for_each(|c| field.check(c))
    }

    pub fn add(&self, other: &Self, field: &Field) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(acc) => {
                    *acc = field.add(acc, c);
                    if field.is_zero(acc) {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Poly { terms }
    }

    pub fn neg(&self, field: &Field) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), field.neg(c))).collect() }
    }

    pub fn sub(&self, other: &Self, field: &Field) -> Self {
        self.add(&other.neg(field), field)
    }

    pub fn scale(&self, c: &Fe, field: &Field) -> Self {
        if field.is_zero(c) {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), field.mul(a, c))).collect() }
    }

    /// Relative cost of one coefficient product: 1 over finite fields.
    fn coeff_cost(&self, other: &Self) -> usize {
        let bits = |p: &Self| {
            p.terms.values().try_fold(0u64, |acc, c| match c {
                Fe::Q(q) => Some(acc.max(q.numer().bits() + q.denom().bits())),
                Fe::F(_) => None,
            })
        };
        match (bits(self), bits(other)) {
            (Some(a), Some(b)) => (1 + (a + b) / 64) as usize,
            _ => 1,
        }
    }

    pub fn mul(&self, other: &Self, field: &Field, budget: usize) -> Result<Self> {
        self.mul_counted(other, field, budget, &mut 0)
    }

    fn mul_counted(&self, other: &Self, field: &Field, budget: usize, work: &mut usize) -> Result<Self> {
        let pairs = self.len().saturating_mul(other.len());
        *work = work.saturating_add(pairs.saturating_mul(self.coeff_cost(other)));
        if *work > budget.saturating_mul(WORK_PER_TERM) {
            return Err(Error::TermBlowup { budget });
        }
        let mut acc: HashMap<Monomial<V>, Fe> = HashMap::with_capacity(self.len().max(other.len()));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = field.mul(c1, c2);
                match acc.get_mut(&m) {
                    Some(x) => *x = field.add(x, &c),
                    None => {
                        acc.insert(m, c);
                        if acc.len() > budget {
                            return Err(Error::TermBlowup { budget });
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        Ok(Poly { terms })
    }

    pub fn pow(&self, e: u32, field: &Field, budget: usize) -> Result<Self> {
        self.pow_counted(e, field, budget, &mut 0)
    }

    fn pow_counted(&self, mut e: u32, field: &Field, budget: usize, work: &mut usize) -> Result<Self> {
        let mut acc = Self::constant(field.one(), field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_counted(&base, field, budget, work)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_counted(&base, field, budget, work)?;
            }
        }
        Ok(acc)
    }

    /// Renames variables; collisions merge exponents and like terms.
    pub fn map_vars<W: Ord + Clone + Hash>(&self, mut f: impl FnMut(&V) -> W, field: &Field) -> Poly<W> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&mut f), c.clone())), field)
    }

    /// Replaces every variable `v` by the polynomial `sub(v)` and expands.
    pub fn substitute<W: Ord + Clone + Hash>(
        &self,
        mut sub: impl FnMut(&V) -> Result<Poly<W>>,
        field: &Field,
        budget: usize,
    ) -> Result<Poly<W>> {
        let mut needed: BTreeMap<V, BTreeSet<u32>> = BTreeMap::new();
        for m in self.terms.keys() {
            for (v, e) in &m.0 {
                needed.entry(v.clone()).or_default().insert(*e);
            }
        }
        let mut work = 0;
        let mut powers: HashMap<(V, u32), Poly<W>> = HashMap::new();
        for (v, exps) in needed {
            let image = sub(&v)?;
            let (mut prev, mut acc) = (0, Poly::constant(field.one(), field));
            for e in exps {
                acc = acc.mul_counted(&image.pow_counted(e - prev, field, budget, &mut work)?, field, budget, &mut work)?;
                prev = e;
                powers.insert((v.clone(), e), acc.clone());
            }
        }
        let mut total: HashMap<Monomial<W>, Fe> = HashMap::new();
        for (m, c) in &self.terms {
            let mut prod = Poly::constant(c.clone(), field);
            for (v, e) in &m.0 {
                prod = prod.mul_counted(&powers[&(v.clone(), *e)], field, budget, &mut work)?;
                if prod.is_zero() {
                    break;
                }
            }
            for (m, c) in prod.terms {
                match total.get_mut(&m) {
                    Some(x) => *x = field.add(x, &c),
                    None => {
                        total.insert(m, c);
                        if total.len() > budget {
                            return Err(Error::TermBlowup { budget });
                        }
                    }
                }
            }
        }
        let terms = total.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        Ok(Poly { terms })
    }

    pub fn eval(&self, mut value: impl FnMut(&V) -> Fe, field: &Field) -> Fe {
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                t = field.mul(&t, &field.pow(&value(v), *e as u64));
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    /// Human readable form, highest monomial first, e.g. `X[g]*X[h]^2 + 1`.
    pub fn format(&self, field: &Field, mut var: impl FnMut(&V) -> String) -> String {
        let terms = self.terms.iter().rev().map(|(m, c)| {
            let (negative, coeff) = field.format_coeff(c);
            let body: Vec<String> = m.0.iter().map(|(v, e)| if *e == 1 { var(v) } else { format!("{}^{e}", var(v)) }).collect();
            (negative, with_coeff(&coeff, &body.join("*")))
        });
        join_signed(terms)
    }
}

/// `coeff*body`, dropping a unit coefficient; an empty body is the bare coefficient.
pub(crate) fn with_coeff(coeff: &str, body: &str) -> String {
    match (body.is_empty(), coeff) {
        (true, _) => coeff.to_string(),
        (false, "1") => body.to_string(),
        (false, _) => format!("{coeff}*{body}"),
    }
}

/// Joins `(negative, term)` pairs into `a - b + c`; no terms gives `0`.
pub(crate) fn join_signed(terms: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (i, (negative, term)) in terms.into_iter().enumerate() {
        match (i, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
