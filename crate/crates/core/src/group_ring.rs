//! Group rings `k[G]`, matrix rings `Mat_n(k[G])`, inverse search and
//! direct-finiteness checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::fields::{Fe, Field};
use crate::groups::{Group, GroupElem, MemorySet};
use crate::linalg::Matrix;
use crate::poly::{join_signed, with_coeff};

/// A finitely supported map `G -> k`, i.e. `sum a(g) g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem {
    group: Group,
    field: Field,
    terms: BTreeMap<GroupElem, Fe>,
}

impl GroupRingElem {
    pub fn zero(group: &Group, field: &Field) -> Self {
        GroupRingElem { group: group.clone(), field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(group: &Group, field: &Field) -> Self {
        Self::scalar(field.one(), group, field)
    }

    pub fn scalar(c: Fe, group: &Group, field: &Field) -> Self {
        Self::from_terms(group, field, [(group.identity(), c)]).expect("identity belongs to the group")
    }

    /// The basis element `g`.
    pub fn basis(g: GroupElem, group: &Group, field: &Field) -> Result<Self> {
        Self::from_terms(group, field, [(g, field.one())])
    }

    pub fn from_terms(group: &Group, field: &Field, terms: impl IntoIterator<Item = (GroupElem, Fe)>) -> Result<Self> {
        let mut map: BTreeMap<GroupElem, Fe> = BTreeMap::new();
        for (g, c) in terms {
            group.check(&g)?;
            field.check(&c)?;
            let entry = map.entry(g).or_insert_with(|| field.zero());
            *entry = field.add(entry, &c);
        }
        map.retain(|_, c| !field.is_zero(c));
        Ok(GroupRingElem { group: group.clone(), field: field.clone(), terms: map })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElem, &Fe)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElem) -> Fe {
        self.terms.get(g).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn support(&self) -> MemorySet {
        self.terms.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.field.is_one(&self.coeff(&self.group.identity()))
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(mismatch(format!("groups {} and {} differ", self.group.name(), other.group.name())));
        }
        if self.field != other.field {
            return Err(mismatch(format!("fields {} and {} differ", self.field, other.field)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let mut terms = self.terms.clone();
        for (g, c) in &other.terms {
            let entry = terms.entry(g.clone()).or_insert_with(|| self.field.zero());
            *entry = self.field.add(entry, c);
        }
        terms.retain(|_, c| !self.field.is_zero(c));
        Ok(GroupRingElem { terms, ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(g, c)| (g.clone(), self.field.neg(c))).collect();
        GroupRingElem { terms, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Fe) -> Self {
        let mut terms: BTreeMap<GroupElem, Fe> = self.terms.iter().map(|(g, a)| (g.clone(), self.field.mul(a, c))).collect();
        terms.retain(|_, c| !self.field.is_zero(c));
        GroupRingElem { terms, ..self.clone() }
    }

    /// Convolution: `(ab)(m) = sum_{hk = m} a(h) b(k)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let mut terms: BTreeMap<GroupElem, Fe> = BTreeMap::new();
        for (h, a) in &self.terms {
            for (k, b) in &other.terms {
                let m = self.group.mul_unchecked(h, k);
                let entry = terms.entry(m).or_insert_with(|| self.field.zero());
                *entry = self.field.add(entry, &self.field.mul(a, b));
            }
        }
        terms.retain(|_, c| !self.field.is_zero(c));
        Ok(GroupRingElem { terms, ..self.clone() })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(&self.group, &self.field);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Matrix of left multiplication by `self` on the basis `G` (finite groups).
    pub fn regular_representation(&self) -> Result<Matrix> {
        let elems = self.group.elements()?;
        let n = elems.len();
        let mut m = Matrix::zeros(n, n, &self.field);
        for (col, h) in elems.iter().enumerate() {
            for (g, c) in &self.terms {
                let GroupElem::Id(row) = self.group.mul_unchecked(g, h) else { unreachable!() };
                let v = self.field.add(m.get(row as usize, col), c);
                m.set(row as usize, col, v);
            }
        }
        Ok(m)
    }

    /// E.g. `2*[g] - [h] + 1`; the identity component is printed as a bare scalar, last.
    pub fn format(&self) -> String {
        let id = self.group.identity();
        let mut terms: Vec<(bool, String)> = Vec::new();
        for (g, c) in self.terms.iter().filter(|(g, _)| **g != id) {
            let (neg, coeff) = self.field.format_coeff(c);
            terms.push((neg, with_coeff(&coeff, &format!("[{}]", self.group.format_elem(g)))));
        }
        if let Some(c) = self.terms.get(&id) {
            let (neg, coeff) = self.field.format_coeff(c);
            terms.push((neg, coeff));
        }
        join_signed(terms)
    }
}

/// An `n x n` matrix over `k[G]`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingMatrix {
    n: usize,
    group: Group,
    field: Field,
    entries: Vec<GroupRingElem>,
}

impl GroupRingMatrix {
    pub fn new(n: usize, entries: Vec<GroupRingElem>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidArgument(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        let (group, field) = (entries[0].group.clone(), entries[0].field.clone());
        for e in &entries {
            e.same_ctx(&entries[0])?;
        }
        Ok(GroupRingMatrix { n, group, field, entries })
    }

    pub fn from_rows(rows: Vec<Vec<GroupRingElem>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix over k[G] must be square".into()));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    pub fn scalar(a: GroupRingElem) -> Self {
        GroupRingMatrix { n: 1, group: a.group.clone(), field: a.field.clone(), entries: vec![a] }
    }

    pub fn identity(n: usize, group: &Group, field: &Field) -> Self {
        let entries =
            (0..n * n).map(|k| if k / n == k % n { GroupRingElem::one(group, field) } else { GroupRingElem::zero(group, field) }).collect();
        GroupRingMatrix { n, group: group.clone(), field: field.clone(), entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElem {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[GroupRingElem] {
        &self.entries
    }

    /// Union of the supports of all entries.
    pub fn support(&self) -> MemorySet {
        self.entries.iter().fold(MemorySet::default(), |acc, e| acc.union(&e.support()))
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(mismatch(format!("matrix sizes {} and {} differ", self.n, other.n)));
        }
        self.entries[0].same_ctx(&other.entries[0])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(GroupRingMatrix { entries, ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        GroupRingMatrix { entries: self.entries.iter().map(GroupRingElem::neg).collect(), ..self.clone() }
    }

    pub fn scale(&self, c: &Fe) -> Self {
        GroupRingMatrix { entries: self.entries.iter().map(|e| e.scale(c)).collect(), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GroupRingElem::zero(&self.group, &self.field);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(GroupRingMatrix { entries, ..self.clone() })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity(self.n, &self.group, &self.field);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Matrix of `v -> self * v` on `k[G]^n`, basis ordered by (row, group element).
    pub fn regular_representation(&self) -> Result<Matrix> {
        let order = self.group.order().ok_or(Error::InfiniteGroup)?;
        let dim = self.n * order;
        let mut out = Matrix::zeros(dim, dim, &self.field);
        for i in 0..self.n {
            for j in 0..self.n {
                let block = self.get(i, j).regular_representation()?;
                for r in 0..order {
                    for c in 0..order {
                        out.set(i * order + r, j * order + c, block.get(r, c).clone());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn format(&self) -> String {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let cells: Vec<String> = (0..self.n).map(|j| self.get(i, j).format()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// Scope of the bounded inverse search over infinite groups.
#[derive(Clone, Copy, Debug)]
pub struct InverseSearch {
    /// Candidate inverses are supported in the ball of this radius.
    pub support_radius: u32,
    /// Cap on the number of unknown coefficients in the linear system.
    pub max_unknowns: usize,
}

impl Default for InverseSearch {
    fn default() -> Self {
        InverseSearch { support_radius: 3, max_unknowns: 4096 }
    }
}

/// Finds `b` with `a * b = 1`.
///
/// For finite groups the answer is exact: `Ok(None)` means no right inverse
/// exists. For infinite groups the unknown is restricted to the ball of
/// `opts.support_radius`; failure there is inconclusive and reported as
/// [`Error::SearchBudgetExceeded`], never as a proof of non-existence.
pub fn find_right_inverse(a: &GroupRingMatrix, opts: InverseSearch) -> Result<Option<GroupRingMatrix>> {
    let n = a.n;
    let (group, field) = (&a.group, &a.field);
    let window: Vec<GroupElem> = match group.elements() {
        Ok(all) => all,
        Err(_) => group.ball(opts.support_radius),
    };
    let unknowns = n * window.len();
    if unknowns > opts.max_unknowns {
        return Err(Error::SearchBudgetExceeded(format!("{unknowns} unknown coefficients exceed the cap of {}", opts.max_unknowns)));
    }
    // equations indexed by (row, group element) over supp(a) * window ∪ {1}
    let support = a.support();
    let targets: MemorySet = support
        .iter()
        .flat_map(|h| window.iter().map(move |w| group.mul_unchecked(h, w)))
        .chain(std::iter::once(group.identity()))
        .collect();
    let rows = n * targets.len();
    let mut system = Matrix::zeros(rows, unknowns, field);
    for i in 0..n {
        for j in 0..n {
            for (h, c) in a.get(i, j).terms() {
                for (wi, w) in window.iter().enumerate() {
                    let m = group.mul_unchecked(h, w);
                    let r = i * targets.len() + targets.index_of(&m).expect("target set covers products");
                    let col = j * window.len() + wi;
                    let v = field.add(system.get(r, col), c);
                    system.set(r, col, v);
                }
            }
        }
    }
    let id_index = targets.index_of(&group.identity()).unwrap();
    let rhs: Vec<Vec<Fe>> =
        (0..n).map(|l| (0..rows).map(|r| if r == l * targets.len() + id_index { field.one() } else { field.zero() }).collect()).collect();
    match system.solve_many(&rhs, field) {
        Some(cols) => {
            let mut entries = vec![GroupRingElem::zero(group, field); n * n];
            for (l, col) in cols.into_iter().enumerate() {
                for j in 0..n {
                    let terms = window.iter().enumerate().map(|(wi, w)| (w.clone(), col[j * window.len() + wi].clone()));
                    entries[j * n + l] = GroupRingElem::from_terms(group, field, terms)?;
                }
            }
            Ok(Some(GroupRingMatrix::new(n, entries)?))
        }
        None if group.is_finite() => Ok(None),
        None => Err(Error::SearchBudgetExceeded(format!("no right inverse supported in the ball of radius {}", opts.support_radius))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DirectFinitenessReport {
    pub ab_is_one: bool,
    pub ba_is_one: bool,
}

impl DirectFinitenessReport {
    /// `ab = 1` without `ba = 1` would refute direct finiteness.
    pub fn is_violation(&self) -> bool {
        self.ab_is_one && !self.ba_is_one
    }
}

pub fn check_direct_finiteness(a: &GroupRingMatrix, b: &GroupRingMatrix) -> Result<DirectFinitenessReport> {
    Ok(DirectFinitenessReport { ab_is_one: a.mul(b)?.is_identity(), ba_is_one: b.mul(a)?.is_identity() })
}

/// Totals of a direct-finiteness sweep over one `(G, k, n)` cell.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub group: String,
    pub field: String,
    pub n: usize,
    pub exhaustive: bool,
    pub checked: usize,
    pub right_invertible: usize,
    /// `ab = 1` but `ba != 1`.
    pub violations: usize,
    /// Inverse search and the regular representation disagree.
    pub representation_disagreements: usize,
}

fn random_coeff(field: &Field, rng: &mut ChaCha8Rng) -> Fe {
    match field {
        Field::Rational => {
            if rng.gen_bool(0.3) {
                field.zero()
            } else {
                field.from_i64(rng.gen_range(-3..=3))
            }
        }
        Field::Finite(f) => Fe::F(rng.gen_range(0..f.order())),
    }
}

/// A unit built as a product of elementary matrices and monomial diagonal matrices.
fn random_unit(group: &Group, field: &Field, n: usize, rng: &mut ChaCha8Rng) -> GroupRingMatrix {
    let mut acc = GroupRingMatrix::identity(n, group, field);
    for _ in 0..rng.gen_range(1..4) {
        let mut entries = GroupRingMatrix::identity(n, group, field).entries;
        if n > 1 && rng.gen_bool(0.6) {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let terms: Vec<(GroupElem, Fe)> = (0..2).map(|_| (group.random_elem(rng, 2), random_coeff(field, rng))).collect();
            entries[i * n + j] = GroupRingElem::from_terms(group, field, terms).unwrap();
        } else {
            let i = rng.gen_range(0..n);
            let mut c = random_coeff(field, rng);
            if field.is_zero(&c) {
                c = field.one();
            }
            entries[i * n + i] = GroupRingElem::from_terms(group, field, [(group.random_elem(rng, 2), c)]).unwrap();
        }
        acc = acc.mul(&GroupRingMatrix::new(n, entries).unwrap()).unwrap();
    }
    acc
}

fn sweep_one(a: &GroupRingMatrix) -> Result<(bool, bool, bool)> {
    let rep = a.regular_representation()?;
    let rep_invertible = rep.rank(&a.field) == rep.rows();
    let found = find_right_inverse(a, InverseSearch::default())?;
    match found {
        Some(b) => {
            let report = check_direct_finiteness(a, &b)?;
            let rep_ok = rep_invertible && b.regular_representation()?.mul(&rep, &a.field)?.is_identity(&a.field);
            Ok((true, report.is_violation() || !report.ab_is_one, !rep_ok))
        }
        None => Ok((false, false, rep_invertible)),
    }
}

/// Searches `Mat_n(k[G])` for one-sided units and checks each is two-sided.
///
/// Enumerates every matrix when there are at most `exhaustive_limit` of them;
/// otherwise checks `samples` seeded random matrices, half of them built as
/// products of elementary and monomial matrices so that units are well represented.
pub fn direct_finiteness_sweep(
    group: &Group,
    field: &Field,
    n: usize,
    exhaustive_limit: u64,
    samples: usize,
    seed: u64,
) -> Result<SweepReport> {
    let elems = group.elements()?;
    let slots = n * n * elems.len();
    let total = field.order().and_then(|q| q.checked_pow(slots as u32));
    let exhaustive = matches!(total, Some(t) if t <= exhaustive_limit);
    let build = |idx: u64, rng_seed: u64| -> GroupRingMatrix {
        if exhaustive {
            let q = field.order().unwrap();
            let mut t = idx;
            let mut coeffs = Vec::with_capacity(slots);
            for _ in 0..slots {
                coeffs.push(Fe::F(t % q));
                t /= q;
            }
            let entries = (0..n * n)
                .map(|k| {
                    let terms = elems.iter().cloned().zip(coeffs[k * elems.len()..(k + 1) * elems.len()].iter().cloned());
                    GroupRingElem::from_terms(group, field, terms).unwrap()
                })
                .collect();
            GroupRingMatrix::new(n, entries).unwrap()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            if idx % 2 == 0 {
                random_unit(group, field, n, &mut rng)
            } else {
                let entries = (0..n * n)
                    .map(|_| {
                        let terms: Vec<(GroupElem, Fe)> = elems.iter().map(|g| (g.clone(), random_coeff(field, &mut rng))).collect();
                        GroupRingElem::from_terms(group, field, terms).unwrap()
                    })
                    .collect();
                GroupRingMatrix::new(n, entries).unwrap()
            }
        }
    };
    let count = if exhaustive { total.unwrap() } else { samples as u64 };
    let results: Vec<Result<(bool, bool, bool)>> =
        (0..count).into_par_iter().map(|idx| sweep_one(&build(idx, seed.wrapping_mul(1_000_003).wrapping_add(idx)))).collect();
    let mut report = SweepReport { group: group.name().to_string(), field: field.to_string(), n, exhaustive, ..Default::default() };
    for r in results {
        let (found, violation, disagreement) = r?;
        report.checked += 1;
        report.right_invertible += usize::from(found);
        report.violations += usize::from(violation);
        report.representation_disagreements += usize::from(disagreement);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::integers()
    }

    fn t_pow(k: i64, field: &Field) -> GroupRingElem {
        GroupRingElem::basis(GroupElem::int(k), &z(), field).unwrap()
    }

    fn c(n: i64, field: &Field, group: &Group) -> GroupRingElem {
        GroupRingElem::scalar(field.from_i64(n), group, field)
    }

    #[test]
    fn telescoping_product() {
        let q = Field::Rational;
        let one = c(1, &q, &z());
        let a = one.sub(&t_pow(1, &q)).unwrap();
        let b = one.add(&t_pow(1, &q)).unwrap().add(&t_pow(2, &q)).unwrap();
        let expected = one.sub(&t_pow(3, &q)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expected);
        assert_eq!(one.mul(&a).unwrap(), a);
        assert_eq!(expected.format(), "-[3] + 1");
    }

    #[test]
    fn char_two_square_vanishes() {
        let f2 = Field::gf(2, 1).unwrap();
        let c2 = Group::cyclic(2);
        let g = GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &f2).unwrap();
        let one_plus_g = c(1, &f2, &c2).add(&g).unwrap();
        assert!(one_plus_g.mul(&one_plus_g).unwrap().is_zero());
    }

    #[test]
    fn matrix_products() {
        let f2 = Field::gf(2, 1).unwrap();
        let one = c(1, &f2, &z());
        let zero = GroupRingElem::zero(&z(), &f2);
        let e = GroupRingMatrix::from_rows(vec![vec![one.clone(), t_pow(1, &f2)], vec![zero.clone(), one.clone()]]).unwrap();
        assert!(e.mul(&e).unwrap().is_identity());
        let id = GroupRingMatrix::identity(2, &z(), &f2);
        assert_eq!(id.mul(&e).unwrap(), e);

        let q = Field::Rational;
        let d = GroupRingMatrix::from_rows(vec![
            vec![t_pow(1, &q), GroupRingElem::zero(&z(), &q)],
            vec![GroupRingElem::zero(&z(), &q), c(1, &q, &z())],
        ])
        .unwrap();
        let d_inv = GroupRingMatrix::from_rows(vec![
            vec![t_pow(-1, &q), GroupRingElem::zero(&z(), &q)],
            vec![GroupRingElem::zero(&z(), &q), c(1, &q, &z())],
        ])
        .unwrap();
        assert!(d.mul(&d_inv).unwrap().is_identity());
    }

    #[test]
    fn regular_representations() {
        let q = Field::Rational;
        let c2 = Group::cyclic(2);
        assert!(c(1, &q, &c2).regular_representation().unwrap().is_identity(&q));
        let g = GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &q).unwrap();
        let rep = g.regular_representation().unwrap();
        assert_eq!(rep, Matrix::from_rows(vec![vec![q.zero(), q.one()], vec![q.one(), q.zero()]]).unwrap());
        let f2 = Field::gf(2, 1).unwrap();
        let g2 = GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &f2).unwrap();
        let rep = c(1, &f2, &c2).add(&g2).unwrap().regular_representation().unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| f2.is_one(rep.get(i, j)))));
        assert!(matches!(t_pow(1, &q).regular_representation(), Err(Error::InfiniteGroup)));
    }

    #[test]
    fn representation_is_multiplicative() {
        let q = Field::Rational;
        let s3 = Group::symmetric(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mk = |rng: &mut ChaCha8Rng| {
                let terms: Vec<(GroupElem, Fe)> = (0..3).map(|_| (s3.random_elem(rng, 0), q.from_i64(rng.gen_range(-2..3)))).collect();
                GroupRingElem::from_terms(&s3, &q, terms).unwrap()
            };
            let (a, b) = (mk(&mut rng), mk(&mut rng));
            let lhs = a.mul(&b).unwrap().regular_representation().unwrap();
            let rhs = a.regular_representation().unwrap().mul(&b.regular_representation().unwrap(), &q).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn right_inverse_examples() {
        let q = Field::Rational;
        let c4 = Group::cyclic(4);
        let g = GroupRingMatrix::scalar(GroupRingElem::basis(c4.parse_elem("a").unwrap(), &c4, &q).unwrap());
        let inv = find_right_inverse(&g, InverseSearch::default()).unwrap().unwrap();
        assert_eq!(inv.get(0, 0), &GroupRingElem::basis(c4.parse_elem("a^3").unwrap(), &c4, &q).unwrap());

        let f2 = Field::gf(2, 1).unwrap();
        let c2 = Group::cyclic(2);
        let a = c(1, &f2, &c2).add(&GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &f2).unwrap()).unwrap();
        assert_eq!(find_right_inverse(&GroupRingMatrix::scalar(a), InverseSearch::default()).unwrap(), None);

        let half = q.div(&q.one(), &q.from_i64(2)).unwrap();
        let idem = c(1, &q, &c2).add(&GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &q).unwrap()).unwrap().scale(&half);
        assert_eq!(idem.mul(&idem).unwrap(), idem);
        assert_eq!(find_right_inverse(&GroupRingMatrix::scalar(idem), InverseSearch::default()).unwrap(), None);
    }

    #[test]
    fn bounded_search_over_z() {
        let q = Field::Rational;
        let t = GroupRingMatrix::scalar(t_pow(2, &q));
        let inv = find_right_inverse(&t, InverseSearch::default()).unwrap().unwrap();
        assert_eq!(inv.get(0, 0), &t_pow(-2, &q));
        // 1 - t is not a unit of Q[Z]; the search can only be inconclusive
        let a = GroupRingMatrix::scalar(c(1, &q, &z()).sub(&t_pow(1, &q)).unwrap());
        assert!(matches!(find_right_inverse(&a, InverseSearch::default()), Err(Error::SearchBudgetExceeded(_))));
        let tight = InverseSearch { support_radius: 50, max_unknowns: 10 };
        assert!(matches!(find_right_inverse(&t, tight), Err(Error::SearchBudgetExceeded(_))));
    }

    #[test]
    fn elementary_pair_is_two_sided() {
        let q = Field::Rational;
        let one = c(1, &q, &z());
        let zero = GroupRingElem::zero(&z(), &q);
        let a = GroupRingMatrix::from_rows(vec![vec![one.clone(), t_pow(1, &q)], vec![zero.clone(), one.clone()]]).unwrap();
        let b = GroupRingMatrix::from_rows(vec![vec![one.clone(), t_pow(1, &q).neg()], vec![zero, one]]).unwrap();
        let r = check_direct_finiteness(&a, &b).unwrap();
        assert_eq!(r, DirectFinitenessReport { ab_is_one: true, ba_is_one: true });
        let found = find_right_inverse(&a, InverseSearch::default()).unwrap().unwrap();
        assert_eq!(found, b);

        let t = GroupRingMatrix::scalar(t_pow(1, &q));
        let tinv = GroupRingMatrix::scalar(t_pow(-1, &q));
        assert_eq!(check_direct_finiteness(&t, &tinv).unwrap(), DirectFinitenessReport { ab_is_one: true, ba_is_one: true });
    }

    #[test]
    fn non_unit_pair() {
        let f2 = Field::gf(2, 1).unwrap();
        let c2 = Group::cyclic(2);
        let one = c(1, &f2, &c2);
        let a = one.add(&GroupRingElem::basis(c2.parse_elem("a").unwrap(), &c2, &f2).unwrap()).unwrap();
        let r = check_direct_finiteness(&GroupRingMatrix::scalar(one), &GroupRingMatrix::scalar(a)).unwrap();
        assert_eq!(r, DirectFinitenessReport { ab_is_one: false, ba_is_one: false });
    }

    #[test]
    fn small_sweep() {
        let f2 = Field::gf(2, 1).unwrap();
        let r = direct_finiteness_sweep(&Group::cyclic(2), &f2, 1, 1 << 12, 0, 0).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.checked, 4);
        // units of F2[C2]: 1 and g
        assert_eq!(r.right_invertible, 2);
        assert_eq!(r.violations, 0);
        assert_eq!(r.representation_disagreements, 0);
    }

    #[test]
    fn context_mismatch() {
        let q = Field::Rational;
        let f2 = Field::gf(2, 1).unwrap();
        assert!(matches!(c(1, &q, &z()).mul(&c(1, &f2, &z())), Err(Error::ContextMismatch(_))));
        let c2 = Group::cyclic(2);
        assert!(matches!(c(1, &q, &z()).add(&c(1, &q, &c2)), Err(Error::ContextMismatch(_))));
    }
}
