//! Group backends with a solvable word problem.
//!
//! Three backends are supported: finite groups given by a validated Cayley
//! table, free abelian groups `Z^d`, and free groups on named generators.
//! Elements are plain values in normal form; every operation goes through the
//! [`Group`] handle, which checks that the payload belongs to it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{mismatch, Error, Result};

/// A group element in backend normal form.
///
/// * `Id` indexes a row of a Cayley table.
/// * `Vector` is a point of `Z^d`.
/// * `Word` is a freely reduced word; letter `k + 1` is the `k`-th generator
///   and `-(k + 1)` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElem {
    Id(u32),
    Vector(Box<[i64]>),
    Word(Box<[i32]>),
}

impl GroupElem {
    pub fn int(n: i64) -> Self {
        GroupElem::Vector(Box::new([n]))
    }

    pub fn vector(v: &[i64]) -> Self {
        GroupElem::Vector(v.into())
    }

    /// The integer payload of an element of `Z`.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            GroupElem::Vector(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }

    fn variant(&self) -> u8 {
        match self {
            GroupElem::Id(_) => 0,
            GroupElem::Vector(_) => 1,
            GroupElem::Word(_) => 2,
        }
    }
}

fn letter_key(l: i32) -> u32 {
    let k = l.unsigned_abs() - 1;
    2 * k + u32::from(l < 0)
}

impl Ord for GroupElem {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GroupElem::Id(a), GroupElem::Id(b)) => a.cmp(b),
            (GroupElem::Vector(a), GroupElem::Vector(b)) => a.cmp(b),
            (GroupElem::Word(a), GroupElem::Word(b)) => {
                a.len().cmp(&b.len()).then_with(|| a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l))))
            }
            _ => self.variant().cmp(&other.variant()),
        }
    }
}

impl PartialOrd for GroupElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite group stored as a Cayley table over element ids `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    identity: u32,
    names: Vec<String>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity_id(&self) -> u32 {
        self.identity
    }

    pub fn product_id(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inverse_id(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Finite(FiniteGroup),
    FreeAbelian { rank: usize },
    Free { generators: Vec<String> },
}

#[derive(Debug)]
struct GroupData {
    name: String,
    kind: GroupKind,
}

/// Shared handle to a group backend. Cloning is cheap.
#[derive(Clone)]
pub struct Group(Arc<GroupData>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.name)
    }
}

impl Group {
    fn new(name: impl Into<String>, kind: GroupKind) -> Self {
        Group(Arc::new(GroupData { name: name.into(), kind }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> &GroupKind {
        &self.0.kind
    }

    /// Builds a finite group from a Cayley table, verifying the group axioms.
    pub fn from_cayley_table(name: impl Into<String>, rows: Vec<Vec<u32>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &x in row {
                if x as usize >= n {
                    return Err(Error::InvalidGroup(format!("entry {x} out of range in row {i}")));
                }
                table.push(x);
            }
        }
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![0u32; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverse[a] = b as u32;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(v) => {
                return Err(Error::InvalidGroup(format!("{} names for {n} elements", v.len())));
            }
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        Ok(Group::new(name, GroupKind::Finite(FiniteGroup { order: n, table, inverse, identity: identity as u32, names })))
    }

    /// Reads a Cayley table given as comma separated element ids, one row per line.
    pub fn from_cayley_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| Error::InvalidGroup(format!("line {}: bad entry {s:?}", lineno + 1))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_cayley_table(name, rows, None)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let rows = (0..n).map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect()).collect();
        let names = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            })
            .collect();
        Self::from_cayley_table(format!("C{n}"), rows, Some(names)).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2n`; ids `0..n` are rotations `r^i`, ids `n..2n` are `s*r^i`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        // (s^a r^i)(s^b r^j) = s^(a+b) r^((-1)^b i + j)
        let decode = |x: usize| (x / n, x % n);
        let rows = (0..2 * n)
            .map(|x| {
                let (a, i) = decode(x);
                (0..2 * n)
                    .map(|y| {
                        let (b, j) = decode(y);
                        let i2 = if b == 1 { (n - i) % n } else { i };
                        (((a + b) % 2) * n + (i2 + j) % n) as u32
                    })
                    .collect()
            })
            .collect();
        let names = (0..2 * n)
            .map(|x| {
                let (a, i) = decode(x);
                let rot = match i {
                    0 => String::new(),
                    1 => "r".to_string(),
                    _ => format!("r^{i}"),
                };
                match (a, rot.is_empty()) {
                    (0, true) => "1".to_string(),
                    (0, false) => rot,
                    (_, true) => "s".to_string(),
                    (_, false) => format!("s*{rot}"),
                }
            })
            .collect();
        Self::from_cayley_table(format!("D{n}"), rows, Some(names)).expect("dihedral table is a group")
    }

    /// Symmetric group on `n` points; elements in lexicographic order of their one-line notation.
    pub fn symmetric(n: usize) -> Self {
        assert!((1..=6).contains(&n));
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
        }
        let index: HashMap<Vec<usize>, u32> = perms.iter().enumerate().map(|(k, q)| (q.clone(), k as u32)).collect();
        let rows = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                        index[&st]
                    })
                    .collect()
            })
            .collect();
        let names = perms.iter().map(|s| cycle_notation(s)).collect();
        Self::from_cayley_table(format!("S{n}"), rows, Some(names)).expect("symmetric table is a group")
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // id = 2*unit + sign, units 1,i,j,k
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let rows = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, su) = (x / 2, x % 2 == 1);
                        let (v, sv) = (y / 2, y % 2 == 1);
                        let (w, sw) = UNIT[u][v];
                        (2 * w + usize::from(su ^ sv ^ sw)) as u32
                    })
                    .collect()
            })
            .collect();
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
        Self::from_cayley_table("Q8", rows, Some(names)).expect("quaternion table is a group")
    }

    pub fn integers() -> Self {
        Group::new("Z", GroupKind::FreeAbelian { rank: 1 })
    }

    pub fn free_abelian(rank: usize) -> Self {
        let name = if rank == 1 { "Z".to_string() } else { format!("Z^{rank}") };
        Group::new(name, GroupKind::FreeAbelian { rank })
    }

    /// Free group on generators `a, b, c, ...`.
    pub fn free(rank: usize) -> Self {
        let generators = (0..rank).map(|k| if k < 26 { ((b'a' + k as u8) as char).to_string() } else { format!("a{k}") }).collect();
        Group::new(format!("F{rank}"), GroupKind::Free { generators })
    }

    pub fn free_named(name: impl Into<String>, generators: Vec<String>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || !g.chars().all(|c| c.is_alphanumeric() || c == '_') || g == "1" {
                return Err(Error::InvalidGroup(format!("bad generator name {g:?}")));
            }
            if generators[..i].contains(g) {
                return Err(Error::InvalidGroup(format!("duplicate generator {g:?}")));
            }
        }
        Ok(Group::new(name, GroupKind::Free { generators }))
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        Group::new(name, self.0.kind.clone())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0.kind, GroupKind::Finite(_))
    }

    pub fn order(&self) -> Option<usize> {
        match &self.0.kind {
            GroupKind::Finite(f) => Some(f.order),
            _ => None,
        }
    }

    pub fn finite(&self) -> Option<&FiniteGroup> {
        match &self.0.kind {
            GroupKind::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// True for the backend `Z` (free abelian of rank one).
    pub fn is_integers(&self) -> bool {
        matches!(self.0.kind, GroupKind::FreeAbelian { rank: 1 })
    }

    /// Checks that `a` is a normal-form element of this group.
    pub fn check(&self, a: &GroupElem) -> Result<()> {
        match (&self.0.kind, a) {
            (GroupKind::Finite(f), GroupElem::Id(i)) if (*i as usize) < f.order => Ok(()),
            (GroupKind::FreeAbelian { rank }, GroupElem::Vector(v)) if v.len() == *rank => Ok(()),
            (GroupKind::Free { generators }, GroupElem::Word(w)) => {
                let ok =
                    w.iter().all(|&l| l != 0 && (l.unsigned_abs() as usize) <= generators.len()) && w.windows(2).all(|p| p[0] != -p[1]);
                if ok {
                    Ok(())
                } else {
                    Err(mismatch(format!("{a:?} is not a reduced word of {}", self.name())))
                }
            }
            _ => Err(mismatch(format!("{a:?} is not an element of {}", self.name()))),
        }
    }

    pub fn identity(&self) -> GroupElem {
        match &self.0.kind {
            GroupKind::Finite(f) => GroupElem::Id(f.identity),
            GroupKind::FreeAbelian { rank } => GroupElem::Vector(vec![0; *rank].into()),
            GroupKind::Free { .. } => GroupElem::Word(Box::new([])),
        }
    }

    pub fn is_identity(&self, a: &GroupElem) -> bool {
        *a == self.identity()
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    /// Product of two elements already known to belong to this group.
    pub(crate) fn mul_unchecked(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (&self.0.kind, a, b) {
            (GroupKind::Finite(f), GroupElem::Id(x), GroupElem::Id(y)) => GroupElem::Id(f.product_id(*x, *y)),
            (GroupKind::FreeAbelian { .. }, GroupElem::Vector(x), GroupElem::Vector(y)) => {
                GroupElem::Vector(x.iter().zip(y.iter()).map(|(p, q)| p + q).collect())
            }
            (GroupKind::Free { .. }, GroupElem::Word(x), GroupElem::Word(y)) => {
                let mut out: Vec<i32> = x.to_vec();
                for &l in y.iter() {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                GroupElem::Word(out.into())
            }
            _ => panic!("mul_unchecked called with foreign elements"),
        }
    }

    pub fn inv(&self, a: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    pub(crate) fn inv_unchecked(&self, a: &GroupElem) -> GroupElem {
        match (&self.0.kind, a) {
            (GroupKind::Finite(f), GroupElem::Id(x)) => GroupElem::Id(f.inverse_id(*x)),
            (_, GroupElem::Vector(v)) => GroupElem::Vector(v.iter().map(|x| -x).collect()),
            (_, GroupElem::Word(w)) => GroupElem::Word(w.iter().rev().map(|l| -l).collect()),
            _ => panic!("inv_unchecked called with a foreign element"),
        }
    }

    /// All elements of a finite group in canonical (id) order.
    pub fn elements(&self) -> Result<Vec<GroupElem>> {
        match &self.0.kind {
            GroupKind::Finite(f) => Ok((0..f.order as u32).map(GroupElem::Id).collect()),
            _ => Err(Error::InfiniteGroup),
        }
    }

    /// Elements of word length at most `radius` (a box of side `2*radius+1` for `Z^d`).
    pub fn ball(&self, radius: u32) -> Vec<GroupElem> {
        match &self.0.kind {
            GroupKind::Finite(f) => (0..f.order as u32).map(GroupElem::Id).collect(),
            GroupKind::FreeAbelian { rank } => {
                let r = radius as i64;
                let mut out = vec![Vec::<i64>::new()];
                for _ in 0..*rank {
                    out = out
                        .into_iter()
                        .flat_map(|v| {
                            (-r..=r).map(move |x| {
                                let mut w = v.clone();
                                w.push(x);
                                w
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|v| GroupElem::Vector(v.into())).collect()
            }
            GroupKind::Free { generators } => {
                let k = generators.len() as i32;
                let letters: Vec<i32> = (1..=k).flat_map(|g| [g, -g]).collect();
                let mut all = vec![Vec::<i32>::new()];
                let mut frontier = all.clone();
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for &l in &letters {
                            if w.last() != Some(&-l) {
                                let mut v = w.clone();
                                v.push(l);
                                next.push(v);
                            }
                        }
                    }
                    all.extend(next.iter().cloned());
                    frontier = next;
                }
                let mut out: Vec<GroupElem> = all.into_iter().map(|w| GroupElem::Word(w.into())).collect();
                out.sort();
                out
            }
        }
    }

    /// A uniformly chosen element of the ball of the given radius.
    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R, radius: u32) -> GroupElem {
        match &self.0.kind {
            GroupKind::Finite(f) => GroupElem::Id(rng.gen_range(0..f.order as u32)),
            GroupKind::FreeAbelian { rank } => {
                let r = radius as i64;
                GroupElem::Vector((0..*rank).map(|_| rng.gen_range(-r..=r)).collect())
            }
            GroupKind::Free { generators } => {
                let k = generators.len() as i32;
                let len = rng.gen_range(0..=radius);
                let mut w: Vec<i32> = Vec::new();
                while w.len() < len as usize {
                    let g = rng.gen_range(1..=k);
                    let l = if rng.gen_bool(0.5) { g } else { -g };
                    if w.last() != Some(&-l) {
                        w.push(l);
                    }
                }
                GroupElem::Word(w.into())
            }
        }
    }

    pub fn product_set(&self, m1: &MemorySet, m2: &MemorySet) -> Result<MemorySet> {
        for a in m1.iter().chain(m2.iter()) {
            self.check(a)?;
        }
        Ok(MemorySet::new(m1.iter().flat_map(|a| m2.iter().map(move |b| self.mul_unchecked(a, b)))))
    }

    /// `M ∪ M⁻¹ ∪ {1}`.
    pub fn symmetrize(&self, m: &MemorySet) -> Result<MemorySet> {
        for a in m.iter() {
            self.check(a)?;
        }
        Ok(MemorySet::new(m.iter().cloned().chain(m.iter().map(|a| self.inv_unchecked(a))).chain(std::iter::once(self.identity()))))
    }

    pub fn is_symmetric(&self, m: &MemorySet) -> bool {
        m.contains(&self.identity()) && m.iter().all(|a| m.contains(&self.inv_unchecked(a)))
    }

    /// Left translate of a set: `gM`.
    pub fn translate_set(&self, g: &GroupElem, m: &MemorySet) -> Result<MemorySet> {
        self.check(g)?;
        for a in m.iter() {
            self.check(a)?;
        }
        Ok(MemorySet::new(m.iter().map(|a| self.mul_unchecked(g, a))))
    }

    pub fn parse_elem(&self, src: &str) -> Result<GroupElem> {
        let s = src.trim();
        let bad = || Error::InvalidElement(format!("{s:?} is not an element of {}", self.name()));
        match &self.0.kind {
            GroupKind::Finite(f) => {
                if let Some(i) = f.names.iter().position(|n| n == s) {
                    return Ok(GroupElem::Id(i as u32));
                }
                if s == "e" || s == "1" {
                    return Ok(GroupElem::Id(f.identity));
                }
                if let Some(rest) = s.strip_prefix('g') {
                    if let Ok(i) = rest.parse::<usize>() {
                        if i < f.order {
                            return Ok(GroupElem::Id(i as u32));
                        }
                    }
                }
                Err(bad())
            }
            GroupKind::FreeAbelian { rank } => {
                let inner = match s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                    Some(t) => t,
                    None if *rank == 1 || s == "0" => s,
                    None => return Err(bad()),
                };
                if s == "0" && *rank != 1 {
                    return Ok(self.identity());
                }
                let v = inner.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                if v.len() != *rank {
                    return Err(bad());
                }
                Ok(GroupElem::Vector(v.into()))
            }
            GroupKind::Free { generators } => {
                if s == "1" || s == "e" {
                    return Ok(self.identity());
                }
                let mut out = GroupElem::Word(Box::new([]));
                for factor in s.split('*') {
                    let factor = factor.trim();
                    let (base, exp) = match factor.split_once('^') {
                        Some((b, e)) => (b.trim(), e.trim().parse::<i32>().map_err(|_| bad())?),
                        None => (factor, 1),
                    };
                    if base == "1" {
                        continue;
                    }
                    let k = generators.iter().position(|g| g == base).ok_or_else(bad)? as i32 + 1;
                    let letter = if exp < 0 { -k } else { k };
                    let w: Vec<i32> = std::iter::repeat(letter).take(exp.unsigned_abs() as usize).collect();
                    out = self.mul_unchecked(&out, &GroupElem::Word(w.into()));
                }
                Ok(out)
            }
        }
    }

    pub fn format_elem(&self, a: &GroupElem) -> String {
        match (&self.0.kind, a) {
            (GroupKind::Finite(f), GroupElem::Id(i)) => f.names[*i as usize].clone(),
            (GroupKind::FreeAbelian { .. }, GroupElem::Vector(v)) => {
                if v.len() == 1 {
                    v[0].to_string()
                } else {
                    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    format!("({})", parts.join(","))
                }
            }
            (GroupKind::Free { generators }, GroupElem::Word(w)) => {
                if w.is_empty() {
                    return "1".to_string();
                }
                let mut parts = Vec::new();
                let mut i = 0;
                while i < w.len() {
                    let mut j = i;
                    while j < w.len() && w[j] == w[i] {
                        j += 1;
                    }
                    let name = &generators[w[i].unsigned_abs() as usize - 1];
                    let e = (j - i) as i64 * if w[i] < 0 { -1 } else { 1 };
                    parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
                    i = j;
                }
                parts.join("*")
            }
            _ => format!("{a:?}"),
        }
    }

    pub fn format_set(&self, m: &MemorySet) -> String {
        let parts: Vec<String> = m.iter().map(|a| self.format_elem(a)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut i = p[start];
        while i != start {
            seen[i] = true;
            cycle.push(i + 1);
            i = p[i];
        }
        let parts: Vec<String> = cycle.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("({})", parts.join(" ")));
    }
    if out.is_empty() {
        "1".to_string()
    } else {
        out
    }
}

/// A finite set of group elements, kept sorted in the backend's canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MemorySet(Vec<GroupElem>);

impl MemorySet {
    pub fn new(elems: impl IntoIterator<Item = GroupElem>) -> Self {
        let mut v: Vec<GroupElem> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        MemorySet(v)
    }

    pub fn singleton(g: GroupElem) -> Self {
        MemorySet(vec![g])
    }

    /// Memory set of integers, for the backend `Z`.
    pub fn ints(xs: impl IntoIterator<Item = i64>) -> Self {
        Self::new(xs.into_iter().map(GroupElem::int))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElem> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[GroupElem] {
        &self.0
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.0.binary_search(g).is_ok()
    }

    pub fn index_of(&self, g: &GroupElem) -> Option<usize> {
        self.0.binary_search(g).ok()
    }

    pub fn union(&self, other: &MemorySet) -> MemorySet {
        MemorySet::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn is_subset(&self, other: &MemorySet) -> bool {
        self.0.iter().all(|g| other.contains(g))
    }
}

impl FromIterator<GroupElem> for MemorySet {
    fn from_iter<T: IntoIterator<Item = GroupElem>>(iter: T) -> Self {
        MemorySet::new(iter)
    }
}

impl<'a> IntoIterator for &'a MemorySet {
    type Item = &'a GroupElem;
    type IntoIter = std::slice::Iter<'a, GroupElem>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(n: i64) -> GroupElem {
        GroupElem::int(n)
    }

    #[test]
    fn integer_products() {
        let g = Group::integers();
        assert_eq!(g.mul(&z(2), &z(3)).unwrap(), z(5));
        assert_eq!(g.inv(&z(3)).unwrap(), z(-3));
        assert_eq!(Group::free_abelian(2).identity(), GroupElem::vector(&[0, 0]));
    }

    #[test]
    fn cyclic_relation() {
        let c4 = Group::cyclic(4);
        let a2 = c4.parse_elem("a^2").unwrap();
        assert_eq!(c4.mul(&a2, &a2).unwrap(), c4.identity());
    }

    #[test]
    fn free_reduction() {
        let f = Group::free(2);
        let a = f.parse_elem("a").unwrap();
        let ainv_b = f.parse_elem("a^-1*b").unwrap();
        assert_eq!(f.mul(&a, &ainv_b).unwrap(), f.parse_elem("b").unwrap());
        let ab = f.parse_elem("a*b").unwrap();
        assert_eq!(f.format_elem(&f.inv(&ab).unwrap()), "b^-1*a^-1");
        assert_eq!(f.format_elem(&f.parse_elem("a*a*b^-2").unwrap()), "a^2*b^-2");
    }

    #[test]
    fn product_sets() {
        let g = Group::integers();
        let m = MemorySet::ints([0, 1]);
        assert_eq!(g.product_set(&m, &m).unwrap(), MemorySet::ints([0, 1, 2]));
        let m = MemorySet::ints([-1, 0, 1]);
        assert_eq!(g.product_set(&m, &m).unwrap(), MemorySet::ints(-2..=2));

        let f = Group::free(2);
        let p = |s: &str| f.parse_elem(s).unwrap();
        let m1 = MemorySet::new([p("a"), p("b")]);
        let m2 = MemorySet::new([p("a^-1")]);
        let prod = f.product_set(&m1, &m2).unwrap();
        assert_eq!(prod, MemorySet::new([p("1"), p("b*a^-1")]));
        assert_eq!(prod.as_slice()[0], f.identity());
    }

    #[test]
    fn symmetrize_examples() {
        let g = Group::integers();
        assert_eq!(g.symmetrize(&MemorySet::ints([1])).unwrap(), MemorySet::ints([-1, 0, 1]));
        assert_eq!(g.symmetrize(&MemorySet::ints([0])).unwrap(), MemorySet::ints([0]));
        let f = Group::free(1);
        let a = f.parse_elem("a").unwrap();
        let s = f.symmetrize(&MemorySet::singleton(a)).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(&f.parse_elem("a^-1").unwrap()));
        assert!(f.is_symmetric(&s));
    }

    #[test]
    fn context_mismatch() {
        let g = Group::integers();
        assert!(matches!(g.mul(&GroupElem::Id(0), &z(1)), Err(Error::ContextMismatch(_))));
        let f = Group::free(1);
        let unreduced = GroupElem::Word(vec![1, -1].into());
        assert!(f.mul(&unreduced, &f.identity()).is_err());
    }

    #[test]
    fn cayley_validation() {
        // not associative: a Latin square that is not a group
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(Group::from_cayley_table("bad", rows, None).is_err());
        let csv = "0,1\n1,0\n";
        let c2 = Group::from_cayley_csv("C2", csv).unwrap();
        assert_eq!(c2.order(), Some(2));
        assert_eq!(c2.parse_elem("g1").unwrap(), GroupElem::Id(1));
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(Group::symmetric(3).order(), Some(6));
        assert_eq!(Group::quaternion().order(), Some(8));
        assert_eq!(Group::dihedral(4).order(), Some(8));
        let s3 = Group::symmetric(3);
        let t = s3.parse_elem("(1 2)").unwrap();
        assert_eq!(s3.mul(&t, &t).unwrap(), s3.identity());
        let q = Group::quaternion();
        let i = q.parse_elem("i").unwrap();
        let j = q.parse_elem("j").unwrap();
        assert_eq!(q.format_elem(&q.mul(&i, &j).unwrap()), "k");
        assert_eq!(q.format_elem(&q.mul(&j, &i).unwrap()), "-k");
    }

    #[test]
    fn finite_tables_are_latin_squares() {
        for g in [Group::cyclic(5), Group::symmetric(3), Group::quaternion(), Group::dihedral(3)] {
            let f = g.finite().unwrap();
            let n = f.order();
            assert_eq!(g.elements().unwrap().len(), n);
            for a in 0..n as u32 {
                let mut row: Vec<u32> = (0..n as u32).map(|b| f.product_id(a, b)).collect();
                let mut col: Vec<u32> = (0..n as u32).map(|b| f.product_id(b, a)).collect();
                row.sort();
                col.sort();
                assert_eq!(row, (0..n as u32).collect::<Vec<_>>());
                assert_eq!(col, (0..n as u32).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn random_group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let groups = [Group::integers(), Group::free_abelian(3), Group::free(2), Group::symmetric(4), Group::quaternion()];
        for g in &groups {
            for _ in 0..200 {
                let a = g.random_elem(&mut rng, 4);
                let b = g.random_elem(&mut rng, 4);
                let c = g.random_elem(&mut rng, 4);
                let e = g.identity();
                let ab_c = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
                let a_bc = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc);
                assert_eq!(g.mul(&a, &e).unwrap(), a);
                assert_eq!(g.mul(&e, &a).unwrap(), a);
                assert_eq!(g.mul(&a, &g.inv(&a).unwrap()).unwrap(), e);
                assert_eq!(g.parse_elem(&g.format_elem(&a)).unwrap(), a);
            }
        }
    }

    #[test]
    fn set_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Group::free(2);
        for _ in 0..50 {
            let mk = |rng: &mut ChaCha8Rng| MemorySet::new((0..3).map(|_| g.random_elem(rng, 2)));
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let left = g.product_set(&g.product_set(&a, &b).unwrap(), &c).unwrap();
            let right = g.product_set(&a, &g.product_set(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
            let s = g.symmetrize(&a).unwrap();
            assert_eq!(g.symmetrize(&s).unwrap(), s);
        }
    }

    #[test]
    fn shortlex_order() {
        let f = Group::free(2);
        let ball = f.ball(1);
        let names: Vec<String> = ball.iter().map(|w| f.format_elem(w)).collect();
        assert_eq!(names, ["1", "a", "a^-1", "b", "b^-1"]);
        assert_eq!(f.ball(2).len(), 1 + 4 + 12);
    }
}
