//! Finite fields `F_{p^r}` with compatible (Conway) moduli.
//!
//! An element is encoded as the integer `sum c_i p^i`, where `c_0 + c_1 w + ...`
//! is its residue modulo the defining polynomial and `w` is the class of `x`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ntheory::{divisors, is_prime, prime_factors, primitive_root};
use crate::error::{Error, Result};

/// Largest field order handled; elements must fit in a machine word.
pub const MAX_FIELD_ORDER: u64 = 1 << 62;
/// Largest prime accepted by the field constructors.
pub const MAX_PRIME: u64 = 97;
/// Largest extension degree accepted by the field constructors.
pub const MAX_DEGREE: u32 = 12;
/// Conway polynomial candidates tried before falling back to the least irreducible modulus.
const CONWAY_SEARCH_BUDGET: u64 = 1 << 20;
/// Fields up to this order get logarithm tables.
const TABLE_LIMIT: u64 = 1 << 16;

// ---------------------------------------------------------------------------
// polynomials over F_p, coefficient vectors low degree first

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    super::ntheory::pow_mod(a, p - 2, p)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    trim(&mut out);
    out
}

fn fp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = inv_mod_p(f[df], p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = super::ntheory::mul_mod(r[top], lead_inv, p);
        if c != 0 {
            for i in 0..=df {
                let sub = super::ntheory::mul_mod(c, f[i], p);
                let k = top - df + i;
                r[k] = (r[k] + p - sub) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    fp_rem(&fp_mul(a, b, p), f, p)
}

fn fp_powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fp_mulmod(&acc, &b, f, p);
        }
        b = fp_mulmod(&b, &b, f, p);
        exp >>= 1;
    }
    fp_rem(&acc, f, p)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod_p(lead, p);
        for c in a.iter_mut() {
            *c = super::ntheory::mul_mod(*c, inv, p);
        }
    }
    a
}

/// `x^(p^k) mod f`.
fn x_frobenius_power(k: u32, f: &[u64], p: u64) -> Vec<u64> {
    let mut y = vec![0, 1];
    for _ in 0..k {
        y = fp_powmod(&y, p, f, p);
    }
    y
}

/// Rabin's irreducibility test for a monic `f` of degree `n`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    if fp_sub(&x_frobenius_power(n, f, p), &fp_rem(&x, f, p), p) != Vec::<u64>::new() {
        return false;
    }
    for q in prime_factors(n as u64) {
        let h = fp_sub(&x_frobenius_power(n / q as u32, f, p), &x, p);
        if fp_gcd(f, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Whether `x` has multiplicative order exactly `p^n - 1` modulo `f`.
fn x_is_primitive(f: &[u64], p: u64, order: u64) -> bool {
    let x = vec![0u64, 1];
    if fp_powmod(&x, order - 1, f, p) != [1] {
        return false;
    }
    prime_factors(order - 1).into_iter().all(|q| fp_powmod(&x, (order - 1) / q, f, p) != [1])
}

fn conway_cache() -> &'static Mutex<HashMap<(u64, u32), Option<Vec<u64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Option<Vec<u64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The Conway polynomial of degree `n` over `F_p`, computed from its definition:
/// the least primitive polynomial, in Conway's alternating-sign order, whose roots
/// are norm-compatible with the Conway polynomials of every proper divisor degree.
/// `None` when the search budget runs out.
pub fn conway_polynomial(p: u64, n: u32) -> Option<Vec<u64>> {
    if let Some(hit) = conway_cache().lock().unwrap().get(&(p, n)) {
        return hit.clone();
    }
    let found = search_conway(p, n);
    conway_cache().lock().unwrap().entry((p, n)).or_insert(found).clone()
}

fn search_conway(p: u64, n: u32) -> Option<Vec<u64>> {
    let g = primitive_root(p);
    if n == 1 {
        return Some(vec![(p - g) % p, 1]);
    }
    let order = p.checked_pow(n)?;
    let mut lower = Vec::new();
    for m in divisors(n) {
        if m > 1 && m < n {
            lower.push((m, conway_polynomial(p, m)?));
        }
    }
    // words (a_{n-1}, ..., a_1) enumerated lexicographically; the norm condition
    // for the degree-one divisor fixes a_0 = g.
    let free = p.checked_pow(n - 1).unwrap_or(u64::MAX).min(CONWAY_SEARCH_BUDGET);
    for idx in 0..free {
        let mut digits = vec![0u64; n as usize];
        digits[0] = g;
        let mut t = idx;
        for i in 1..n as usize {
            digits[i] = t % p;
            t /= p;
        }
        // digits[i] is a_i; coefficient of x^i is (-1)^(n-i) a_i
        let mut f: Vec<u64> = (0..n as usize).map(|i| if (n as usize - i) % 2 == 0 { digits[i] } else { (p - digits[i]) % p }).collect();
        f.push(1);
        if !x_is_primitive(&f, p, order) {
            continue;
        }
        let compatible = lower.iter().all(|(m, fm)| {
            let e = (order - 1) / (p.pow(*m) - 1);
            let y = fp_powmod(&[0, 1], e, &f, p);
            // evaluate fm at y modulo f
            let mut acc: Vec<u64> = Vec::new();
            for &c in fm.iter().rev() {
                acc = fp_mulmod(&acc, &y, &f, p);
                acc = fp_sub(&acc, &[(p - c) % p], p);
            }
            acc.is_empty()
        });
        if compatible {
            return Some(f);
        }
    }
    None
}

/// The least monic irreducible polynomial of degree `n`, ordered by
/// `(c_{n-1}, ..., c_0)` lexicographically.
pub fn least_irreducible(p: u64, n: u32) -> Vec<u64> {
    let total = p.pow(n);
    for idx in 0..total {
        let mut f = vec![0u64; n as usize + 1];
        f[n as usize] = 1;
        let mut t = idx;
        for i in 0..n as usize {
            f[i] = t % p;
            t /= p;
        }
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

// ---------------------------------------------------------------------------

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The field `F_p[x]/(modulus)`.
#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    degree: u32,
    order: u64,
    modulus: Vec<u64>,
    conway: bool,
    primitive: u64,
    tables: Option<LogTables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// `F_{p^n}` defined by its Conway polynomial when the search is feasible,
    /// else by the least irreducible polynomial.
    pub fn standard(p: u64, n: u32) -> Result<Self> {
        check_params(p, n)?;
        match conway_polynomial(p, n) {
            Some(f) => Self::build(p, f, true),
            None => Self::build(p, least_irreducible(p, n), false),
        }
    }

    /// `F_p[x]/(modulus)` for a caller-chosen monic irreducible modulus (low degree first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let mut modulus = modulus;
        trim(&mut modulus);
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have positive degree".into()));
        }
        let n = (modulus.len() - 1) as u32;
        check_params(p, n)?;
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus must be monic with reduced coefficients".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let conway = conway_polynomial(p, n).as_deref() == Some(&modulus[..]);
        Self::build(p, modulus, conway)
    }

    fn build(p: u64, modulus: Vec<u64>, conway: bool) -> Result<Self> {
        let degree = (modulus.len() - 1) as u32;
        let order = p.pow(degree);
        let mut field = FiniteField { p, degree, order, modulus, conway, primitive: 0, tables: None };
        let w = field.generator();
        field.primitive = if conway || order == 2 {
            w
        } else {
            let factors = prime_factors(order - 1);
            (1..order).find(|&a| factors.iter().all(|&q| field.pow(a, (order - 1) / q) != 1)).expect("multiplicative group is cyclic")
        };
        if order <= TABLE_LIMIT {
            let q1 = (order - 1) as usize;
            let mut exp = vec![0u32; 2 * q1];
            let mut log = vec![0u32; order as usize];
            let mut x = 1u64;
            for i in 0..q1 {
                exp[i] = x as u32;
                exp[i + q1] = x as u32;
                log[x as usize] = i as u32;
                x = field.mul_slow(x, field.primitive);
            }
            field.tables = Some(LogTables { exp, log });
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Defining polynomial, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn is_conway(&self) -> bool {
        self.conway
    }

    /// The class `w` of `x`; for prime fields this is the root of the linear modulus.
    pub fn generator(&self) -> u64 {
        if self.degree == 1 {
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    pub fn primitive_element(&self) -> u64 {
        self.primitive
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.order
    }

    pub fn decode(&self, mut a: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.degree as usize);
        for _ in 0..self.degree {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn encode(&self, digits: &[u64]) -> u64 {
        let reduced = if digits.len() > self.degree as usize { fp_rem(digits, &self.modulus, self.p) } else { digits.to_vec() };
        reduced.iter().rev().fold(0u64, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.degree {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.degree {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        if self.degree == 1 {
            return super::ntheory::mul_mod(a, b, self.p);
        }
        let prod = fp_mul(&self.decode(a), &self.decode(b), self.p);
        self.encode(&fp_rem(&prod, &self.modulus, self.p))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u64,
            None => self.mul_slow(a, b),
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let q1 = self.order - 1;
            let l = (t.log[a as usize] as u128 * (e % q1) as u128 % q1 as u128) as usize;
            return t.exp[l] as u64;
        }
        let mut acc = 1u64;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => {
                let q1 = (self.order - 1) as u32;
                Some(t.exp[((q1 - t.log[a as usize]) % q1) as usize] as u64)
            }
            None => Some(self.pow(a, self.order - 2)),
        }
    }

    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }

    /// Least `r` with `a^(p^r) = a`, i.e. the degree of the subfield generated by `a`.
    pub fn subfield_degree(&self, a: u64) -> u32 {
        divisors(self.degree).into_iter().find(|&r| self.pow(a, self.p.pow(r)) == a).expect("a^(p^n) = a for every element")
    }

    /// Formats an element as a polynomial in `w`.
    pub fn format(&self, a: u64) -> String {
        if self.degree == 1 {
            return a.to_string();
        }
        let digits = self.decode(a);
        let mut parts = Vec::new();
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            parts.push(match (c, var.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => var,
                (_, false) => format!("{c}*{var}"),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

fn check_params(p: u64, n: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if p > MAX_PRIME {
        return Err(Error::InvalidField(format!("prime {p} exceeds the bound {MAX_PRIME}")));
    }
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::InvalidField(format!("extension degree {n} outside 1..={MAX_DEGREE}")));
    }
    match p.checked_pow(n) {
        Some(q) if q <= MAX_FIELD_ORDER => Ok(()),
        _ => Err(Error::InvalidField(format!("F_{{{p}^{n}}} exceeds the supported order 2^62"))),
    }
}

// ---------------------------------------------------------------------------
// embeddings

fn embedding_cache() -> &'static Mutex<HashMap<(u64, Vec<u64>, Vec<u64>), u64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, Vec<u64>, Vec<u64>), u64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Image of the generator of `src` under the canonical embedding into `dst`.
///
/// Between Conway fields this is `w_dst^((|dst|-1)/(|src|-1))`, which makes all
/// embeddings commute. Otherwise the least root (by encoding) of the source
/// modulus in `dst` is used.
pub fn generator_image(src: &FiniteField, dst: &FiniteField) -> Result<u64> {
    if src.p != dst.p || dst.degree % src.degree != 0 {
        return Err(Error::ContextMismatch(format!("F_{}^{} does not embed in F_{}^{}", src.p, src.degree, dst.p, dst.degree)));
    }
    let key = (src.p, src.modulus.clone(), dst.modulus.clone());
    if let Some(&img) = embedding_cache().lock().unwrap().get(&key) {
        return Ok(img);
    }
    let img = if src.degree == 1 {
        src.generator()
    } else if src.conway && dst.conway {
        dst.pow(dst.generator(), (dst.order - 1) / (src.order - 1))
    } else {
        let roots = FqPoly::new(dst).roots(&src.modulus);
        *roots.iter().min().expect("irreducible polynomial of degree dividing n splits in F_{p^n}")
    };
    embedding_cache().lock().unwrap().insert(key, img);
    Ok(img)
}

pub fn embed(src: &FiniteField, dst: &FiniteField, a: u64) -> Result<u64> {
    if src == dst {
        return Ok(a);
    }
    let img = generator_image(src, dst)?;
    if src.degree == 1 {
        return Ok(a);
    }
    let mut acc = 0u64;
    for c in src.decode(a).into_iter().rev() {
        acc = dst.add(dst.mul(acc, img), c);
    }
    Ok(acc)
}

/// Preimage of `a` under the embedding `src -> dst`, if `a` lies in the image.
pub fn pull_back(src: &FiniteField, dst: &FiniteField, a: u64) -> Result<Option<u64>> {
    if src == dst {
        return Ok(Some(a));
    }
    let img = generator_image(src, dst)?;
    let p = src.p;
    let r = src.degree as usize;
    let s = dst.degree as usize;
    // columns: digits of img^i in dst, i < r; augmented with the target
    let mut cols = Vec::with_capacity(r);
    let mut pw = 1u64;
    for _ in 0..r {
        cols.push(dst.decode(pw));
        pw = dst.mul(pw, img);
    }
    let target = dst.decode(a);
    let mut rows: Vec<Vec<u64>> = (0..s)
        .map(|i| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            row.push(target[i]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(piv) = (row..s).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(row, piv);
        let inv = inv_mod_p(rows[row][col], p);
        for x in rows[row].iter_mut() {
            *x = super::ntheory::mul_mod(*x, inv, p);
        }
        for i in 0..s {
            if i != row && rows[i][col] != 0 {
                let factor = rows[i][col];
                for j in 0..=r {
                    let sub = super::ntheory::mul_mod(factor, rows[row][j], p);
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|rw| rw[r] != 0) {
        return Ok(None);
    }
    let mut digits = vec![0u64; r];
    for (i, &col) in pivots.iter().enumerate() {
        digits[col] = rows[i][r];
    }
    Ok(Some(src.encode(&digits)))
}

/// Dense polynomials over a finite field, used for root finding.
struct FqPoly<'a> {
    f: &'a FiniteField,
}

impl<'a> FqPoly<'a> {
    fn new(f: &'a FiniteField) -> Self {
        FqPoly { f }
    }

    fn trim(&self, v: &mut Vec<u64>) {
        trim(v)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.f.add(out[i + j], self.f.mul(x, y));
            }
        }
        self.trim(&mut out);
        out
    }

    fn rem(&self, a: &[u64], m: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        self.trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = self.f.inv(m[dm]).expect("nonzero leading coefficient");
        while r.len() > dm {
            let top = r.len() - 1;
            let c = self.f.mul(r[top], lead_inv);
            for i in 0..=dm {
                let k = top - dm + i;
                r[k] = self.f.sub(r[k], self.f.mul(c, m[i]));
            }
            r.pop();
            self.trim(&mut r);
        }
        r
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n).map(|i| self.f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
        self.trim(&mut out);
        out
    }

    fn powmod(&self, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &b), m);
            }
            b = self.rem(&self.mul(&b, &b), m);
            e >>= 1;
        }
        self.rem(&acc, m)
    }

    fn gcd(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        self.trim(&mut a);
        self.trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let inv = self.f.inv(lead).unwrap();
            for c in a.iter_mut() {
                *c = self.f.mul(*c, inv);
            }
        }
        a
    }

    /// All roots of a polynomial that splits into distinct linear factors.
    fn roots(&self, poly: &[u64]) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out = Vec::new();
        let mut stack = vec![poly.to_vec()];
        while let Some(g) = stack.pop() {
            let deg = g.len() - 1;
            if deg == 0 {
                continue;
            }
            if deg == 1 {
                let inv = self.f.inv(g[1]).unwrap();
                out.push(self.f.neg(self.f.mul(g[0], inv)));
                continue;
            }
            loop {
                let a = rng.gen_range(0..self.f.order);
                let h = if self.f.p == 2 {
                    // absolute trace of a*x
                    let ax = vec![0, a];
                    let mut term = self.rem(&ax, &g);
                    let mut tr = term.clone();
                    for _ in 1..self.f.degree {
                        term = self.rem(&self.mul(&term, &term), &g);
                        tr = self.add(&tr, &term);
                    }
                    tr
                } else {
                    let t = self.powmod(&[a, 1], (self.f.order - 1) / 2, &g);
                    self.add(&t, &[self.f.neg(1)])
                };
                let d = self.gcd(&g, &h);
                if d.len() > 1 && d.len() < g.len() {
                    let other = div_exact(self, &g, &d);
                    stack.push(d);
                    stack.push(other);
                    break;
                }
            }
        }
        out
    }
}

fn div_exact(ring: &FqPoly<'_>, a: &[u64], b: &[u64]) -> Vec<u64> {
    let f = ring.f;
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db]).unwrap();
    let mut q = vec![0u64; a.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(r[top], lead_inv);
        q[top - db] = c;
        for i in 0..=db {
            let k = top - db + i;
            r[k] = f.sub(r[k], f.mul(c, b[i]));
        }
        r.pop();
    }
    trim(&mut q);
    q
}
