//! Exact coefficient fields: the rationals and finite fields `F_{p^r}`.
//!
//! Values ([`Fe`]) carry no context; arithmetic goes through a [`Field`] handle.
//! Finite fields are interned per `(p, r)` so that repeated construction is cheap
//! and every `GF(p^r)` in the process uses the same compatible modulus.

pub mod finite;
pub mod ntheory;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{mismatch, Error, Result};
pub use finite::FiniteField;
use ntheory::{divisors, gcd_u32, lcm_u32};

/// A field element. `Q` for rationals, `F` for the integer encoding of a finite field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fe {
    Q(BigRational),
    F(u64),
}

#[derive(Clone)]
pub enum Field {
    Rational,
    Finite(Arc<FiniteField>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Finite(a), Field::Finite(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Finite(ff) => write!(f, "GF({})", ff.order()),
        }
    }
}

fn registry() -> &'static Mutex<HashMap<(u64, u32), Arc<FiniteField>>> {
    static REG: OnceLock<Mutex<HashMap<(u64, u32), Arc<FiniteField>>>> = OnceLock::new();
    REG.get_or_init(Default::default)
}

/// Per-`(source, target)` lookup tables for embeddings between small fields.
type EmbedTable = Arc<Vec<u64>>;

fn embed_tables() -> &'static Mutex<HashMap<(u64, Vec<u64>, Vec<u64>), EmbedTable>> {
    static TABLES: OnceLock<Mutex<HashMap<(u64, Vec<u64>, Vec<u64>), EmbedTable>>> = OnceLock::new();
    TABLES.get_or_init(Default::default)
}

impl Field {
    /// The standard field `F_{p^r}` (Conway modulus when computable).
    pub fn gf(p: u64, r: u32) -> Result<Field> {
        if let Some(f) = registry().lock().unwrap().get(&(p, r)) {
            return Ok(Field::Finite(f.clone()));
        }
        let built = Arc::new(FiniteField::standard(p, r)?);
        let f = registry().lock().unwrap().entry((p, r)).or_insert(built).clone();
        Ok(Field::Finite(f))
    }

    /// `F_q` for a prime power `q`.
    pub fn gf_order(q: u64) -> Result<Field> {
        if q < 2 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        let p = ntheory::prime_factors(q);
        if p.len() != 1 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        let p = p[0];
        let mut r = 0u32;
        let mut t = q;
        while t > 1 {
            t /= p;
            r += 1;
        }
        Field::gf(p, r)
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        Ok(Field::Finite(Arc::new(FiniteField::with_modulus(p, modulus)?)))
    }

    pub fn finite(&self) -> Result<&FiniteField> {
        match self {
            Field::Finite(f) => Ok(f),
            Field::Rational => Err(Error::WrongCharacteristic),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Finite(f) => f.characteristic(),
        }
    }

    /// Extension degree over the prime field (1 for `Q`).
    pub fn degree(&self) -> u32 {
        match self {
            Field::Rational => 1,
            Field::Finite(f) => f.degree(),
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Finite(f) => Some(f.order()),
        }
    }

    pub fn check(&self, a: &Fe) -> Result<()> {
        match (self, a) {
            (Field::Rational, Fe::Q(_)) => Ok(()),
            (Field::Finite(f), Fe::F(x)) if f.contains(*x) => Ok(()),
            _ => Err(mismatch(format!("{a:?} is not an element of {self}"))),
        }
    }

    pub fn zero(&self) -> Fe {
        match self {
            Field::Rational => Fe::Q(BigRational::zero()),
            Field::Finite(_) => Fe::F(0),
        }
    }

    pub fn one(&self) -> Fe {
        match self {
            Field::Rational => Fe::Q(BigRational::one()),
            Field::Finite(_) => Fe::F(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Fe {
        match self {
            Field::Rational => Fe::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Finite(f) => Fe::F(f.from_int(n)),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Fe {
        match self {
            Field::Rational => Fe::Q(BigRational::from_integer(n.clone())),
            Field::Finite(f) => {
                let p = BigInt::from(f.characteristic());
                let r = ((n % &p) + &p) % &p;
                Fe::F(r.to_string().parse::<u64>().expect("residue fits in u64"))
            }
        }
    }

    /// The generator `w` (the class of `x` modulo the defining polynomial).
    pub fn generator(&self) -> Result<Fe> {
        Ok(Fe::F(self.finite()?.generator()))
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        match a {
            Fe::Q(q) => q.is_zero(),
            Fe::F(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Fe) -> bool {
        match a {
            Fe::Q(q) => q.is_one(),
            Fe::F(x) => *x == 1,
        }
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        match (self, a, b) {
            (_, Fe::Q(x), Fe::Q(y)) if x.is_integer() && y.is_integer() => Fe::Q(BigRational::from_integer(x.numer() + y.numer())),
            (_, Fe::Q(x), Fe::Q(y)) => Fe::Q(x + y),
            (Field::Finite(f), Fe::F(x), Fe::F(y)) => Fe::F(f.add(*x, *y)),
            _ => panic!("field element from a different field: {a:?} + {b:?} in {self}"),
        }
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        match (self, a) {
            (_, Fe::Q(x)) => Fe::Q(-x),
            (Field::Finite(f), Fe::F(x)) => Fe::F(f.neg(*x)),
            _ => panic!("field element from a different field"),
        }
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        match (self, a, b) {
            (_, Fe::Q(x), Fe::Q(y)) if x.is_integer() && y.is_integer() => Fe::Q(BigRational::from_integer(x.numer() * y.numer())),
            (_, Fe::Q(x), Fe::Q(y)) => Fe::Q(x * y),
            (Field::Finite(f), Fe::F(x), Fe::F(y)) => Fe::F(f.mul(*x, *y)),
            _ => panic!("field element from a different field: {a:?} * {b:?} in {self}"),
        }
    }

    pub fn inv(&self, a: &Fe) -> Result<Fe> {
        match (self, a) {
            (_, Fe::Q(x)) if x.is_zero() => Err(Error::DivisionByZero),
            (_, Fe::Q(x)) => Ok(Fe::Q(x.recip())),
            (Field::Finite(f), Fe::F(x)) => f.inv(*x).map(Fe::F).ok_or(Error::DivisionByZero),
            _ => Err(mismatch("field element from a different field")),
        }
    }

    pub fn div(&self, a: &Fe, b: &Fe) -> Result<Fe> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked binary arithmetic; `op` is one of `+ - * /`.
    pub fn arith(&self, a: &Fe, b: &Fe, op: char) -> Result<Fe> {
        self.check(a)?;
        self.check(b)?;
        match op {
            '+' => Ok(self.add(a, b)),
            '-' => Ok(self.sub(a, b)),
            '*' => Ok(self.mul(a, b)),
            '/' => self.div(a, b),
            _ => Err(Error::InvalidArgument(format!("unknown operator {op:?}"))),
        }
    }

    pub fn pow(&self, a: &Fe, e: u64) -> Fe {
        match (self, a) {
            (Field::Finite(f), Fe::F(x)) => Fe::F(f.pow(*x, e)),
            _ => {
                let mut acc = self.one();
                let mut base = a.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    base = self.mul(&base, &base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// `a^e` for a signed exponent; negative powers need `a != 0`.
    pub fn pow_signed(&self, a: &Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn frobenius(&self, a: &Fe) -> Result<Fe> {
        let f = self.finite()?;
        self.check(a)?;
        match a {
            Fe::F(x) => Ok(Fe::F(f.frobenius(*x))),
            Fe::Q(_) => Err(Error::WrongCharacteristic),
        }
    }

    /// Least `r` such that `a` lies in the subfield `F_{p^r}`.
    pub fn subfield_degree(&self, a: &Fe) -> Result<u32> {
        let f = self.finite()?;
        self.check(a)?;
        match a {
            Fe::F(x) => Ok(f.subfield_degree(*x)),
            Fe::Q(_) => Err(Error::WrongCharacteristic),
        }
    }

    /// All elements of a finite field in encoding order.
    pub fn elements(&self) -> Result<Vec<Fe>> {
        let f = self.finite()?;
        Ok((0..f.order()).map(Fe::F).collect())
    }

    /// Canonical embedding of `a ∈ self` into `target ⊇ self`.
    pub fn embed_into(&self, a: &Fe, target: &Field) -> Result<Fe> {
        if self == target {
            return Ok(a.clone());
        }
        let (src, dst) = (self.finite()?, target.finite()?);
        self.check(a)?;
        let Fe::F(x) = a else { unreachable!() };
        if src.order() <= 1 << 12 {
            let table = self.embedding_table(target)?;
            return Ok(Fe::F(table[*x as usize]));
        }
        Ok(Fe::F(finite::embed(src, dst, *x)?))
    }

    fn embedding_table(&self, target: &Field) -> Result<EmbedTable> {
        let (src, dst) = (self.finite()?, target.finite()?);
        let key = (src.characteristic(), src.modulus().to_vec(), dst.modulus().to_vec());
        if let Some(t) = embed_tables().lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table = (0..src.order()).map(|x| finite::embed(src, dst, x)).collect::<Result<Vec<_>>>()?;
        let table = Arc::new(table);
        embed_tables().lock().unwrap().insert(key, table.clone());
        Ok(table)
    }

    /// Moves `a ∈ self` into `target` through their common subfield.
    ///
    /// Succeeds exactly when `subfield_degree(a)` divides the degree of `target`.
    pub fn transfer(&self, a: &Fe, target: &Field) -> Result<Fe> {
        if self == target {
            return Ok(a.clone());
        }
        let (src, dst) = (self.finite()?, target.finite()?);
        if src.characteristic() != dst.characteristic() {
            return Err(mismatch(format!("cannot move elements of {self} into {target}")));
        }
        let needed = self.subfield_degree(a)?;
        if dst.degree() % needed != 0 {
            return Err(Error::CoefficientFieldTooLarge { needed, level: dst.degree() });
        }
        let common = Field::gf(src.characteristic(), gcd_u32(src.degree(), dst.degree()))?;
        let Fe::F(x) = a else { unreachable!() };
        let down = finite::pull_back(common.finite()?, src, *x)?.ok_or_else(|| mismatch("element not in the common subfield"))?;
        common.embed_into(&Fe::F(down), target)
    }

    pub fn format(&self, a: &Fe) -> String {
        match (self, a) {
            (_, Fe::Q(q)) => {
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            (Field::Finite(f), Fe::F(x)) => f.format(*x),
            _ => format!("{a:?}"),
        }
    }

    /// Formats `a` for use as a coefficient: the sign is split off for rationals
    /// and sums are parenthesised.
    pub(crate) fn format_coeff(&self, a: &Fe) -> (bool, String) {
        match a {
            Fe::Q(q) if q.is_negative() => (true, self.format(&Fe::Q(-q))),
            Fe::Q(_) => (false, self.format(a)),
            Fe::F(_) => {
                let s = self.format(a);
                if s.contains('+') {
                    (false, format!("({s})"))
                } else {
                    (false, s)
                }
            }
        }
    }
}

/// Points of `(F_{p^d})^n` sharing a minimal field of definition `F_{p^level}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointLevel {
    pub level: u32,
    pub points: Vec<Vec<Fe>>,
}

/// All points of `(F_{p^d})^n`, grouped by the least `r | d` whose field contains
/// every coordinate.
pub fn enumerate_points(p: u64, d: u32, n: usize) -> Result<Vec<PointLevel>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("depth and dimension must be positive".into()));
    }
    let field = Field::gf(p, d)?;
    let q = field.order().unwrap();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > 1 << 24 {
        return Err(Error::EnumerationBudgetExceeded { budget: 1 << 24, needed: total });
    }
    let level_of: Vec<u32> = (0..q).map(|x| field.subfield_degree(&Fe::F(x)).unwrap()).collect();
    let mut groups: Vec<PointLevel> = divisors(d).into_iter().map(|level| PointLevel { level, points: Vec::new() }).collect();
    let mut digits = vec![0u64; n];
    loop {
        let level = digits.iter().fold(1u32, |acc, &x| lcm_u32(acc, level_of[x as usize]));
        let slot = groups.iter_mut().find(|g| g.level == level).expect("level divides d");
        slot.points.push(digits.iter().map(|&x| Fe::F(x)).collect());
        let mut i = 0;
        loop {
            if i == n {
                return Ok(groups);
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Fe {
        Fe::Q(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_arithmetic() {
        let f = Field::Rational;
        assert_eq!(f.arith(&q(1, 2), &q(1, 3), '+').unwrap(), q(5, 6));
        assert_eq!(f.arith(&q(1, 2), &f.zero(), '/'), Err(Error::DivisionByZero));
        assert_eq!(f.format(&q(-2, 3)), "-2/3");
        assert_eq!(f.frobenius(&q(1, 1)), Err(Error::WrongCharacteristic));
    }

    #[test]
    fn gf4_generator_squares() {
        let f = Field::gf(2, 2).unwrap();
        let w = f.generator().unwrap();
        let w2 = f.mul(&w, &w);
        assert_eq!(w2, f.add(&w, &f.one()));
        assert_eq!(f.format(&w2), "w+1");
        assert_eq!(f.frobenius(&w).unwrap(), w2);
    }

    #[test]
    fn gf5_division() {
        let f = Field::gf(5, 1).unwrap();
        assert_eq!(f.arith(&f.from_i64(2), &f.from_i64(3), '/').unwrap(), f.from_i64(4));
        assert_eq!(f.inv(&f.from_i64(3)).unwrap(), f.from_i64(2));
    }

    #[test]
    fn gf9_frobenius_is_cube() {
        let f = Field::gf(3, 2).unwrap();
        let t = f.generator().unwrap();
        // theta^2 = theta + 1 for the Conway modulus x^2 + 2x + 2
        assert_eq!(f.mul(&t, &t), f.add(&t, &f.one()));
        let cube = f.mul(&f.mul(&t, &t), &t);
        assert_eq!(f.frobenius(&t).unwrap(), cube);
        // theta^3 = theta^2 + theta = 2 theta + 1
        assert_eq!(f.format(&cube), "2*w+1");
    }

    #[test]
    fn subfield_degrees() {
        let f4 = Field::gf(2, 2).unwrap();
        assert_eq!(f4.subfield_degree(&f4.one()).unwrap(), 1);
        assert_eq!(f4.subfield_degree(&f4.generator().unwrap()).unwrap(), 2);
        let f16 = Field::gf(2, 4).unwrap();
        let w4 = f4.generator().unwrap();
        let image = f4.embed_into(&w4, &f16).unwrap();
        assert_eq!(f16.subfield_degree(&image).unwrap(), 2);
        assert_eq!(f16.subfield_degree(&f16.generator().unwrap()).unwrap(), 4);
    }

    #[test]
    fn subfield_counts() {
        for (p, r) in [(2u64, 4u32), (2, 6), (3, 4), (5, 2)] {
            let f = Field::gf(p, r).unwrap();
            let degs: Vec<u32> = f.elements().unwrap().iter().map(|a| f.subfield_degree(a).unwrap()).collect();
            for m in divisors(r) {
                let count = degs.iter().filter(|&&d| m % d == 0).count() as u64;
                assert_eq!(count, p.pow(m), "p={p} r={r} m={m}");
            }
            assert!(degs.iter().all(|d| r % d == 0));
        }
    }

    #[test]
    fn frobenius_is_an_automorphism_of_order_r() {
        for (p, r) in [(2u64, 3u32), (3, 2), (5, 2), (2, 4)] {
            let f = Field::gf(p, r).unwrap();
            for a in f.elements().unwrap() {
                let mut x = a.clone();
                for _ in 0..r {
                    x = f.frobenius(&x).unwrap();
                }
                assert_eq!(x, a);
                for b in f.elements().unwrap().iter().step_by(3) {
                    let lhs = f.frobenius(&f.add(&a, b)).unwrap();
                    let rhs = f.add(&f.frobenius(&a).unwrap(), &f.frobenius(b).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn tower_embeddings_commute() {
        for (p, r, s, t) in [(2u64, 1u32, 2u32, 4u32), (2, 2, 4, 8), (2, 1, 3, 6), (3, 1, 2, 4), (2, 2, 6, 12)] {
            let fr = Field::gf(p, r).unwrap();
            let fs = Field::gf(p, s).unwrap();
            let ft = Field::gf(p, t).unwrap();
            for a in fr.elements().unwrap() {
                let via = fs.embed_into(&fr.embed_into(&a, &fs).unwrap(), &ft).unwrap();
                let direct = fr.embed_into(&a, &ft).unwrap();
                assert_eq!(via, direct);
            }
        }
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        let f4 = Field::gf(2, 2).unwrap();
        let f16 = Field::gf(2, 4).unwrap();
        for a in f4.elements().unwrap() {
            for b in f4.elements().unwrap() {
                let e = |x: &Fe| f4.embed_into(x, &f16).unwrap();
                assert_eq!(e(&f4.mul(&a, &b)), f16.mul(&e(&a), &e(&b)));
                assert_eq!(e(&f4.add(&a, &b)), f16.add(&e(&a), &e(&b)));
            }
        }
    }

    #[test]
    fn transfer_between_levels() {
        let f4 = Field::gf(2, 2).unwrap();
        let f8 = Field::gf(2, 3).unwrap();
        let f64 = Field::gf(2, 6).unwrap();
        let w = f4.generator().unwrap();
        let lifted = f4.transfer(&w, &f64).unwrap();
        assert_eq!(f64.transfer(&lifted, &f4).unwrap(), w);
        assert_eq!(f4.transfer(&w, &f8), Err(Error::CoefficientFieldTooLarge { needed: 2, level: 3 }));
        assert_eq!(f4.transfer(&f4.one(), &f8).unwrap(), f8.one());
    }

    #[test]
    fn field_axioms_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for field in [Field::gf(2, 3).unwrap(), Field::gf(5, 1).unwrap(), Field::gf(3, 3).unwrap(), Field::Rational] {
            let rand_elem = |rng: &mut rand_chacha::ChaCha8Rng| match &field {
                Field::Rational => q(rng.gen_range(-9..10), rng.gen_range(1..6)),
                Field::Finite(f) => Fe::F(rng.gen_range(0..f.order())),
            };
            for _ in 0..300 {
                let (a, b, c) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
                assert_eq!(field.mul(&field.mul(&a, &b), &c), field.mul(&a, &field.mul(&b, &c)));
                assert_eq!(field.add(&field.add(&a, &b), &c), field.add(&a, &field.add(&b, &c)));
                assert_eq!(field.mul(&a, &field.add(&b, &c)), field.add(&field.mul(&a, &b), &field.mul(&a, &c)));
                assert!(field.is_zero(&field.add(&a, &field.neg(&a))));
                if !field.is_zero(&a) {
                    assert!(field.is_one(&field.mul(&a, &field.inv(&a).unwrap())));
                }
            }
        }
    }

    #[test]
    fn point_ladder() {
        let pts = enumerate_points(2, 1, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].points.len(), 2);
        let pts = enumerate_points(2, 2, 1).unwrap();
        assert_eq!(pts.iter().map(|l| (l.level, l.points.len())).collect::<Vec<_>>(), [(1, 2), (2, 2)]);
        let pts = enumerate_points(3, 1, 2).unwrap();
        assert_eq!(pts[0].points.len(), 9);
        let pts = enumerate_points(2, 6, 1).unwrap();
        assert_eq!(pts.iter().map(|l| (l.level, l.points.len())).collect::<Vec<_>>(), [(1, 2), (2, 2), (3, 6), (6, 54)]);
    }

    #[test]
    fn parameter_bounds() {
        assert!(Field::gf(4, 1).is_err());
        assert!(Field::gf(101, 1).is_err());
        assert!(Field::gf(2, 13).is_err());
        assert!(Field::gf(97, 12).is_err());
        assert!(Field::with_modulus(2, vec![1, 0, 1]).is_err());
        assert_eq!(Field::gf_order(9).unwrap(), Field::gf(3, 2).unwrap());
        assert!(Field::gf_order(6).is_err());
    }
}
