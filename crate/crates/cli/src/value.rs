//! Values of the expression language, their evaluation and canonical printing.

use std::collections::HashMap;
use std::fmt;

use nearca::group_ring::{GroupRingElem, GroupRingMatrix};
use nearca::near_ring::NearRingElem;
use nearca::poly::{Poly, WORK_PER_TERM};
use nearca::sca::{
    compose_with_budget, format_cell, psi_from_matrix, psi_from_nearring, restrict, Alphabet, Cell, CellularAutomaton, LocalRule,
    ENUMERATION_BUDGET,
};
use nearca::surjunctivity::{elementary_rule, line_rule_automaton, rule_from_number};
use nearca::{Fe, Field, Group, GroupElem};

use crate::error::{CliError, CliResult, Span};
use crate::parse::{Expr, ExprKind, Op};

/// Rule polynomials in the cell variables `x[g,i]`; one per output coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPoly {
    pub group: Group,
    pub field: Field,
    pub dim: usize,
    pub outputs: Vec<Poly<Cell>>,
}

impl CellPoly {
    fn single(&self, span: &Span) -> CliResult<&Poly<Cell>> {
        match self.outputs.as_slice() {
            [p] => Ok(p),
            _ => Err(CliError::TypeMismatch { msg: "arithmetic on a tuple of rule polynomials".into(), span: span.clone() }),
        }
    }

    fn with(&self, p: Poly<Cell>) -> Value {
        Value::Cells(CellPoly { outputs: vec![p], ..self.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Fe, Field),
    GroupRing(GroupRingElem),
    Matrix(GroupRingMatrix),
    NearRing(NearRingElem),
    Cells(CellPoly),
    Automaton(CellularAutomaton),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    GroupRing,
    Matrix,
    NearRing,
    Cells,
    Automaton,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Scalar => "scalar",
            Kind::GroupRing => "group_ring",
            Kind::Matrix => "matrix",
            Kind::NearRing => "near_ring",
            Kind::Cells => "rule_polynomial",
            Kind::Automaton => "automaton",
        })
    }
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Scalar(..) => Kind::Scalar,
            Value::GroupRing(_) => Kind::GroupRing,
            Value::Matrix(_) => Kind::Matrix,
            Value::NearRing(_) => Kind::NearRing,
            Value::Cells(_) => Kind::Cells,
            Value::Automaton(_) => Kind::Automaton,
        }
    }
}

/// Canonical text that re-parses to an equal value, except for table automata
/// that are neither `elementary(n)` nor `rule(k, m, n)`.
pub fn print(v: &Value) -> String {
    match v {
        Value::Scalar(c, field) => field.format(c),
        Value::GroupRing(a) => a.format(),
        Value::Matrix(m) => m.format(),
        Value::NearRing(a) => a.format(),
        Value::Cells(c) => {
            let parts: Vec<String> = c.outputs.iter().map(|p| p.format(&c.field, |cell| format_cell(&c.group, cell, c.dim))).collect();
            if parts.len() == 1 {
                parts.into_iter().next().unwrap()
            } else {
                format!("({})", parts.join(", "))
            }
        }
        Value::Automaton(t) => print_automaton(t),
    }
}

fn print_automaton(t: &CellularAutomaton) -> String {
    match (t.rule(), t.alphabet()) {
        (LocalRule::Poly(outputs), Alphabet::Affine { field, dim }) => {
            let cells = CellPoly { group: t.group().clone(), field: field.clone(), dim: *dim, outputs: outputs.clone() };
            let body = print(&Value::Cells(cells));
            let derived = CellularAutomaton::from_polys(t.group(), field, outputs.clone());
            if derived.as_ref().is_ok_and(|d| d.memory() == t.memory()) {
                return format!("ca({body})");
            }
            let one = field.one();
            match GroupRingElem::from_terms(t.group(), field, t.memory().iter().map(|g| (g.clone(), one.clone()))) {
                Ok(m) => format!("ca({body}, {})", m.format()),
                Err(_) => t.to_string(),
            }
        }
        (LocalRule::Table(table), Alphabet::Finite(labels)) => line_form(t, table, labels).unwrap_or_else(|| t.to_string()),
        _ => t.to_string(),
    }
}

fn line_form(t: &CellularAutomaton, table: &[u32], labels: &[String]) -> Option<String> {
    let k = labels.len() as u64;
    if !t.group().is_integers() || labels.iter().enumerate().any(|(i, l)| *l != i.to_string()) {
        return None;
    }
    let cells: Vec<i64> = t.memory().iter().map(|g| g.as_int()).collect::<Option<_>>()?;
    let (o, m) = (cells[0], cells.len());
    if cells.iter().zip(o..).any(|(&c, i)| c != i) {
        return None;
    }
    if k == 2 && o == -1 && m == 3 {
        let n: u32 = (0..8).map(|w| table[w] << (4 * (w & 1) + 2 * ((w >> 1) & 1) + ((w >> 2) & 1))).sum();
        return Some(format!("elementary({n})"));
    }
    if o != 0 {
        return None;
    }
    let n = table.iter().rev().try_fold(0i64, |acc, &s| acc.checked_mul(k as i64)?.checked_add(s as i64))?;
    Some(format!("rule({k}, {m}, {n})"))
}

/// Largest exponent for anything but a finite-field scalar.
const MAX_EXPONENT: u32 = 4096;
/// Largest rational coefficient, in bits of numerator plus denominator, a power may produce.
const MAX_COEFF_BITS: u64 = 1 << 22;

fn coeff_bits(c: &Fe) -> u64 {
    match c {
        Fe::Q(q) => q.numer().bits() + q.denom().bits(),
        Fe::F(_) => 0,
    }
}

fn max_coeff_bits(v: &Value) -> u64 {
    let gr = |a: &GroupRingElem| a.terms().map(|(_, c)| coeff_bits(c)).max().unwrap_or(0);
    let poly = |p: &Poly<_>| p.terms().map(|(_, c)| coeff_bits(c)).max().unwrap_or(0);
    match v {
        Value::Scalar(c, _) => coeff_bits(c),
        Value::GroupRing(a) => gr(a),
        Value::Matrix(m) => m.entries().iter().map(gr).max().unwrap_or(0),
        Value::NearRing(a) => poly(a.poly()),
        Value::Cells(c) => c.outputs.iter().map(|p| p.terms().map(|(_, c)| coeff_bits(c)).max().unwrap_or(0)).max().unwrap_or(0),
        Value::Automaton(_) => 0,
    }
}

/// The evaluation context: current group, field, alphabet dimension and bindings.
pub struct Ctx<'a> {
    pub group: &'a Group,
    pub field: &'a Field,
    pub dim: usize,
    pub term_budget: usize,
    pub bindings: &'a HashMap<String, Value>,
}

fn mismatch(msg: impl Into<String>, span: &Span) -> CliError {
    CliError::TypeMismatch { msg: msg.into(), span: span.clone() }
}

fn diag(a: &GroupRingElem, n: usize) -> CliResult<GroupRingMatrix> {
    let zero = GroupRingElem::zero(a.group(), a.field());
    let entries = (0..n * n).map(|k| if k % (n + 1) == 0 { a.clone() } else { zero.clone() }).collect();
    Ok(GroupRingMatrix::new(n, entries)?)
}

impl Ctx<'_> {
    pub fn eval_str(&self, src: &str) -> CliResult<Value> {
        self.eval(&crate::parse::parse(src)?)
    }

    fn elem(&self, body: &str, span: &Span) -> CliResult<GroupElem> {
        self.group.parse_elem(body).map_err(|e| CliError::Math { source: e, span: span.clone() })
    }

    fn cells(&self, p: Poly<Cell>) -> Value {
        Value::Cells(CellPoly { group: self.group.clone(), field: self.field.clone(), dim: self.dim, outputs: vec![p] })
    }

    pub fn eval(&self, e: &Expr) -> CliResult<Value> {
        let span = &e.span;
        let core = |r: nearca::Result<Value>| r.map_err(|err| CliError::Math { source: err, span: span.clone() });
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Scalar(self.field.from_bigint(n), self.field.clone())),
            ExprKind::Gen => core(self.field.generator().map(|g| Value::Scalar(g, self.field.clone()))),
            ExprKind::Elem(body) => {
                let g = self.elem(body, span)?;
                core(GroupRingElem::basis(g, self.group, self.field).map(Value::GroupRing))
            }
            ExprKind::NVar(body) => {
                let g = self.elem(body, span)?;
                core(NearRingElem::var(g, self.group, self.field).map(Value::NearRing))
            }
            ExprKind::CVar(body, idx) => {
                let g = self.elem(body, span)?;
                let coord = match (idx, self.dim) {
                    (None, 1) => 0,
                    (None, d) => return Err(mismatch(format!("x[g,i] needs a coordinate for dimension {d}"), span)),
                    (Some(i), d) if *i <= d => i - 1,
                    (Some(i), d) => return Err(mismatch(format!("coordinate {i} exceeds dimension {d}"), span)),
                };
                Ok(self.cells(Poly::var(Cell::new(g, coord), self.field)))
            }
            ExprKind::Name(name) => {
                self.bindings.get(name).cloned().ok_or_else(|| CliError::UnknownName { name: name.clone(), span: span.clone() })
            }
            ExprKind::Call(name, args) => self.call(name, args, span),
            ExprKind::Matrix(rows) => {
                let rows = rows
                    .iter()
                    .map(|row| row.iter().map(|x| self.eval(x).and_then(|v| self.as_group_ring(v, &x.span))).collect())
                    .collect::<CliResult<Vec<Vec<_>>>>()?;
                core(GroupRingMatrix::from_rows(rows).map(Value::Matrix))
            }
            ExprKind::Tuple(items) => {
                let mut outputs = Vec::new();
                for x in items {
                    match self.eval(x)? {
                        Value::Cells(c) => outputs.push(c.single(&x.span)?.clone()),
                        Value::Scalar(c, f) => outputs.push(Poly::constant(c, &f)),
                        other => return Err(mismatch(format!("tuple entries must be rule polynomials, got {}", other.kind()), &x.span)),
                    }
                }
                Ok(Value::Cells(CellPoly { group: self.group.clone(), field: self.field.clone(), dim: self.dim, outputs }))
            }
            ExprKind::Neg(x) => self.neg(self.eval(x)?, span),
            ExprKind::Pow(x, k) => self.pow(self.eval(x)?, *k, span),
            ExprKind::Bin(op, l, r) => {
                let (a, b) = (self.eval(l)?, self.eval(r)?);
                self.binary(*op, a, b, span)
            }
        }
    }

    fn neg(&self, v: Value, span: &Span) -> CliResult<Value> {
        Ok(match v {
            Value::Scalar(c, f) => Value::Scalar(f.neg(&c), f),
            Value::GroupRing(a) => Value::GroupRing(a.neg()),
            Value::Matrix(m) => Value::Matrix(m.neg()),
            Value::NearRing(a) => Value::NearRing(a.neg()),
            Value::Cells(c) => {
                let p = c.single(span)?.neg(&c.field);
                c.with(p)
            }
            Value::Automaton(_) => return Err(mismatch("cannot negate an automaton", span)),
        })
    }

    fn pow(&self, v: Value, k: i64, span: &Span) -> CliResult<Value> {
        let core = |e: nearca::Error| CliError::Math { source: e, span: span.clone() };
        let finite_scalar = matches!(&v, Value::Scalar(_, f) if f.order().is_some());
        if !finite_scalar && k.unsigned_abs() > MAX_EXPONENT as u64 {
            return Err(mismatch(format!("exponent {k} exceeds {MAX_EXPONENT}"), span));
        }
        if max_coeff_bits(&v).saturating_mul(k.unsigned_abs()) > MAX_COEFF_BITS {
            return Err(mismatch("the power's coefficients would be too large", span));
        }
        if let Value::Scalar(c, f) = &v {
            return Ok(Value::Scalar(f.pow_signed(c, k).map_err(core)?, f.clone()));
        }
        if k < 0 {
            return match v {
                Value::GroupRing(a) if a.support().len() == 1 => {
                    let (g, c) = a.terms().next().map(|(g, c)| (g.clone(), c.clone())).unwrap();
                    let inv = GroupRingElem::from_terms(
                        a.group(),
                        a.field(),
                        [(a.group().inv(&g).map_err(core)?, a.field().inv(&c).map_err(core)?)],
                    )
                    .map_err(core)?;
                    let k = k.checked_neg().ok_or_else(|| mismatch("exponent too large", span))?;
                    self.pow(Value::GroupRing(inv), k, span)
                }
                _ => Err(mismatch("negative exponents need a scalar or a monomial c*[g]", span)),
            };
        }
        let e = u32::try_from(k).map_err(|_| mismatch("exponent too large", span))?;
        Ok(match v {
            Value::GroupRing(a) => {
                let one = GroupRingElem::one(a.group(), a.field());
                Value::GroupRing(square_and_multiply(one, a, e, |x, y| self.gr_mul(x, y, span))?)
            }
            Value::Matrix(m) => {
                let one = GroupRingMatrix::identity(m.size(), m.group(), m.field());
                Value::Matrix(square_and_multiply(one, m, e, |x, y| self.mat_mul(x, y, span))?)
            }
            Value::NearRing(a) => Value::NearRing(a.poly_pow(e, self.term_budget).map_err(core)?),
            Value::Cells(c) => {
                let p = c.single(span)?.pow(e, &c.field, self.term_budget).map_err(core)?;
                c.with(p)
            }
            _ => return Err(mismatch(format!("cannot raise {} to a power", v.kind()), span)),
        })
    }

    /// A scalar becomes the constant of `like`'s kind; other values are returned as they are.
    /// Constants print as bare scalars, so this undoes printing for them.
    pub fn as_kind_of(&self, v: Value, like: &Value) -> CliResult<Value> {
        match v {
            Value::Scalar(c, f) => self.lift(&c, &f, like),
            v => Ok(v),
        }
    }

    /// Lifts a scalar to the kind of `like`.
    fn lift(&self, c: &Fe, f: &Field, like: &Value) -> CliResult<Value> {
        Ok(match like {
            Value::Scalar(..) => Value::Scalar(c.clone(), f.clone()),
            Value::GroupRing(a) => Value::GroupRing(GroupRingElem::scalar(c.clone(), a.group(), a.field())),
            Value::Matrix(m) => Value::Matrix(GroupRingMatrix::identity(m.size(), m.group(), m.field()).scale(c)),
            Value::NearRing(a) => Value::NearRing(NearRingElem::constant(c.clone(), a.group(), a.field())),
            Value::Cells(p) => p.with(Poly::constant(c.clone(), &p.field)),
            Value::Automaton(_) => Value::Scalar(c.clone(), f.clone()),
        })
    }

    /// Brings both operands to a common kind for `+`, `-`.
    fn unify(&self, a: Value, b: Value, span: &Span) -> CliResult<(Value, Value)> {
        Ok(match (&a, &b) {
            (Value::Scalar(c, f), other) if other.kind() != Kind::Scalar => (self.lift(c, f, other)?, b),
            (other, Value::Scalar(c, f)) if other.kind() != Kind::Scalar => {
                let lifted = self.lift(c, f, other)?;
                (a, lifted)
            }
            (Value::GroupRing(x), Value::Matrix(m)) => (Value::Matrix(diag(x, m.size())?), b),
            (Value::Matrix(m), Value::GroupRing(x)) => {
                let d = diag(x, m.size())?;
                (a, Value::Matrix(d))
            }
            _ if a.kind() == b.kind() => (a, b),
            _ => return Err(mismatch(format!("cannot combine {} with {}", a.kind(), b.kind()), span)),
        })
    }

    fn binary(&self, op: Op, a: Value, b: Value, span: &Span) -> CliResult<Value> {
        let core = |e: nearca::Error| CliError::Math { source: e, span: span.clone() };
        if matches!(a, Value::Automaton(_)) || matches!(b, Value::Automaton(_)) {
            return Err(mismatch("automata have no arithmetic; use compose(s, t)", span));
        }
        match op {
            Op::Add | Op::Sub => {
                let (a, b) = self.unify(a, b, span)?;
                let sub = op == Op::Sub;
                Ok(match (a, b) {
                    (Value::Scalar(x, f), Value::Scalar(y, _)) => Value::Scalar(if sub { f.sub(&x, &y) } else { f.add(&x, &y) }, f),
                    (Value::GroupRing(x), Value::GroupRing(y)) => Value::GroupRing(if sub { x.sub(&y) } else { x.add(&y) }.map_err(core)?),
                    (Value::Matrix(x), Value::Matrix(y)) => Value::Matrix(if sub { x.add(&y.neg()) } else { x.add(&y) }.map_err(core)?),
                    (Value::NearRing(x), Value::NearRing(y)) => Value::NearRing(if sub { x.sub(&y) } else { x.add(&y) }.map_err(core)?),
                    (Value::Cells(x), Value::Cells(y)) => {
                        same_cells(&x, &y, span)?;
                        let (p, q) = (x.single(span)?, y.single(span)?);
                        x.with(if sub { p.sub(q, &x.field) } else { p.add(q, &x.field) })
                    }
                    _ => unreachable!("unify returns equal kinds"),
                })
            }
            Op::Mul => match (a, b) {
                (Value::Scalar(x, f), Value::Scalar(y, _)) => Ok(Value::Scalar(f.mul(&x, &y), f)),
                (Value::Scalar(c, _), v) | (v, Value::Scalar(c, _)) => self.scale(v, &c, span),
                (Value::GroupRing(x), Value::GroupRing(y)) => Ok(Value::GroupRing(self.gr_mul(&x, &y, span)?)),
                (Value::Matrix(x), Value::Matrix(y)) => Ok(Value::Matrix(self.mat_mul(&x, &y, span)?)),
                (Value::GroupRing(x), Value::Matrix(m)) => Ok(Value::Matrix(self.mat_mul(&diag(&x, m.size())?, &m, span)?)),
                (Value::Matrix(m), Value::GroupRing(x)) => Ok(Value::Matrix(self.mat_mul(&m, &diag(&x, m.size())?, span)?)),
                (Value::NearRing(x), Value::NearRing(y)) => Ok(Value::NearRing(x.poly_mul(&y, self.term_budget).map_err(core)?)),
                (Value::Cells(x), Value::Cells(y)) => {
                    same_cells(&x, &y, span)?;
                    let p = x.single(span)?.mul(y.single(span)?, &x.field, self.term_budget).map_err(core)?;
                    Ok(x.with(p))
                }
                (a, b) => Err(mismatch(format!("cannot multiply {} by {}", a.kind(), b.kind()), span)),
            },
            Op::Div => match b {
                Value::Scalar(c, f) => {
                    let inv = f.inv(&c).map_err(core)?;
                    match a {
                        Value::Scalar(x, f) => Ok(Value::Scalar(f.mul(&x, &inv), f)),
                        v => self.scale(v, &inv, span),
                    }
                }
                _ => Err(mismatch(format!("can only divide by a scalar, not a {}", b.kind()), span)),
            },
            Op::Star => {
                let (x, y) = (self.as_near_ring(a, span)?, self.as_near_ring(b, span)?);
                Ok(Value::NearRing(x.star_with_budget(&y, self.term_budget).map_err(core)?))
            }
        }
    }

    fn blowup(&self, span: &Span) -> CliError {
        CliError::Math { source: nearca::Error::TermBlowup { budget: self.term_budget }, span: span.clone() }
    }

    /// Group ring product within the term budget.
    pub fn gr_mul(&self, x: &GroupRingElem, y: &GroupRingElem, span: &Span) -> CliResult<GroupRingElem> {
        let work = x.terms().count().saturating_mul(y.terms().count());
        if work > self.term_budget.saturating_mul(WORK_PER_TERM) {
            return Err(self.blowup(span));
        }
        let p = x.mul(y).map_err(|e| CliError::Math { source: e, span: span.clone() })?;
        if p.terms().count() > self.term_budget {
            return Err(self.blowup(span));
        }
        Ok(p)
    }

    /// Matrix product within the term budget.
    pub fn mat_mul(&self, x: &GroupRingMatrix, y: &GroupRingMatrix, span: &Span) -> CliResult<GroupRingMatrix> {
        let n = x.size();
        if y.size() != n {
            return Err(mismatch(format!("cannot multiply {n}x{n} by {0}x{0} matrices", y.size()), span));
        }
        let len = |a: &GroupRingElem| a.terms().count();
        let mut work = 0usize;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    work = work.saturating_add(len(x.get(i, k)).saturating_mul(len(y.get(k, j))));
                }
            }
        }
        if work > self.term_budget.saturating_mul(WORK_PER_TERM) {
            return Err(self.blowup(span));
        }
        let p = x.mul(y).map_err(|e| CliError::Math { source: e, span: span.clone() })?;
        if p.entries().iter().map(len).sum::<usize>() > self.term_budget {
            return Err(self.blowup(span));
        }
        Ok(p)
    }

    fn scale(&self, v: Value, c: &Fe, span: &Span) -> CliResult<Value> {
        Ok(match v {
            Value::Scalar(x, f) => Value::Scalar(f.mul(&x, c), f),
            Value::GroupRing(a) => Value::GroupRing(a.scale(c)),
            Value::Matrix(m) => Value::Matrix(m.scale(c)),
            Value::NearRing(a) => Value::NearRing(a.scale(c)),
            Value::Cells(p) => {
                let q = p.single(span)?.scale(c, &p.field);
                p.with(q)
            }
            Value::Automaton(_) => return Err(mismatch("cannot scale an automaton", span)),
        })
    }

    pub fn as_near_ring(&self, v: Value, span: &Span) -> CliResult<NearRingElem> {
        match v {
            Value::NearRing(a) => Ok(a),
            Value::Scalar(c, _) => Ok(NearRingElem::constant(c, self.group, self.field)),
            other => Err(mismatch(format!("expected an element of R(k,G), got {}", other.kind()), span)),
        }
    }

    pub fn as_group_ring(&self, v: Value, span: &Span) -> CliResult<GroupRingElem> {
        match v {
            Value::GroupRing(a) => Ok(a),
            Value::Scalar(c, _) => Ok(GroupRingElem::scalar(c, self.group, self.field)),
            other => Err(mismatch(format!("expected an element of k[G], got {}", other.kind()), span)),
        }
    }

    pub fn as_matrix(&self, v: Value, span: &Span) -> CliResult<GroupRingMatrix> {
        match v {
            Value::Matrix(m) => Ok(m),
            other => Ok(GroupRingMatrix::scalar(self.as_group_ring(other, span)?)),
        }
    }

    /// Rule polynomials, group ring matrices (ψ) and near-ring elements (Ψ) all name automata.
    pub fn as_automaton(&self, v: Value, span: &Span) -> CliResult<CellularAutomaton> {
        let core = |e: nearca::Error| CliError::Math { source: e, span: span.clone() };
        match v {
            Value::Automaton(t) => Ok(t),
            Value::Cells(c) => CellularAutomaton::from_polys(&c.group, &c.field, c.outputs).map_err(core),
            Value::Scalar(c, f) => CellularAutomaton::from_polys(self.group, &f, vec![Poly::constant(c, &f)]).map_err(core),
            Value::GroupRing(a) => psi_from_matrix(&GroupRingMatrix::scalar(a)).map_err(core),
            Value::Matrix(m) => psi_from_matrix(&m).map_err(core),
            Value::NearRing(a) => psi_from_nearring(&a).map_err(core),
        }
    }

    fn int_arg(&self, e: &Expr) -> CliResult<i64> {
        let n = match &e.kind {
            ExprKind::Int(n) => n.clone(),
            ExprKind::Neg(x) => match &x.kind {
                ExprKind::Int(n) => -n.clone(),
                _ => return Err(mismatch("expected an integer literal", &e.span)),
            },
            _ => return Err(mismatch("expected an integer literal", &e.span)),
        };
        i64::try_from(n).map_err(|_| mismatch("integer out of range", &e.span))
    }

    fn call(&self, name: &str, args: &[Expr], span: &Span) -> CliResult<Value> {
        let core = |e: nearca::Error| CliError::Math { source: e, span: span.clone() };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(mismatch(format!("{name} takes {n} argument(s), got {}", args.len()), span))
            }
        };
        match name {
            "phi" => {
                arity(1)?;
                let a = self.as_group_ring(self.eval(&args[0])?, &args[0].span)?;
                Ok(Value::NearRing(NearRingElem::embed_phi(&a)))
            }
            "ca" if args.len() == 2 => {
                let (field, outputs) = match self.eval(&args[0])? {
                    Value::Cells(c) => (c.field, c.outputs),
                    Value::Scalar(c, f) => (f.clone(), vec![Poly::constant(c, &f)]),
                    v => return Err(mismatch(format!("ca does not apply to {}", v.kind()), &args[0].span)),
                };
                let memory = self.as_group_ring(self.eval(&args[1])?, &args[1].span)?.support();
                let alphabet = Alphabet::affine(&field, outputs.len()).map_err(core)?;
                let t = CellularAutomaton::new(self.group, alphabet, memory, LocalRule::Poly(outputs)).map_err(core)?;
                Ok(Value::Automaton(t))
            }
            "psi" | "Psi" | "ca" => {
                arity(1)?;
                let v = self.eval(&args[0])?;
                let ok = match name {
                    "psi" => matches!(v, Value::GroupRing(_) | Value::Matrix(_) | Value::Scalar(..)),
                    "Psi" => matches!(v, Value::NearRing(_) | Value::Scalar(..)),
                    _ => matches!(v, Value::Cells(_) | Value::Scalar(..)),
                };
                if !ok {
                    return Err(mismatch(format!("{name} does not apply to {}", v.kind()), &args[0].span));
                }
                let v = match (name, v) {
                    ("Psi", Value::Scalar(c, _)) => Value::NearRing(NearRingElem::constant(c, self.group, self.field)),
                    ("psi", Value::Scalar(c, _)) => Value::GroupRing(GroupRingElem::scalar(c, self.group, self.field)),
                    (_, v) => v,
                };
                Ok(Value::Automaton(self.as_automaton(v, &args[0].span)?))
            }
            "elementary" => {
                arity(1)?;
                let n = self.int_arg(&args[0])?;
                let n = u8::try_from(n).map_err(|_| mismatch("elementary rules are numbered 0..=255", &args[0].span))?;
                Ok(Value::Automaton(line_rule_automaton(&elementary_rule(n)).map_err(core)?))
            }
            "rule" => {
                arity(3)?;
                let (k, m, idx) = (self.int_arg(&args[0])?, self.int_arg(&args[1])?, self.int_arg(&args[2])?);
                let rows = (k.clamp(0, 1 << 16) as u128).checked_pow(m.clamp(0, 64) as u32);
                if !(2..=256).contains(&k) || !(1..=16).contains(&m) || rows.map_or(true, |r| r > ENUMERATION_BUDGET as u128) {
                    return Err(mismatch("rule(k, m, n) needs 2 <= k <= 256, 1 <= m and k^m within budget", span));
                }
                let count = (k as u128).checked_pow(rows.unwrap() as u32);
                if idx < 0 || count.is_some_and(|c| idx as u128 >= c) {
                    return Err(mismatch("rule number out of range", &args[2].span));
                }
                Ok(Value::Automaton(line_rule_automaton(&rule_from_number(k as u64, m as usize, idx as u64)).map_err(core)?))
            }
            "compose" => {
                arity(2)?;
                let s = self.as_automaton(self.eval(&args[0])?, &args[0].span)?;
                let t = self.as_automaton(self.eval(&args[1])?, &args[1].span)?;
                Ok(Value::Automaton(compose_with_budget(&s, &t, self.term_budget, ENUMERATION_BUDGET).map_err(core)?))
            }
            "restrict" => {
                arity(2)?;
                let t = self.as_automaton(self.eval(&args[0])?, &args[0].span)?;
                let r = self.int_arg(&args[1])?;
                let r = u32::try_from(r)
                    .ok()
                    .filter(|r| (1..=12).contains(r))
                    .ok_or_else(|| mismatch("level must be in 1..=12", &args[1].span))?;
                Ok(Value::Automaton(restrict(&t, r, ENUMERATION_BUDGET).map_err(core)?))
            }
            _ => Err(CliError::UnknownName { name: name.to_string(), span: span.start..span.start + name.len() }),
        }
    }
}

fn square_and_multiply<T: Clone>(one: T, base: T, mut e: u32, mul: impl Fn(&T, &T) -> CliResult<T>) -> CliResult<T> {
    let (mut acc, mut base) = (one, base);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base)?;
        }
    }
    Ok(acc)
}

fn same_cells(a: &CellPoly, b: &CellPoly, span: &Span) -> CliResult<()> {
    if a.group != b.group || a.field != b.field || a.dim != b.dim {
        return Err(mismatch("rule polynomials from different contexts", span));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_eval(group: &Group, field: &Field, dim: usize, src: &str) -> CliResult<Value> {
        let bindings = HashMap::new();
        let ctx = Ctx { group, field, dim, term_budget: 100_000, bindings: &bindings };
        ctx.eval_str(src)
    }

    #[test]
    fn prints() {
        let z = Group::integers();
        let q = Field::Rational;
        let show = |src: &str| print(&ctx_eval(&z, &q, 1, src).unwrap());
        assert_eq!(show("0"), "0");
        assert_eq!(show("-X[0]"), "-X[0]");
        assert_eq!(show("-2/3"), "-2/3");
        assert_eq!(show("[1] - [1]"), "0");
        assert_eq!(show("2*[1] - [-1] + 1"), "-[-1] + 2*[1] + 1");
        assert_eq!(show("([1] + 1)^2"), "2*[1] + [2] + 1");
        assert_eq!(show("(2*[3])^-1"), "1/2*[-3]");
        assert_eq!(show("[[1, [1]], [0, 1]] * [[1, -[1]], [0, 1]]"), "[[1, 0], [0, 1]]");
        assert_eq!(show("x[0] + x[1]^2"), "x[1]^2 + x[0]");
    }

    #[test]
    fn paper_example_star() {
        let f = Group::free_named("F", ["g", "h", "s", "t"].map(String::from).to_vec()).unwrap();
        let q = Field::Rational;
        let ab = ctx_eval(&f, &q, 1, "X[g]*X[h]^2 + 1 ** X[s]^2 - X[t]^3").unwrap();
        let expected = ctx_eval(&f, &q, 1, "(X[g*s]^2 - X[g*t]^3)*(X[h*s]^2 - X[h*t]^3)^2 + 1").unwrap();
        assert_eq!(ab, expected);
    }

    #[test]
    fn type_errors_have_spans() {
        let z = Group::integers();
        let q = Field::Rational;
        let e = ctx_eval(&z, &q, 1, "[1] + X[1]").unwrap_err();
        assert!(matches!(e, CliError::TypeMismatch { ref span, .. } if *span == (0..10)), "{e}");
        let e = ctx_eval(&z, &q, 1, "1 + foo").unwrap_err();
        assert!(matches!(e, CliError::UnknownName { ref span, .. } if *span == (4..7)));
        let e = ctx_eval(&z, &q, 1, "1/0").unwrap_err();
        assert!(matches!(e, CliError::Math { source: nearca::Error::DivisionByZero, .. }));
        let e = ctx_eval(&z, &q, 1, "[a]").unwrap_err();
        assert_eq!(e.span(), Some(&(0..3)));
        assert!(ctx_eval(&z, &q, 2, "x[0]").is_err());
        assert!(ctx_eval(&z, &q, 2, "x[0,3]").is_err());
        assert!(ctx_eval(&z, &q, 1, "w").is_err());
    }

    #[test]
    fn automata() {
        let z = Group::integers();
        let f2 = Field::gf(2, 1).unwrap();
        let Value::Automaton(t) = ctx_eval(&z, &f2, 1, "compose(psi([-1]), psi([1]))").unwrap() else { panic!() };
        assert_eq!(t.format_rule(), "x[0]");
        let Value::Automaton(t) = ctx_eval(&z, &f2, 1, "elementary(110)").unwrap() else { panic!() };
        assert_eq!(t.table().unwrap().len(), 8);
        assert!(ctx_eval(&z, &f2, 1, "rule(2, 2, 16)").is_err());
        assert!(ctx_eval(&z, &f2, 1, "rule(2, 2, 15)").is_ok());
        assert!(ctx_eval(&z, &f2, 1, "elementary(256)").is_err());
    }

    #[test]
    fn automata_print_back() {
        let z = Group::integers();
        let f2 = Field::gf(2, 1).unwrap();
        for (src, shown) in [
            ("compose(psi([1] + 1), psi([1] + 1))", "ca(x[2] + x[0], [1] + [2] + 1)"),
            ("psi([1] + 1)", "ca(x[1] + x[0])"),
            ("elementary(110)", "elementary(110)"),
            ("rule(3, 2, 100)", "rule(3, 2, 100)"),
        ] {
            let v = ctx_eval(&z, &f2, 1, src).unwrap();
            assert_eq!(print(&v), shown);
            assert_eq!(ctx_eval(&z, &f2, 1, shown).unwrap(), v);
        }
        assert!(ctx_eval(&z, &f2, 1, "ca(x[2], [0] + [1])").is_err());
    }
}
