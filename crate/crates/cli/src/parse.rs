//! Expression syntax.
//!
//! ```text
//! expr   := sum ('**' sum)*            ⋆, left-associative, loosest
//! sum    := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INT)?
//! atom   := INT | 'w' | '[' elem ']' | '[' '[' rows ']' | 'X' '[' elem ']'
//!         | 'x' '[' elem (',' INT)? ']' | NAME '(' args ')' | NAME | '(' expr (',' expr)* ')'
//! ```
//!
//! Group elements inside brackets are passed verbatim to the group backend.

use num_bigint::BigInt;

use crate::error::{CliError, CliResult, Span};

const MAX_DEPTH: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Star,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Gen,
    Elem(String),
    NVar(String),
    /// `x[g]` or `x[g,i]` with 1-based `i`.
    CVar(String, Option<usize>),
    Name(String),
    Call(String, Vec<Expr>),
    Matrix(Vec<Vec<Expr>>),
    Tuple(Vec<Expr>),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

pub fn parse(src: &str) -> CliResult<Expr> {
    let mut p = Parser { src, pos: 0, depth: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos < src.len() {
        return Err(p.err_here("unexpected input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn err_here(&self, msg: &str) -> CliError {
        let end = self.pos + self.peek().map_or(0, char::len_utf8);
        let found = self.peek().map_or("end of input".to_string(), |c| format!("{c:?}"));
        CliError::Syntax { msg: format!("{msg}, found {found}"), span: self.pos..end }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> CliResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err_here(&format!("expected `{tok}`")))
        }
    }

    fn enter(&mut self) -> CliResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err_here("expression nested too deeply"));
        }
        Ok(())
    }

    fn bin(op: Op, l: Expr, r: Expr) -> Expr {
        let span = l.span.start..r.span.end;
        Expr { kind: ExprKind::Bin(op, Box::new(l), Box::new(r)), span }
    }

    fn expr(&mut self) -> CliResult<Expr> {
        self.enter()?;
        let mut l = self.sum()?;
        while self.eat("**") {
            let r = self.sum()?;
            l = Self::bin(Op::Star, l, r);
        }
        self.depth -= 1;
        Ok(l)
    }

    fn sum(&mut self) -> CliResult<Expr> {
        let mut l = self.term()?;
        loop {
            let op = if self.eat("+") {
                Op::Add
            } else if self.eat("-") {
                Op::Sub
            } else {
                return Ok(l);
            };
            let r = self.term()?;
            l = Self::bin(op, l, r);
        }
    }

    fn term(&mut self) -> CliResult<Expr> {
        let mut l = self.unary()?;
        loop {
            self.ws();
            let op = if self.rest().starts_with("**") {
                return Ok(l);
            } else if self.eat("*") {
                Op::Mul
            } else if self.eat("/") {
                Op::Div
            } else {
                return Ok(l);
            };
            let r = self.unary()?;
            l = Self::bin(op, l, r);
        }
    }

    fn unary(&mut self) -> CliResult<Expr> {
        self.ws();
        let start = self.pos;
        if self.eat("-") {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            let span = start..inner.span.end;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> CliResult<Expr> {
        let base = self.atom()?;
        if !self.eat("^") {
            return Ok(base);
        }
        self.ws();
        let neg = self.eat("-");
        self.ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err_here("expected an integer exponent"));
        }
        let e: i64 = digits.parse().map_err(|_| CliError::Syntax { msg: "exponent out of range".into(), span: start..self.pos })?;
        let span = base.span.start..self.pos;
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), if neg { -e } else { e }), span })
    }

    fn digits(&mut self) -> &str {
        let len = self.rest().find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest().len());
        let s = &self.src[self.pos..self.pos + len];
        self.pos += len;
        s
    }

    /// Raw text up to the closing `]`, which is consumed.
    fn bracket_body(&mut self, open: usize) -> CliResult<(String, Span)> {
        let start = self.pos;
        match self.rest().find(|c| c == ']' || c == '[') {
            Some(i) if self.rest()[i..].starts_with(']') => {
                let body = self.src[start..start + i].to_string();
                self.pos = start + i + 1;
                if body.trim().is_empty() {
                    return Err(CliError::Syntax { msg: "empty group element".into(), span: open..self.pos });
                }
                Ok((body, start..start + i))
            }
            Some(i) => {
                self.pos = start + i;
                Err(self.err_here("expected `]` closing the group element"))
            }
            None => Err(CliError::Syntax { msg: "unclosed `[`".into(), span: open..self.src.len() }),
        }
    }

    fn atom(&mut self) -> CliResult<Expr> {
        self.ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Err(self.err_here("expected an expression"));
        };
        let kind = if c.is_ascii_digit() {
            let d = self.digits();
            ExprKind::Int(d.parse().expect("ascii digits"))
        } else if c == '[' {
            self.pos += 1;
            self.ws();
            if self.peek() == Some('[') {
                self.matrix(start)?
            } else {
                ExprKind::Elem(self.bracket_body(start)?.0)
            }
        } else if c == '(' {
            self.pos += 1;
            self.enter()?;
            let mut items = vec![self.expr()?];
            while self.eat(",") {
                items.push(self.expr()?);
            }
            self.expect(")")?;
            self.depth -= 1;
            if items.len() == 1 {
                let mut e = items.pop().unwrap();
                e.span = start..self.pos;
                return Ok(e);
            }
            ExprKind::Tuple(items)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let len = self.rest().find(|c: char| !is_name_char(c)).unwrap_or(self.rest().len());
            let name = self.src[start..start + len].to_string();
            self.pos += len;
            match name.as_str() {
                "X" | "x" if self.rest().starts_with('[') => {
                    self.pos += 1;
                    let (body, span) = self.bracket_body(start)?;
                    if name == "X" {
                        ExprKind::NVar(body)
                    } else {
                        split_cell(&body, span)?
                    }
                }
                "w" => ExprKind::Gen,
                _ if self.rest().trim_start().starts_with('(') => {
                    self.expect("(")?;
                    self.enter()?;
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        args.push(self.expr()?);
                        while self.eat(",") {
                            args.push(self.expr()?);
                        }
                        self.expect(")")?;
                    }
                    self.depth -= 1;
                    ExprKind::Call(name, args)
                }
                _ => ExprKind::Name(name),
            }
        } else {
            return Err(self.err_here("expected an expression"));
        };
        Ok(Expr { kind, span: start..self.pos })
    }

    /// After the outer `[`; the next char is the first row's `[`.
    fn matrix(&mut self, open: usize) -> CliResult<ExprKind> {
        self.enter()?;
        let mut rows = Vec::new();
        loop {
            self.expect("[")?;
            let mut row = vec![self.expr()?];
            while self.eat(",") {
                row.push(self.expr()?);
            }
            self.expect("]")?;
            rows.push(row);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("]")?;
        self.depth -= 1;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Syntax { msg: format!("matrix must be square with {n} entries per row"), span: open..self.pos });
        }
        Ok(ExprKind::Matrix(rows))
    }
}

/// `g,i` splits at the last comma outside parentheses.
fn split_cell(body: &str, span: Span) -> CliResult<ExprKind> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    match split {
        None => Ok(ExprKind::CVar(body.to_string(), None)),
        Some(i) => {
            let idx = body[i + 1..].trim();
            match idx.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(ExprKind::CVar(body[..i].to_string(), Some(k))),
                _ => Err(CliError::Syntax {
                    msg: format!("coordinate index {idx:?} must be a positive integer"),
                    span: span.start + i + 1..span.end,
                }),
            }
        }
    }
}
