//! The near ring `R(k,G)`: polynomials in commuting variables `X_g`, with the
//! composition-like product `⋆`.

use serde::Serialize;

use crate::error::{mismatch, Result};
use crate::fields::{Fe, Field};
use crate::group_ring::GroupRingElem;
use crate::groups::{Group, GroupElem, MemorySet};
use crate::poly::{Monomial, Poly, DEFAULT_TERM_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearRingElem {
    group: Group,
    field: Field,
    poly: Poly<GroupElem>,
}

impl NearRingElem {
    pub fn from_poly(group: &Group, field: &Field, poly: Poly<GroupElem>) -> Result<Self> {
        poly.check_coeffs(field)?;
        for v in poly.variables() {
            group.check(&v)?;
        }
        Ok(NearRingElem { group: group.clone(), field: field.clone(), poly })
    }

    pub fn zero(group: &Group, field: &Field) -> Self {
        NearRingElem { group: group.clone(), field: field.clone(), poly: Poly::zero() }
    }

    pub fn constant(c: Fe, group: &Group, field: &Field) -> Self {
        NearRingElem { group: group.clone(), field: field.clone(), poly: Poly::constant(c, field) }
    }

    /// The variable `X_g`.
    pub fn var(g: GroupElem, group: &Group, field: &Field) -> Result<Self> {
        group.check(&g)?;
        Ok(NearRingElem { group: group.clone(), field: field.clone(), poly: Poly::var(g, field) })
    }

    /// `X_{1_G}`, the identity for `⋆`.
    pub fn identity(group: &Group, field: &Field) -> Self {
        Self::var(group.identity(), group, field).expect("identity belongs to the group")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn poly(&self) -> &Poly<GroupElem> {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Union of the supports of all monomials.
    pub fn support(&self) -> MemorySet {
        self.poly.variables().into_iter().collect()
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
        Ok(NearRingElem { poly: self.poly.add(&other.poly, &self.field), ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        NearRingElem { poly: self.poly.neg(&self.field), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Fe) -> Self {
        NearRingElem { poly: self.poly.scale(c, &self.field), ..self.clone() }
    }

    /// Ordinary polynomial product (not `⋆`).
    pub fn poly_mul(&self, other: &Self, budget: usize) -> Result<Self> {
        self.same_ctx(other)?;
        Ok(NearRingElem { poly: self.poly.mul(&other.poly, &self.field, budget)?, ..self.clone() })
    }

    pub fn poly_pow(&self, e: u32, budget: usize) -> Result<Self> {
        Ok(NearRingElem { poly: self.poly.pow(e, &self.field, budget)?, ..self.clone() })
    }

    /// `gγ`: every variable `X_h` becomes `X_{gh}`.
    pub fn act(&self, g: &GroupElem) -> Result<Self> {
        self.group.check(g)?;
        let poly = self.poly.map_vars(|h| self.group.mul_unchecked(g, h), &self.field);
        Ok(NearRingElem { poly, ..self.clone() })
    }

    /// `α ⋆ β = Σ_u α(u) ∏_g (gβ)^{u(g)}` with the default term budget.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.star_with_budget(other, DEFAULT_TERM_BUDGET)
    }

    pub fn star_with_budget(&self, other: &Self, budget: usize) -> Result<Self> {
        self.same_ctx(other)?;
        let poly =
            self.poly.substitute(|g| Ok(other.poly.map_vars(|h| self.group.mul_unchecked(g, h), &self.field)), &self.field, budget)?;
        Ok(NearRingElem { poly, ..self.clone() })
    }

    /// `Φ(Σ a(g) g) = Σ a(g) X_g`.
    pub fn embed_phi(a: &GroupRingElem) -> Self {
        let field = a.field();
        let poly = Poly::from_terms(a.terms().map(|(g, c)| (Monomial::var(g.clone()), c.clone())), field);
        NearRingElem { group: a.group().clone(), field: field.clone(), poly }
    }

    pub fn format(&self) -> String {
        self.poly.format(&self.field, |g| format!("X[{}]", self.group.format_elem(g)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremAReport {
    /// `α ⋆ β = X_{1_G}`
    pub is_left_inverse: bool,
    /// `β ⋆ α = X_{1_G}`
    pub is_right_inverse: bool,
}

pub fn verify_theorem_a(alpha: &NearRingElem, beta: &NearRingElem, budget: usize) -> Result<TheoremAReport> {
    let id = NearRingElem::identity(&alpha.group, &alpha.field);
    Ok(TheoremAReport {
        is_left_inverse: alpha.star_with_budget(beta, budget)? == id,
        is_right_inverse: beta.star_with_budget(alpha, budget)? == id,
    })
}
