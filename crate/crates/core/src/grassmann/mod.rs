//! Finite Grassmann algebras over a commutative coefficient ring.
//!
//! Monomials are bit masks over a [`GeneratorRegistry`]; the bit order is
//! the canonical product order. Coefficients are any [`Ring`], which lets the
//! same type carry numeric coefficients or polynomial ones.
//!
//! Berezin integration follows `∫dθ θ = 1` with the rightmost measure
//! innermost: `∫dθ dθ̄ f` integrates `θ̄` first.

mod registry;
mod supermatrix;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub use registry::{Conjugation, GeneratorRegistry};
pub use supermatrix::SuperMatrix;

use crate::scalar::{Conjugate, Field, Ring};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrassmannError {
    #[error("elements belong to different generator registries")]
    RegistryMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("generator `{0}` registered twice")]
    DuplicateGenerator(String),
    #[error("registry holds {0} generators; at most 64 are supported")]
    TooManyGenerators(usize),
    #[error("conjugation rule of `{0}` is not an involution")]
    BadConjugation(String),
    #[error("element has no inverse (vanishing body)")]
    NotInvertible,
    #[error("supermatrix block {0} has the wrong parity")]
    BlockParity(&'static str),
    #[error("supermatrix dimensions do not match")]
    DimensionMismatch,
}

/// Sign of `m1 * m2` after sorting into canonical order, or `None` if the
/// product vanishes.
pub fn monomial_product_sign(m1: u64, m2: u64) -> Option<i8> {
    if m1 & m2 != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 63 { 0 } else { m1 >> (j + 1) };
        swaps += above.count_ones();
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

/// Number of generators in a monomial.
pub fn monomial_degree(m: u64) -> u32 {
    m.count_ones()
}

/// Element of the Grassmann algebra: a sum of coefficient times monomial.
#[derive(Clone)]
pub struct GrassmannElement<C> {
    registry: Arc<GeneratorRegistry>,
    terms: BTreeMap<u64, C>,
}

impl<C: Ring> GrassmannElement<C> {
    pub fn zero(registry: &Arc<GeneratorRegistry>) -> Self {
        GrassmannElement {
            registry: registry.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(registry: &Arc<GeneratorRegistry>) -> Self {
        Self::scalar(registry, C::one())
    }

    pub fn scalar(registry: &Arc<GeneratorRegistry>, c: C) -> Self {
        Self::monomial(registry, 0, c)
    }

    /// `c` times the canonical monomial `mask`.
    pub fn monomial(registry: &Arc<GeneratorRegistry>, mask: u64, c: C) -> Self {
        let mut out = Self::zero(registry);
        if !c.is_zero() {
            out.terms.insert(mask, c);
        }
        out
    }

    pub fn generator(registry: &Arc<GeneratorRegistry>, index: usize) -> Result<Self, GrassmannError> {
        if index >= registry.len() {
            return Err(GrassmannError::IndexOutOfRange(index));
        }
        Ok(Self::monomial(registry, 1u64 << index, C::one()))
    }

    pub fn named(registry: &Arc<GeneratorRegistry>, name: &str) -> Result<Self, GrassmannError> {
        Self::generator(registry, registry.require(name)?)
    }

    /// Product of generators in the given (not necessarily canonical) order.
    pub fn product_of(registry: &Arc<GeneratorRegistry>, indices: &[usize]) -> Result<Self, GrassmannError> {
        let mut out = Self::one(registry);
        for &i in indices {
            out = out.multiply(&Self::generator(registry, i)?)?;
        }
        Ok(out)
    }

    pub fn registry(&self) -> &Arc<GeneratorRegistry> {
        &self.registry
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &C)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u64) -> C {
        self.terms.get(&mask).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> C {
        self.coefficient(0)
    }

    /// Element minus its body.
    pub fn soul(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    /// Keeps the monomials accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> Self {
        GrassmannElement {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Grade involution: odd monomials change sign.
    pub fn grade_involution(&self) -> Self {
        self.map_terms(|m, c| if m.count_ones() % 2 == 1 { -c.clone() } else { c.clone() })
    }

    fn map_terms(&self, f: impl Fn(u64, &C) -> C) -> Self {
        let mut out = Self::zero(&self.registry);
        for (m, c) in &self.terms {
            let v = f(*m, c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> GrassmannElement<D> {
        let mut out = GrassmannElement::zero(&self.registry);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_terms(|_, x| x.clone() * c.clone())
    }

    fn add_term(&mut self, mask: u64, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(existing) => {
                let v = existing.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&mask);
                } else {
                    *existing = v;
                }
            }
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), GrassmannError> {
        if self.registry.same_as(&other.registry) {
            Ok(())
        } else {
            Err(GrassmannError::RegistryMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    /// Graded product with the inversion sign of canonical reordering.
    pub fn multiply(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check(other)?;
        let mut out = Self::zero(&self.registry);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(sign) = monomial_product_sign(*m1, *m2) {
                    let c = c1.clone() * c2.clone();
                    out.add_term(m1 | m2, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Graded commutator `[a, b} = ab - (-1)^{|a||b|} ba` for homogeneous
    /// operands; mixed parity operands are split into homogeneous parts.
    pub fn graded_commutator(&self, other: &Self) -> Result<Self, GrassmannError> {
        let parts = |x: &Self| [(x.even_part(), 0u8), (x.odd_part(), 1u8)];
        let mut out = Self::zero(&self.registry);
        for (a, pa) in parts(self) {
            for (b, pb) in parts(other) {
                let ab = a.multiply(&b)?;
                let ba = b.multiply(&a)?;
                let term = if pa * pb == 1 { ab.try_add(&ba)? } else { ab.try_sub(&ba)? };
                out = out.try_add(&term)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.registry);
        for _ in 0..k {
            out = out.multiply(self).expect("same registry");
        }
        out
    }

    /// Left derivative `∂/∂g`: `g` is moved to the front, then removed.
    pub fn left_derivative(&self, index: usize) -> Result<Self, GrassmannError> {
        if index >= self.registry.len() {
            return Err(GrassmannError::IndexOutOfRange(index));
        }
        let bit = 1u64 << index;
        let below = bit - 1;
        let mut out = Self::zero(&self.registry);
        for (m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & below).count_ones();
            let v = if before % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(m & !bit, v);
        }
        Ok(out)
    }

    /// Berezin integral `∫ dg_1 … dg_k x` with the rightmost measure
    /// innermost.
    pub fn berezin(&self, vars: &[usize]) -> Result<Self, GrassmannError> {
        let mut out = self.clone();
        for &v in vars.iter().rev() {
            out = out.left_derivative(v)?;
        }
        Ok(out)
    }

    /// Berezin integral over generators given by name.
    pub fn berezin_named(&self, vars: &[&str]) -> Result<Self, GrassmannError> {
        let idx = vars
            .iter()
            .map(|n| self.registry.require(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.berezin(&idx)
    }

    /// Multiplicative inverse for elements with an invertible body.
    pub fn try_inverse(&self) -> Result<Self, GrassmannError>
    where
        C: Field,
    {
        let b = self.body();
        let binv = b.try_inv().ok_or(GrassmannError::NotInvertible)?;
        // x = b (1 + n), n nilpotent
        let n = self.soul().scale(&binv);
        let minus_n = -n;
        let mut term = Self::one(&self.registry);
        let mut sum = Self::one(&self.registry);
        for _ in 0..=self.registry.len() {
            term = term.multiply(&minus_n)?;
            if term.is_zero() {
                break;
            }
            sum = sum.try_add(&term)?;
        }
        Ok(sum.scale(&binv))
    }

    /// Exponential of a nilpotent element (vanishing body).
    pub fn exp_nilpotent(&self) -> Result<Self, GrassmannError>
    where
        C: Field,
    {
        if !self.body().is_zero() {
            return Err(GrassmannError::NotInvertible);
        }
        let mut term = Self::one(&self.registry);
        let mut sum = Self::one(&self.registry);
        for k in 1..=(self.registry.len() as i64 + 1) {
            term = term.multiply(self)?.scale(&C::from_ratio(1, k));
            if term.is_zero() {
                break;
            }
            sum = sum.try_add(&term)?;
        }
        Ok(sum)
    }

    /// Re-expresses the element over a registry that contains all of its
    /// generators (matched by name), keeping canonical order.
    pub fn embed(&self, target: &Arc<GeneratorRegistry>) -> Result<Self, GrassmannError> {
        let map = (0..self.registry.len())
            .map(|i| target.require(self.registry.name(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let gens: Vec<usize> = bits(*m).map(|i| map[i]).collect();
            let prod = Self::product_of(target, &gens)?;
            for (pm, pc) in prod.terms {
                out.add_term(pm, pc * c.clone());
            }
        }
        Ok(out)
    }

    /// Replaces each generator `g_i` by the element `images[i]` (all in one
    /// target registry), extended as an algebra homomorphism. Images of odd
    /// generators should be odd.
    pub fn substitute_generators(
        &self,
        target: &Arc<GeneratorRegistry>,
        images: &[GrassmannElement<C>],
    ) -> Result<Self, GrassmannError> {
        if images.len() != self.registry.len() {
            return Err(GrassmannError::DimensionMismatch);
        }
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Self::scalar(target, c.clone());
            for i in bits(*m) {
                prod = prod.multiply(&images[i])?;
            }
            out = out.try_add(&prod)?;
        }
        Ok(out)
    }
}

impl<C: Ring + Conjugate> GrassmannElement<C> {
    /// Complex conjugation, an antilinear anti-automorphism:
    /// `(c g_1 … g_k)* = c* g_k* … g_1*`.
    pub fn conjugate(&self) -> Self {
        let reg = &self.registry;
        let mut out = Self::zero(reg);
        for (m, c) in &self.terms {
            let mut prod = Self::scalar(reg, c.conjugate());
            let gens: Vec<usize> = bits(*m).collect();
            for &g in gens.iter().rev() {
                let image = match reg.rule(g) {
                    Conjugation::Imaginary => -Self::monomial(reg, 1u64 << g, C::one()),
                    Conjugation::Paired(h) => Self::monomial(reg, 1u64 << h, C::one()),
                };
                prod = prod.multiply(&image).expect("same registry");
            }
            out = out.try_add(&prod).expect("same registry");
        }
        out
    }
}

/// Indices of set bits in increasing order.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(j)
        }
    })
}

impl<C: Ring> PartialEq for GrassmannElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.registry.same_as(&other.registry) && self.terms == other.terms
    }
}

impl<C: Ring> fmt::Debug for GrassmannElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}", c)?;
            for i in bits(*m) {
                write!(f, "·{}", self.registry.name(i))?;
            }
        }
        Ok(())
    }
}

impl<C: Ring + fmt::Display> fmt::Display for GrassmannElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for i in bits(*m) {
                write!(f, " {}", self.registry.name(i))?;
            }
        }
        Ok(())
    }
}

// Operator sugar. Mixing registries is a programming error here; use the
// `try_*` methods when registries may differ.

impl<C: Ring> Add for GrassmannElement<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("Grassmann registries differ")
    }
}

impl<'a, C: Ring> Add<&'a GrassmannElement<C>> for &'a GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn add(self, rhs: Self) -> GrassmannElement<C> {
        self.try_add(rhs).expect("Grassmann registries differ")
    }
}

impl<C: Ring> Sub for GrassmannElement<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("Grassmann registries differ")
    }
}

impl<'a, C: Ring> Sub<&'a GrassmannElement<C>> for &'a GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn sub(self, rhs: Self) -> GrassmannElement<C> {
        self.try_sub(rhs).expect("Grassmann registries differ")
    }
}

impl<C: Ring> Mul for GrassmannElement<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs).expect("Grassmann registries differ")
    }
}

impl<'a, C: Ring> Mul<&'a GrassmannElement<C>> for &'a GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn mul(self, rhs: Self) -> GrassmannElement<C> {
        self.multiply(rhs).expect("Grassmann registries differ")
    }
}

impl<C: Ring> Neg for GrassmannElement<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map_terms(|_, c| -c.clone())
    }
}

impl<'a, C: Ring> Neg for &'a GrassmannElement<C> {
    type Output = GrassmannElement<C>;
    fn neg(self) -> GrassmannElement<C> {
        self.map_terms(|_, c| -c.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactComplex;
    use num_traits::One;

    type G = GrassmannElement<ExactComplex>;

    fn reg() -> Arc<GeneratorRegistry> {
        GeneratorRegistry::new([
            ("θ", Conjugation::Imaginary),
            ("θ̄", Conjugation::Imaginary),
            ("c", Conjugation::Paired(2)),
            ("c̄", Conjugation::Paired(3)),
        ])
        .unwrap()
    }

    fn g(r: &Arc<GeneratorRegistry>, name: &str) -> G {
        G::named(r, name).unwrap()
    }

    #[test]
    fn anticommutation_and_nilpotency() {
        let r = reg();
        let th = g(&r, "θ");
        let tb = g(&r, "θ̄");
        assert!((&th * &tb + &tb * &th).is_zero());
        assert!((&th * &th).is_zero());
    }

    #[test]
    fn berezin_basics() {
        let r = reg();
        let th = g(&r, "θ");
        let tb = g(&r, "θ̄");
        assert_eq!(th.berezin(&[0]).unwrap(), G::one(&r));
        assert!(G::one(&r).berezin(&[0]).unwrap().is_zero());
        // ∫dθ dθ̄ θ̄θ = 1 with θ̄ innermost
        let prod = &tb * &th;
        assert_eq!(prod.berezin_named(&["θ", "θ̄"]).unwrap(), G::one(&r));
        let i = G::scalar(&r, <ExactComplex as crate::scalar::ComplexScalar>::i());
        let minus_i = -i.clone();
        let top = &minus_i * &prod;
        assert_eq!((&i * &top).berezin_named(&["θ", "θ̄"]).unwrap(), G::one(&r));
    }

    #[test]
    fn conjugation_rules() {
        let r = reg();
        let th = g(&r, "θ");
        let tb = g(&r, "θ̄");
        assert_eq!(th.conjugate(), -th.clone());
        let tbt = &tb * &th;
        // (θ̄θ)* = θ*θ̄* = θθ̄ = -θ̄θ
        assert_eq!(tbt.conjugate(), -tbt.clone());
        let c = g(&r, "c");
        assert_eq!(c.conjugate(), c);
    }

    #[test]
    fn inverse_of_even_element() {
        let r = reg();
        let th = g(&r, "θ");
        let tb = g(&r, "θ̄");
        let x = G::scalar(&r, ExactComplex::from_i64(2)) + &th * &tb;
        let y = x.try_inverse().unwrap();
        assert_eq!(&x * &y, G::one(&r));
        assert!((&th * &tb).try_inverse().is_err());
    }

    #[test]
    fn registry_validation() {
        assert!(GeneratorRegistry::new([("a", Conjugation::Paired(1)), ("b", Conjugation::Imaginary)]).is_err());
        assert!(GeneratorRegistry::real(["a", "a"]).is_err());
        let r1 = reg();
        let r2 = GeneratorRegistry::real(["x"]).unwrap();
        let a = G::one(&r1);
        let b = G::one(&r2);
        assert_eq!(a.multiply(&b), Err(GrassmannError::RegistryMismatch));
    }

    #[test]
    fn exp_of_nilpotent() {
        let r = reg();
        let x = &g(&r, "θ") * &g(&r, "c");
        let e = x.exp_nilpotent().unwrap();
        assert_eq!(e, G::one(&r) + x);
        assert!(G::one(&r).exp_nilpotent().is_err());
        assert!(ExactComplex::one().is_one());
    }
}
