//! Superphase-space fields `Φ^a(θ, θ̄)`, substitution `H(Φ)` and its
//! component expansion, Berezin reduction, the Lagrangian identity,
//! supersymmetric time intervals and the θ-Heisenberg picture.

mod heisenberg;
mod interval;
mod lagrangian;

pub use heisenberg::{heisenberg_conjugate, operator_expansion, quantize, HeisenbergError};
pub use interval::{susy_jacobian, IntervalSpace, SuperInstant, SusyInvariance};
pub use lagrangian::{
    dequantize, kinetic_reduction, lagrangian_identity, lagrangian_polynomial, lagrangian_tilde, DequantizedWeights,
    LagrangianIdentity,
};

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::grassmann::{bits, Conjugation, GeneratorRegistry, GrassmannElement, GrassmannError};
use crate::scalar::Ring;
use crate::symexpr::{gradient, hessian, PolyExpr, SymplecticForm, Var};
use crate::{ExactComplex, PolyC, SuperPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SuperfieldError {
    #[error("symbol {0} has no superfield image")]
    UnsupportedSymbol(String),
    #[error("symbol {0} lies outside the phase space")]
    DimensionMismatch(String),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

/// Grassmann registry for one phase space of `n` degrees of freedom:
/// `θ, θ̄, c^a, c̄_a, ċ^a, c̄̇_a` in that canonical order.
#[derive(Clone, Debug)]
pub struct Superspace {
    n: usize,
    registry: Arc<GeneratorRegistry>,
}

impl Superspace {
    pub fn new(n: usize) -> Self {
        let dim = 2 * n;
        let label = |a: usize| Var::phi(a, n).name();
        let mut gens: Vec<(String, Conjugation)> =
            vec![("θ".into(), Conjugation::Imaginary), ("θ̄".into(), Conjugation::Imaginary)];
        let groups: [&dyn Fn(usize) -> String; 4] = [
            &|a| format!("c^{}", label(a)),
            &|a| format!("cbar_{}", label(a)),
            &|a| format!("dc^{}", label(a)),
            &|a| format!("dcbar_{}", label(a)),
        ];
        for g in groups {
            for a in 0..dim {
                let idx = gens.len();
                gens.push((g(a), Conjugation::Paired(idx)));
            }
        }
        let registry = GeneratorRegistry::new(gens).expect("superspace registry is well formed");
        Superspace { n, registry }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn registry(&self) -> &Arc<GeneratorRegistry> {
        &self.registry
    }

    pub const THETA: usize = 0;
    pub const THETA_BAR: usize = 1;

    pub fn c_index(&self, a: usize) -> usize {
        2 + a
    }

    pub fn cbar_index(&self, a: usize) -> usize {
        2 + 2 * self.n + a
    }

    fn c_dot_index(&self, a: usize) -> usize {
        2 + 4 * self.n + a
    }

    fn cbar_dot_index(&self, a: usize) -> usize {
        2 + 6 * self.n + a
    }

    fn gen(&self, index: usize) -> SuperPoly {
        GrassmannElement::generator(&self.registry, index).expect("index within registry")
    }

    pub fn theta(&self) -> SuperPoly {
        self.gen(Self::THETA)
    }

    pub fn theta_bar(&self) -> SuperPoly {
        self.gen(Self::THETA_BAR)
    }

    pub fn c(&self, a: usize) -> SuperPoly {
        self.gen(self.c_index(a))
    }

    pub fn cbar(&self, a: usize) -> SuperPoly {
        self.gen(self.cbar_index(a))
    }

    pub fn c_dot(&self, a: usize) -> SuperPoly {
        self.gen(self.c_dot_index(a))
    }

    pub fn cbar_dot(&self, a: usize) -> SuperPoly {
        self.gen(self.cbar_dot_index(a))
    }

    pub fn scalar(&self, p: PolyC) -> SuperPoly {
        GrassmannElement::scalar(&self.registry, p)
    }

    pub fn number(&self, c: ExactComplex) -> SuperPoly {
        self.scalar(PolyExpr::constant(c))
    }

    pub fn var(&self, v: Var) -> SuperPoly {
        self.scalar(PolyExpr::var(v))
    }

    /// `θ̄θ`
    pub fn theta_bar_theta(&self) -> SuperPoly {
        self.theta_bar().multiply(&self.theta()).expect("same registry")
    }

    fn assemble(&self, a: usize, base: SuperPoly, ghost: SuperPoly, anti: SuperPoly, top: SuperPoly) -> SuperPoly {
        let w = SymplecticForm::new(self.n);
        let b = w.partner(a);
        let wab = ExactComplex::from_i64(w.upper(a, b));
        let i = ExactComplex::i();
        let th = self.theta();
        let tb = self.theta_bar();
        let tbt = self.theta_bar_theta();
        base + th * ghost + (tb * anti).scale(&PolyExpr::constant(wab.clone()))
            + (tbt * top).scale(&PolyExpr::constant(wab * i))
    }

    /// `Φ^a = φ^a + θ c^a + θ̄ ω^{ab} c̄_b + i θ̄θ ω^{ab} λ_b`
    pub fn superfield(&self, a: usize) -> SuperPoly {
        let b = SymplecticForm::new(self.n).partner(a);
        self.assemble(
            a,
            self.var(Var::phi(a, self.n)),
            self.c(a),
            self.cbar(b),
            self.var(Var::lambda(b, self.n)),
        )
    }

    /// `Φ̇^a`, built from the dotted component symbols.
    pub fn superfield_velocity(&self, a: usize) -> SuperPoly {
        let b = SymplecticForm::new(self.n).partner(a);
        let dot = |v: Var| v.dot().expect("phase symbols have derivatives");
        self.assemble(
            a,
            self.var(dot(Var::phi(a, self.n))),
            self.c_dot(a),
            self.cbar_dot(b),
            self.var(dot(Var::lambda(b, self.n))),
        )
    }

    /// `Q_i`, the superfield of `q_i` (1-based).
    pub fn q_field(&self, i: usize) -> SuperPoly {
        self.superfield(i - 1)
    }

    /// `P_i`, the superfield of `p_i` (1-based).
    pub fn p_field(&self, i: usize) -> SuperPoly {
        self.superfield(self.n + i - 1)
    }

    fn image(&self, v: Var) -> Result<SuperPoly, SuperfieldError> {
        if let Var::T(_) = v {
            return Ok(self.var(v));
        }
        let dof = v.dof().unwrap_or(0);
        if dof == 0 || dof > self.n {
            return Err(SuperfieldError::DimensionMismatch(v.name()));
        }
        let (a, dots) = match v {
            Var::Q { i, dots } => (i as usize - 1, dots),
            Var::P { i, dots } => (self.n + i as usize - 1, dots),
            _ => return Err(SuperfieldError::UnsupportedSymbol(v.name())),
        };
        match dots {
            0 => Ok(self.superfield(a)),
            1 => Ok(self.superfield_velocity(a)),
            _ => Err(SuperfieldError::UnsupportedSymbol(v.name())),
        }
    }

    /// `F(Φ)`: every `q_i, p_i` replaced by its superfield and every
    /// `q̇_i, ṗ_i` by the superfield velocity. Time labels pass through.
    pub fn substitute(&self, f: &PolyC) -> Result<SuperPoly, SuperfieldError> {
        let mut images = std::collections::BTreeMap::new();
        for v in f.vars() {
            images.insert(v, self.image(v)?);
        }
        let mut total = GrassmannElement::zero(&self.registry);
        let mut powers: std::collections::BTreeMap<(Var, u32), SuperPoly> = Default::default();
        for (m, c) in f.terms() {
            let mut t = self.number(c.clone());
            for &(v, e) in m.powers() {
                let pw = powers
                    .entry((v, e))
                    .or_insert_with(|| images[&v].pow(e))
                    .clone();
                t = t.multiply(&pw)?;
            }
            total = total.try_add(&t)?;
        }
        Ok(total)
    }

    /// Components of an element in the `{1, θ, θ̄, θ̄θ}` basis, normalised
    /// as `x = base + θ·theta + theta_bar·θ̄ − iθ̄θ·top`.
    pub fn expand(&self, x: &SuperPoly) -> Result<SuperExpansion<SuperPoly>, SuperfieldError> {
        let (t, tb) = (1u64 << Self::THETA, 1u64 << Self::THETA_BAR);
        let base = x.filter(|m| m & (t | tb) == 0);
        let theta = x.filter(|m| m & t != 0 && m & tb == 0).left_derivative(Self::THETA)?;
        let theta_bar = x
            .filter(|m| m & tb != 0 && m & t == 0)
            .left_derivative(Self::THETA_BAR)?
            .grade_involution();
        let d = x
            .filter(|m| m & t != 0 && m & tb != 0)
            .left_derivative(Self::THETA)?
            .left_derivative(Self::THETA_BAR)?;
        let top = d.scale(&PolyExpr::constant(-ExactComplex::i()));
        Ok(SuperExpansion {
            base,
            theta,
            theta_bar,
            top,
        })
    }

    pub fn reconstruct(&self, e: &SuperExpansion<SuperPoly>) -> SuperPoly {
        let minus_i = PolyExpr::constant(-ExactComplex::i());
        &e.base + &(self.theta() * e.theta.clone())
            + e.theta_bar.clone() * self.theta_bar()
            + (self.theta_bar_theta() * e.top.clone()).scale(&minus_i)
    }

    /// `i ∫dθ dθ̄ x`
    pub fn berezin_reduce(&self, x: &SuperPoly) -> Result<SuperPoly, SuperfieldError> {
        Ok(x
            .berezin(&[Self::THETA, Self::THETA_BAR])?
            .scale(&PolyExpr::constant(ExactComplex::i())))
    }

    /// `H̃ = λ_a ω^{ab} ∂_b H + i c̄_a ω^{ab} ∂_b∂_d H c^d` assembled from
    /// derivatives.
    pub fn h_tilde(&self, h: &PolyC) -> SuperPoly {
        self.components_from_derivatives(h).top
    }

    /// `(H, c^a ∂_a H, c̄_a ω^{ab} ∂_b H, H̃)` assembled directly from the
    /// derivative tensors of `h`.
    pub fn components_from_derivatives(&self, h: &PolyC) -> SuperExpansion<SuperPoly> {
        let n = self.n;
        let w = SymplecticForm::new(n);
        let grad = gradient(h, n);
        let hess = hessian(h, n);
        let zero = GrassmannElement::zero(&self.registry);
        let (mut nc, mut nb, mut top) = (zero.clone(), zero.clone(), zero);
        let i = PolyExpr::constant(ExactComplex::i());
        for a in 0..2 * n {
            let b = w.partner(a);
            let wab = PolyExpr::constant(ExactComplex::from_i64(w.upper(a, b)));
            nc = nc + self.c(a).scale(&grad[a]);
            nb = nb + self.cbar(a).scale(&(&wab * &grad[b]));
            let lam = PolyExpr::var(Var::lambda(a, n));
            top = top + self.scalar(&(&lam * &wab) * &grad[b]);
            for d in 0..2 * n {
                if hess[b][d].is_zero() {
                    continue;
                }
                let coeff = &(&wab * &i) * &hess[b][d];
                top = top + (self.cbar(a) * self.c(d)).scale(&coeff);
            }
        }
        SuperExpansion {
            base: self.scalar(h.clone()),
            theta: nc,
            theta_bar: nb,
            top,
        }
    }

    /// Total time derivative: the chain rule on coefficients, and
    /// `c ↦ ċ`, `c̄ ↦ c̄̇` on generators; `θ, θ̄` are constant.
    pub fn time_derivative(&self, x: &SuperPoly) -> Result<SuperPoly, SuperfieldError> {
        let dim = 2 * self.n;
        let mut out = GrassmannElement::zero(&self.registry);
        for (m, c) in x.terms() {
            out = out.try_add(&GrassmannElement::monomial(&self.registry, m, c.time_derivative()))?;
            let gens: Vec<usize> = bits(m).collect();
            for (k, &g) in gens.iter().enumerate() {
                let replaced = if g < 2 {
                    continue;
                } else if g < 2 + 2 * dim {
                    g + 2 * dim
                } else {
                    return Err(SuperfieldError::UnsupportedSymbol(self.registry.name(g).to_string()));
                };
                let mut order = gens.clone();
                order[k] = replaced;
                let prod = GrassmannElement::<PolyC>::product_of(&self.registry, &order)?;
                out = out.try_add(&prod.scale(c))?;
            }
        }
        Ok(out)
    }

    /// `Φ^a* = Φ^a` for every `a` under `θ* = −θ`, `θ̄* = −θ̄` with real
    /// components.
    pub fn superfields_are_hermitian(&self) -> bool {
        (0..2 * self.n).all(|a| {
            let f = self.superfield(a);
            f.conjugate() == f
        })
    }
}

/// Components of an even function of superfields in the basis
/// `F = base + θ·theta + theta_bar·θ̄ − iθ̄θ·top`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperExpansion<T> {
    pub base: T,
    pub theta: T,
    pub theta_bar: T,
    pub top: T,
}

impl<T> SuperExpansion<T> {
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> SuperExpansion<U> {
        SuperExpansion {
            base: f(&self.base),
            theta: f(&self.theta),
            theta_bar: f(&self.theta_bar),
            top: f(&self.top),
        }
    }

    pub fn as_array(&self) -> [&T; 4] {
        [&self.base, &self.theta, &self.theta_bar, &self.top]
    }
}

/// `H(Φ)` expanded into `(H, N, N̄, H̃)`.
pub fn substitute(space: &Superspace, h: &PolyC) -> Result<SuperExpansion<SuperPoly>, SuperfieldError> {
    space.expand(&space.substitute(h)?)
}

/// `i ∫dθ dθ̄` applied to a reconstructed expansion; returns the top
/// component.
pub fn berezin_reduce(space: &Superspace, e: &SuperExpansion<SuperPoly>) -> Result<SuperPoly, SuperfieldError> {
    space.berezin_reduce(&space.reconstruct(e))
}

/// True when the element has no Grassmann or polynomial content.
pub fn is_zero(x: &SuperPoly) -> bool {
    x.is_zero()
}

/// `1` in the superspace registry.
pub fn one(space: &Superspace) -> SuperPoly {
    space.scalar(PolyExpr::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{complexify, parse_polynomial};
    use num_rational::BigRational;

    fn h(text: &str) -> PolyC {
        complexify(&parse_polynomial(text).unwrap())
    }

    #[test]
    fn free_hamiltonian_components() {
        let s = Superspace::new(1);
        let e = substitute(&s, &h("p1^2/2")).unwrap();
        assert_eq!(e, s.components_from_derivatives(&h("p1^2/2")));
        let i = PolyExpr::constant(ExactComplex::i());
        let expected_top = s.var(Var::p(1)) * s.var(Var::LamQ { i: 1, dots: 0 })
            + (s.cbar(0) * s.c(1)).scale(&i);
        assert_eq!(e.top, expected_top);
        assert_eq!(s.reconstruct(&e), s.substitute(&h("p1^2/2")).unwrap());
    }

    #[test]
    fn berezin_normalisation() {
        let s = Superspace::new(1);
        let x = s.theta_bar_theta().scale(&PolyExpr::constant(-ExactComplex::i()));
        assert_eq!(s.berezin_reduce(&x).unwrap(), one(&s));
    }

    #[test]
    fn superfields_hermitian() {
        assert!(Superspace::new(2).superfields_are_hermitian());
    }

    #[test]
    fn heisenberg_picture_matches_substitution() {
        for (text, n) in [("q1", 1), ("p1^2/2", 1), ("q1^3*p1 - 2*p1^2", 1), ("q1*p2 + q2^2*p1", 2)] {
            let s = Superspace::new(n);
            let g = h(text);
            let op = heisenberg_conjugate(&g, n).unwrap();
            let expected = quantize(&s, &s.substitute(&g).unwrap(), op.outer()).unwrap();
            assert_eq!(op, expected, "{text}");
        }
    }

    #[test]
    fn lagrangian_identity_holds() {
        for (text, n) in [("p1^2/2", 1), ("p1^2/2 + q1^2/2", 1), ("q1*p1^3 + q2^2*p1", 2)] {
            let s = Superspace::new(n);
            let r = lagrangian_identity(&s, &h(text)).unwrap();
            assert!(r.residual.is_zero(), "{text}: {:?}", r.residual);
        }
    }

    #[test]
    fn kinetic_term_reduction() {
        let s = Superspace::new(1);
        let i = PolyExpr::constant(ExactComplex::i());
        let v = |v: Var| PolyExpr::var(v);
        let q = |dots| Var::Q { i: 1, dots };
        let lq = |dots| Var::LamQ { i: 1, dots };
        let lp = |dots| Var::LamP { i: 1, dots };
        let expected = s.scalar(&v(lq(0)) * &v(q(1))) + (s.cbar(0) * s.c_dot(0)).scale(&i)
            + (s.c(1) * s.cbar_dot(1)).scale(&i)
            - s.scalar(&v(Var::p(1)) * &v(lp(1)));
        assert_eq!(kinetic_reduction(&s).unwrap(), expected);
    }

    #[test]
    fn intervals_are_invariant() {
        for beta in [BigRational::one(), BigRational::new(3.into(), 7.into())] {
            let sp = IntervalSpace::new(beta.clone());
            let r = sp.check_invariance();
            assert!(r.all_vanish(), "{r:?}");
            let two_beta = PolyExpr::constant(ExactComplex::new(beta * BigRational::from_integer(2.into()), BigRational::zero()));
            assert_eq!(r.commutator.t, (sp.eps() * sp.eps_bar()).scale(&two_beta));
            let sdet = susy_jacobian(&sp.beta).unwrap().sdet().unwrap();
            assert_eq!(sdet.body(), ExactComplex::one());
            assert!(sdet.soul().is_zero());
        }
    }

    #[test]
    fn dequantized_weights_share_lagrangian() {
        let s = Superspace::new(1);
        let d = dequantize(&s, &h("p1^2/2 + q1^4")).unwrap();
        assert!(d.restriction_matches());
    }
}
