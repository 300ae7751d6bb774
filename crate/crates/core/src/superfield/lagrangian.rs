use num_traits::Zero;

use super::{Superspace, SuperfieldError};
use crate::symexpr::{PolyExpr, Var};
use crate::{ExactComplex, PolyC, SuperPoly};

/// `L = Σ_i p_i q̇_i − H`.
pub fn lagrangian_polynomial(h: &PolyC, n: usize) -> PolyC {
    let mut kinetic = PolyC::zero();
    for i in 1..=n {
        kinetic = &kinetic + &(&PolyExpr::var(Var::p(i)) * &PolyExpr::var(Var::Q { i: i as u16, dots: 1 }));
    }
    &kinetic - h
}

/// `L̃ = λ_a φ̇^a + i c̄_a ċ^a − H̃`.
pub fn lagrangian_tilde(space: &Superspace, h: &PolyC) -> SuperPoly {
    let n = space.n();
    let i = PolyExpr::constant(ExactComplex::i());
    let mut out = -space.h_tilde(h);
    for a in 0..2 * n {
        let lam = PolyExpr::var(Var::lambda(a, n));
        let vel = PolyExpr::var(Var::phi(a, n).dot().expect("phase symbol"));
        out = out + space.scalar(&lam * &vel) + (space.cbar(a) * space.c_dot(a)).scale(&i);
    }
    out
}

/// `Σ_i (λ_{p_i} p_i + i c̄_{p_i} c^{p_i})`, whose time derivative is the
/// surface term separating `i∫dθdθ̄ L(Φ)` from `L̃`.
fn surface_potential(space: &Superspace) -> SuperPoly {
    let n = space.n();
    let i = PolyExpr::constant(ExactComplex::i());
    let mut out = space.scalar(PolyC::zero());
    for k in 0..n {
        let a = n + k;
        let lp = PolyExpr::var(Var::lambda(a, n));
        let p = PolyExpr::var(Var::phi(a, n));
        out = out + space.scalar(&lp * &p) + (space.cbar(a) * space.c(a)).scale(&i);
    }
    out
}

#[derive(Clone, Debug)]
pub struct LagrangianIdentity {
    /// `i ∫dθ dθ̄ L(Φ)`
    pub reduced: SuperPoly,
    pub l_tilde: SuperPoly,
    /// `d/dt Σ (λ_p p + i c̄_p c^p)`
    pub surface: SuperPoly,
    /// `reduced − (l_tilde − surface)`; identically zero when the identity
    /// holds.
    pub residual: SuperPoly,
}

pub fn lagrangian_identity(space: &Superspace, h: &PolyC) -> Result<LagrangianIdentity, SuperfieldError> {
    let l = lagrangian_polynomial(h, space.n());
    let reduced = space.berezin_reduce(&space.substitute(&l)?)?;
    let l_tilde = lagrangian_tilde(space, h);
    let surface = space.time_derivative(&surface_potential(space))?;
    let residual = &reduced - &(&l_tilde - &surface);
    Ok(LagrangianIdentity {
        reduced,
        l_tilde,
        surface,
        residual,
    })
}

/// `i ∫dθ dθ̄ Σ_i P_i Q̇_i`.
pub fn kinetic_reduction(space: &Superspace) -> Result<SuperPoly, SuperfieldError> {
    let n = space.n();
    let mut kinetic = space.scalar(PolyC::zero());
    for i in 1..=n {
        kinetic = kinetic + space.p_field(i) * space.superfield_velocity(i - 1);
    }
    space.berezin_reduce(&kinetic)
}

/// The quantum and classical path-integral weights built from one
/// Lagrangian: `L(φ)` and `i∫dθdθ̄ L(Φ)`.
#[derive(Clone, Debug)]
pub struct DequantizedWeights {
    pub lagrangian: PolyC,
    pub lifted: SuperPoly,
    pub cpi_weight: SuperPoly,
}

impl DequantizedWeights {
    /// `L(Φ)` restricted to `θ = θ̄ = 0` is `L(φ)`.
    pub fn restriction_matches(&self) -> bool {
        let body_part = self.lifted.filter(|m| m & 0b11 == 0);
        body_part.len() <= 1 && body_part.coefficient(0) == self.lagrangian
    }
}

pub fn dequantize(space: &Superspace, h: &PolyC) -> Result<DequantizedWeights, SuperfieldError> {
    let lagrangian = lagrangian_polynomial(h, space.n());
    let lifted = space.substitute(&lagrangian)?;
    let cpi_weight = space.berezin_reduce(&lifted)?;
    Ok(DequantizedWeights {
        lagrangian,
        lifted,
        cpi_weight,
    })
}
