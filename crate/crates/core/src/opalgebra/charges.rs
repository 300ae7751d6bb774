use std::sync::Arc;

use num_traits::Zero;

use super::expr::{OpAlgebraError, OpExpr, OpSym};
use crate::grassmann::GeneratorRegistry;
use crate::scalar::ComplexScalar;
use crate::symexpr::{gradient, hessian, third_derivatives, PolyExpr, SymplecticForm};

/// Builder for operator expressions over one phase space and one outer
/// registry.
#[derive(Clone)]
pub struct OpContext {
    pub n: usize,
    pub outer: Arc<GeneratorRegistry>,
}

impl OpContext {
    pub fn new(n: usize, outer: &Arc<GeneratorRegistry>) -> Self {
        OpContext { n, outer: outer.clone() }
    }

    pub fn sym<C: ComplexScalar>(&self, s: OpSym) -> OpExpr<C> {
        OpExpr::symbol(self.n, &self.outer, s).expect("index within phase space")
    }

    pub fn phi<C: ComplexScalar>(&self, a: usize) -> OpExpr<C> {
        self.sym(OpSym::Phi(a as u16))
    }

    pub fn lambda<C: ComplexScalar>(&self, a: usize) -> OpExpr<C> {
        self.sym(OpSym::Lambda(a as u16))
    }

    pub fn c<C: ComplexScalar>(&self, a: usize) -> OpExpr<C> {
        self.sym(OpSym::C(a as u16))
    }

    pub fn cbar<C: ComplexScalar>(&self, a: usize) -> OpExpr<C> {
        self.sym(OpSym::CBar(a as u16))
    }

    pub fn scalar<C: ComplexScalar>(&self, c: C) -> OpExpr<C> {
        OpExpr::scalar(self.n, &self.outer, c)
    }

    pub fn zero<C: ComplexScalar>(&self) -> OpExpr<C> {
        OpExpr::zero(self.n, &self.outer)
    }

    pub fn outer_gen<C: ComplexScalar>(&self, index: usize) -> OpExpr<C> {
        OpExpr::outer_generator(self.n, &self.outer, index)
    }

    pub fn poly<C: ComplexScalar>(&self, p: &PolyExpr<C>) -> Result<OpExpr<C>, OpAlgebraError> {
        OpExpr::from_poly(self.n, &self.outer, p)
    }

    pub fn omega(&self) -> SymplecticForm {
        SymplecticForm::new(self.n)
    }
}

/// The operator charges built from `H`.
#[derive(Clone, Debug)]
pub struct ChargeSet<C: ComplexScalar> {
    /// `Q_BRS = i ĉ^a λ̂_a`
    pub q_brs: OpExpr<C>,
    /// `Q̄_BRS = i c̄̂_a ω^{ab} λ̂_b`
    pub q_brs_bar: OpExpr<C>,
    /// `Q_H = Q_BRS - N`
    pub q_h: OpExpr<C>,
    /// `Q̄_H = Q̄_BRS + N̄`
    pub q_h_bar: OpExpr<C>,
    /// `K = ½ ω_{ab} ĉ^a ĉ^b`
    pub k: OpExpr<C>,
    /// `K̄ = ½ ω^{ab} c̄̂_a c̄̂_b`
    pub k_bar: OpExpr<C>,
    /// `Q_g = ĉ^a c̄̂_a`
    pub q_g: OpExpr<C>,
    /// `N = ĉ^a ∂_a H`
    pub n_charge: OpExpr<C>,
    /// `N̄ = c̄̂_a ω^{ab} ∂_b H`
    pub n_bar: OpExpr<C>,
    /// `H̃ = λ̂_a ω^{ab} ∂_b H + i c̄̂_a ω^{ab} ∂_b ∂_d H ĉ^d`
    pub h_tilde: OpExpr<C>,
}

impl<C: ComplexScalar> ChargeSet<C> {
    /// Named list, `H̃` last.
    pub fn named(&self) -> Vec<(&'static str, &OpExpr<C>)> {
        vec![
            ("Q_BRS", &self.q_brs),
            ("Qbar_BRS", &self.q_brs_bar),
            ("Q_H", &self.q_h),
            ("Qbar_H", &self.q_h_bar),
            ("K", &self.k),
            ("Kbar", &self.k_bar),
            ("Q_g", &self.q_g),
            ("N", &self.n_charge),
            ("Nbar", &self.n_bar),
            ("H_tilde", &self.h_tilde),
        ]
    }
}

/// Operator form of `H̃` with multipliers written left of coordinates and
/// anti-ghosts left of ghosts.
pub fn h_tilde_operator<C: ComplexScalar>(ctx: &OpContext, h: &PolyExpr<C>) -> Result<OpExpr<C>, OpAlgebraError> {
    let n = ctx.n;
    let w = ctx.omega();
    let grad = gradient(h, n);
    let hess = hessian(h, n);
    let mut out = ctx.zero();
    for a in 0..2 * n {
        let b = w.partner(a);
        let wab = C::from_i64(w.upper(a, b));
        out = out.try_add(&ctx.lambda(a).multiply(&ctx.poly(&grad[b])?)?.scale(&wab))?;
        for d in 0..2 * n {
            if hess[b][d].is_zero() {
                continue;
            }
            let term = ctx.cbar(a).multiply(&ctx.poly(&hess[b][d])?)?.multiply(&ctx.c(d))?;
            out = out.try_add(&term.scale(&(wab.clone() * C::i())))?;
        }
    }
    Ok(out)
}

/// All charges for the Hamiltonian `h` on `ctx`.
pub fn charges<C: ComplexScalar>(ctx: &OpContext, h: &PolyExpr<C>) -> Result<ChargeSet<C>, OpAlgebraError> {
    let n = ctx.n;
    let w = ctx.omega();
    let grad = gradient(h, n);
    let i = C::i();
    let mut q_brs = ctx.zero();
    let mut q_brs_bar = ctx.zero();
    let mut n_charge = ctx.zero();
    let mut n_bar = ctx.zero();
    let mut k = ctx.zero();
    let mut k_bar = ctx.zero();
    let mut q_g = ctx.zero();
    let half = C::from_ratio(1, 2);
    for a in 0..2 * n {
        q_brs = q_brs.try_add(&ctx.c(a).multiply(&ctx.lambda(a))?.scale(&i))?;
        n_charge = n_charge.try_add(&ctx.c(a).multiply(&ctx.poly(&grad[a])?)?)?;
        q_g = q_g.try_add(&ctx.c(a).multiply(&ctx.cbar(a))?)?;
        let b = w.partner(a);
        let up = C::from_i64(w.upper(a, b));
        let low = C::from_i64(w.lower(a, b));
        q_brs_bar = q_brs_bar.try_add(&ctx.cbar(a).multiply(&ctx.lambda(b))?.scale(&(up.clone() * i.clone())))?;
        n_bar = n_bar.try_add(&ctx.cbar(a).multiply(&ctx.poly(&grad[b])?)?.scale(&up))?;
        k = k.try_add(&ctx.c(a).multiply(&ctx.c(b))?.scale(&(low * half.clone())))?;
        k_bar = k_bar.try_add(&ctx.cbar(a).multiply(&ctx.cbar(b))?.scale(&(up * half.clone())))?;
    }
    let q_h = q_brs.try_sub(&n_charge)?;
    let q_h_bar = q_brs_bar.try_add(&n_bar)?;
    let h_tilde = h_tilde_operator(ctx, h)?;
    Ok(ChargeSet {
        q_brs,
        q_brs_bar,
        q_h,
        q_h_bar,
        k,
        k_bar,
        q_g,
        n_charge,
        n_bar,
        h_tilde,
    })
}

/// Operator velocities of the components from the extended equations of
/// motion:
/// `φ̇^a = ω^{ab}∂_bH`, `ċ^a = ω^{ad}∂_d∂_bH ĉ^b`,
/// `c̄̇_b = -c̄̂_a ω^{ad}∂_d∂_bH`,
/// `λ̇_b = -ω^{ad}∂_d∂_bH λ̂_a - i c̄̂_a ω^{ad}∂_d∂_f∂_bH ĉ^f`.
#[derive(Clone, Debug)]
pub struct ComponentVelocities<C: ComplexScalar> {
    pub phi: Vec<OpExpr<C>>,
    pub c: Vec<OpExpr<C>>,
    pub cbar: Vec<OpExpr<C>>,
    pub lambda: Vec<OpExpr<C>>,
}

pub fn component_velocities<C: ComplexScalar>(
    ctx: &OpContext,
    h: &PolyExpr<C>,
) -> Result<ComponentVelocities<C>, OpAlgebraError> {
    let n = ctx.n;
    let dim = 2 * n;
    let w = ctx.omega();
    let grad = gradient(h, n);
    let hess = hessian(h, n);
    let third = third_derivatives(h, n);
    let mut phi = Vec::new();
    let mut c = Vec::new();
    let mut cbar = Vec::new();
    let mut lambda = Vec::new();
    for a in 0..dim {
        let b = w.partner(a);
        let wab = C::from_i64(w.upper(a, b));
        phi.push(ctx.poly(&grad[b])?.scale(&wab));
        // ċ^a = ω^{ad} ∂_d∂_b H c^b, d = partner(a)
        let mut ca = ctx.zero();
        for bb in 0..dim {
            ca = ca.try_add(&ctx.poly(&hess[b][bb])?.multiply(&ctx.c(bb))?.scale(&wab))?;
        }
        c.push(ca);
    }
    for b in 0..dim {
        let mut cb = ctx.zero();
        let mut lb = ctx.zero();
        for a in 0..dim {
            let d = w.partner(a);
            let wad = C::from_i64(w.upper(a, d));
            cb = cb.try_sub(&ctx.cbar(a).multiply(&ctx.poly(&hess[d][b])?)?.scale(&wad))?;
            lb = lb.try_sub(&ctx.poly(&hess[d][b])?.multiply(&ctx.lambda(a))?.scale(&wad))?;
            for f in 0..dim {
                if third[d][f][b].is_zero() {
                    continue;
                }
                let term = ctx
                    .cbar(a)
                    .multiply(&ctx.poly(&third[d][f][b])?)?
                    .multiply(&ctx.c(f))?;
                lb = lb.try_sub(&term.scale(&(wad.clone() * C::i())))?;
            }
        }
        cbar.push(cb);
        lambda.push(lb);
    }
    Ok(ComponentVelocities { phi, c, cbar, lambda })
}
