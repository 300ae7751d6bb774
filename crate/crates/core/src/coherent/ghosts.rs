use super::CoherentError;
use crate::grassmann::GeneratorRegistry;
use crate::opalgebra::OpContext;
use crate::scalar::Ring;
use crate::{ExactComplex, OpExprQ};

/// Residuals of the odd coherent-state eigenvalue equations on the ghost
/// Fock module of one degree of freedom.
#[derive(Clone, Debug)]
pub struct GhostCoherentCheck {
    /// `F̂|0⟩_F` in normal order with the vacuum implicit.
    pub state: OpExprQ,
    /// `(c̄̂_q − c̄_q) F̂|0⟩_F`
    pub q_residual: OpExprQ,
    /// `(c̄̂_p − c̄_p) F̂|0⟩_F`
    pub p_residual: OpExprQ,
    /// `c̄̂_q|0⟩_F`, `c̄̂_p|0⟩_F` summed.
    pub vacuum_residual: OpExprQ,
}

impl GhostCoherentCheck {
    pub fn vanishes(&self) -> bool {
        self.q_residual.is_zero() && self.p_residual.is_zero() && self.vacuum_residual.is_zero()
    }
}

/// Outer odd parameters `c^q, c^p, c̄_q, c̄_p` at indices 0..4.
pub fn ghost_parameters() -> Result<std::sync::Arc<GeneratorRegistry>, CoherentError> {
    Ok(GeneratorRegistry::real(["c^q", "c^p", "cbar_q", "cbar_p"])?)
}

/// `F̂ = exp[−c^q c̄̂_q − c^p c̄̂_p − c̄_q ĉ^q − c̄_p ĉ^p]`, expanded exactly.
pub fn ghost_displacement(ctx: &OpContext) -> Result<OpExprQ, CoherentError> {
    let mut exponent = ctx.zero::<ExactComplex>();
    for a in 0..2 {
        // parameter c^a pairs with c̄̂_a, parameter c̄_a with ĉ^a
        let x = ctx.outer_gen::<ExactComplex>(a).multiply(&ctx.cbar(a))?;
        let y = ctx.outer_gen::<ExactComplex>(2 + a).multiply(&ctx.c(a))?;
        exponent = exponent.try_sub(&x)?.try_sub(&y)?;
    }
    Ok(exponent.exp_nilpotent()?)
}

/// `(c̄̂_a − eigenvalue) F̂|0⟩_F` for the given outer eigenvalue.
pub fn ghost_eigen_residual(ctx: &OpContext, f: &OpExprQ, a: usize, eigenvalue: &OpExprQ) -> Result<OpExprQ, CoherentError> {
    let lhs = ctx.cbar::<ExactComplex>(a).multiply(f)?;
    let rhs = eigenvalue.multiply(f)?;
    Ok(lhs.try_sub(&rhs)?.on_ghost_vacuum())
}

/// Checks that `F̂|0⟩_F` is annihilated by `c̄̂_q − c̄_q` and `c̄̂_p − c̄_p`.
pub fn grassmann_coherent_check() -> Result<GhostCoherentCheck, CoherentError> {
    let outer = ghost_parameters()?;
    let ctx = OpContext::new(1, &outer);
    let f = ghost_displacement(&ctx)?;
    let q_residual = ghost_eigen_residual(&ctx, &f, 0, &ctx.outer_gen(2))?;
    let p_residual = ghost_eigen_residual(&ctx, &f, 1, &ctx.outer_gen(3))?;
    let one = ctx.scalar(<ExactComplex as Ring>::from_i64(1));
    let vacuum_residual = ctx
        .cbar::<ExactComplex>(0)
        .multiply(&one)?
        .try_add(&ctx.cbar::<ExactComplex>(1).multiply(&one)?)?
        .on_ghost_vacuum();
    Ok(GhostCoherentCheck {
        state: f.on_ghost_vacuum(),
        q_residual,
        p_residual,
        vacuum_residual,
    })
}
