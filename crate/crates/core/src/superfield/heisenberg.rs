use std::sync::Arc;

use super::{SuperExpansion, Superspace};
use crate::grassmann::{bits, GeneratorRegistry};
use crate::opalgebra::{charges, theta_registry, OpAlgebraError, OpContext, OpExpr, OpSym};
use crate::scalar::{ComplexScalar, Ring};
use crate::{ExactComplex, OpExprQ, PolyC, SuperPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeisenbergError {
    #[error("generator {0} has no operator counterpart")]
    UnsupportedGenerator(String),
    #[error(transparent)]
    Algebra(#[from] OpAlgebraError),
}

/// `S G(φ̂) S⁻¹` with `S = exp(θQ̂_BRS + Q̄̂_BRS θ̄)`, both exponentials
/// expanded exactly. The result lives over the outer registry `(θ, θ̄)`.
pub fn heisenberg_conjugate(g: &PolyC, n: usize) -> Result<OpExprQ, HeisenbergError> {
    let outer = theta_registry(1);
    let ctx = OpContext::new(n, &outer);
    let zero_h = <PolyC as num_traits::Zero>::zero();
    let ch = charges(&ctx, &zero_h)?;
    let theta = ctx.outer_gen::<ExactComplex>(0);
    let theta_bar = ctx.outer_gen::<ExactComplex>(1);
    let generator = theta.multiply(&ch.q_brs)?.try_add(&ch.q_brs_bar.multiply(&theta_bar)?)?;
    let s = generator.exp_nilpotent()?;
    let s_inv = (-&generator).exp_nilpotent()?;
    let g_op = ctx.poly(g)?;
    Ok(s.multiply(&g_op)?.multiply(&s_inv)?)
}

/// Splits an operator over `(θ, θ̄)` into `(base, theta, theta_bar, top)`
/// with `X = base + θ·theta + theta_bar·θ̄ − iθ̄θ·top`.
pub fn operator_expansion(x: &OpExprQ) -> SuperExpansion<OpExprQ> {
    let base = x.outer_component(0);
    let theta = x.outer_component(0b01);
    // θ̄ X = α(X) θ̄ with α the grade involution
    let tb = x.outer_component(0b10);
    let theta_bar = grade_involution(&tb);
    // θθ̄ D = −θ̄θ D, so top = −i D
    let top = x.outer_component(0b11).scale(&(-ExactComplex::i()));
    SuperExpansion {
        base,
        theta,
        theta_bar,
        top,
    }
}

fn grade_involution<C: ComplexScalar>(x: &OpExpr<C>) -> OpExpr<C> {
    let mut out = OpExpr::zero(x.n(), x.outer());
    for (m, w, c) in x.terms() {
        let odd = (w.iter().filter(|s| s.is_odd()).count() as u32 + m.count_ones()) % 2 == 1;
        let v = if odd { -c.clone() } else { c.clone() };
        out = out
            .try_add(&OpExpr::from_word(x.n(), x.outer(), v, m, w))
            .expect("same algebra");
    }
    out
}

/// Operator image of a c-number superspace element over the outer
/// registry `outer` (which must start with `θ, θ̄`): each monomial is
/// written with `θ`s first, then multipliers, coordinates, anti-ghosts and
/// ghosts, and that word is read as an operator product.
pub fn quantize(space: &Superspace, x: &SuperPoly, outer: &Arc<GeneratorRegistry>) -> Result<OpExprQ, HeisenbergError> {
    let n = space.n();
    let dim = 2 * n;
    let ctx = OpContext::new(n, outer);
    let mut out = ctx.zero::<ExactComplex>();
    for (m, coeff) in x.terms() {
        let mut outer_mask = 0u64;
        let mut ghosts = Vec::new();
        let mut anti = Vec::new();
        for g in bits(m) {
            match g {
                0 | 1 => outer_mask |= 1 << g,
                _ if g < 2 + dim => ghosts.push(OpSym::C((g - 2) as u16)),
                _ if g < 2 + 2 * dim => anti.push(OpSym::CBar((g - 2 - dim) as u16)),
                _ => return Err(HeisenbergError::UnsupportedGenerator(space.registry().name(g).to_string())),
            }
        }
        // canonical order is θs, ghosts, anti-ghosts; moving anti-ghosts
        // ahead of ghosts costs (−1)^{|c||c̄|}
        let sign = if (ghosts.len() * anti.len()) % 2 == 1 { -ExactComplex::from_i64(1) } else { ExactComplex::from_i64(1) };
        let mut word = anti;
        word.extend(ghosts);
        let odd_part = OpExpr::from_word(n, outer, sign, outer_mask, &[]);
        let mut odd_word = ctx.scalar(ExactComplex::from_i64(1));
        for s in word {
            odd_word = odd_word.multiply(&ctx.sym(s))?;
        }
        out = out.try_add(&odd_part.multiply(&ctx.poly(coeff)?)?.multiply(&odd_word)?)?;
    }
    Ok(out)
}
