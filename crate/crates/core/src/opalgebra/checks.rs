use std::sync::Arc;

use super::charges::{charges, component_velocities, ComponentVelocities, OpContext};
use super::expr::{OpAlgebraError, OpExpr};
use crate::grassmann::{Conjugation, GeneratorRegistry, GrassmannElement};
use crate::scalar::ComplexScalar;
use crate::symexpr::PolyExpr;

/// Outer registry holding one or two copies of `(θ, θ̄)`.
pub fn theta_registry(copies: usize) -> Arc<GeneratorRegistry> {
    let names: Vec<(String, Conjugation)> = (0..copies)
        .flat_map(|k| {
            let prime = "'".repeat(k);
            [
                (format!("θ{prime}"), Conjugation::Imaginary),
                (format!("θ̄{prime}"), Conjugation::Imaginary),
            ]
        })
        .collect();
    GeneratorRegistry::new(names).expect("distinct names")
}

/// Superfield `Φ^a = A + θ B + θ̄ ω^{ab} C_b + i θ̄θ ω^{ab} D_b` assembled
/// from operator components.
pub fn assemble_superfield<C: ComplexScalar>(
    ctx: &OpContext,
    a: usize,
    theta: usize,
    theta_bar: usize,
    base: &OpExpr<C>,
    ghost: &OpExpr<C>,
    anti_ghost: &[OpExpr<C>],
    multiplier: &[OpExpr<C>],
) -> Result<OpExpr<C>, OpAlgebraError> {
    let w = ctx.omega();
    let b = w.partner(a);
    let wab = C::from_i64(w.upper(a, b));
    let th = ctx.outer_gen::<C>(theta);
    let tb = ctx.outer_gen::<C>(theta_bar);
    let tbt = tb.multiply(&th)?;
    let mut out = base.clone();
    out = out.try_add(&th.multiply(ghost)?)?;
    out = out.try_add(&tb.multiply(&anti_ghost[b])?.scale(&wab))?;
    out = out.try_add(&tbt.multiply(&multiplier[b])?.scale(&(wab * C::i())))?;
    Ok(out)
}

/// Operator superfield `Φ̂^a(θ, θ̄)` for the outer generators at the given
/// indices.
pub fn operator_superfield<C: ComplexScalar>(
    ctx: &OpContext,
    a: usize,
    theta: usize,
    theta_bar: usize,
) -> Result<OpExpr<C>, OpAlgebraError> {
    let dim = 2 * ctx.n;
    let cbar: Vec<OpExpr<C>> = (0..dim).map(|b| ctx.cbar(b)).collect();
    let lam: Vec<OpExpr<C>> = (0..dim).map(|b| ctx.lambda(b)).collect();
    assemble_superfield(ctx, a, theta, theta_bar, &ctx.phi(a), &ctx.c(a), &cbar, &lam)
}

/// `∂_t Φ̂^a` from the component velocities.
pub fn operator_superfield_velocity<C: ComplexScalar>(
    ctx: &OpContext,
    v: &ComponentVelocities<C>,
    a: usize,
    theta: usize,
    theta_bar: usize,
) -> Result<OpExpr<C>, OpAlgebraError> {
    assemble_superfield(ctx, a, theta, theta_bar, &v.phi[a], &v.c[a], &v.cbar, &v.lambda)
}

/// Named residual of an operator identity.
#[derive(Clone, Debug)]
pub struct Residual<C: ComplexScalar> {
    pub name: String,
    pub value: OpExpr<C>,
}

impl<C: ComplexScalar> Residual<C> {
    pub fn vanishes(&self) -> bool {
        self.value.is_zero()
    }
}

/// Residuals of the charge algebra: `[Q_H, Q̄_H} - 2iH̃`, nilpotency of the
/// BRS charges and conservation of every charge.
pub fn susy_check<C: ComplexScalar>(h: &PolyExpr<C>, n: usize) -> Result<Vec<Residual<C>>, OpAlgebraError> {
    let outer = GeneratorRegistry::real(Vec::<String>::new()).expect("empty registry");
    let ctx = OpContext::new(n, &outer);
    let ch = charges(&ctx, h)?;
    let two_i = C::i() * C::from_i64(2);
    let mut out = vec![
        Residual {
            name: "[Q_H, Qbar_H} - 2i H_tilde".into(),
            value: ch.q_h.graded_commutator(&ch.q_h_bar)?.try_sub(&ch.h_tilde.scale(&two_i))?,
        },
        Residual {
            name: "Q_BRS^2".into(),
            value: ch.q_brs.multiply(&ch.q_brs)?,
        },
        Residual {
            name: "Qbar_BRS^2".into(),
            value: ch.q_brs_bar.multiply(&ch.q_brs_bar)?,
        },
        Residual {
            name: "[Q_BRS, Qbar_BRS}".into(),
            value: ch.q_brs.graded_commutator(&ch.q_brs_bar)?,
        },
        Residual {
            name: "Q_H^2".into(),
            value: ch.q_h.multiply(&ch.q_h)?,
        },
        Residual {
            name: "Qbar_H^2".into(),
            value: ch.q_h_bar.multiply(&ch.q_h_bar)?,
        },
    ];
    for (name, q) in ch.named() {
        if name == "H_tilde" {
            continue;
        }
        out.push(Residual {
            name: format!("[{name}, H_tilde]"),
            value: q.graded_commutator(&ch.h_tilde)?,
        });
    }
    Ok(out)
}

/// Compares the base-space realisation of each charge with its action on
/// the operator superfield: `𝒪 Φ^a = [Φ̂^a, Ô]` for
/// `Q_BRS = -∂_θ`, `Q̄_BRS = ∂_θ̄`, `Q_H = -∂_θ - θ̄∂_t`,
/// `Q̄_H = ∂_θ̄ + θ∂_t`, `H̃ = i∂_t`. Also returns
/// `[𝒬_H, 𝒬̄_H]₊ + 2∂_t` applied to every `Φ^a`.
pub fn base_space_check<C: ComplexScalar>(h: &PolyExpr<C>, n: usize) -> Result<Vec<Residual<C>>, OpAlgebraError> {
    let outer = theta_registry(1);
    let (th_i, tb_i) = (0, 1);
    let ctx = OpContext::new(n, &outer);
    let ch = charges(&ctx, h)?;
    let vel = component_velocities(&ctx, h)?;
    let th = ctx.outer_gen::<C>(th_i);
    let tb = ctx.outer_gen::<C>(tb_i);
    let mut out = Vec::new();
    for a in 0..2 * n {
        let phi = operator_superfield(&ctx, a, th_i, tb_i)?;
        let dt = operator_superfield_velocity(&ctx, &vel, a, th_i, tb_i)?;
        let d_th = phi.outer_derivative(th_i);
        let d_tb = phi.outer_derivative(tb_i);
        let actions: Vec<(&str, OpExpr<C>, &OpExpr<C>)> = vec![
            ("Q_BRS", -&d_th, &ch.q_brs),
            ("Qbar_BRS", d_tb.clone(), &ch.q_brs_bar),
            ("Q_H", (-&d_th).try_sub(&tb.multiply(&dt)?)?, &ch.q_h),
            ("Qbar_H", d_tb.try_add(&th.multiply(&dt)?)?, &ch.q_h_bar),
            ("H_tilde", dt.scale(&C::i()), &ch.h_tilde),
        ];
        for (name, base_side, op) in actions {
            let op_side = phi.graded_commutator(op)?;
            out.push(Residual {
                name: format!("{name} on Phi^{a}"),
                value: base_side.try_sub(&op_side)?,
            });
        }
        // [𝒬_H, 𝒬̄_H]₊ on the jet (Φ, ∂_tΦ, ∂_t²Φ). The second-derivative
        // slot holds an unrelated superfield: the identity is linear in the
        // jet, so that slot must drop out.
        let filler = operator_superfield(&ctx, (a + 1) % (2 * n), th_i, tb_i)?;
        let jet = [phi.clone(), dt.clone(), filler];
        let q_jet = |j: &[OpExpr<C>; 3]| -> Result<[OpExpr<C>; 3], OpAlgebraError> {
            let mut r = [ctx.zero(), ctx.zero(), ctx.zero()];
            for k in 0..3 {
                let shifted = if k < 2 { j[k + 1].clone() } else { ctx.zero() };
                r[k] = (-&j[k].outer_derivative(th_i)).try_sub(&tb.multiply(&shifted)?)?;
            }
            Ok(r)
        };
        let qbar_jet = |j: &[OpExpr<C>; 3]| -> Result<[OpExpr<C>; 3], OpAlgebraError> {
            let mut r = [ctx.zero(), ctx.zero(), ctx.zero()];
            for k in 0..3 {
                let shifted = if k < 2 { j[k + 1].clone() } else { ctx.zero() };
                r[k] = j[k].outer_derivative(tb_i).try_add(&th.multiply(&shifted)?)?;
            }
            Ok(r)
        };
        let anti = q_jet(&qbar_jet(&jet)?)?[0].try_add(&qbar_jet(&q_jet(&jet)?)?[0])?;
        out.push(Residual {
            name: format!("[Q_H, Qbar_H}}_base + 2 d_t on Phi^{a}"),
            value: anti.try_add(&dt.scale(&C::from_i64(2)))?,
        });
    }
    Ok(out)
}

/// Outer element `δ(θ̄ - θ̄') δ(θ - θ') = (θ̄ - θ̄')(θ - θ')`.
pub fn grassmann_delta_pair<C: ComplexScalar>(outer: &Arc<GeneratorRegistry>) -> GrassmannElement<C> {
    let g = |i: usize| GrassmannElement::<C>::generator(outer, i).expect("generator");
    let (th, tb, th2, tb2) = (g(0), g(1), g(2), g(3));
    (tb - tb2) * (th - th2)
}

/// Result of the equal-time superfield commutator computation.
#[derive(Clone, Debug)]
pub struct SuperfieldCommutator<C: ComplexScalar> {
    /// `[Φ̂^a(θ,θ̄), Φ̂^b(θ',θ̄')] - ω^{ab} δ(θ̄-θ̄')δ(θ-θ')` for all `a, b`.
    pub residuals: Vec<Residual<C>>,
    /// Component commutators read off from the coefficients of
    /// `[Q̂(θ,θ̄), P̂(θ',θ̄')]` for the first degree of freedom:
    /// `[q, λ_q]`, `[c^q, c̄_q]₊`, `[c̄_p, c^p]₊`, `[λ_p, p]`.
    pub extracted: [OpExpr<C>; 4],
    /// The same four commutators computed directly from the components.
    pub direct: [OpExpr<C>; 4],
}

/// Coefficient multiplying the ordered product of outer generators.
pub fn coefficient_of_product<C: ComplexScalar>(x: &OpExpr<C>, gens: &[usize]) -> OpExpr<C> {
    let prod = GrassmannElement::<C>::product_of(x.outer(), gens).expect("generators");
    let (mask, sign) = prod.terms().next().map(|(m, c)| (m, c.clone())).expect("non-zero product");
    // x = ... + k · mask, and mask = sign⁻¹ · product
    x.outer_component(mask).scale(&sign)
}

pub fn superfield_commutator<C: ComplexScalar>(n: usize) -> Result<SuperfieldCommutator<C>, OpAlgebraError> {
    let outer = theta_registry(2);
    let (th, tb, th2, tb2) = (0, 1, 2, 3);
    let ctx = OpContext::new(n, &outer);
    let delta = OpExpr::from_outer(n, &grassmann_delta_pair::<C>(&outer));
    let w = ctx.omega();
    let mut residuals = Vec::new();
    for a in 0..2 * n {
        let fa = operator_superfield::<C>(&ctx, a, th, tb)?;
        for b in 0..2 * n {
            let fb = operator_superfield::<C>(&ctx, b, th2, tb2)?;
            let comm = fa.graded_commutator(&fb)?;
            let expected = delta.scale(&C::from_i64(w.upper(a, b)));
            residuals.push(Residual {
                name: format!("[Phi^{a}(θ), Phi^{b}(θ')]"),
                value: comm.try_sub(&expected)?,
            });
        }
    }
    let q = operator_superfield::<C>(&ctx, 0, th, tb)?;
    let p = operator_superfield::<C>(&ctx, n, th2, tb2)?;
    let comm = q.graded_commutator(&p)?;
    let i = C::i();
    let extracted = [
        // -i θ̄'θ' [q, λ_q]
        coefficient_of_product(&comm, &[tb2, th2]).scale(&i),
        // θ θ̄' [c^q, c̄_q]₊
        coefficient_of_product(&comm, &[th, tb2]),
        // -θ̄θ' [c̄_p, c^p]₊
        coefficient_of_product(&comm, &[tb, th2]).scale(&-C::one()),
        // i θ̄θ [λ_p, p]
        coefficient_of_product(&comm, &[tb, th]).scale(&-i),
    ];
    let direct = [
        ctx.phi::<C>(0).graded_commutator(&ctx.lambda(0))?,
        ctx.c::<C>(0).graded_commutator(&ctx.cbar(0))?,
        ctx.cbar::<C>(n).graded_commutator(&ctx.c(n))?,
        ctx.lambda::<C>(n).graded_commutator(&ctx.phi(n))?,
    ];
    Ok(SuperfieldCommutator {
        residuals,
        extracted,
        direct,
    })
}
