use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::charges::OpContext;
use super::expr::{OpAlgebraError, OpExpr, OpSym};
use crate::grassmann::GeneratorRegistry;
use crate::scalar::{ComplexScalar, Ring};
use crate::symexpr::{hessian, PolyExpr, SymplecticForm};
use crate::ExactComplex;

/// Orderings of `λ̂` inside the Liouvillian of `H = q^n p^m`:
///
/// `L̂ = m Σ_j α_j q^{j-1} λ_q q^{n-j+1} p^{m-1}
///      - n Σ_j β_j p^{j-1} λ_p p^{m-j+1} q^{n-1}`
///
/// with `α` of length `n+1`, `β` of length `m+1`, each summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvillianSpec {
    pub n: u32,
    pub m: u32,
    pub alpha: Vec<BigRational>,
    pub beta: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderingError {
    #[error("weights must have lengths n+1 and m+1")]
    WeightLength,
    #[error("weights must each sum to one")]
    Normalisation,
    #[error(transparent)]
    Algebra(#[from] OpAlgebraError),
}

impl LiouvillianSpec {
    pub fn new(n: u32, m: u32, alpha: Vec<BigRational>, beta: Vec<BigRational>) -> Result<Self, OrderingError> {
        if alpha.len() != n as usize + 1 || beta.len() != m as usize + 1 {
            return Err(OrderingError::WeightLength);
        }
        let one = BigRational::one();
        let sa: BigRational = alpha.iter().cloned().sum();
        let sb: BigRational = beta.iter().cloned().sum();
        if sa != one || sb != one {
            return Err(OrderingError::Normalisation);
        }
        Ok(LiouvillianSpec { n, m, alpha, beta })
    }

    /// Every `λ` to the left: `α_j = β_j = δ_{j1}`.
    pub fn prepoint(n: u32, m: u32) -> Self {
        let unit = |len: u32| {
            (0..=len)
                .map(|j| if j == 0 { BigRational::one() } else { BigRational::zero() })
                .collect()
        };
        LiouvillianSpec {
            n,
            m,
            alpha: unit(n),
            beta: unit(m),
        }
    }

    /// `m Σ α_j (n - 2(j-1)) = n Σ β_j (m - 2(j-1))`.
    pub fn hermiticity_condition(&self) -> bool {
        let (n, m) = (self.n as i64, self.m as i64);
        let lhs: BigRational = self
            .alpha
            .iter()
            .enumerate()
            .map(|(j, a)| a * BigRational::from_i64(m * (n - 2 * j as i64)))
            .sum();
        let rhs: BigRational = self
            .beta
            .iter()
            .enumerate()
            .map(|(j, b)| b * BigRational::from_i64(n * (m - 2 * j as i64)))
            .sum();
        lhs == rhs
    }

    /// Random normalised weights; `hermitian` selects whether the
    /// Hermiticity condition holds.
    pub fn random<G: Rng + ?Sized>(rng: &mut G, n: u32, m: u32, hermitian: bool) -> Self {
        let rand_q = |rng: &mut G| BigRational::from_ratio(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=6));
        let mut alpha: Vec<BigRational> = (0..=n).map(|_| rand_q(rng)).collect();
        let sa: BigRational = alpha[1..].iter().cloned().sum();
        alpha[0] = BigRational::one() - sa;
        // Σ α_j (j-1) fixes the required Σ β_j (j-1)
        let first_moment = |w: &[BigRational]| -> BigRational {
            w.iter().enumerate().map(|(j, x)| x * BigRational::from_i64(j as i64)).sum()
        };
        let target = first_moment(&alpha) * BigRational::from_i64(m as i64) / BigRational::from_i64(n.max(1) as i64);
        let mut beta: Vec<BigRational> = (0..=m).map(|_| rand_q(rng)).collect();
        if m >= 1 {
            // solve β_2 from the moment, β_1 from normalisation
            let rest: BigRational = beta[2..]
                .iter()
                .enumerate()
                .map(|(k, x)| x * BigRational::from_i64(k as i64 + 2))
                .sum();
            beta[1] = &target - rest;
            let others: BigRational = beta[1..].iter().cloned().sum();
            beta[0] = BigRational::one() - others;
            if !hermitian {
                let mut shift = BigRational::from_ratio(rng.gen_range(1i64..=9), rng.gen_range(1i64..=4));
                if rng.gen_bool(0.5) {
                    shift = -shift;
                }
                beta[1] = &beta[1] + &shift;
                beta[0] = &beta[0] - &shift;
            }
        } else {
            beta[0] = BigRational::one();
        }
        LiouvillianSpec { n, m, alpha, beta }
    }
}

fn cq(r: &BigRational) -> ExactComplex {
    ExactComplex::new(r.clone(), BigRational::zero())
}

/// `L̂` as written by the weights (before reordering; stored normal-ordered).
pub fn liouvillian_operator(spec: &LiouvillianSpec) -> Result<OpExpr<ExactComplex>, OrderingError> {
    let outer = GeneratorRegistry::real(Vec::<String>::new()).expect("empty registry");
    let (q, p, lq, lp) = (OpSym::Phi(0), OpSym::Phi(1), OpSym::Lambda(0), OpSym::Lambda(1));
    let (n, m) = (spec.n as usize, spec.m as usize);
    let mut out = OpExpr::zero(1, &outer);
    if m > 0 {
        for (j, a) in spec.alpha.iter().enumerate() {
            let mut word = vec![q; j];
            word.push(lq);
            word.extend(std::iter::repeat(q).take(n - j));
            word.extend(std::iter::repeat(p).take(m - 1));
            let c = cq(a) * ExactComplex::from_i64(m as i64);
            out = out.try_add(&OpExpr::from_word(1, &outer, c, 0, &word))?;
        }
    }
    if n > 0 {
        for (j, b) in spec.beta.iter().enumerate() {
            let mut word = vec![p; j];
            word.push(lp);
            word.extend(std::iter::repeat(p).take(m - j));
            word.extend(std::iter::repeat(q).take(n - 1));
            let c = -(cq(b) * ExactComplex::from_i64(n as i64));
            out = out.try_add(&OpExpr::from_word(1, &outer, c, 0, &word))?;
        }
    }
    Ok(out)
}

/// Pre-point Liouvillian `λ̂_a ω^{ab} ∂_b Ĥ` with every `λ̂` on the left.
pub fn prepoint_liouvillian<C: ComplexScalar>(ctx: &OpContext, h: &PolyExpr<C>) -> Result<OpExpr<C>, OpAlgebraError> {
    let w = ctx.omega();
    let mut out = ctx.zero();
    for a in 0..2 * ctx.n {
        let b = w.partner(a);
        let g = h.diff(crate::symexpr::Var::phi(b, ctx.n));
        out = out.try_add(
            &ctx.lambda(a)
                .multiply(&ctx.poly(&g)?)?
                .scale(&C::from_i64(w.upper(a, b))),
        )?;
    }
    Ok(out)
}

/// Outcome of [`liouvillian_ordering`].
#[derive(Clone, Debug)]
pub struct OrderingReport {
    pub normal_form: OpExpr<ExactComplex>,
    pub prepoint: OpExpr<ExactComplex>,
    pub equals_prepoint: bool,
    pub hermitian_by_condition: bool,
    pub hermitian_by_dagger: bool,
}

pub fn liouvillian_ordering(spec: &LiouvillianSpec) -> Result<OrderingReport, OrderingError> {
    let op = liouvillian_operator(spec)?;
    let outer = op.outer().clone();
    let ctx = OpContext::new(1, &outer);
    let h = PolyExpr::term(
        crate::symexpr::Monomial::from_powers([
            (crate::symexpr::Var::q(1), spec.n),
            (crate::symexpr::Var::p(1), spec.m),
        ]),
        ExactComplex::one(),
    );
    let prepoint = prepoint_liouvillian(&ctx, &h)?;
    Ok(OrderingReport {
        equals_prepoint: op == prepoint,
        hermitian_by_condition: spec.hermiticity_condition(),
        hermitian_by_dagger: op.dagger() == op,
        normal_form: op,
        prepoint,
    })
}

/// `H̃_G1 - H̃_G2` with `H̃_G1 = i c̄̂_a ω^{ab}∂_b∂_dH ĉ^d` and
/// `H̃_G2 = -i ĉ^d ω^{ab}∂_b∂_dH c̄̂_a`.
pub fn grassmann_ordering_difference<C: ComplexScalar>(h: &PolyExpr<C>, n: usize) -> Result<OpExpr<C>, OpAlgebraError> {
    let outer = GeneratorRegistry::real(Vec::<String>::new()).expect("empty registry");
    let ctx = OpContext::new(n, &outer);
    let w = SymplecticForm::new(n);
    let hess = hessian(h, n);
    let mut g1 = ctx.zero();
    let mut g2 = ctx.zero();
    for a in 0..2 * n {
        let b = w.partner(a);
        let wab = C::from_i64(w.upper(a, b)) * C::i();
        for d in 0..2 * n {
            let hd = ctx.poly(&hess[b][d])?;
            g1 = g1.try_add(&ctx.cbar(a).multiply(&hd)?.multiply(&ctx.c(d))?.scale(&wab))?;
            g2 = g2.try_sub(&ctx.c(d).multiply(&hd)?.multiply(&ctx.cbar(a))?.scale(&wab))?;
        }
    }
    g1.try_sub(&g2)
}

/// Quantum contrast: with `q̂ = φ̂`, `p̂ = λ̂` (`[q̂, p̂] = i`),
/// `(p²q² + q²p² + qp²q) - (pqpq + qpqp + pq²p)`, which equals `-ℏ²`.
pub fn quantum_ordering_contrast() -> OpExpr<ExactComplex> {
    let outer = GeneratorRegistry::real(Vec::<String>::new()).expect("empty registry");
    let (q, p) = (OpSym::Phi(0), OpSym::Lambda(0));
    let w = |word: &[OpSym]| OpExpr::from_word(1, &outer, ExactComplex::one(), 0, word);
    let lhs = w(&[p, p, q, q]) + w(&[q, q, p, p]) + w(&[q, p, p, q]);
    let rhs = w(&[p, q, p, q]) + w(&[q, p, q, p]) + w(&[p, q, q, p]);
    lhs - rhs
}
