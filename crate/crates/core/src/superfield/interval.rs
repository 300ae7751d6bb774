use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::grassmann::{Conjugation, GeneratorRegistry, GrassmannElement, GrassmannError, SuperMatrix};
use crate::scalar::Ring;
use crate::symexpr::{PolyExpr, Var};
use crate::{ExactComplex, GrassmannQ, PolyC, SuperPoly};

/// A point `(t, θ, θ̄)` of supertime. Components are elements of the
/// interval registry; `t` is even, `θ, θ̄` odd.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperInstant {
    pub t: SuperPoly,
    pub theta: SuperPoly,
    pub theta_bar: SuperPoly,
}

/// Registry `θ₁, θ̄₁, θ₂, θ̄₂, ε, ε̄` (all imaginary) with time labels
/// `t1`, `t2` as even coefficients, and the constant `β`.
#[derive(Clone, Debug)]
pub struct IntervalSpace {
    registry: Arc<GeneratorRegistry>,
    pub beta: BigRational,
}

impl IntervalSpace {
    pub fn new(beta: BigRational) -> Self {
        let names = ["θ1", "θ̄1", "θ2", "θ̄2", "ε", "ε̄"];
        let registry =
            GeneratorRegistry::new(names.iter().map(|n| (*n, Conjugation::Imaginary))).expect("distinct names");
        IntervalSpace { registry, beta }
    }

    pub fn registry(&self) -> &Arc<GeneratorRegistry> {
        &self.registry
    }

    fn gen(&self, name: &str) -> SuperPoly {
        GrassmannElement::named(&self.registry, name).expect("registered")
    }

    fn constant(&self, c: ExactComplex) -> PolyC {
        PolyExpr::constant(c)
    }

    fn beta_poly(&self) -> PolyC {
        self.constant(ExactComplex::new(self.beta.clone(), num_traits::Zero::zero()))
    }

    pub fn zero(&self) -> SuperPoly {
        GrassmannElement::zero(&self.registry)
    }

    pub fn eps(&self) -> SuperPoly {
        self.gen("ε")
    }

    pub fn eps_bar(&self) -> SuperPoly {
        self.gen("ε̄")
    }

    /// `(t_k, θ_k, θ̄_k)` for `k ∈ {1, 2}`.
    pub fn instant(&self, k: usize) -> SuperInstant {
        SuperInstant {
            t: GrassmannElement::scalar(&self.registry, PolyExpr::var(Var::T(k as u16))),
            theta: self.gen(&format!("θ{k}")),
            theta_bar: self.gen(&format!("θ̄{k}")),
        }
    }

    /// `δt = β(−εθ̄ + ε̄θ)`, `δθ = −ε`, `δθ̄ = ε̄` (finite form; the
    /// transformation is exact at first order and closes on itself).
    pub fn susy_transform(&self, pt: &SuperInstant, eps: &SuperPoly, eps_bar: &SuperPoly) -> SuperInstant {
        let shift = (-(eps * &pt.theta_bar) + eps_bar * &pt.theta).scale(&self.beta_poly());
        SuperInstant {
            t: &pt.t + &shift,
            theta: &pt.theta - eps,
            theta_bar: &pt.theta_bar + eps_bar,
        }
    }

    /// `t_L = t + β θ̄θ`
    pub fn left_time(&self, pt: &SuperInstant) -> SuperPoly {
        &pt.t + &(&pt.theta_bar * &pt.theta).scale(&self.beta_poly())
    }

    /// `t_R = t − β θ̄θ`
    pub fn right_time(&self, pt: &SuperInstant) -> SuperPoly {
        &pt.t - &(&pt.theta_bar * &pt.theta).scale(&self.beta_poly())
    }

    /// `S = t₂ − t₁ + β(θ₂θ̄₁ − θ₁θ̄₂)`
    pub fn interval(&self, p1: &SuperInstant, p2: &SuperInstant) -> SuperPoly {
        let mix = &(&p2.theta * &p1.theta_bar) - &(&p1.theta * &p2.theta_bar);
        &(&p2.t - &p1.t) + &mix.scale(&self.beta_poly())
    }

    /// `S_L = t₂_L − t₁_R − 2β θ̄₁θ₂`
    pub fn interval_left(&self, p1: &SuperInstant, p2: &SuperInstant) -> SuperPoly {
        let two_beta = &self.beta_poly() * &self.constant(ExactComplex::from_i64(2));
        &(&self.left_time(p2) - &self.right_time(p1)) - &(&p1.theta_bar * &p2.theta).scale(&two_beta)
    }

    /// `S_R = t₂_R − t₁_L + 2β θ̄₂θ₁`
    pub fn interval_right(&self, p1: &SuperInstant, p2: &SuperInstant) -> SuperPoly {
        let two_beta = &self.beta_poly() * &self.constant(ExactComplex::from_i64(2));
        &(&self.right_time(p2) - &self.left_time(p1)) + &(&p2.theta_bar * &p1.theta).scale(&two_beta)
    }

    /// `β Δ̄Δ` with `Δ = θ₂ − θ₁`, `Δ̄ = θ̄₂ − θ̄₁`.
    pub fn delta_product(&self, p1: &SuperInstant, p2: &SuperInstant) -> SuperPoly {
        let d = &p2.theta - &p1.theta;
        let db = &p2.theta_bar - &p1.theta_bar;
        (&db * &d).scale(&self.beta_poly())
    }

    /// Residuals of every statement about the three intervals.
    pub fn check_invariance(&self) -> SusyInvariance {
        let (p1, p2) = (self.instant(1), self.instant(2));
        let (e, eb) = (self.eps(), self.eps_bar());
        let (q1, q2) = (self.susy_transform(&p1, &e, &eb), self.susy_transform(&p2, &e, &eb));
        let s = self.interval(&p1, &p2);
        let sl = self.interval_left(&p1, &p2);
        let sr = self.interval_right(&p1, &p2);
        let dd = self.delta_product(&p1, &p2);
        let collapse = |x: &SuperPoly| {
            // θ₂ = θ₁, θ̄₂ = θ̄₁
            let reg = &self.registry;
            let images: Vec<SuperPoly> = (0..reg.len())
                .map(|g| match g {
                    2 => GrassmannElement::generator(reg, 0).expect("θ1"),
                    3 => GrassmannElement::generator(reg, 1).expect("θ̄1"),
                    _ => GrassmannElement::generator(reg, g).expect("in range"),
                })
                .collect();
            x.substitute_generators(reg, &images).expect("same registry")
        };
        let plain = GrassmannElement::scalar(
            &self.registry,
            &PolyExpr::var(Var::T(2)) - &PolyExpr::var(Var::T(1)),
        );
        // composing (ε, 0) then (0, ε̄) against the opposite order
        let zero = self.zero();
        let ab = self.susy_transform(&self.susy_transform(&p1, &e, &zero), &zero, &eb);
        let ba = self.susy_transform(&self.susy_transform(&p1, &zero, &eb), &e, &zero);
        SusyInvariance {
            s: &self.interval(&q1, &q2) - &s,
            s_left: &self.interval_left(&q1, &q2) - &sl,
            s_right: &self.interval_right(&q1, &q2) - &sr,
            right_relation: &sr - &(&s - &dd),
            left_relation: &sl - &(&s + &dd),
            conjugate_times: &self.left_time(&p1).conjugate() - &self.right_time(&p1),
            collapsed: [&collapse(&s) - &plain, &collapse(&sl) - &plain, &collapse(&sr) - &plain],
            commutator: SuperInstant {
                t: &ab.t - &ba.t,
                theta: &ab.theta - &ba.theta,
                theta_bar: &ab.theta_bar - &ba.theta_bar,
            },
        }
    }
}

/// Residuals from [`IntervalSpace::check_invariance`]; every field except
/// `commutator.t` must vanish. `commutator.t` is the pure time shift
/// `2β εε̄` produced by two successive transformations.
#[derive(Clone, Debug)]
pub struct SusyInvariance {
    pub s: SuperPoly,
    pub s_left: SuperPoly,
    pub s_right: SuperPoly,
    pub right_relation: SuperPoly,
    pub left_relation: SuperPoly,
    pub conjugate_times: SuperPoly,
    pub collapsed: [SuperPoly; 3],
    pub commutator: SuperInstant,
}

impl SusyInvariance {
    pub fn all_vanish(&self) -> bool {
        [
            &self.s,
            &self.s_left,
            &self.s_right,
            &self.right_relation,
            &self.left_relation,
            &self.conjugate_times,
        ]
        .iter()
        .all(|x| x.is_zero())
            && self.collapsed.iter().all(|x| x.is_zero())
            && self.commutator.theta.is_zero()
            && self.commutator.theta_bar.is_zero()
    }
}

/// Jacobian of `(t, θ, θ̄) ↦ (t′, θ′, θ̄′)` in the layout
/// `[[1, −βε, βε̄], [0, 1, 0], [0, 0, 1]]` over the registry `ε, ε̄`.
pub fn susy_jacobian(beta: &BigRational) -> Result<SuperMatrix<ExactComplex>, GrassmannError> {
    let reg = GeneratorRegistry::new([("ε", Conjugation::Imaginary), ("ε̄", Conjugation::Imaginary)])?;
    let b = ExactComplex::new(beta.clone(), num_traits::Zero::zero());
    let eps = GrassmannQ::named(&reg, "ε")?.scale(&b);
    let epsb = GrassmannQ::named(&reg, "ε̄")?.scale(&b);
    let one = GrassmannQ::scalar(&reg, ExactComplex::one());
    let zero = GrassmannQ::zero(&reg);
    SuperMatrix::new(
        &reg,
        1,
        2,
        vec![
            one.clone(),
            -eps,
            epsb,
            zero.clone(),
            one.clone(),
            zero.clone(),
            zero.clone(),
            zero,
            one,
        ],
    )
}
