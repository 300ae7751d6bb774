//! Graded operator algebra of `φ̂, λ̂, ĉ, c̄̂` with
//! `[φ̂^a, λ̂_b] = iδ^a_b` and `[ĉ^a, c̄̂_b]₊ = δ^a_b`.
//!
//! Expressions are kept in normal order (`λ̂` left of `φ̂`, `ĉ` left of
//! `c̄̂`), so equality of expressions is equality of operators.

mod charges;
mod checks;
mod expr;
mod ordering;

pub use charges::{charges, component_velocities, h_tilde_operator, ChargeSet, ComponentVelocities, OpContext};
pub use checks::{
    assemble_superfield, base_space_check, coefficient_of_product, grassmann_delta_pair, operator_superfield,
    operator_superfield_velocity, superfield_commutator, susy_check, theta_registry, Residual, SuperfieldCommutator,
};
pub use expr::{normal_order_word, OpAlgebraError, OpExpr, OpSym, Word};
pub use ordering::{
    grassmann_ordering_difference, liouvillian_operator, liouvillian_ordering, prepoint_liouvillian,
    quantum_ordering_contrast, LiouvillianSpec, OrderingError, OrderingReport,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GeneratorRegistry;
    use crate::symexpr::{complexify, parse_polynomial};
    use crate::{ExactComplex, OpExprQ};
    use num_traits::One;

    fn ctx(n: usize) -> OpContext {
        OpContext::new(n, &GeneratorRegistry::real(Vec::<String>::new()).unwrap())
    }

    #[test]
    fn canonical_relations() {
        let c = ctx(1);
        let i = <ExactComplex as crate::scalar::ComplexScalar>::i();
        let comm = c.phi::<ExactComplex>(0).graded_commutator(&c.lambda(0)).unwrap();
        assert_eq!(comm, c.scalar(i));
        let anti = c.c::<ExactComplex>(1).graded_commutator(&c.cbar(1)).unwrap();
        assert_eq!(anti, c.scalar(ExactComplex::one()));
        let cc = c.c::<ExactComplex>(0).multiply(&c.c(0)).unwrap();
        assert!(cc.is_zero());
        assert!(c.c::<ExactComplex>(0).graded_commutator(&c.cbar(1)).unwrap().is_zero());
    }

    #[test]
    fn normal_order_moves_lambda_left() {
        let c = ctx(1);
        let x: OpExprQ = c.phi(0).multiply(&c.lambda(0)).unwrap();
        let expected = c.lambda::<ExactComplex>(0).multiply(&c.phi(0)).unwrap()
            + c.scalar(<ExactComplex as crate::scalar::ComplexScalar>::i());
        assert_eq!(x, expected);
    }

    #[test]
    fn oscillator_susy() {
        let h = complexify(&parse_polynomial("p1^2/2 + q1^2/2").unwrap());
        for r in susy_check(&h, 1).unwrap() {
            assert!(r.vanishes(), "{}: {:?}", r.name, r.value);
        }
    }

    #[test]
    fn quantum_contrast_is_minus_hbar_squared() {
        let x = quantum_ordering_contrast();
        assert_eq!(x.as_outer().unwrap().body(), -ExactComplex::one());
    }

    #[test]
    fn prepoint_spec_is_hermitian_for_balanced_powers() {
        let r = liouvillian_ordering(&LiouvillianSpec::prepoint(2, 2)).unwrap();
        assert!(r.equals_prepoint);
        assert_eq!(r.hermitian_by_condition, r.hermitian_by_dagger);
    }

    #[test]
    fn base_space_operators_match_commutators() {
        for (text, n) in [("p1^2/2 + q1^4/4 - q1*p1", 1), ("p1*p2 + q1^2*q2 + p1^3/3", 2)] {
            let h = complexify(&parse_polynomial(text).unwrap());
            for r in base_space_check(&h, n).unwrap() {
                assert!(r.vanishes(), "{text}: {}: {:?}", r.name, r.value);
            }
            for r in susy_check(&h, n).unwrap() {
                assert!(r.vanishes(), "{text}: {}: {:?}", r.name, r.value);
            }
        }
    }

    #[test]
    fn superfield_commutator_is_grassmann_delta() {
        for n in 1..=2 {
            let s = superfield_commutator::<ExactComplex>(n).unwrap();
            for r in &s.residuals {
                assert!(r.vanishes(), "{}: {:?}", r.name, r.value);
            }
            assert_eq!(s.extracted, s.direct);
        }
    }
}
