//! Coherent states: the quantum `|z⟩` on a truncated Fock space, the
//! classical pair `|z^q, z^p⟩` built from `(q̂, λ̂_q)` and `(p̂, λ̂_p)`, and
//! the odd coherent states of the ghost sector.
//!
//! Numerical statements are only asserted on the lower `D/2` levels of each
//! mode; truncation corrupts the top of the spectrum.

mod fock;
mod ghosts;

pub use fock::{
    block, classical_coherent_pair, classical_phase, classical_z, coherent_state, completeness, displacement,
    displacement_generator, power_series_state, quantum_qp, quantum_z, scalar_product_formula, truncation_tail,
    CoherentState, Completeness, FockSpace,
};
pub use ghosts::{
    ghost_displacement, ghost_eigen_residual, ghost_parameters, grassmann_coherent_check, GhostCoherentCheck,
};

use crate::grassmann::GrassmannError;
use crate::opalgebra::OpAlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoherentError {
    #[error("Fock truncation {0} is below 8 levels")]
    Dimension(usize),
    #[error("{0} modes requested, only 1 or 2 are supported")]
    Modes(usize),
    #[error("|z|² = {z2} is too large for {dim} levels")]
    Truncation { z2: f64, dim: usize },
    #[error(transparent)]
    Algebra(#[from] OpAlgebraError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalgebra::OpContext;
    use crate::C64;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_at_zero() {
        let s = coherent_state(c(0.0, 0.0), 16).unwrap();
        assert!((s.coeffs[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(s.coeffs.iter().skip(1).all(|x| x.norm() < 1e-14));
        let pair = classical_coherent_pair(c(0.0, 0.0), c(0.0, 0.0), 8).unwrap();
        assert!((pair.coeffs[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn displacement_matches_power_series() {
        for z in [c(1.0, 0.0), c(0.3, -0.8), c(-1.5, 1.1)] {
            let s = coherent_state(z, 32).unwrap();
            let oracle = power_series_state(z, 32);
            let tol = if z.norm() <= 1.0 { 1e-12 } else { truncation_tail(z, 32) };
            assert!((&s.coeffs - oracle).norm() < tol, "{z}");
            assert!((s.norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn eigen_residual_within_tail_bound() {
        let fock = FockSpace::new(32, 1).unwrap();
        let s = coherent_state(c(1.0, 0.0), 32).unwrap();
        assert!(s.eigen_residual(&fock) < 1e-12);
        for z in [c(0.5, 0.5), c(2.0, -1.0), c(0.0, 3.0)] {
            let s = coherent_state(z, 32).unwrap();
            assert!(s.eigen_residual(&fock) <= truncation_tail(z, 32) + 1e-13, "{z}");
        }
    }

    #[test]
    fn large_amplitude_is_rejected() {
        assert!(matches!(coherent_state(c(3.0, 0.0), 16), Err(CoherentError::Truncation { .. })));
        assert_eq!(coherent_state(c(0.1, 0.0), 4).unwrap_err(), CoherentError::Dimension(4));
    }

    #[test]
    fn overlap_modulus() {
        let (z1, z2) = (c(0.4, -0.2), c(-0.3, 0.9));
        let a = coherent_state(z1, 32).unwrap();
        let b = coherent_state(z2, 32).unwrap();
        let want = (-(z1 - z2).norm_sqr()).exp();
        assert!((a.inner(&b).norm_sqr() - want).abs() < 1e-12);
    }

    #[test]
    fn ladder_commutators_on_guarded_block() {
        let fock = FockSpace::new(8, 2).unwrap();
        let idx = fock.guarded_block();
        let comm = |x: &DMatrix<C64>, y: &DMatrix<C64>| x * y - y * x;
        let (aq, ap) = (fock.annihilation(0), fock.annihilation(1));
        let (aqd, apd) = (fock.creation(0), fock.creation(1));
        let id = DMatrix::<C64>::identity(idx.len(), idx.len());
        assert!((block(&comm(&aq, &aqd), &idx) - &id).norm() < 1e-14);
        assert!((block(&comm(&ap, &apd), &idx) - &id).norm() < 1e-14);
        // single mode: every level but the top one
        let one = FockSpace::new(8, 1).unwrap();
        let (a, ad) = (one.annihilation(0), one.creation(0));
        let lower: Vec<usize> = (0..7).collect();
        assert!((block(&comm(&a, &ad), &lower) - DMatrix::<C64>::identity(7, 7)).norm() < 1e-14);
        assert!((comm(&a, &ad)[(7, 7)] - c(-7.0, 0.0)).norm() < 1e-14);
        for (x, y) in [(&aq, &ap), (&aq, &apd), (&aqd, &ap), (&aqd, &apd)] {
            assert_eq!(comm(x, y).norm(), 0.0);
        }
        // [q̂, λ̂_q] = i
        let ql = block(&comm(&fock.position(0), &fock.momentum(0)), &idx);
        assert!((ql - &id * c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn displacement_is_unitary_on_guarded_block() {
        let u = displacement(c(0.7, -0.4), 32).unwrap();
        let idx: Vec<usize> = (0..16).collect();
        let uu = block(&(u.adjoint() * &u), &idx);
        assert!((uu - DMatrix::<C64>::identity(16, 16)).norm() < 1e-12);
    }

    #[test]
    fn pair_matches_generator_exponential() {
        // an independent Padé exponential of the full two-mode generator
        let fock = FockSpace::new(12, 2).unwrap();
        let (q, lq, p, lp) = (0.5, -0.3, -0.2, 0.6);
        let u = displacement_generator(&fock, q, lq, p, lp).exp();
        let direct = u.column(0).into_owned();
        let pair = classical_coherent_pair(classical_z(q, lq), classical_z(p, lp), 12).unwrap();
        let idx = fock.guarded_block();
        let err = idx.iter().map(|&i| (direct[i] - pair.coeffs[i]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn quantum_displacement_generator() {
        // zâ† − z*â = (i/ℏ)(p q̂ − q p̂)
        let fock = FockSpace::new(10, 1).unwrap();
        let (q, p, hbar) = (0.4, -1.3, 0.7);
        let z = quantum_z(q, p, hbar);
        let lhs = fock.creation(0) * z - fock.annihilation(0) * z.conj();
        let qh = fock.position(0) * c(hbar.sqrt(), 0.0);
        let ph = fock.momentum(0) * c(hbar.sqrt(), 0.0);
        let rhs = (qh * c(p, 0.0) - ph * c(q, 0.0)) * c(0.0, 1.0 / hbar);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn pair_is_simultaneous_eigenstate() {
        let fock = FockSpace::new(32, 2).unwrap();
        let s = classical_coherent_pair(c(1.0, 0.0), c(-0.6, 0.8), 32).unwrap();
        assert!(s.eigen_residual(&fock) < 1e-12);
    }

    #[test]
    fn scalar_product_closed_form() {
        let a = classical_coherent_pair(c(0.3, 0.2), c(-0.7, 0.1), 32).unwrap();
        let b = classical_coherent_pair(c(-0.1, 0.9), c(0.5, -0.4), 32).unwrap();
        let want = scalar_product_formula(a.z[0], a.z[1], b.z[0], b.z[1]);
        assert!((a.inner(&b) - want).norm() < 1e-10);
    }

    #[test]
    fn resolution_of_identity() {
        let r = completeness(32).unwrap();
        assert!(r.single_deviation < 1e-6, "{}", r.single_deviation);
        assert!(r.pair_deviation < 1e-6, "{}", r.pair_deviation);
    }

    #[test]
    fn decompositions_round_trip() {
        for (x, y) in [(0.3, -1.7), (2.5, 0.125), (-1e-3, 4.0)] {
            let (q, p) = quantum_qp(quantum_z(x, y, 0.5), 0.5);
            assert_eq!((q, p), (x, y));
            let (q, p) = quantum_qp(quantum_z(x, y, 1.3), 1.3);
            assert!((q - x).abs() <= 4.0 * f64::EPSILON * x.abs() && (p - y).abs() <= 4.0 * f64::EPSILON * y.abs());
            let (phi, lambda) = classical_phase(classical_z(x, y));
            assert!((phi - x).abs() <= 4.0 * f64::EPSILON * x.abs());
            assert!((lambda - y).abs() <= 4.0 * f64::EPSILON * y.abs());
        }
    }

    #[test]
    fn odd_coherent_states_are_eigenstates() {
        let check = grassmann_coherent_check().unwrap();
        assert!(check.vanishes());
        // F̂|0⟩ is not the vacuum
        assert!(check.state.num_terms() > 1);
    }

    #[test]
    fn wrong_eigenvalue_leaves_a_residual() {
        let outer = ghost_parameters().unwrap();
        let ctx = OpContext::new(1, &outer);
        let f = ghost_displacement(&ctx).unwrap();
        let wrong = ctx.outer_gen(2).scale(&<crate::ExactComplex as crate::scalar::Ring>::from_i64(-1));
        assert!(!ghost_eigen_residual(&ctx, &f, 0, &wrong).unwrap().is_zero());
        assert!(!ghost_eigen_residual(&ctx, &f, 1, &ctx.outer_gen(2)).unwrap().is_zero());
    }
}
