use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use supertime::coherent::{coherent_state, scalar_product_formula, classical_coherent_pair};
use supertime::dynamics::{determinant, flow_with_jacobian, Pendulum};
use supertime::grassmann::{GeneratorRegistry, GrassmannElement};
use supertime::pathint::{free_propagator, qpi_kernel_q, GaussianForm, QuadraticHamiltonian};
use supertime::scalar::Ring;
use supertime::superfield::{lagrangian_identity, Superspace};
use supertime::symexpr::{complexify, random_polynomial};
use supertime::{ExactComplex, GrassmannQ, C64};

fn element(terms: Vec<(u64, i64)>) -> GrassmannQ {
    let reg = GeneratorRegistry::real(["a", "b", "c", "d"]).unwrap();
    let mut out = GrassmannElement::zero(&reg);
    for (mask, k) in terms {
        out = out + GrassmannElement::monomial(&reg, mask, ExactComplex::from_i64(k));
    }
    out
}

fn terms() -> impl Strategy<Value = Vec<(u64, i64)>> {
    prop::collection::vec((0u64..16, -5i64..=5), 0..6)
}

fn homogeneous(terms: Vec<(u64, i64)>, odd: bool) -> GrassmannQ {
    element(terms.into_iter().filter(|(m, _)| (m.count_ones() % 2 == 1) == odd).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grassmann_product_is_associative(x in terms(), y in terms(), z in terms()) {
        let (x, y, z) = (element(x), element(y), element(z));
        prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x * (y * z));
    }

    #[test]
    fn graded_commutator_of_odd_elements_is_symmetric(x in terms(), y in terms()) {
        let (x, y) = (homogeneous(x, true), homogeneous(y, true));
        prop_assert_eq!(x.graded_commutator(&y).unwrap(), y.graded_commutator(&x).unwrap());
        // [x, x} = 2x²
        let sq = x.multiply(&x).unwrap();
        prop_assert_eq!(x.graded_commutator(&x).unwrap(), sq.clone() + sq);
    }

    #[test]
    fn even_elements_are_central(x in terms(), y in terms()) {
        let e = homogeneous(x, false);
        let y = element(y);
        prop_assert!(e.graded_commutator(&y).unwrap().is_zero());
    }

    #[test]
    fn berezin_of_a_derivative_vanishes(x in terms(), g in 0usize..4) {
        let x = element(x);
        let d = x.left_derivative(g).unwrap();
        prop_assert!(d.berezin(&[g]).unwrap().is_zero());
    }

    #[test]
    fn inverse_of_invertible_element(x in terms(), body in 1i64..5) {
        let reg = GeneratorRegistry::real(["a", "b", "c", "d"]).unwrap();
        let soul = element(x).soul();
        let y = GrassmannElement::scalar(&reg, ExactComplex::from_i64(body)) + soul;
        let inv = y.try_inverse().unwrap();
        prop_assert_eq!(y * inv, GrassmannElement::one(&reg));
    }

    #[test]
    fn lagrangian_identity_for_random_hamiltonians(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = complexify(&random_polynomial(&mut rng, n, 3, 3));
        let s = Superspace::new(n);
        prop_assert!(lagrangian_identity(&s, &h).unwrap().residual.is_zero());
        let reduced = s.berezin_reduce(&s.substitute(&h).unwrap()).unwrap();
        prop_assert!((reduced - s.h_tilde(&h)).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pendulum_flow_preserves_volume(q in -2.0f64..2.0, p in -1.0f64..1.0, t in 0.1f64..3.0) {
        let (_, m) = flow_with_jacobian(&Pendulum::default(), &[q, p], t, 1e-3).unwrap();
        prop_assert!((determinant(&m) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn free_slicing_is_exact(n in 1usize..40, q0 in -2.0f64..2.0, q1 in -2.0f64..2.0, t in 0.2f64..3.0) {
        let k = qpi_kernel_q(&QuadraticHamiltonian::free(1.0), q0, q1, t, n, 1.0).unwrap();
        prop_assert!((k - free_propagator(1.0, 1.0, t, q0, q1)).norm() < 1e-11);
    }

    #[test]
    fn staged_gaussian_integration(d in prop::collection::vec(0.2f64..2.0, 3), off in prop::collection::vec(-0.3f64..0.3, 3),
                                   j in prop::collection::vec(-1.0f64..1.0, 3), first in 0usize..3) {
        let mut f = GaussianForm::zero(3);
        for k in 0..3 {
            f.add_bilinear(C64::new(-d[k] / 2.0, 0.3 * off[k]), k, k);
            f.add_bilinear(C64::new(off[k], 0.0), k, (k + 1) % 3);
            f.add_linear(C64::new(j[k], -j[k] / 2.0), k);
        }
        let whole = f.integrate().unwrap().value();
        let staged = f.integrate_out(&[first]).unwrap().integrate().unwrap().value();
        prop_assert!((whole - staged).norm() < 1e-10 * whole.norm().max(1.0));
    }

    #[test]
    fn coherent_overlap(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0) {
        let (z1, z2) = (C64::new(a, b), C64::new(c, d));
        let s1 = coherent_state(z1, 32).unwrap();
        let s2 = coherent_state(z2, 32).unwrap();
        prop_assert!((s1.inner(&s2).norm_sqr() - (-(z1 - z2).norm_sqr()).exp()).abs() < 1e-12);
        let p1 = classical_coherent_pair(z1, z2, 16).unwrap();
        let p2 = classical_coherent_pair(z2, z1, 16).unwrap();
        prop_assert!((p1.inner(&p2) - scalar_product_formula(z1, z2, z2, z1)).norm() < 1e-10);
    }
}
