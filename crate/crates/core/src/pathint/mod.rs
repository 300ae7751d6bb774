//! Time-sliced path integrals: Gaussian quantum kernels in the coordinate
//! and momentum polarizations, the classical kernel as a composition of
//! slice flows, and discretised Dyson-Schwinger residuals.

mod classical;
mod gaussian;
mod quantum;

pub use classical::{cpi_sliced_kernel, ds_residual_classical, ClassicalDs, SlicedFlow};
pub use gaussian::{GaussianForm, GaussianIntegral};
pub use quantum::{
    ds_residual_quantum, fourier_to_momentum, free_propagator, generating_functional, oscillator_propagator,
    oscillator_propagator_complex, qpi_kernel_p, qpi_kernel_q, DsResidual, Polarization, QuadraticAction,
    QuadraticHamiltonian, Slicing, SmoothCurrent,
};

use crate::dynamics::DynamicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathintError {
    #[error("Gaussian form is singular")]
    Singular,
    #[error("caustic: the exact kernel is singular at this time")]
    Caustic,
    #[error("Hamiltonian is not quadratic in q1, p1: {0}")]
    NotQuadratic(String),
    #[error("slice count, time and ħ must be positive")]
    BadParameters,
    #[error("current has the wrong number of components")]
    CurrentMismatch,
    #[error("Newton iteration failed at slice {0}")]
    NewtonFailed(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[cfg(test)]
mod tests {
    use super::quantum::perturbed_z;
    use super::*;
    use crate::dynamics::{Pendulum, PolyHamiltonian};
    use crate::symexpr::parse_polynomial;
    use crate::C64;
    use std::f64::consts::PI;

    fn osc() -> QuadraticHamiltonian {
        QuadraticHamiltonian::oscillator(1.0, 1.0)
    }

    #[test]
    fn coefficients_from_polynomial() {
        let h = QuadraticHamiltonian::from_poly(&parse_polynomial("p1^2/2 + 3*q1*p1 - q1^2 + 2*q1 + 5").unwrap()).unwrap();
        assert_eq!((h.a, h.b, h.c, h.d, h.e, h.f), (1.0, 3.0, -2.0, 0.0, 2.0, 5.0));
        assert!(QuadraticHamiltonian::from_poly(&parse_polynomial("q1^3").unwrap()).is_err());
        assert!(QuadraticHamiltonian::from_poly(&parse_polynomial("q2^2").unwrap()).is_err());
    }

    #[test]
    fn free_particle_slicing_is_exact() {
        let h = QuadraticHamiltonian::free(1.0);
        let exact = free_propagator(1.0, 1.0, 1.0, 0.0, 1.0);
        for n in [1, 2, 3, 8, 33, 128] {
            let k = qpi_kernel_q(&h, 0.0, 1.0, 1.0, n, 1.0).unwrap();
            assert!((k.norm() - (2.0 * PI).powf(-0.5)).abs() < 1e-12, "{n}");
            assert!((k - exact).norm() < 1e-12, "{n}: {k} vs {exact}");
        }
    }

    fn hermite_sum(tau: C64, q0: f64, q1: f64, terms: usize) -> C64 {
        let psi = |x: f64| {
            let mut out = vec![PI.powf(-0.25) * (-x * x / 2.0).exp()];
            out.push(2f64.sqrt() * x * out[0]);
            for k in 1..terms - 1 {
                let next = (2.0 / (k + 1) as f64).sqrt() * x * out[k] - (k as f64 / (k + 1) as f64).sqrt() * out[k - 1];
                out.push(next);
            }
            out
        };
        let (a, b) = (psi(q0), psi(q1));
        (0..terms)
            .map(|k| C64::new(0.0, -(k as f64 + 0.5)).mul(tau).exp() * a[k] * b[k])
            .sum()
    }

    use std::ops::Mul;

    #[test]
    fn mehler_matches_eigenfunction_sum() {
        for (t, q0, q1) in [(1.0, 0.0, 1.0), (0.4, -0.7, 0.3), (2.5, 1.1, 0.2)] {
            let tau = C64::new(t, -0.6);
            let closed = oscillator_propagator_complex(1.0, 1.0, 1.0, tau, q0, q1).unwrap();
            let sum = hermite_sum(tau, q0, q1, 120);
            assert!((closed - sum).norm() < 1e-12, "{closed} vs {sum}");
        }
    }

    #[test]
    fn oscillator_error_halves() {
        let exact = oscillator_propagator(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let errs: Vec<f64> = [8, 16, 32, 64, 128]
            .iter()
            .map(|&n| (qpi_kernel_q(&osc(), 0.0, 1.0, 1.0, n, 1.0).unwrap() - exact).norm())
            .collect();
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((1.8..=2.2).contains(&r), "{errs:?}");
        }
    }

    #[test]
    fn fourier_duality_of_polarizations() {
        for slicing in [Slicing::Standard, Slicing::Dual] {
            let q = QuadraticAction::new(&osc(), Polarization::Coordinate, slicing, 64, 1.0, 1.0, None).unwrap();
            let p = QuadraticAction::new(&osc(), Polarization::Momentum, slicing.dual(), 64, 1.0, 1.0, None).unwrap();
            let form = q.kernel_form().unwrap();
            for (p0, p1) in [(0.0, 0.5), (-1.0, 0.3), (0.8, 0.8)] {
                let ft = fourier_to_momentum(&form, p0, p1, 1.0).unwrap();
                let direct = p.kernel(p0, p1).unwrap();
                assert!((ft - direct).norm() < 1e-8, "{ft} vs {direct}");
            }
        }
    }

    #[test]
    fn momentum_kernel_of_free_particle_is_a_phase_times_delta() {
        // ∫dp0 K(p1|p0) f(p0) = 2πℏ f(p1) e^{−ip1²t/2ℏ} for f = e^{−(p0−a)²/2}
        let (t, a, p1) = (0.7, 0.4, 0.9);
        for n in [1, 4, 16] {
            let act =
                QuadraticAction::new(&QuadraticHamiltonian::free(1.0), Polarization::Momentum, Slicing::Standard, n, t, 1.0, None)
                    .unwrap();
            let mut f = act.form.fix(&[n], &[p1]);
            // p0 is now variable 0
            f.add_bilinear(C64::new(-0.5, 0.0), 0, 0);
            f.add_linear(C64::new(a, 0.0), 0);
            f.c += C64::new(-a * a / 2.0, 0.0);
            let got = f.integrate().unwrap().value();
            let want = C64::new(0.0, -p1 * p1 * t / 2.0).exp() * 2.0 * PI * (-(p1 - a).powi(2) / 2.0).exp();
            assert!((got - want).norm() < 1e-10, "{n}: {got} vs {want}");
        }
    }

    #[test]
    fn sliced_kernels_compose() {
        let a = QuadraticAction::new(&osc(), Polarization::Coordinate, Slicing::Standard, 6, 0.6, 1.0, None).unwrap();
        let b = QuadraticAction::new(&osc(), Polarization::Coordinate, Slicing::Standard, 4, 0.4, 1.0, None).unwrap();
        let ab = QuadraticAction::new(&osc(), Polarization::Coordinate, Slicing::Standard, 10, 1.0, 1.0, None).unwrap();
        let (fa, fb) = (a.kernel_form().unwrap(), b.kernel_form().unwrap());
        let (q0, q2) = (0.2, -0.5);
        // ∫dq1 K_b(q2|q1) K_a(q1|q0)
        let mut f = GaussianForm::zero(1);
        let ka = fa.fix(&[0], &[q0]);
        let kb = fb.fix(&[1], &[q2]);
        f.a = &ka.a + &kb.a;
        f.j = &ka.j + &kb.j;
        f.c = ka.c + kb.c;
        let composed = f.integrate().unwrap().value();
        let direct = ab.kernel(q0, q2).unwrap();
        assert!((composed - direct).norm() < 1e-10);
    }

    #[test]
    fn mehler_kernels_compose() {
        let (t1, t2, q0, q2) = (0.5, 0.8, 0.3, -0.4);
        let i = C64::new(0.0, 1.0);
        // K(q|q0; t) = pref · exp(iα(q² + q0²) − iβ q q0)
        let coeffs = |t: f64| (1.0 / (2.0 * t.tan()), 1.0 / t.sin());
        let (a1, b1) = coeffs(t1);
        let (a2, b2) = coeffs(t2);
        let mut f = GaussianForm::zero(1);
        f.add_bilinear(i * (a1 + a2), 0, 0);
        f.add_linear(-i * (b1 * q0 + b2 * q2), 0);
        let pref = |t: f64| oscillator_propagator(1.0, 1.0, 1.0, t, 0.0, 0.0).unwrap();
        let rest = (i * (a1 * q0 * q0 + a2 * q2 * q2)).exp() * pref(t1) * pref(t2);
        let composed = f.integrate().unwrap().value() * rest;
        let direct = oscillator_propagator(1.0, 1.0, 1.0, t1 + t2, q0, q2).unwrap();
        assert!((composed - direct).norm() < 1e-8, "{composed} vs {direct}");
    }

    #[test]
    fn short_time_kernel_is_a_nascent_delta() {
        // ∫dq1 K(q1|q0; t) e^{−(q1−a)²/2} → e^{−(q0−a)²/2}
        let (q0, a) = (0.3, -0.2);
        let mut errs = Vec::new();
        for t in [1e-2, 1e-3, 1e-4] {
            let act = QuadraticAction::new(&osc(), Polarization::Coordinate, Slicing::Standard, 1, t, 1.0, None).unwrap();
            let mut f = act.form.fix(&[0], &[q0]);
            // remaining: q1 at 0, p1 at 1
            f.add_bilinear(C64::new(-0.5, 0.0), 0, 0);
            f.add_linear(C64::new(a, 0.0), 0);
            f.c += C64::new(-a * a / 2.0, 0.0);
            let got = f.integrate().unwrap().value();
            errs.push((got - (-(q0 - a).powi(2) / 2.0f64).exp()).norm());
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0] && errs[2] < 1e-3, "{errs:?}");
    }

    #[test]
    fn caustics_and_singular_forms_are_reported() {
        assert_eq!(oscillator_propagator(1.0, 1.0, 1.0, PI, 0.0, 1.0), Err(PathintError::Caustic));
        let free = QuadraticAction::new(&QuadraticHamiltonian::free(1.0), Polarization::Coordinate, Slicing::Standard, 4, 1.0, 1.0, None)
            .unwrap();
        let form = free.kernel_form().unwrap();
        assert_eq!(fourier_to_momentum(&form, 0.0, 0.0, 1.0), Err(PathintError::Singular));
    }

    #[test]
    fn cpi_slices_compose_to_the_flow() {
        let h = PolyHamiltonian::<f64>::new(&parse_polynomial("p1^2/2 + q1^2/2").unwrap(), 1).unwrap();
        let s = cpi_sliced_kernel(&h, &[0.7, -0.4], 2.0 * PI, 16, 1e-3).unwrap();
        assert!((s.phi[0] - 0.7).abs() < 1e-8 && (s.phi[1] + 0.4).abs() < 1e-8);
        assert!((s.det_product - 1.0).abs() < 1e-10);
        let p = Pendulum::default();
        let one = cpi_sliced_kernel(&p, &[1.0, 0.3], 3.0, 1, 1e-3).unwrap();
        let many = cpi_sliced_kernel(&p, &[1.0, 0.3], 3.0, 100, 1e-3).unwrap();
        for a in 0..2 {
            assert!((one.phi[a] - many.phi[a]).abs() < 1e-9);
            for b in 0..2 {
                assert!((one.jacobian[a][b] - many.jacobian[a][b]).abs() < 1e-8);
            }
        }
        assert!((many.det_product - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quantum_ds_vanishes_for_free_stationary_path() {
        let r = ds_residual_quantum(&QuadraticHamiltonian::free(1.0), 0.0, 1.0, 1.0, 50, 1.0, &SmoothCurrent::zero(2)).unwrap();
        assert!(r.max_norm < 1e-10, "{}", r.max_norm);
    }

    #[test]
    fn mean_is_the_discrete_functional_derivative() {
        // −iℏ ε⁻¹ ∂ ln Z/∂J_n = ⟨q_n⟩
        let j = SmoothCurrent::random(7, 2, 3, 1.0, 1.0);
        let (n, hbar) = (20, 0.7);
        let (z, mean) = generating_functional(&osc(), 0.1, 0.6, 1.0, n, hbar, &j).unwrap();
        let eps = 1.0 / n as f64;
        let d = 1e-5;
        for k in [3, 11] {
            let up = perturbed_z(&osc(), 0.1, 0.6, 1.0, n, hbar, &j, k, d).unwrap();
            let down = perturbed_z(&osc(), 0.1, 0.6, 1.0, n, hbar, &j, k, -d).unwrap();
            let deriv = C64::new(0.0, -hbar) * (up - down) / (2.0 * d * eps) / z;
            assert!((deriv - mean[k - 1]).norm() < 1e-6, "{deriv} vs {}", mean[k - 1]);
        }
    }

    #[test]
    fn quantum_ds_is_first_order() {
        let j = SmoothCurrent::random(42, 2, 3, 1.0, 1.0);
        for h in [QuadraticHamiltonian::free(1.0), osc()] {
            let coarse = ds_residual_quantum(&h, 0.0, 0.5, 1.0, 100, 1.0, &j).unwrap();
            let fine = ds_residual_quantum(&h, 0.0, 0.5, 1.0, 200, 1.0, &j).unwrap();
            let r = coarse.max_norm / fine.max_norm;
            assert!((1.8..=2.2).contains(&r), "{r}");
        }
    }

    #[test]
    fn classical_ds_is_first_order_and_linear() {
        let h = PolyHamiltonian::<f64>::new(&parse_polynomial("p1^2/2 + q1^2/2").unwrap(), 1).unwrap();
        let free = PolyHamiltonian::<f64>::new(&parse_polynomial("p1^2/2").unwrap(), 1).unwrap();
        let zero = ds_residual_classical(&free, &[0.2, 0.5], 1.0, 50, &SmoothCurrent::zero(2)).unwrap();
        assert!(zero.max_norm < 1e-12);
        let j = SmoothCurrent::random(3, 2, 3, 1.0, 0.5);
        let coarse = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 100, &j).unwrap();
        let fine = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 200, &j).unwrap();
        let r = coarse.max_norm / fine.max_norm;
        assert!((1.8..=2.2).contains(&r), "{r}");
        let j2 = SmoothCurrent::random(4, 2, 3, 1.0, 0.5);
        let base = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 50, &SmoothCurrent::zero(2)).unwrap();
        let r1 = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 50, &j).unwrap();
        let r2 = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 50, &j2).unwrap();
        let r12 = ds_residual_classical(&h, &[0.2, 0.5], 1.0, 50, &j.plus(&j2).unwrap()).unwrap();
        for s in 0..=50 {
            for a in 0..2 {
                let lin = r1.path[s][a] + r2.path[s][a] - base.path[s][a];
                assert!((r12.path[s][a] - lin).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pendulum_classical_ds_converges() {
        let j = SmoothCurrent::random(5, 2, 2, 2.0, 0.3);
        let coarse = ds_residual_classical(&Pendulum::default(), &[1.0, 0.0], 2.0, 200, &j).unwrap();
        let fine = ds_residual_classical(&Pendulum::default(), &[1.0, 0.0], 2.0, 400, &j).unwrap();
        let r = coarse.max_norm / fine.max_norm;
        assert!((1.8..=2.2).contains(&r), "{r}");
    }
}
