//! Classical flow on the extended phase space `(φ, λ, c, c̄)`, the Jacobi
//! field check, conserved charges along trajectories and the classical
//! path-integral kernel.

mod checks;
mod hamiltonian;
mod state;

pub use checks::{
    charge_drift, charge_values, cpi_kernel, determinant, flow_map, flow_with_jacobian, jacobi_check, kernel_mass,
    odd_basis, trajectory, write_trajectory_csv, CpiKernel,
};
pub use hamiltonian::{Hamiltonian, Pendulum, PolyHamiltonian, Truncated};
pub use state::{evolve, extended_rhs, integrate, ExtendedState, FlowResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("symbol {0} is not a phase-space coordinate")]
    UnsupportedSymbol(String),
    #[error("array sizes do not match the phase space")]
    DimensionMismatch,
    #[error("Hamiltonian does not provide derivatives of order {0}")]
    DerivativeOrder(u8),
    #[error("time step must be positive and finite")]
    BadStep,
    #[error("final time precedes initial time")]
    BadInterval,
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
    #[error("write failed: {0}")]
    Io(String),
}

impl From<std::io::Error> for DynamicsError {
    fn from(e: std::io::Error) -> Self {
        DynamicsError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_polynomial;

    fn oscillator() -> PolyHamiltonian<f64> {
        PolyHamiltonian::new(&parse_polynomial("p1^2/2 + q1^2/2").unwrap(), 1).unwrap()
    }

    #[test]
    fn oscillator_returns_after_one_period() {
        let h = oscillator();
        let end = flow_map(&h, &[1.0, 0.5], 2.0 * std::f64::consts::PI, 1e-3).unwrap();
        assert!((end[0] - 1.0).abs() < 1e-10 && (end[1] - 0.5).abs() < 1e-10, "{end:?}");
    }

    #[test]
    fn oscillator_jacobian_is_rotation() {
        let h = oscillator();
        let t = 0.7_f64;
        let (_, m) = flow_with_jacobian(&h, &[0.3, -0.2], t, 1e-3).unwrap();
        let want = [[t.cos(), t.sin()], [-t.sin(), t.cos()]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((m[a][b] - want[a][b]).abs() < 1e-11);
            }
        }
        assert!((determinant(&m) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn pendulum_polynomial_rejects_other_symbols() {
        let p = parse_polynomial("p1^2/2 + q2").unwrap();
        assert!(matches!(PolyHamiltonian::<f64>::new(&p, 1), Err(DynamicsError::UnsupportedSymbol(_))));
    }

    #[test]
    fn truncated_hamiltonian_cannot_drive_ghosts() {
        let h = Pendulum::<f64>::default();
        let t = Truncated { inner: &h, order: 2 };
        let s = ExtendedState::with_jacobi_frame(&[0.1, 0.0]);
        assert_eq!(extended_rhs(&t, &s), Err(DynamicsError::DerivativeOrder(3)));
        assert!(flow_map(&t, &[0.1, 0.0], 0.1, 0.01).is_ok());
    }

    #[test]
    fn charges_vanish_on_zero_ghosts() {
        let h = Pendulum::<f64>::default();
        let s = ExtendedState::point(&[0.4, 0.1]);
        let basis = odd_basis(0);
        for (name, v) in charge_values(&h, &s, &basis).unwrap() {
            if name != "H_tilde" {
                assert!(v.is_zero(), "{name}");
            }
        }
    }

    #[test]
    fn pendulum_charges_are_conserved() {
        let h = Pendulum::<f64>::default();
        let c = vec![vec![1.0, 0.0, 0.3], vec![0.0, 1.0, -0.2]];
        let cb = vec![vec![0.5, -0.1, 0.0], vec![0.2, 0.7, 1.0]];
        let s0 = ExtendedState::new(&[1.2, 0.3], &[0.4, -0.6], &c, &cb).unwrap();
        let flow = integrate(&h, &s0, 0.0, 5.0, 1e-3, 500).unwrap();
        let basis = odd_basis(3);
        for (name, d) in charge_drift(&h, &flow, &basis).unwrap() {
            assert!(d < 1e-9, "{name}: {d}");
        }
    }

    #[test]
    fn jacobi_field_matches_finite_difference() {
        let h = Pendulum::<f64>::default();
        let coarse = jacobi_check(&h, &[1.0, 0.2], &[0.6, 0.8], 3.0, 1e-4, 1e-3).unwrap();
        let fine = jacobi_check(&h, &[1.0, 0.2], &[0.6, 0.8], 3.0, 5e-5, 1e-3).unwrap();
        assert!(coarse < 1e-3);
        let ratio = coarse / fine;
        assert!((1.8..=2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn kernel_mass_is_one_for_oscillator() {
        let h = oscillator();
        let m = kernel_mass(&h, &[0.5, -0.3], 1.3, 0.3, &[-2.5, -2.5], &[2.5, 2.5], 101, 1e-2).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let h = Pendulum::<f64>::default();
        let flow = integrate(&h, &ExtendedState::with_jacobi_frame(&[0.5, 0.0]), 0.0, 1.0, 0.01, 10).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &h, &flow).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), flow.states.len() + 1);
        let cols = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == cols));
    }
}
