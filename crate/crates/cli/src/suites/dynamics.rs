use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use supertime::dynamics::{
    charge_drift, flow_map, integrate, jacobi_check, kernel_mass, odd_basis, write_trajectory_csv, DynamicsError,
    ExtendedState, Hamiltonian, Pendulum, PolyHamiltonian,
};
use supertime::symexpr::parse_polynomial;

use crate::config::Prepared;
use crate::report::{Recorder, Report};
use crate::{CliError, Output};

use super::{ratio_residual, RATIO_TOL};

/// Drift per unit time allowed for every conserved charge.
const DRIFT_TOL: f64 = 1e-8;
const GHOSTS: usize = 3;

fn oscillator() -> PolyHamiltonian<f64> {
    PolyHamiltonian::new(&parse_polynomial("p1^2/2 + q1^2/2").expect("literal"), 1).expect("literal")
}

/// Random initial point with `GHOSTS` odd basis directions per ghost.
fn random_state(rng: &mut StdRng, n: usize) -> Result<ExtendedState<f64>, DynamicsError> {
    let mut v = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect() };
    let phi = v(2 * n);
    let lambda = v(2 * n);
    let c: Vec<Vec<f64>> = (0..2 * n).map(|_| v(GHOSTS)).collect();
    let cbar: Vec<Vec<f64>> = (0..2 * n).map(|_| v(GHOSTS)).collect();
    ExtendedState::new(&phi, &lambda, &c, &cbar)
}

fn worst_drift(h: &dyn Hamiltonian<f64>, s0: &ExtendedState<f64>, t: f64, dt: f64, stride: usize) -> Result<f64, DynamicsError> {
    let flow = integrate(h, s0, 0.0, t, dt, stride)?;
    let drifts = charge_drift(h, &flow, &odd_basis(s0.basis_size()))?;
    Ok(drifts.iter().map(|(_, d)| d / t).fold(0.0, f64::max))
}

pub fn run(prep: &Prepared, out: &Output) -> Result<Report, CliError> {
    let cfg = &prep.config.dynamics;
    let mut rec = Recorder::new("dynamics");
    let mut rng = StdRng::seed_from_u64(prep.config.system.seed);
    const CHARGES: &str = "every charge conserved along the extended flow";

    rec.start();
    let user = PolyHamiltonian::new(&prep.hamiltonian, prep.dof);
    let s0 = random_state(&mut rng, prep.dof);
    match (&user, &s0) {
        (Ok(h), Ok(s0)) => {
            match worst_drift(h, s0, cfg.t, cfg.dt, cfg.stride) {
                Ok(d) => rec.record("charges.user", CHARGES, d, DRIFT_TOL, "worst drift per unit time"),
                Err(e) => rec.error("charges.user", CHARGES, e),
            }
            match integrate(h, s0, 0.0, cfg.t, cfg.dt, cfg.stride) {
                Ok(flow) => {
                    let mut w = out.writer("trajectory.csv")?;
                    if let Err(e) = write_trajectory_csv(&mut w, h, &flow) {
                        return Err(CliError::io(
                            &out.path("trajectory.csv"),
                            std::io::Error::other(e.to_string()),
                        ));
                    }
                }
                Err(e) => log::warn!("no trajectory written: {e}"),
            }
        }
        (Err(e), _) => rec.error("charges.user", CHARGES, e),
        (_, Err(e)) => rec.error("charges.user", CHARGES, e),
    }

    rec.start();
    let osc = oscillator();
    let phi0 = [1.0, 0.2];
    match flow_map(&osc, &phi0, 2.0 * PI, cfg.dt) {
        Ok(end) => {
            let r = end.iter().zip(&phi0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rec.record("oscillator.period", "φ_cl(2π; φ0) = φ0 for H = (p² + q²)/2", r, 1e-10, "");
        }
        Err(e) => rec.error("oscillator.period", "φ_cl(2π; φ0) = φ0", e),
    }

    rec.start();
    let pendulum = Pendulum::<f64>::default();
    let e0 = pendulum.value(&phi0);
    match flow_map(&pendulum, &phi0, cfg.pendulum_t, cfg.dt) {
        Ok(end) => {
            let d = (pendulum.value(&end) - e0).abs() / cfg.pendulum_t;
            rec.record("pendulum.energy", "H(φ_cl(t)) = H(φ0), drift per unit time", d, DRIFT_TOL, "");
        }
        Err(e) => rec.error("pendulum.energy", "H(φ_cl(t)) = H(φ0)", e),
    }

    rec.start();
    match random_state(&mut rng, 1).and_then(|s| worst_drift(&pendulum, &s, cfg.pendulum_t, cfg.dt, cfg.stride)) {
        Ok(d) => rec.record("charges.pendulum", CHARGES, d, DRIFT_TOL, "worst drift per unit time"),
        Err(e) => rec.error("charges.pendulum", CHARGES, e),
    }

    rec.start();
    const JACOBI: &str = "c^a(t) = ∂φ_cl^a(t)/∂φ0^b c^b(0)";
    let v = [0.6, 0.8];
    let coarse = jacobi_check(&pendulum, &phi0, &v, cfg.pendulum_t, cfg.jacobi_h, cfg.dt);
    let fine = jacobi_check(&pendulum, &phi0, &v, cfg.pendulum_t, cfg.jacobi_h / 2.0, cfg.dt);
    match (coarse, fine) {
        (Ok(a), Ok(b)) => {
            let r = a / b;
            rec.record("jacobi.pendulum_ratio", JACOBI, ratio_residual(r), RATIO_TOL, format!("ratio {r:.4}, errors {a:.2e}, {b:.2e}"));
        }
        (Err(e), _) | (_, Err(e)) => rec.error("jacobi.pendulum_ratio", JACOBI, e),
    }
    match jacobi_check(&osc, &phi0, &v, cfg.pendulum_t, cfg.jacobi_h, cfg.dt) {
        Ok(e) => rec.record("jacobi.oscillator", JACOBI, e, 1e-10, "linear flow, finite difference exact"),
        Err(e) => rec.error("jacobi.oscillator", JACOBI, e),
    }

    rec.start();
    const MASS: &str = "∫dφ0 δ(φ − φ_cl(t; φ0)) = 1";
    let target = [0.5, -0.3];
    let half = 2.5 + 6.0 * cfg.sigma;
    match kernel_mass(&osc, &target, 1.3, cfg.sigma, &[-half, -half], &[half, half], 101, 1e-2) {
        Ok(m) => rec.record("kernel_mass", MASS, (m - 1.0).abs(), 1e-6, format!("σ = {}", cfg.sigma)),
        Err(e) => rec.error("kernel_mass", MASS, e),
    }
    Ok(rec.finish())
}
