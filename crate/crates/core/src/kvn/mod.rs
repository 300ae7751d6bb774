//! Koopman-von Neumann waves `ψ(q, p)` on a periodic phase-space grid,
//! evolved by `i∂_tψ = L̂ψ` with `L̂ = −i∂_pH∂_q + i∂_qH∂_p`.
//!
//! Space is discretised spectrally and time by classical RK4. Only the
//! zero-form component lives on the grid; higher form components are
//! carried along characteristics with the Jacobi propagator
//! ([`transport_forms`]).

mod grid;

use std::sync::Arc;

use nalgebra::DMatrix;

pub use grid::{KvNWave, PhaseGrid};
use grid::Spectral;

use crate::dynamics::{flow_map, flow_with_jacobian, DynamicsError, Hamiltonian, PolyHamiltonian};
use crate::grassmann::{GeneratorRegistry, GrassmannElement};
use crate::{GrassmannF64, Poly, C64};

/// Relative norm drift that aborts an evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Top-mode spectral energy fraction above which aliasing is reported.
pub const ALIASING_LIMIT: f64 = 1e-8;
/// Boundary shell width, in cells, watched by the wrap guard.
pub const GUARD_SHELL: usize = 3;
/// Amplitude in the boundary shell, relative to the peak, that counts as
/// the wave reaching the boundary.
pub const GUARD_LIMIT: f64 = 1e-8;
/// Largest admissible `dt · max|∇H| / min(Δq, Δp)`.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KvnError {
    #[error("grid sizes {0}×{1} must be powers of two, at least 8")]
    GridSize(usize, usize),
    #[error("grid bounds must be finite with max > min")]
    Bounds,
    #[error("waves live on different grids")]
    GridMismatch,
    #[error("KvN grids are two-dimensional; Hamiltonian has {0} degrees of freedom")]
    Dof(usize),
    #[error("time step must be positive and finite, and t non-negative")]
    BadStep,
    #[error("CFL number {0:.3} exceeds {CFL_LIMIT}")]
    Cfl(f64),
    #[error("relative norm drift {drift:.3e} at t = {t}")]
    NormDrift { drift: f64, t: f64 },
    #[error("wave reached the boundary shell at t = {t} (relative amplitude {amplitude:.3e})")]
    Wrap { t: f64, amplitude: f64 },
    #[error("malformed grid dump")]
    Dump,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Velocity field `(∂_pH, −∂_qH)` on the grid and its largest magnitude.
fn velocities(h: &dyn Hamiltonian<f64>, grid: &PhaseGrid) -> Result<(Vec<f64>, Vec<f64>, f64), KvnError> {
    if h.dof() != 1 {
        return Err(KvnError::Dof(h.dof()));
    }
    let mut vq = Vec::with_capacity(grid.len());
    let mut vp = Vec::with_capacity(grid.len());
    let mut vmax: f64 = 0.0;
    let mut g = [0.0; 2];
    for (q, p) in grid.points() {
        h.gradient(&[q, p], &mut g);
        vq.push(g[1]);
        vp.push(-g[0]);
        vmax = vmax.max(g[0].hypot(g[1]));
    }
    Ok((vq, vp, vmax))
}

/// `out = −iL̂ψ = −(v_q∂_qψ + v_p∂_pψ)`.
fn rhs(spec: &mut Spectral, vq: &[f64], vp: &[f64], psi: &[C64], dq: &mut [C64], out: &mut [C64]) {
    spec.d_q(psi, dq);
    spec.d_p(psi, out);
    for i in 0..psi.len() {
        out[i] = -(dq[i] * vq[i] + out[i] * vp[i]);
    }
}

/// Spectral-energy fraction in the top modes; see [`ALIASING_LIMIT`].
pub fn top_mode_fraction(psi: &KvNWave) -> f64 {
    Spectral::new(psi.grid).top_mode_fraction(&psi.data)
}

/// `L̂ψ`. Logs a warning when the wave is under-resolved.
pub fn liouvillian_apply(h: &dyn Hamiltonian<f64>, psi: &KvNWave) -> Result<KvNWave, KvnError> {
    let (vq, vp, _) = velocities(h, &psi.grid)?;
    let mut spec = Spectral::new(psi.grid);
    let frac = spec.top_mode_fraction(&psi.data);
    if frac > ALIASING_LIMIT {
        log::warn!("top-mode energy fraction {frac:.3e} exceeds {ALIASING_LIMIT:e}");
    }
    let n = psi.data.len();
    let mut dq = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); n];
    rhs(&mut spec, &vq, &vp, &psi.data, &mut dq, &mut out);
    // L̂ψ = i · (−iL̂ψ)
    for z in out.iter_mut() {
        *z *= C64::new(0.0, 1.0);
    }
    Ok(KvNWave { grid: psi.grid, data: out })
}

/// Evolves `ψ0` to time `t` with RK4 steps of at most `dt`.
pub fn evolve(h: &dyn Hamiltonian<f64>, psi0: &KvNWave, t: f64, dt: f64) -> Result<KvNWave, KvnError> {
    if !(dt > 0.0) || !dt.is_finite() || !(t >= 0.0) || !t.is_finite() {
        return Err(KvnError::BadStep);
    }
    let grid = psi0.grid;
    let (vq, vp, vmax) = velocities(h, &grid)?;
    let cfl = dt * vmax / grid.dq().min(grid.dp());
    if cfl > CFL_LIMIT {
        return Err(KvnError::Cfl(cfl));
    }
    let mut spec = Spectral::new(grid);
    let frac = spec.top_mode_fraction(&psi0.data);
    if frac > ALIASING_LIMIT {
        log::warn!("initial top-mode energy fraction {frac:.3e} exceeds {ALIASING_LIMIT:e}");
    }
    let norm0 = psi0.norm();
    let mut steps = (t / dt).floor() as usize;
    if t - steps as f64 * dt > 1e-9 * dt.max(t) {
        steps += 1;
    }
    let n = grid.len();
    let zero = C64::new(0.0, 0.0);
    let mut psi = psi0.data.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    let mut dq = vec![zero; n];
    let mut now = 0.0;
    for s in 0..steps {
        let h_step = if s + 1 == steps { t - (steps - 1) as f64 * dt } else { dt };
        rhs(&mut spec, &vq, &vp, &psi, &mut dq, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * h_step);
        }
        rhs(&mut spec, &vq, &vp, &tmp, &mut dq, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * h_step);
        }
        rhs(&mut spec, &vq, &vp, &tmp, &mut dq, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * h_step;
        }
        rhs(&mut spec, &vq, &vp, &tmp, &mut dq, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h_step / 6.0);
        }
        now += h_step;
        if (s + 1) % 64 == 0 || s + 1 == steps {
            let w = KvNWave { grid, data: psi };
            check_guards(&w, norm0, now)?;
            psi = w.data;
        }
    }
    Ok(KvNWave { grid, data: psi })
}

fn check_guards(w: &KvNWave, norm0: f64, t: f64) -> Result<(), KvnError> {
    let drift = if norm0 > 0.0 { (w.norm() - norm0).abs() / norm0 } else { 0.0 };
    if !(drift <= NORM_DRIFT_LIMIT) {
        return Err(KvnError::NormDrift { drift, t });
    }
    let amplitude = w.boundary_fraction(GUARD_SHELL);
    if amplitude > GUARD_LIMIT {
        return Err(KvnError::Wrap { t, amplitude });
    }
    Ok(())
}

/// Result of evolving `ψ` and `ρ = |ψ|²` independently.
#[derive(Clone, Debug)]
pub struct RhoConsistency {
    pub psi: KvNWave,
    pub rho: KvNWave,
    /// `‖ |ψ(t)|² − ρ(t) ‖₂`
    pub error: f64,
}

pub fn rho_consistency(h: &dyn Hamiltonian<f64>, psi0: &KvNWave, t: f64, dt: f64) -> Result<RhoConsistency, KvnError> {
    let psi = evolve(h, psi0, t, dt)?;
    let rho = evolve(h, &psi0.density(), t, dt)?;
    let error = psi.density().distance(&rho)?;
    Ok(RhoConsistency { psi, rho, error })
}

/// Flow of `ψ` in the parameter `α` generated by the Hamiltonian vector
/// field of the observable `O(q1, p1)`.
pub fn observable_flow(o: &Poly, alpha: f64, d_alpha: f64, psi0: &KvNWave) -> Result<KvNWave, KvnError> {
    let gen = PolyHamiltonian::<f64>::new(o, 1)?;
    evolve(&gen, psi0, alpha, d_alpha)
}

/// `ψ(φ) = ψ0(φ0(φ))` for a known inverse flow `φ ↦ φ0`.
pub fn characteristics(
    grid: PhaseGrid,
    psi0: impl Fn(f64, f64) -> C64,
    inverse: impl Fn(f64, f64) -> (f64, f64),
) -> KvNWave {
    KvNWave::from_fn(grid, |q, p| {
        let (q0, p0) = inverse(q, p);
        psi0(q0, p0)
    })
}

/// Time-reversed Hamiltonian: its forward flow is the backward flow of
/// the inner one.
struct Reversed<'a>(&'a dyn Hamiltonian<f64>);

impl Hamiltonian<f64> for Reversed<'_> {
    fn dof(&self) -> usize {
        self.0.dof()
    }
    fn order(&self) -> u8 {
        self.0.order()
    }
    fn value(&self, phi: &[f64]) -> f64 {
        -self.0.value(phi)
    }
    fn gradient(&self, phi: &[f64], out: &mut [f64]) {
        self.0.gradient(phi, out);
        out.iter_mut().for_each(|x| *x = -*x);
    }
    fn hessian(&self, phi: &[f64], out: &mut [f64]) {
        self.0.hessian(phi, out);
        out.iter_mut().for_each(|x| *x = -*x);
    }
    fn third(&self, phi: &[f64], out: &mut [f64]) {
        self.0.third(phi, out);
        out.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Characteristics oracle with the inverse flow integrated numerically.
pub fn characteristics_numeric(
    h: &dyn Hamiltonian<f64>,
    grid: PhaseGrid,
    psi0: impl Fn(f64, f64) -> C64,
    t: f64,
    dt: f64,
) -> Result<KvNWave, KvnError> {
    let back = Reversed(h);
    let data = grid
        .points()
        .map(|(q, p)| {
            let x = flow_map(&back, &[q, p], t, dt)?;
            Ok(psi0(x[0], x[1]))
        })
        .collect::<Result<_, KvnError>>()?;
    Ok(KvNWave { grid, data })
}

/// Real odd generators `c1..c_{2n}` for form components.
pub fn form_registry(n: usize) -> Arc<GeneratorRegistry> {
    GeneratorRegistry::real((1..=2 * n).map(|a| format!("c{a}"))).expect("distinct names")
}

/// Transports a form `F(φ0, c) = Σ F_I c^I` attached to the point `φ0`
/// along the flow: returns `φ(t)` and `F_t(c) = F(M⁻¹c)`, where `M` is the
/// Jacobi propagator. `form` must live on [`form_registry`].
pub fn transport_forms(
    h: &dyn Hamiltonian<f64>,
    phi0: &[f64],
    form: &GrassmannF64,
    t: f64,
    dt: f64,
) -> Result<(Vec<f64>, GrassmannF64), KvnError> {
    let dim = phi0.len();
    let reg = form.registry().clone();
    if reg.len() != dim {
        return Err(KvnError::Dynamics(DynamicsError::DimensionMismatch));
    }
    let (phi, m) = flow_with_jacobian(h, phi0, t, dt)?;
    let mat = DMatrix::from_fn(dim, dim, |i, j| m[i][j]);
    let inv = mat.try_inverse().ok_or(KvnError::Dynamics(DynamicsError::DimensionMismatch))?;
    let images: Vec<GrassmannF64> = (0..dim)
        .map(|a| {
            let mut g = GrassmannElement::zero(&reg);
            for b in 0..dim {
                let e = GrassmannElement::generator(&reg, b).expect("in range");
                g = g + e.scale(&C64::new(inv[(a, b)], 0.0));
            }
            g
        })
        .collect();
    let moved = form
        .substitute_generators(&reg, &images)
        .map_err(|_| KvnError::Dynamics(DynamicsError::DimensionMismatch))?;
    Ok((phi, moved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_polynomial;

    fn ham(text: &str) -> PolyHamiltonian<f64> {
        PolyHamiltonian::new(&parse_polynomial(text).unwrap(), 1).unwrap()
    }

    #[test]
    fn constant_wave_is_annihilated() {
        let g = PhaseGrid::square(16, 4.0).unwrap();
        let w = KvNWave::from_fn(g, |_, _| C64::new(2.0, -1.0));
        let l = liouvillian_apply(&ham("p1^2/2 + q1^4"), &w).unwrap();
        assert!(l.data.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn single_mode_free_particle() {
        let g = PhaseGrid::square(32, 4.0).unwrap();
        let k = 2.0 * std::f64::consts::PI * 3.0 / 8.0;
        let f = |p: f64| (-p * p).exp();
        let w = KvNWave::from_fn(g, |q, p| C64::new(0.0, k * q).exp() * f(p));
        let l = liouvillian_apply(&ham("p1^2/2"), &w).unwrap();
        // L̂ψ = −i p ∂_qψ = k p ψ
        for (idx, z) in l.data.iter().enumerate() {
            let (_, p) = g.point(idx);
            assert!((z - w.data[idx] * (k * p)).norm() < 1e-10);
        }
    }

    #[test]
    fn radial_wave_is_stationary() {
        let g = PhaseGrid::square(64, 8.0).unwrap();
        let w = KvNWave::gaussian(g, (0.0, 0.0), 0.7);
        let l = liouvillian_apply(&ham("p1^2/2 + q1^2/2"), &w).unwrap();
        assert!(l.norm() < 1e-10 * w.norm(), "{}", l.norm());
    }

    #[test]
    fn zero_time_is_identity() {
        let g = PhaseGrid::square(16, 4.0).unwrap();
        let w = KvNWave::gaussian(g, (0.5, 0.0), 0.6);
        assert_eq!(evolve(&ham("p1^2/2"), &w, 0.0, 0.01).unwrap(), w);
    }

    #[test]
    fn translations_by_observables() {
        let g = PhaseGrid::square(64, 8.0).unwrap();
        let w = KvNWave::gaussian(g, (0.0, 0.5), 0.6);
        let alpha = 1.25;
        let shifted_q = observable_flow(&parse_polynomial("p1").unwrap(), alpha, 0.01, &w).unwrap();
        let oracle_q = KvNWave::gaussian(g, (alpha, 0.5), 0.6);
        assert!(shifted_q.distance(&oracle_q).unwrap() < 1e-6);
        let shifted_p = observable_flow(&parse_polynomial("q1").unwrap(), alpha, 0.01, &w).unwrap();
        let oracle_p = KvNWave::gaussian(g, (0.0, 0.5 - alpha), 0.6);
        assert!(shifted_p.distance(&oracle_p).unwrap() < 1e-6);
    }

    #[test]
    fn observable_flow_of_hamiltonian_is_evolution() {
        let g = PhaseGrid::square(64, 6.0).unwrap();
        let w = KvNWave::gaussian(g, (0.5, 0.0), 0.5);
        let h = parse_polynomial("p1^2/2 + q1^2/2").unwrap();
        let a = observable_flow(&h, 0.5, 0.01, &w).unwrap();
        let b = evolve(&PolyHamiltonian::new(&h, 1).unwrap(), &w, 0.5, 0.01).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-10);
    }

    #[test]
    fn free_particle_shear_matches_characteristics() {
        let g = PhaseGrid::new(128, 128, (-10.0, 10.0), (-6.0, 6.0)).unwrap();
        let w0 = |q: f64, p: f64| C64::new((-(q * q + p * p) / (4.0 * 0.36)).exp(), 0.0);
        let w = KvNWave::from_fn(g, w0);
        let t = 1.0;
        let out = evolve(&ham("p1^2/2"), &w, t, 2e-3).unwrap();
        let oracle = characteristics(g, w0, |q, p| (q - p * t, p));
        assert!(out.distance(&oracle).unwrap() < 1e-6, "{}", out.distance(&oracle).unwrap());
    }

    #[test]
    fn numeric_characteristics_agree_for_pendulum() {
        let g = PhaseGrid::square(128, 8.0).unwrap();
        let w0 = |q: f64, p: f64| C64::new((-((q - 0.5).powi(2) + p * p) / (4.0 * 0.09)).exp(), 0.0);
        let h = crate::dynamics::Pendulum::default();
        let out = evolve(&h, &KvNWave::from_fn(g, w0), 1.0, 5e-3).unwrap();
        let oracle = characteristics_numeric(&h, g, w0, 1.0, 1e-2).unwrap();
        assert!(out.distance(&oracle).unwrap() < 1e-5, "{}", out.distance(&oracle).unwrap());
    }

    #[test]
    fn cfl_and_wrap_guards() {
        let g = PhaseGrid::square(32, 4.0).unwrap();
        let w = KvNWave::gaussian(g, (0.0, 0.0), 0.5);
        assert!(matches!(evolve(&ham("p1^2/2"), &w, 1.0, 0.5), Err(KvnError::Cfl(_))));
        let w = KvNWave::gaussian(g, (0.0, 2.0), 0.4);
        assert!(matches!(evolve(&ham("p1^2/2"), &w, 3.0, 0.01), Err(KvnError::Wrap { .. })));
        assert!(matches!(PhaseGrid::square(24, 1.0), Err(KvnError::GridSize(24, 24))));
    }

    #[test]
    fn dump_round_trip() {
        let g = PhaseGrid::new(8, 16, (-1.0, 1.0), (-2.0, 3.0)).unwrap();
        let w = KvNWave::from_fn(g, |q, p| C64::new(q, p * q));
        let mut buf = Vec::new();
        w.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * (7 + 2 * 128));
        assert_eq!(u64::from_le_bytes(buf[..8].try_into().unwrap()), 8);
        assert_eq!(KvNWave::read_dump(&buf).unwrap(), w);
        assert_eq!(KvNWave::read_dump(&buf[..40]), Err(KvnError::Dump));
    }

    #[test]
    fn top_form_scales_by_inverse_determinant() {
        let h = crate::dynamics::Pendulum::default();
        let reg = form_registry(1);
        let one = GrassmannElement::scalar(&reg, C64::new(3.0, 0.0));
        let top = GrassmannElement::product_of(&reg, &[0, 1]).unwrap();
        let c1 = GrassmannElement::generator(&reg, 0).unwrap();
        let form = &(&one + &top) + &c1;
        let (_, moved) = transport_forms(&h, &[0.8, 0.1], &form, 2.0, 1e-3).unwrap();
        assert!((moved.body() - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((moved.coefficient(0b11) - C64::new(1.0, 0.0)).norm() < 1e-9);
        let (_, m) = flow_with_jacobian(&h, &[0.8, 0.1], 2.0, 1e-3).unwrap();
        // c0^1 = (M⁻¹)^1_b c^b, and M⁻¹ = [[m11, −m01], [−m10, m00]] for det M = 1
        assert!((moved.coefficient(0b01).re - m[1][1]).abs() < 1e-9);
        assert!((moved.coefficient(0b10).re + m[0][1]).abs() < 1e-9);
    }
}
