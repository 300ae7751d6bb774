use nalgebra::{DMatrix, DVector};

use super::quantum::SmoothCurrent;
use super::PathintError;
use crate::dynamics::{determinant, flow_with_jacobian, Hamiltonian};
use crate::C64;

/// `N` composed single-slice flows of the CPI kernel.
#[derive(Clone, Debug)]
pub struct SlicedFlow {
    pub phi: Vec<f64>,
    /// Jacobi matrix of every slice.
    pub slice_jacobians: Vec<Vec<Vec<f64>>>,
    /// Product of the slice Jacobians, last slice leftmost.
    pub jacobian: Vec<Vec<f64>>,
    /// `Π_n det M_n`
    pub det_product: f64,
}

/// Composes `N` slices of length `t/N`, each the delta propagation
/// `φ_n = φ_cl(ε; φ_{n−1})` with its Jacobi matrix.
pub fn cpi_sliced_kernel(
    h: &dyn Hamiltonian<f64>,
    phi0: &[f64],
    t: f64,
    slices: usize,
    dt: f64,
) -> Result<SlicedFlow, PathintError> {
    if slices == 0 || !(t >= 0.0) {
        return Err(PathintError::BadParameters);
    }
    let dim = phi0.len();
    let eps = t / slices as f64;
    let mut phi = phi0.to_vec();
    let mut total = DMatrix::<f64>::identity(dim, dim);
    let mut slice_jacobians = Vec::with_capacity(slices);
    let mut det_product = 1.0;
    for _ in 0..slices {
        let (next, m) = flow_with_jacobian(h, &phi, eps, dt.min(eps.max(f64::MIN_POSITIVE)))?;
        det_product *= determinant(&m);
        total = DMatrix::from_fn(dim, dim, |i, j| m[i][j]) * total;
        slice_jacobians.push(m);
        phi = next;
    }
    let jacobian = (0..dim).map(|i| (0..dim).map(|j| total[(i, j)]).collect()).collect();
    Ok(SlicedFlow {
        phi,
        slice_jacobians,
        jacobian,
        det_product,
    })
}

/// Classical Dyson-Schwinger residual on the driven path.
#[derive(Clone, Debug)]
pub struct ClassicalDs {
    pub eps: f64,
    /// `φ_J` at `t_0..t_N`.
    pub path: Vec<Vec<f64>>,
    /// `Z_CM = exp(i Σ_n ε J_a(t_n) φ_J^a(t_n))`
    pub z: C64,
    /// Residual rows for `n = 0..N−1`, already multiplied by `Z_CM`.
    pub rows: Vec<Vec<C64>>,
    pub max_norm: f64,
}

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX: usize = 50;

fn omega_times(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    (0..2 * n).map(|a| if a < n { v[a + n] } else { -v[a - n] }).collect()
}

/// Solves `φ̇ = ω(∇H − J)` by backward Euler with a Newton iteration per
/// step, then evaluates the forward-difference residual
/// `(φ_{n+1} − φ_n)/ε − ω^{ab}∂_bH(φ_n) + ω^{ab}J_b(t_n)` times `Z_CM`.
pub fn ds_residual_classical(
    h: &dyn Hamiltonian<f64>,
    phi0: &[f64],
    t: f64,
    slices: usize,
    current: &SmoothCurrent,
) -> Result<ClassicalDs, PathintError> {
    let dim = phi0.len();
    if slices == 0 || !(t > 0.0) || dim != 2 * h.dof() {
        return Err(PathintError::BadParameters);
    }
    if current.components() != dim {
        return Err(PathintError::CurrentMismatch);
    }
    let eps = t / slices as f64;
    let jv = |s: usize| -> Vec<f64> { (0..dim).map(|a| current.at(a, s as f64 * eps)).collect() };
    let mut path = vec![phi0.to_vec()];
    let mut grad = vec![0.0; dim];
    let mut hess = vec![0.0; dim * dim];
    for s in 1..=slices {
        let prev = path[s - 1].clone();
        let j = jv(s);
        let mut y = prev.clone();
        let mut converged = false;
        for _ in 0..NEWTON_MAX {
            h.gradient(&y, &mut grad);
            let force: Vec<f64> = grad.iter().zip(&j).map(|(g, j)| g - j).collect();
            let w = omega_times(&force);
            let f = DVector::from_fn(dim, |a, _| y[a] - prev[a] - eps * w[a]);
            let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if f.amax() <= NEWTON_TOL * scale {
                converged = true;
                break;
            }
            h.hessian(&y, &mut hess);
            // ∂(ωH'')^a_c = ω^{ab} H_{bc}
            let jac = DMatrix::from_fn(dim, dim, |a, c| {
                let row: Vec<f64> = (0..dim).map(|b| hess[b * dim + c]).collect();
                let wa = omega_times(&row)[a];
                (if a == c { 1.0 } else { 0.0 }) - eps * wa
            });
            let step = jac.lu().solve(&f).ok_or(PathintError::NewtonFailed(s))?;
            for a in 0..dim {
                y[a] -= step[a];
            }
        }
        if !converged || y.iter().any(|v| !v.is_finite()) {
            return Err(PathintError::NewtonFailed(s));
        }
        path.push(y);
    }
    let mut phase = 0.0;
    for (s, x) in path.iter().enumerate().skip(1) {
        phase += eps * jv(s).iter().zip(x).map(|(j, x)| j * x).sum::<f64>();
    }
    let z = C64::new(0.0, phase).exp();
    let mut rows = Vec::with_capacity(slices);
    for s in 0..slices {
        h.gradient(&path[s], &mut grad);
        let force: Vec<f64> = grad.iter().zip(jv(s)).map(|(g, j)| g - j).collect();
        let w = omega_times(&force);
        rows.push(
            (0..dim)
                .map(|a| z * ((path[s + 1][a] - path[s][a]) / eps - w[a]))
                .collect(),
        );
    }
    let max_norm = rows.iter().flatten().map(|v: &C64| v.norm()).fold(0.0, f64::max);
    Ok(ClassicalDs {
        eps,
        path,
        z,
        rows,
        max_norm,
    })
}
