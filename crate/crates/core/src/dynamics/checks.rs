use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use super::state::{evolve, integrate, omega_sign, partner, ExtendedState, FlowResult};
use super::{DynamicsError, Hamiltonian};
use crate::grassmann::{GeneratorRegistry, GrassmannElement};

/// `φ_cl(t; φ0)`.
pub fn flow_map<T: Float>(h: &dyn Hamiltonian<T>, phi0: &[T], t: T, dt: T) -> Result<Vec<T>, DynamicsError> {
    Ok(evolve(h, &ExtendedState::point(phi0), t, dt)?.phi().to_vec())
}

/// `φ_cl(t; φ0)` and the Jacobi propagator `M^a_b = ∂φ^a(t)/∂φ0^b`
/// obtained by transporting the identity ghost frame.
pub fn flow_with_jacobian<T: Float>(
    h: &dyn Hamiltonian<T>,
    phi0: &[T],
    t: T,
    dt: T,
) -> Result<(Vec<T>, Vec<Vec<T>>), DynamicsError> {
    let s = evolve(h, &ExtendedState::with_jacobi_frame(phi0), t, dt)?;
    let dim = s.dim();
    let m = (0..dim).map(|a| (0..dim).map(|b| s.c(a, b)).collect()).collect();
    Ok((s.phi().to_vec(), m))
}

/// Determinant of a small dense matrix.
pub fn determinant<T: Float>(m: &[Vec<T>]) -> f64 {
    let d = m.len();
    let mat = DMatrix::from_fn(d, d, |i, j| m[i][j].to_f64().unwrap_or(f64::NAN));
    mat.determinant()
}

/// Max-norm difference between the transported ghost `c(t)` with
/// `c(0) = v` and the finite difference `[φ_cl(t; φ0 + hv) − φ_cl(t; φ0)]/h`.
pub fn jacobi_check<T: Float>(
    ham: &dyn Hamiltonian<T>,
    phi0: &[T],
    v: &[T],
    t: T,
    h: T,
    dt: T,
) -> Result<T, DynamicsError> {
    if phi0.len() != v.len() || phi0.len() != 2 * ham.dof() {
        return Err(DynamicsError::DimensionMismatch);
    }
    let dim = phi0.len();
    let zero_rows = vec![vec![T::zero(); 1]; dim];
    let c0: Vec<Vec<T>> = v.iter().map(|x| vec![*x]).collect();
    let s0 = ExtendedState::new(phi0, &vec![T::zero(); dim], &c0, &zero_rows)?;
    let s = evolve(ham, &s0, t, dt)?;
    let shifted: Vec<T> = phi0.iter().zip(v).map(|(x, y)| *x + h * *y).collect();
    let base = flow_map(ham, phi0, t, dt)?;
    let moved = flow_map(ham, &shifted, t, dt)?;
    let mut err = T::zero();
    for a in 0..dim {
        let fd = (moved[a] - base[a]) / h;
        err = err.max((fd - s.c(a, 0)).abs());
    }
    Ok(err)
}

/// Real odd basis `e1..ek` used to express ghost values.
pub fn odd_basis(k: usize) -> Arc<GeneratorRegistry> {
    GeneratorRegistry::real((1..=k).map(|j| format!("e{j}"))).expect("distinct names")
}

type G = GrassmannElement<Complex<f64>>;

/// Values of the conserved charges at a state, as Grassmann elements over
/// `basis` (which must have `s.basis_size()` generators).
pub fn charge_values<T: Float>(
    ham: &dyn Hamiltonian<T>,
    s: &ExtendedState<T>,
    basis: &Arc<GeneratorRegistry>,
) -> Result<Vec<(&'static str, G)>, DynamicsError> {
    let n = s.n();
    let dim = s.dim();
    let k = s.basis_size();
    if basis.len() != k || ham.dof() != n {
        return Err(DynamicsError::DimensionMismatch);
    }
    if k > 0 && ham.order() < 2 {
        return Err(DynamicsError::DerivativeOrder(2));
    }
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let re = |x: f64| Complex::new(x, 0.0);
    let i = Complex::new(0.0, 1.0);
    let zero = G::zero(basis);
    let odd = |coeff: &dyn Fn(usize) -> T| {
        let mut g = zero.clone();
        for j in 0..k {
            g = g + G::monomial(basis, 1u64 << j, re(f(coeff(j))));
        }
        g
    };
    let c: Vec<G> = (0..dim).map(|a| odd(&|j| s.c(a, j))).collect();
    let cbar: Vec<G> = (0..dim).map(|a| odd(&|j| s.cbar(a, j))).collect();
    let lambda: Vec<G> = (0..dim)
        .map(|a| {
            let mut g = G::scalar(basis, re(f(s.lambda()[a])));
            for j in 0..k {
                for l in 0..k {
                    let e = G::generator(basis, j).expect("in basis") * G::generator(basis, l).expect("in basis");
                    g = g + e.scale(&(i * f(s.soul(a, j, l))));
                }
            }
            g
        })
        .collect();
    let phi = s.phi();
    let mut grad = vec![T::zero(); dim];
    let mut hess = vec![T::zero(); dim * dim];
    ham.gradient(phi, &mut grad);
    if ham.order() >= 2 {
        ham.hessian(phi, &mut hess);
    }
    let w = |a: usize| -> f64 { f(omega_sign::<T>(a, n)) };
    let (mut q_brs, mut q_brs_bar, mut n_c, mut n_bar) = (zero.clone(), zero.clone(), zero.clone(), zero.clone());
    let (mut kk, mut kk_bar, mut q_g, mut h_tilde) = (zero.clone(), zero.clone(), zero.clone(), zero.clone());
    for a in 0..dim {
        let b = partner(a, n);
        let wab = re(w(a));
        q_brs = q_brs + (&c[a] * &lambda[a]).scale(&i);
        q_brs_bar = q_brs_bar + (&cbar[a] * &lambda[b]).scale(&(i * wab));
        n_c = n_c + c[a].scale(&re(f(grad[a])));
        n_bar = n_bar + cbar[a].scale(&(wab * f(grad[b])));
        // ω_{ab} = −ω^{ab}
        kk = kk + (&c[a] * &c[b]).scale(&(-wab * 0.5));
        kk_bar = kk_bar + (&cbar[a] * &cbar[b]).scale(&(wab * 0.5));
        q_g = q_g + &c[a] * &cbar[a];
        h_tilde = h_tilde + lambda[a].scale(&(wab * f(grad[b])));
        for d in 0..dim {
            let hbd = f(hess[b * dim + d]);
            if hbd != 0.0 {
                h_tilde = h_tilde + (&cbar[a] * &c[d]).scale(&(i * wab * hbd));
            }
        }
    }
    let q_h = &q_brs - &n_c;
    let q_h_bar = &q_brs_bar + &n_bar;
    Ok(vec![
        ("Q_BRS", q_brs),
        ("Qbar_BRS", q_brs_bar),
        ("Q_H", q_h),
        ("Qbar_H", q_h_bar),
        ("K", kk),
        ("Kbar", kk_bar),
        ("Q_g", q_g),
        ("N", n_c),
        ("Nbar", n_bar),
        ("H_tilde", h_tilde),
    ])
}

/// Largest coefficient change of any charge between the first and every
/// later recorded state of a flow.
pub fn charge_drift<T: Float>(
    ham: &dyn Hamiltonian<T>,
    flow: &FlowResult<T>,
    basis: &Arc<GeneratorRegistry>,
) -> Result<Vec<(&'static str, f64)>, DynamicsError> {
    let start = charge_values(ham, &flow.states[0], basis)?;
    let mut worst: Vec<(&'static str, f64)> = start.iter().map(|(n, _)| (*n, 0.0)).collect();
    for s in &flow.states[1..] {
        let now = charge_values(ham, s, basis)?;
        for (slot, ((_, a), (_, b))) in worst.iter_mut().zip(start.iter().zip(&now)) {
            let diff = a - b;
            let m = diff.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            slot.1 = slot.1.max(m);
        }
    }
    Ok(worst)
}

/// The CPI kernel `δ(φ − φ_cl(t; φ0))` represented by its support point
/// and the Jacobian of the flow.
#[derive(Clone, Debug)]
pub struct CpiKernel<T> {
    pub phi0: Vec<T>,
    pub t: T,
    pub support: Vec<T>,
    pub jacobian: Vec<Vec<T>>,
}

impl<T: Float> CpiKernel<T> {
    /// Kernel with the delta replaced by a normalised isotropic Gaussian
    /// of width `sigma`.
    pub fn mollified(&self, phi: &[T], sigma: T) -> T {
        gaussian(phi, &self.support, sigma)
    }
}

fn gaussian<T: Float>(x: &[T], centre: &[T], sigma: T) -> T {
    let d = x.len() as i32;
    let two = T::one() + T::one();
    let r2 = x.iter().zip(centre).fold(T::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
    let norm = (two * T::from(std::f64::consts::PI).expect("pi") * sigma * sigma).powi(d).sqrt();
    (-r2 / (two * sigma * sigma)).exp() / norm
}

pub fn cpi_kernel<T: Float>(ham: &dyn Hamiltonian<T>, phi0: &[T], t: T, dt: T) -> Result<CpiKernel<T>, DynamicsError> {
    let (support, jacobian) = flow_with_jacobian(ham, phi0, t, dt)?;
    Ok(CpiKernel {
        phi0: phi0.to_vec(),
        t,
        support,
        jacobian,
    })
}

/// `∫ dφ0 K_σ(φ, t | φ0)` by the trapezoid rule on a box of initial
/// points, `points` nodes per axis. Equals one when the flow preserves
/// phase-space volume and the box contains the preimage of the blob.
pub fn kernel_mass<T: Float>(
    ham: &dyn Hamiltonian<T>,
    phi: &[T],
    t: T,
    sigma: T,
    lo: &[T],
    hi: &[T],
    points: usize,
    dt: T,
) -> Result<T, DynamicsError> {
    let dim = phi.len();
    if lo.len() != dim || hi.len() != dim || points < 2 {
        return Err(DynamicsError::DimensionMismatch);
    }
    let steps: Vec<T> = (0..dim)
        .map(|a| (hi[a] - lo[a]) / T::from(points - 1).expect("count"))
        .collect();
    let total = points.pow(dim as u32);
    let mut sum = T::zero();
    let mut x = vec![T::zero(); dim];
    for flat in 0..total {
        let mut rest = flat;
        let mut weight = T::one();
        for a in 0..dim {
            let idx = rest % points;
            rest /= points;
            x[a] = lo[a] + steps[a] * T::from(idx).expect("index");
            let half = T::one() / (T::one() + T::one());
            weight = weight * steps[a] * if idx == 0 || idx == points - 1 { half } else { T::one() };
        }
        let end = flow_map(ham, &x, t, dt)?;
        sum = sum + weight * gaussian(phi, &end, sigma);
    }
    Ok(sum)
}

/// Writes a trajectory as CSV: `t`, `φ`, `λ` (body), ghost coefficients
/// and, per charge, the body and the largest soul coefficient modulus.
pub fn write_trajectory_csv<T: Float, W: Write>(
    mut out: W,
    ham: &dyn Hamiltonian<T>,
    flow: &FlowResult<T>,
) -> Result<(), DynamicsError> {
    let s0 = &flow.states[0];
    let (dim, k) = (s0.dim(), s0.basis_size());
    let basis = odd_basis(k);
    let names = charge_values(ham, s0, &basis)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|a| format!("phi{a}")));
    header.extend((0..dim).map(|a| format!("lambda{a}")));
    for a in 0..dim {
        header.extend((0..k).map(|j| format!("c{a}_{j}")));
    }
    for a in 0..dim {
        header.extend((0..k).map(|j| format!("cbar{a}_{j}")));
    }
    for (name, _) in &names {
        header.push(format!("{name}_body_re"));
        header.push(format!("{name}_body_im"));
        header.push(format!("{name}_soul_max"));
    }
    writeln!(out, "{}", header.join(","))?;
    let g = |x: T| x.to_f64().unwrap_or(f64::NAN);
    for (t, s) in flow.times.iter().zip(&flow.states) {
        let mut row = vec![format!("{:.17e}", g(*t))];
        row.extend(s.phi().iter().map(|x| format!("{:.17e}", g(*x))));
        row.extend(s.lambda().iter().map(|x| format!("{:.17e}", g(*x))));
        for a in 0..dim {
            row.extend((0..k).map(|j| format!("{:.17e}", g(s.c(a, j)))));
        }
        for a in 0..dim {
            row.extend((0..k).map(|j| format!("{:.17e}", g(s.cbar(a, j)))));
        }
        for (_, v) in charge_values(ham, s, &basis)? {
            let body = v.body();
            let soul = v.soul().terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            row.push(format!("{:.17e}", body.re));
            row.push(format!("{:.17e}", body.im));
            row.push(format!("{:.17e}", soul));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Flow of `φ` alone, recorded every `stride` steps.
pub fn trajectory<T: Float>(
    ham: &dyn Hamiltonian<T>,
    phi0: &[T],
    t: T,
    dt: T,
    stride: usize,
) -> Result<FlowResult<T>, DynamicsError> {
    integrate(ham, &ExtendedState::point(phi0), T::zero(), t, dt, stride)
}
