use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::CoherentError;
use crate::C64;

/// Truncated Fock space of one or two bosonic modes, `D` levels per mode.
/// Two-mode operators act on `C^D ⊗ C^D` with index `m·D + n`; mode 0 is
/// `(q, λ_q)` and mode 1 is `(p, λ_p)`.
#[derive(Clone, Debug)]
pub struct FockSpace {
    dim: usize,
    modes: usize,
    ladder: DMatrix<C64>,
}

impl FockSpace {
    pub fn new(dim: usize, modes: usize) -> Result<Self, CoherentError> {
        if dim < 8 {
            return Err(CoherentError::Dimension(dim));
        }
        if !(1..=2).contains(&modes) {
            return Err(CoherentError::Modes(modes));
        }
        Ok(FockSpace {
            dim,
            modes,
            ladder: ladder(dim),
        })
    }

    /// Levels per mode.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Dimension of the full space.
    pub fn total_dim(&self) -> usize {
        self.dim.pow(self.modes as u32)
    }

    fn embed(&self, op: &DMatrix<C64>, mode: usize) -> DMatrix<C64> {
        let id = DMatrix::<C64>::identity(self.dim, self.dim);
        match (self.modes, mode) {
            (1, _) => op.clone(),
            (_, 0) => op.kronecker(&id),
            _ => id.kronecker(op),
        }
    }

    /// `â` of the given mode.
    pub fn annihilation(&self, mode: usize) -> DMatrix<C64> {
        self.embed(&self.ladder, mode)
    }

    pub fn creation(&self, mode: usize) -> DMatrix<C64> {
        self.annihilation(mode).adjoint()
    }

    /// `(â + â†)/√2`: `q̂` or `p̂` in the classical pair, `q̂/√ℏ` for the
    /// quantum mode.
    pub fn position(&self, mode: usize) -> DMatrix<C64> {
        let a = self.annihilation(mode);
        (&a + a.adjoint()) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    /// `(â − â†)/(i√2)`: `λ̂_q` or `λ̂_p`, `p̂/√ℏ` for the quantum mode.
    pub fn momentum(&self, mode: usize) -> DMatrix<C64> {
        let a = self.annihilation(mode);
        (&a - a.adjoint()) * C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)
    }

    /// Indices whose occupations are all below `D/2`, in increasing order.
    pub fn guarded_block(&self) -> Vec<usize> {
        let half = self.dim / 2;
        (0..self.total_dim())
            .filter(|&i| match self.modes {
                1 => i < half,
                _ => i / self.dim < half && i % self.dim < half,
            })
            .collect()
    }
}

/// `â|k⟩ = √k |k−1⟩` on `D` levels.
fn ladder(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Restricts a square matrix to the given rows and columns.
pub fn block(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Single-mode displacement `exp(zâ† − z*â)` through the spectral
/// decomposition of `i(â† − â)` and the phase rotation `e^{iφn̂}`:
/// `D(re^{iφ}) = e^{iφn̂} exp(r(â† − â)) e^{−iφn̂}`.
#[derive(Clone, Debug)]
pub(crate) struct Displacer {
    dim: usize,
    vectors: DMatrix<C64>,
    values: DVector<f64>,
    /// `W†|0⟩`
    vacuum: DVector<C64>,
}

impl Displacer {
    pub(crate) fn new(dim: usize) -> Self {
        let a = ladder(dim);
        let gen = (a.adjoint() - &a) * C64::new(0.0, 1.0);
        let eig = SymmetricEigen::new(gen);
        let vacuum = eig.eigenvectors.row(0).adjoint();
        Displacer {
            dim,
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
            vacuum,
        }
    }

    fn radial(&self, r: f64) -> DVector<C64> {
        let phased = DVector::from_fn(self.dim, |k, _| C64::new(0.0, -r * self.values[k]).exp() * self.vacuum[k]);
        &self.vectors * phased
    }

    /// `exp(zâ† − z*â)|0⟩`
    pub(crate) fn vacuum_image(&self, z: C64) -> DVector<C64> {
        let (r, phi) = z.to_polar();
        let mut v = self.radial(r);
        for (k, x) in v.iter_mut().enumerate() {
            *x *= C64::new(0.0, k as f64 * phi).exp();
        }
        v
    }

    pub(crate) fn matrix(&self, z: C64) -> DMatrix<C64> {
        let (r, phi) = z.to_polar();
        let diag = DMatrix::from_diagonal(&self.values.map(|m| C64::new(0.0, -r * m).exp()));
        let core = &self.vectors * diag * self.vectors.adjoint();
        DMatrix::from_fn(self.dim, self.dim, |i, j| core[(i, j)] * C64::new(0.0, (i as f64 - j as f64) * phi).exp())
    }
}

/// Eigenstate of the annihilators of a [`FockSpace`], unit norm.
#[derive(Clone, Debug)]
pub struct CoherentState {
    /// One eigenvalue per mode.
    pub z: Vec<C64>,
    pub dim: usize,
    pub coeffs: DVector<C64>,
}

impl CoherentState {
    /// `⟨self|other⟩`
    pub fn inner(&self, other: &CoherentState) -> C64 {
        self.coeffs.dotc(&other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// `max_mode ‖(â_mode − z_mode)|z⟩‖`
    pub fn eigen_residual(&self, fock: &FockSpace) -> f64 {
        self.z
            .iter()
            .enumerate()
            .map(|(mode, &z)| (fock.annihilation(mode) * &self.coeffs - &self.coeffs * z).norm())
            .fold(0.0, f64::max)
    }
}

/// `|z|^D / √((D−1)!)`, the bound on the truncated eigenvalue residual.
pub fn truncation_tail(z: C64, dim: usize) -> f64 {
    let log_fact: f64 = (1..dim).map(|k| (k as f64).ln()).sum();
    (dim as f64 * z.norm().ln() - 0.5 * log_fact).exp()
}

fn guard(z: C64, dim: usize) -> Result<(), CoherentError> {
    if dim < 8 {
        return Err(CoherentError::Dimension(dim));
    }
    if z.norm_sqr() > dim as f64 / 2.0 || !z.norm().is_finite() {
        return Err(CoherentError::Truncation { z2: z.norm_sqr(), dim });
    }
    Ok(())
}

/// `|z⟩ = exp(zâ† − z*â)|0⟩` in `D` levels. Rejects `|z|² > D/2`.
pub fn coherent_state(z: C64, dim: usize) -> Result<CoherentState, CoherentError> {
    guard(z, dim)?;
    Ok(CoherentState {
        z: vec![z],
        dim,
        coeffs: Displacer::new(dim).vacuum_image(z),
    })
}

/// `e^{−|z|²/2} Σ_k z^k/√k! |k⟩`, truncated and renormalised.
pub fn power_series_state(z: C64, dim: usize) -> DVector<C64> {
    let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
    let mut term = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..dim {
        v[k] = term;
        term = term * z / ((k + 1) as f64).sqrt();
    }
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Displacement operator matrix `exp(zâ† − z*â)` on `D` levels.
pub fn displacement(z: C64, dim: usize) -> Result<DMatrix<C64>, CoherentError> {
    guard(z, dim)?;
    Ok(Displacer::new(dim).matrix(z))
}

/// Simultaneous eigenstate of `â_q`, `â_p`: the bosonic part of `U[Q,P]`
/// acting on the two-mode vacuum. The two modes commute, so the
/// exponential factorises into a Kronecker product.
pub fn classical_coherent_pair(zq: C64, zp: C64, dim: usize) -> Result<CoherentState, CoherentError> {
    guard(zq, dim)?;
    guard(zp, dim)?;
    let d = Displacer::new(dim);
    Ok(CoherentState {
        z: vec![zq, zp],
        dim,
        coeffs: d.vacuum_image(zq).kronecker(&d.vacuum_image(zp)),
    })
}

/// `iλ_q q̂ + iλ_p p̂ − iq λ̂_q − ip λ̂_p` on a two-mode space.
pub fn displacement_generator(fock: &FockSpace, q: f64, lambda_q: f64, p: f64, lambda_p: f64) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    fock.position(0) * (i * lambda_q) + fock.position(1) * (i * lambda_p)
        - fock.momentum(0) * (i * q)
        - fock.momentum(1) * (i * p)
}

/// `z = (q + ip)/√(2ℏ)`
pub fn quantum_z(q: f64, p: f64, hbar: f64) -> C64 {
    C64::new(q, p) / (2.0 * hbar).sqrt()
}

/// Inverse of [`quantum_z`].
pub fn quantum_qp(z: C64, hbar: f64) -> (f64, f64) {
    let w = z * (2.0 * hbar).sqrt();
    (w.re, w.im)
}

/// `z = (φ + iλ)/√2` for either classical mode.
pub fn classical_z(phi: f64, lambda: f64) -> C64 {
    C64::new(phi, lambda) * std::f64::consts::FRAC_1_SQRT_2
}

/// Inverse of [`classical_z`].
pub fn classical_phase(z: C64) -> (f64, f64) {
    let w = z * std::f64::consts::SQRT_2;
    (w.re, w.im)
}

/// Closed form of `⟨z^q_j, z^p_j | z^q_{j−1}, z^p_{j−1}⟩`.
pub fn scalar_product_formula(zq1: C64, zp1: C64, zq0: C64, zp0: C64) -> C64 {
    let mode = |a: C64, b: C64| -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b;
    (mode(zq1, zq0) + mode(zp1, zp0)).exp()
}

/// Gauss-Legendre nodes and weights on `[lo, hi]` (Golub-Welsch).
fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let half = (hi - lo) / 2.0;
    (0..n)
        .map(|i| {
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            (lo + half * (eig.eigenvalues[i] + 1.0), w * half)
        })
        .collect()
}

/// Resolution of the identity on the guarded block.
#[derive(Clone, Debug)]
pub struct Completeness {
    /// `(1/π)∫d²z |z⟩⟨z|` on the lower `D/2` levels of one mode.
    pub single: DMatrix<C64>,
    /// Operator-norm deviation from the identity of the single-mode block.
    pub single_deviation: f64,
    /// Same for `(1/π²)∫d²z^q d²z^p`, the Kronecker square of `single`.
    pub pair_deviation: f64,
}

/// Polar quadrature of the resolution of the identity: Gauss-Legendre in
/// `u = |z|²` over `[0, 2D]`, `D` equally spaced angles. The states are
/// computed in `4D` levels so that the truncation guard holds at every
/// node.
pub fn completeness(dim: usize) -> Result<Completeness, CoherentError> {
    if dim < 8 {
        return Err(CoherentError::Dimension(dim));
    }
    let work = 4 * dim;
    let half = dim / 2;
    let angles = dim;
    let d = Displacer::new(work);
    let mut single = DMatrix::<C64>::zeros(half, half);
    for (u, wu) in gauss_legendre(128, 0.0, 2.0 * dim as f64) {
        let radial = d.radial(u.sqrt());
        for s in 0..angles {
            let phi = 2.0 * std::f64::consts::PI * s as f64 / angles as f64;
            // d²z = ½ du dφ
            let w = wu * 0.5 * (2.0 * std::f64::consts::PI / angles as f64) / std::f64::consts::PI;
            let v: Vec<C64> = (0..half).map(|k| radial[k] * C64::new(0.0, k as f64 * phi).exp()).collect();
            for m in 0..half {
                for n in 0..half {
                    single[(m, n)] += v[m] * v[n].conj() * w;
                }
            }
        }
    }
    let id = DMatrix::<C64>::identity(half, half);
    let single_deviation = hermitian_norm(&(&single - &id));
    let pair = single.kronecker(&single);
    let pair_deviation = hermitian_norm(&(pair - DMatrix::<C64>::identity(half * half, half * half)));
    Ok(Completeness {
        single,
        single_deviation,
        pair_deviation,
    })
}

fn hermitian_norm(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
