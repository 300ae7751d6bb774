use num_complex::Complex;
use rand::{Rng, SeedableRng};

use super::gaussian::GaussianForm;
use super::PathintError;
use crate::scalar::rational_to_f64;
use crate::symexpr::{Monomial, Var};
use crate::{Poly, C64};

/// `H = ½a p² + b pq + ½c q² + d p + e q + f` in one degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl QuadraticHamiltonian {
    /// `p²/(2m)`
    pub fn free(m: f64) -> Self {
        Self::oscillator(m, 0.0)
    }

    /// `p²/(2m) + mω²q²/2`
    pub fn oscillator(m: f64, omega: f64) -> Self {
        QuadraticHamiltonian {
            a: 1.0 / m,
            b: 0.0,
            c: m * omega * omega,
            d: 0.0,
            e: 0.0,
            f: 0.0,
        }
    }

    /// Reads the coefficients of a polynomial of degree at most two in
    /// `q1, p1`.
    pub fn from_poly(h: &Poly) -> Result<Self, PathintError> {
        for v in h.vars() {
            if v != Var::q(1) && v != Var::p(1) {
                return Err(PathintError::NotQuadratic(format!("symbol {}", v.name())));
            }
        }
        if h.degree() > 2 {
            return Err(PathintError::NotQuadratic(format!("degree {}", h.degree())));
        }
        let k = |powers: &[(Var, u32)]| rational_to_f64(&h.coefficient(&Monomial::from_powers(powers.iter().copied())));
        let (q, p) = (Var::q(1), Var::p(1));
        Ok(QuadraticHamiltonian {
            a: 2.0 * k(&[(p, 2)]),
            b: k(&[(p, 1), (q, 1)]),
            c: 2.0 * k(&[(q, 2)]),
            d: k(&[(p, 1)]),
            e: k(&[(q, 1)]),
            f: k(&[]),
        })
    }

    pub fn value(&self, p: f64, q: f64) -> f64 {
        0.5 * self.a * p * p + self.b * p * q + 0.5 * self.c * q * q + self.d * p + self.e * q + self.f
    }

    /// `(∂_pH, ∂_qH)`
    pub fn gradient(&self, p: f64, q: f64) -> (f64, f64) {
        (self.a * p + self.b * q + self.d, self.b * p + self.c * q + self.e)
    }
}

/// Which set of boundary values labels the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    /// `⟨q, t | q0⟩`: action `Σ [p_n(q_n − q_{n−1}) − εH]`, all `p_n`
    /// integrated.
    Coordinate,
    /// `⟨p, t | p0⟩`: action `Σ [−q_n(p_n − p_{n−1}) − εH]`, all `q_n`
    /// integrated.
    Momentum,
}

/// Where the Hamiltonian is sampled on each slice.
///
/// `Standard` uses `H(p_n, q_n)` in both polarizations. `Dual` uses
/// `H(p_n, q_{n−1})` for coordinates and `H(p_{n−1}, q_n)` for momenta.
/// The double Fourier transform of the coordinate kernel with one rule is
/// exactly the momentum kernel with the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slicing {
    Standard,
    Dual,
}

impl Slicing {
    pub fn dual(self) -> Self {
        match self {
            Slicing::Standard => Slicing::Dual,
            Slicing::Dual => Slicing::Standard,
        }
    }
}

/// Smooth source `J_a(t) = Σ_k α_{ak} sin(kπt/T) + β_{ak} cos(kπt/T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothCurrent {
    pub period: f64,
    /// `modes[a][k] = (α, β)`
    pub modes: Vec<Vec<(f64, f64)>>,
}

impl SmoothCurrent {
    pub fn zero(components: usize) -> Self {
        SmoothCurrent {
            period: 1.0,
            modes: vec![Vec::new(); components],
        }
    }

    /// Uniform random amplitudes in `[−amplitude, amplitude]`.
    pub fn random(seed: u64, components: usize, modes: usize, period: f64, amplitude: f64) -> Self {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let modes = (0..components)
            .map(|_| {
                (0..modes)
                    .map(|_| (rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude)))
                    .collect()
            })
            .collect();
        SmoothCurrent { period, modes }
    }

    pub fn components(&self) -> usize {
        self.modes.len()
    }

    pub fn at(&self, a: usize, t: f64) -> f64 {
        self.modes[a]
            .iter()
            .enumerate()
            .map(|(k, (s, c))| {
                let w = (k + 1) as f64 * std::f64::consts::PI * t / self.period;
                s * w.sin() + c * w.cos()
            })
            .sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        SmoothCurrent {
            period: self.period,
            modes: self
                .modes
                .iter()
                .map(|m| m.iter().map(|(s, c)| (s * k, c * k)).collect())
                .collect(),
        }
    }

    pub fn plus(&self, other: &SmoothCurrent) -> Result<Self, PathintError> {
        if self.period != other.period || self.components() != other.components() {
            return Err(PathintError::CurrentMismatch);
        }
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(x, y)| {
                let n = x.len().max(y.len());
                (0..n)
                    .map(|k| {
                        let a = x.get(k).copied().unwrap_or((0.0, 0.0));
                        let b = y.get(k).copied().unwrap_or((0.0, 0.0));
                        (a.0 + b.0, a.1 + b.1)
                    })
                    .collect()
            })
            .collect();
        Ok(SmoothCurrent {
            period: self.period,
            modes,
        })
    }
}

/// The `N`-slice discretised action of a quadratic system as a Gaussian
/// form over all slice variables, with the `(2πℏ)^{−1}` momentum measure
/// folded into the constant.
///
/// Variable layout: the labelling variable `x_0..x_N` (`q` or `p`) at
/// indices `0..=N`, the conjugate `y_1..y_N` at `N + 1..=2N`. Boundary
/// values are `x_0` and `x_N`.
#[derive(Clone, Debug)]
pub struct QuadraticAction {
    pub polarization: Polarization,
    pub slicing: Slicing,
    pub slices: usize,
    pub eps: f64,
    pub hbar: f64,
    pub form: GaussianForm,
}

impl QuadraticAction {
    /// `current` couples as `ε Σ_{n=1}^N (J_q(t_n) q_n + J_p(t_n) p_n)`.
    pub fn new(
        h: &QuadraticHamiltonian,
        polarization: Polarization,
        slicing: Slicing,
        slices: usize,
        t: f64,
        hbar: f64,
        current: Option<&SmoothCurrent>,
    ) -> Result<Self, PathintError> {
        if slices == 0 || !(t > 0.0) || !t.is_finite() || !(hbar > 0.0) {
            return Err(PathintError::BadParameters);
        }
        if let Some(j) = current {
            if j.components() != 2 {
                return Err(PathintError::CurrentMismatch);
            }
        }
        let n = slices;
        let eps = t / n as f64;
        let x = |k: usize| k;
        let y = |k: usize| n + k;
        let (qi, pi): (Box<dyn Fn(usize) -> usize>, Box<dyn Fn(usize) -> usize>) = match polarization {
            Polarization::Coordinate => (Box::new(x), Box::new(y)),
            Polarization::Momentum => (Box::new(y), Box::new(x)),
        };
        let mut form = GaussianForm::zero(2 * n + 1);
        let i_h = C64::new(0.0, 1.0 / hbar);
        let bil = |form: &mut GaussianForm, k: f64, u: usize, v: usize| {
            if k != 0.0 {
                form.add_bilinear(i_h * k, u, v)
            }
        };
        for s in 1..=n {
            match polarization {
                Polarization::Coordinate => {
                    bil(&mut form, 1.0, pi(s), qi(s));
                    bil(&mut form, -1.0, pi(s), qi(s - 1));
                }
                Polarization::Momentum => {
                    bil(&mut form, -1.0, qi(s), pi(s));
                    bil(&mut form, 1.0, qi(s), pi(s - 1));
                }
            }
            let (ps, qs) = match (polarization, slicing) {
                (_, Slicing::Standard) => (pi(s), qi(s)),
                (Polarization::Coordinate, Slicing::Dual) => (pi(s), qi(s - 1)),
                (Polarization::Momentum, Slicing::Dual) => (pi(s - 1), qi(s)),
            };
            bil(&mut form, -eps * 0.5 * h.a, ps, ps);
            bil(&mut form, -eps * h.b, ps, qs);
            bil(&mut form, -eps * 0.5 * h.c, qs, qs);
            form.add_linear(i_h * (-eps * h.d), ps);
            form.add_linear(i_h * (-eps * h.e), qs);
            form.c += i_h * (-eps * h.f);
            if let Some(j) = current {
                let ts = s as f64 * eps;
                form.add_linear(i_h * (eps * j.at(0, ts)), qi(s));
                form.add_linear(i_h * (eps * j.at(1, ts)), pi(s));
            }
        }
        let measures = match polarization {
            Polarization::Coordinate => n,
            Polarization::Momentum => n - 1,
        };
        form.c -= C64::new(measures as f64 * (2.0 * std::f64::consts::PI * hbar).ln(), 0.0);
        Ok(QuadraticAction {
            polarization,
            slicing,
            slices,
            eps,
            hbar,
            form,
        })
    }

    /// Index of `q_k` in the form.
    pub fn q_index(&self, k: usize) -> usize {
        match self.polarization {
            Polarization::Coordinate => k,
            Polarization::Momentum => self.slices + k,
        }
    }

    /// Index of `p_k` in the form.
    pub fn p_index(&self, k: usize) -> usize {
        match self.polarization {
            Polarization::Coordinate => self.slices + k,
            Polarization::Momentum => k,
        }
    }

    /// The kernel as a Gaussian in `(x_0, x_N)`, interior variables
    /// integrated out.
    pub fn kernel_form(&self) -> Result<GaussianForm, PathintError> {
        let interior: Vec<usize> = (1..self.slices).chain(self.slices + 1..=2 * self.slices).collect();
        self.form.integrate_out(&interior)
    }

    /// `K(x_N = x1 | x_0 = x0)`.
    pub fn kernel(&self, x0: f64, x1: f64) -> Result<C64, PathintError> {
        Ok(self.form.fix(&[0, self.slices], &[x0, x1]).integrate()?.value())
    }
}

/// `⟨q1, t | q0⟩` with the slicing `Σ [p_n(q_n − q_{n−1}) − εH(p_n, q_n)]`.
pub fn qpi_kernel_q(h: &QuadraticHamiltonian, q0: f64, q1: f64, t: f64, slices: usize, hbar: f64) -> Result<C64, PathintError> {
    QuadraticAction::new(h, Polarization::Coordinate, Slicing::Standard, slices, t, hbar, None)?.kernel(q0, q1)
}

/// `⟨p1, t | p0⟩` with the slicing `Σ [−q_n(p_n − p_{n−1}) − εH(p_n, q_n)]`.
pub fn qpi_kernel_p(h: &QuadraticHamiltonian, p0: f64, p1: f64, t: f64, slices: usize, hbar: f64) -> Result<C64, PathintError> {
    QuadraticAction::new(h, Polarization::Momentum, Slicing::Standard, slices, t, hbar, None)?.kernel(p0, p1)
}

/// `∫dq dq0 e^{−ipq/ℏ} K(q | q0) e^{ip0q0/ℏ}` for a coordinate kernel in
/// Gaussian form over `(q0, q)`.
pub fn fourier_to_momentum(kernel: &GaussianForm, p0: f64, p1: f64, hbar: f64) -> Result<C64, PathintError> {
    if kernel.dim() != 2 {
        return Err(PathintError::BadParameters);
    }
    let mut f = kernel.clone();
    f.add_linear(C64::new(0.0, p0 / hbar), 0);
    f.add_linear(C64::new(0.0, -p1 / hbar), 1);
    Ok(f.integrate()?.value())
}

/// `√(m/(2πiℏt)) exp(im(q − q0)²/(2ℏt))`
pub fn free_propagator(m: f64, hbar: f64, t: f64, q0: f64, q1: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (C64::new(m, 0.0) / (i * 2.0 * std::f64::consts::PI * hbar * t)).sqrt()
        * (i * m * (q1 - q0).powi(2) / (2.0 * hbar * t)).exp()
}

/// Mehler kernel at complex time `τ` (`Im τ ≤ 0`):
/// `√(mω/(2πiℏ sin ωτ)) exp(imω((q² + q0²)cos ωτ − 2qq0)/(2ℏ sin ωτ))`.
pub fn oscillator_propagator_complex(m: f64, omega: f64, hbar: f64, tau: C64, q0: f64, q1: f64) -> Result<C64, PathintError> {
    let i = C64::new(0.0, 1.0);
    let s = (tau * omega).sin();
    if s.norm() < 1e-12 {
        return Err(PathintError::Caustic);
    }
    let c = (tau * omega).cos();
    let pref = (C64::new(m * omega, 0.0) / (i * 2.0 * std::f64::consts::PI * hbar * s)).sqrt();
    Ok(pref * (i * m * omega * ((q1 * q1 + q0 * q0) * c - 2.0 * q1 * q0) / (s * 2.0 * hbar)).exp())
}

/// Mehler kernel for `0 < ωt < π`; the Maslov phase beyond the first
/// caustic is not tracked.
pub fn oscillator_propagator(m: f64, omega: f64, hbar: f64, t: f64, q0: f64, q1: f64) -> Result<C64, PathintError> {
    if !(omega * t > 0.0 && omega * t < std::f64::consts::PI) {
        return Err(PathintError::Caustic);
    }
    oscillator_propagator_complex(m, omega, hbar, Complex::new(t, 0.0), q0, q1)
}

/// Discretised Dyson-Schwinger residual.
#[derive(Clone, Debug)]
pub struct DsResidual {
    pub eps: f64,
    /// `rows[n] = [r_q, r_p]` for interior slices.
    pub rows: Vec<[C64; 2]>,
    pub z: C64,
    /// `max_n |r|`
    pub max_norm: f64,
}

fn finish(eps: f64, rows: Vec<[C64; 2]>, z: C64) -> DsResidual {
    let max_norm = rows.iter().flat_map(|r| r.iter()).map(|v| v.norm()).fold(0.0, f64::max);
    DsResidual { eps, rows, z, max_norm }
}

/// `[∂_t(−iℏδ/δJ_a) − ω^{ab}∂_bH(−iℏδ/δJ) + ω^{ab}J_b] Z[J]` on the
/// slice grid, with `δ/δJ(t_n) ↦ ε⁻¹∂/∂J_n`, forward differences in time
/// and `−iℏε⁻¹∂Z/∂J_n = ⟨φ_n⟩Z` from the Gaussian mean.
pub fn ds_residual_quantum(
    h: &QuadraticHamiltonian,
    q0: f64,
    q1: f64,
    t: f64,
    slices: usize,
    hbar: f64,
    current: &SmoothCurrent,
) -> Result<DsResidual, PathintError> {
    let act = QuadraticAction::new(h, Polarization::Coordinate, Slicing::Standard, slices, t, hbar, Some(current))?;
    let n = slices;
    let g = act.form.fix(&[0, n], &[q0, q1]).integrate()?;
    let z = g.value();
    // interior layout after fixing: q_1..q_{N−1}, then p_1..p_N
    let q = |k: usize| -> C64 {
        match k {
            0 => C64::new(q0, 0.0),
            k if k == n => C64::new(q1, 0.0),
            k => g.mean[k - 1],
        }
    };
    let p = |k: usize| g.mean[n - 1 + k - 1];
    let eps = act.eps;
    let mut rows = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let tk = k as f64 * eps;
        let (hp, hq) = (
            p(k) * h.a + q(k) * h.b + h.d,
            p(k) * h.b + q(k) * h.c + h.e,
        );
        let rq = (q(k + 1) - q(k)) / eps - hp + current.at(1, tk);
        let rp = (p(k + 1) - p(k)) / eps + hq - current.at(0, tk);
        rows.push([rq * z, rp * z]);
    }
    Ok(finish(eps, rows, z))
}

/// `Z[J]` alone, for finite-difference checks of the functional
/// derivative convention.
pub fn generating_functional(
    h: &QuadraticHamiltonian,
    q0: f64,
    q1: f64,
    t: f64,
    slices: usize,
    hbar: f64,
    current: &SmoothCurrent,
) -> Result<(C64, Vec<C64>), PathintError> {
    let act = QuadraticAction::new(h, Polarization::Coordinate, Slicing::Standard, slices, t, hbar, Some(current))?;
    let g = act.form.fix(&[0, slices], &[q0, q1]).integrate()?;
    Ok((g.value(), g.mean.iter().copied().collect()))
}

/// `Z[J]` with one extra source `ε·δJ` on the variable `index` of the
/// full form.
#[cfg(test)]
pub(crate) fn perturbed_z(
    h: &QuadraticHamiltonian,
    q0: f64,
    q1: f64,
    t: f64,
    slices: usize,
    hbar: f64,
    current: &SmoothCurrent,
    index: usize,
    delta: f64,
) -> Result<C64, PathintError> {
    let mut act = QuadraticAction::new(h, Polarization::Coordinate, Slicing::Standard, slices, t, hbar, Some(current))?;
    act.form.add_linear(C64::new(0.0, act.eps * delta / hbar), index);
    Ok(act.form.fix(&[0, slices], &[q0, q1]).integrate()?.value())
}
