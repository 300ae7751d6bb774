use num_traits::Float;

use super::{DynamicsError, Hamiltonian};

/// Point of the extended phase space `(φ, λ, c, c̄)`.
///
/// The odd variables are expanded over a fixed basis of `k` real odd
/// generators `e_1..e_k`: `c^a = Σ_j C[a][j] e_j`, `c̄_a = Σ_j C̄[a][j] e_j`.
/// `λ_a` is an even supernumber `λ_a = body_a + i Σ_{jk} S[a][j][k] e_j e_k`;
/// the soul is generated by the `c̄ c` term of its equation of motion.
/// All blocks are stored in one flat vector so the integrator can treat
/// the state as a point of `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedState<T> {
    n: usize,
    k: usize,
    data: Vec<T>,
}

impl<T: Float> ExtendedState<T> {
    pub fn zeros(n: usize, k: usize) -> Self {
        let dim = 2 * n;
        ExtendedState {
            n,
            k,
            data: vec![T::zero(); dim * (2 + 2 * k + k * k)],
        }
    }

    /// State with the given `φ`, `λ` (body) and ghost coefficient rows.
    pub fn new(phi: &[T], lambda: &[T], c: &[Vec<T>], cbar: &[Vec<T>]) -> Result<Self, DynamicsError> {
        let dim = phi.len();
        if dim % 2 != 0 || lambda.len() != dim || c.len() != dim || cbar.len() != dim {
            return Err(DynamicsError::DimensionMismatch);
        }
        let k = c.first().map_or(0, |r| r.len());
        if c.iter().chain(cbar).any(|r| r.len() != k) {
            return Err(DynamicsError::DimensionMismatch);
        }
        let mut s = Self::zeros(dim / 2, k);
        s.phi_mut().copy_from_slice(phi);
        s.lambda_mut().copy_from_slice(lambda);
        for a in 0..dim {
            for j in 0..k {
                *s.c_mut(a, j) = c[a][j];
                *s.cbar_mut(a, j) = cbar[a][j];
            }
        }
        Ok(s)
    }

    /// Pure bosonic point: `λ = 0`, no ghosts.
    pub fn point(phi: &[T]) -> Self {
        let mut s = Self::zeros(phi.len() / 2, 0);
        s.phi_mut().copy_from_slice(phi);
        s
    }

    /// Ghosts initialised to the identity Jacobi frame: `c^a = e_a`
    /// (`k = 2n`), `c̄ = 0`, `λ = 0`.
    pub fn with_jacobi_frame(phi: &[T]) -> Self {
        let dim = phi.len();
        let mut s = Self::zeros(dim / 2, dim);
        s.phi_mut().copy_from_slice(phi);
        for a in 0..dim {
            *s.c_mut(a, a) = T::one();
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Size of the odd basis.
    pub fn basis_size(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn off_lambda(&self) -> usize {
        self.dim()
    }
    fn off_c(&self) -> usize {
        2 * self.dim()
    }
    fn off_cbar(&self) -> usize {
        self.off_c() + self.dim() * self.k
    }
    fn off_soul(&self) -> usize {
        self.off_cbar() + self.dim() * self.k
    }

    pub fn phi(&self) -> &[T] {
        &self.data[..self.dim()]
    }
    pub fn phi_mut(&mut self) -> &mut [T] {
        let d = self.dim();
        &mut self.data[..d]
    }
    pub fn lambda(&self) -> &[T] {
        &self.data[self.off_lambda()..self.off_c()]
    }
    pub fn lambda_mut(&mut self) -> &mut [T] {
        let (a, b) = (self.off_lambda(), self.off_c());
        &mut self.data[a..b]
    }
    pub fn c(&self, a: usize, j: usize) -> T {
        self.data[self.off_c() + a * self.k + j]
    }
    pub fn c_mut(&mut self, a: usize, j: usize) -> &mut T {
        let i = self.off_c() + a * self.k + j;
        &mut self.data[i]
    }
    pub fn cbar(&self, a: usize, j: usize) -> T {
        self.data[self.off_cbar() + a * self.k + j]
    }
    pub fn cbar_mut(&mut self, a: usize, j: usize) -> &mut T {
        let i = self.off_cbar() + a * self.k + j;
        &mut self.data[i]
    }
    /// `S[a][j][k]` in `λ_a = body + i Σ S e_j e_k`.
    pub fn soul(&self, a: usize, j: usize, l: usize) -> T {
        self.data[self.off_soul() + (a * self.k + j) * self.k + l]
    }
    pub fn soul_mut(&mut self, a: usize, j: usize, l: usize) -> &mut T {
        let i = self.off_soul() + (a * self.k + j) * self.k + l;
        &mut self.data[i]
    }

    /// Row of ghost coefficients `C[a][·]`.
    pub fn c_row(&self, a: usize) -> &[T] {
        let s = self.off_c() + a * self.k;
        &self.data[s..s + self.k]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    fn axpy(&self, h: T, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(x, y)| *x + h * *y).collect();
        ExtendedState {
            n: self.n,
            k: self.k,
            data,
        }
    }
}

/// `ω^{ab}` entry for `b = partner(a)`.
pub(crate) fn omega_sign<T: Float>(a: usize, n: usize) -> T {
    if a < n {
        T::one()
    } else {
        -T::one()
    }
}

pub(crate) fn partner(a: usize, n: usize) -> usize {
    if a < n {
        a + n
    } else {
        a - n
    }
}

/// Scratch space for derivative evaluation.
pub(crate) struct Workspace<T> {
    pub grad: Vec<T>,
    pub hess: Vec<T>,
    pub third: Vec<T>,
}

impl<T: Float> Workspace<T> {
    pub fn new(dim: usize) -> Self {
        Workspace {
            grad: vec![T::zero(); dim],
            hess: vec![T::zero(); dim * dim],
            third: vec![T::zero(); dim * dim * dim],
        }
    }
}

/// Tangent of the extended flow:
///
/// `φ̇^a = ω^{ab}∂_bH`, `ċ^a = ω^{ad}∂_d∂_bH c^b`,
/// `c̄̇_b = −c̄_a ω^{ad}∂_d∂_bH`,
/// `λ̇_b = −ω^{ad}∂_d∂_bH λ_a − i c̄_a ω^{ad}∂_d∂_f∂_bH c^f`.
pub fn extended_rhs<T: Float>(h: &dyn Hamiltonian<T>, s: &ExtendedState<T>) -> Result<ExtendedState<T>, DynamicsError> {
    let mut ws = Workspace::new(s.dim());
    rhs_with(h, s, &mut ws)
}

pub(crate) fn rhs_with<T: Float>(
    h: &dyn Hamiltonian<T>,
    s: &ExtendedState<T>,
    ws: &mut Workspace<T>,
) -> Result<ExtendedState<T>, DynamicsError> {
    let n = s.n;
    let dim = s.dim();
    let k = s.k;
    if h.dof() != n {
        return Err(DynamicsError::DimensionMismatch);
    }
    let needs_third = k > 0;
    let needs_hessian = k > 0 || s.lambda().iter().any(|x| !x.is_zero());
    if (needs_third && h.order() < 3) || (needs_hessian && h.order() < 2) {
        return Err(DynamicsError::DerivativeOrder(if needs_third { 3 } else { 2 }));
    }
    let phi = s.phi();
    h.gradient(phi, &mut ws.grad);
    if needs_hessian {
        h.hessian(phi, &mut ws.hess);
    }
    if needs_third {
        h.third(phi, &mut ws.third);
    }
    let hs = |a: usize, b: usize| ws.hess[a * dim + b];
    let mut out = ExtendedState::zeros(n, k);
    for a in 0..dim {
        let d = partner(a, n);
        let w: T = omega_sign(a, n);
        out.data[a] = w * ws.grad[d];
    }
    if !needs_hessian {
        return Ok(out);
    }
    for a in 0..dim {
        let d = partner(a, n);
        let w: T = omega_sign(a, n);
        for j in 0..k {
            let mut acc = T::zero();
            for b in 0..dim {
                acc = acc + hs(d, b) * s.c(b, j);
            }
            *out.c_mut(a, j) = w * acc;
        }
    }
    for b in 0..dim {
        let mut dl = T::zero();
        for a in 0..dim {
            let d = partner(a, n);
            let w: T = omega_sign(a, n);
            dl = dl - w * hs(d, b) * s.lambda()[a];
        }
        out.lambda_mut()[b] = dl;
        for j in 0..k {
            let mut acc = T::zero();
            for a in 0..dim {
                let d = partner(a, n);
                let w: T = omega_sign(a, n);
                acc = acc - s.cbar(a, j) * w * hs(d, b);
            }
            *out.cbar_mut(b, j) = acc;
        }
        for j in 0..k {
            for l in 0..k {
                let mut acc = T::zero();
                for a in 0..dim {
                    let d = partner(a, n);
                    let w: T = omega_sign(a, n);
                    acc = acc - w * hs(d, b) * s.soul(a, j, l);
                    let cb = s.cbar(a, j);
                    if cb.is_zero() {
                        continue;
                    }
                    for f in 0..dim {
                        acc = acc - cb * w * ws.third[(d * dim + f) * dim + b] * s.c(f, l);
                    }
                }
                *out.soul_mut(b, j, l) = acc;
            }
        }
    }
    Ok(out)
}

/// Trajectory produced by [`integrate`].
#[derive(Clone, Debug)]
pub struct FlowResult<T> {
    pub times: Vec<T>,
    pub states: Vec<ExtendedState<T>>,
    pub dt: T,
    /// Order of the one-step method.
    pub order: u32,
}

impl<T: Float> FlowResult<T> {
    pub fn last(&self) -> &ExtendedState<T> {
        self.states.last().expect("at least the initial state")
    }
}

fn rk4_step<T: Float>(
    h: &dyn Hamiltonian<T>,
    s: &ExtendedState<T>,
    dt: T,
    ws: &mut Workspace<T>,
) -> Result<ExtendedState<T>, DynamicsError> {
    let two = T::one() + T::one();
    let six = two + two + two;
    let k1 = rhs_with(h, s, ws)?;
    let k2 = rhs_with(h, &s.axpy(dt / two, &k1), ws)?;
    let k3 = rhs_with(h, &s.axpy(dt / two, &k2), ws)?;
    let k4 = rhs_with(h, &s.axpy(dt, &k3), ws)?;
    let data = (0..s.data.len())
        .map(|i| s.data[i] + dt / six * (k1.data[i] + two * k2.data[i] + two * k3.data[i] + k4.data[i]))
        .collect();
    Ok(ExtendedState {
        n: s.n,
        k: s.k,
        data,
    })
}

/// Step count and final-step length for covering `[t0, t1]` with steps of
/// at most `dt`.
pub(crate) fn step_plan<T: Float>(t0: T, t1: T, dt: T) -> Result<(usize, T), DynamicsError> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(DynamicsError::BadStep);
    }
    if !(t1 >= t0) {
        return Err(DynamicsError::BadInterval);
    }
    let span = t1 - t0;
    let ratio = span / dt;
    let tol = T::from(1e-9).expect("float constant");
    let mut steps = ratio.floor().to_usize().ok_or(DynamicsError::BadStep)?;
    if ratio - T::from(steps).expect("count") > tol {
        steps += 1;
    }
    Ok((steps, span - T::from(steps.saturating_sub(1)).expect("count") * dt))
}

/// Integrates the extended flow from `t0` to `t1` with the classical
/// fourth-order Runge-Kutta method; the last step is shortened to land on
/// `t1`. Every `stride`-th state is recorded, plus the final one.
pub fn integrate<T: Float>(
    h: &dyn Hamiltonian<T>,
    s0: &ExtendedState<T>,
    t0: T,
    t1: T,
    dt: T,
    stride: usize,
) -> Result<FlowResult<T>, DynamicsError> {
    let (steps, last) = step_plan(t0, t1, dt)?;
    let stride = stride.max(1);
    let mut ws = Workspace::new(s0.dim());
    let mut s = s0.clone();
    let mut times = vec![t0];
    let mut states = vec![s0.clone()];
    let mut t = t0;
    for i in 0..steps {
        let h_step = if i + 1 == steps { last } else { dt };
        s = rk4_step(h, &s, h_step, &mut ws)?;
        t = if i + 1 == steps { t1 } else { t + dt };
        if !s.is_finite() {
            return Err(DynamicsError::NonFinite(t.to_f64().unwrap_or(f64::NAN)));
        }
        if (i + 1) % stride == 0 || i + 1 == steps {
            times.push(t);
            states.push(s.clone());
        }
    }
    Ok(FlowResult {
        times,
        states,
        dt,
        order: 4,
    })
}

/// Final state only.
pub fn evolve<T: Float>(
    h: &dyn Hamiltonian<T>,
    s0: &ExtendedState<T>,
    t: T,
    dt: T,
) -> Result<ExtendedState<T>, DynamicsError> {
    let r = integrate(h, s0, T::zero(), t, dt, usize::MAX)?;
    Ok(r.last().clone())
}
