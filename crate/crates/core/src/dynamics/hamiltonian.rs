use num_traits::Float;

use crate::scalar::{rational_to_f64, Ring};
use crate::symexpr::{gradient, hessian, third_derivatives, PolyExpr, Var};
use crate::Poly;

use super::DynamicsError;

/// A Hamiltonian that can be evaluated numerically together with its
/// derivatives. Arrays are indexed by phase-space index
/// `a ∈ 0..2n` (`q_1..q_n, p_1..p_n`); tensors are row-major.
pub trait Hamiltonian<T: Float>: Sync {
    /// Degrees of freedom `n`.
    fn dof(&self) -> usize;

    /// Highest derivative order available (at least 1).
    fn order(&self) -> u8 {
        3
    }

    fn value(&self, phi: &[T]) -> T;

    /// `out[a] = ∂_a H`
    fn gradient(&self, phi: &[T], out: &mut [T]);

    /// `out[a * 2n + b] = ∂_a ∂_b H`
    fn hessian(&self, phi: &[T], out: &mut [T]);

    /// `out[(a * 2n + b) * 2n + c] = ∂_a ∂_b ∂_c H`
    fn third(&self, phi: &[T], out: &mut [T]);
}

/// Polynomial Hamiltonian with precomputed derivative polynomials.
#[derive(Clone, Debug)]
pub struct PolyHamiltonian<T> {
    n: usize,
    h: PolyExpr<T>,
    grad: Vec<PolyExpr<T>>,
    hess: Vec<PolyExpr<T>>,
    third: Vec<PolyExpr<T>>,
}

impl<T: Float + Ring> PolyHamiltonian<T> {
    /// Converts a rational polynomial in `q_1..q_n, p_1..p_n`.
    pub fn new(h: &Poly, n: usize) -> Result<Self, DynamicsError> {
        for v in h.vars() {
            if v.phase_index(n).is_none() {
                return Err(DynamicsError::UnsupportedSymbol(v.name()));
            }
        }
        let conv = |p: &Poly| p.map_coeffs(|c| T::from(rational_to_f64(c)).expect("finite coefficient"));
        let grad = gradient(h, n).iter().map(conv).collect();
        let hess = hessian(h, n).iter().flatten().map(conv).collect();
        let third = third_derivatives(h, n).iter().flatten().flatten().map(conv).collect();
        Ok(PolyHamiltonian {
            n,
            h: conv(h),
            grad,
            hess,
            third,
        })
    }

    fn eval(&self, p: &PolyExpr<T>, phi: &[T]) -> T {
        let n = self.n;
        p.eval_in(|c| *c, |v: Var| phi[v.phase_index(n).expect("phase symbol")])
    }
}

impl<T: Float + Ring> Hamiltonian<T> for PolyHamiltonian<T> {
    fn dof(&self) -> usize {
        self.n
    }

    fn value(&self, phi: &[T]) -> T {
        self.eval(&self.h, phi)
    }

    fn gradient(&self, phi: &[T], out: &mut [T]) {
        for (o, p) in out.iter_mut().zip(&self.grad) {
            *o = self.eval(p, phi);
        }
    }

    fn hessian(&self, phi: &[T], out: &mut [T]) {
        for (o, p) in out.iter_mut().zip(&self.hess) {
            *o = self.eval(p, phi);
        }
    }

    fn third(&self, phi: &[T], out: &mut [T]) {
        for (o, p) in out.iter_mut().zip(&self.third) {
            *o = self.eval(p, phi);
        }
    }
}

/// `H = p²/(2m) − g cos q`.
#[derive(Clone, Copy, Debug)]
pub struct Pendulum<T> {
    pub mass: T,
    pub g: T,
}

impl<T: Float> Default for Pendulum<T> {
    fn default() -> Self {
        Pendulum {
            mass: T::one(),
            g: T::one(),
        }
    }
}

impl<T: Float + Send + Sync> Hamiltonian<T> for Pendulum<T> {
    fn dof(&self) -> usize {
        1
    }

    fn value(&self, phi: &[T]) -> T {
        let two = T::one() + T::one();
        phi[1] * phi[1] / (two * self.mass) - self.g * phi[0].cos()
    }

    fn gradient(&self, phi: &[T], out: &mut [T]) {
        out[0] = self.g * phi[0].sin();
        out[1] = phi[1] / self.mass;
    }

    fn hessian(&self, phi: &[T], out: &mut [T]) {
        out[0] = self.g * phi[0].cos();
        out[1] = T::zero();
        out[2] = T::zero();
        out[3] = T::one() / self.mass;
    }

    fn third(&self, phi: &[T], out: &mut [T]) {
        for o in out.iter_mut() {
            *o = T::zero();
        }
        out[0] = -self.g * phi[0].sin();
    }
}

/// Wraps a Hamiltonian and hides derivatives above `order`.
pub struct Truncated<'a, T> {
    pub inner: &'a dyn Hamiltonian<T>,
    pub order: u8,
}

impl<T: Float> Hamiltonian<T> for Truncated<'_, T> {
    fn dof(&self) -> usize {
        self.inner.dof()
    }
    fn order(&self) -> u8 {
        self.order.min(self.inner.order())
    }
    fn value(&self, phi: &[T]) -> T {
        self.inner.value(phi)
    }
    fn gradient(&self, phi: &[T], out: &mut [T]) {
        self.inner.gradient(phi, out)
    }
    fn hessian(&self, phi: &[T], out: &mut [T]) {
        self.inner.hessian(phi, out)
    }
    fn third(&self, phi: &[T], out: &mut [T]) {
        self.inner.third(phi, out)
    }
}
