//! Commutative polynomials over named phase-space symbols, their parser and
//! printer, and the symplectic calculus built on them.

mod parse;
mod poly;
mod symplectic;

pub use parse::{parse_hamiltonian, parse_polynomial, parse_symbol, ParseError, ParseErrorKind};
pub use poly::{CoeffFormat, Monomial, PolyExpr, Var};
pub use symplectic::{
    gradient, hamiltonian_vector_field, hessian, poisson_bracket, random_polynomial, third_derivatives,
    SymplecticForm,
};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;

/// Lifts a rational polynomial to complex-rational coefficients.
pub fn complexify(p: &PolyExpr<BigRational>) -> PolyExpr<crate::ExactComplex> {
    p.map_coeffs(|c| Complex::new(c.clone(), BigRational::zero()))
}

/// Lifts a rational polynomial to `f64` coefficients.
pub fn to_f64(p: &PolyExpr<BigRational>) -> PolyExpr<f64> {
    p.map_coeffs(crate::scalar::rational_to_f64)
}
