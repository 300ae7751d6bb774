//! Classical mechanics in superspace.
//!
//! The crate builds the classical path-integral machinery around a
//! Hamiltonian `H(q, p)`: a Grassmann algebra with Berezin integration,
//! polynomial superfield expansion, a graded operator algebra with the
//! BRS/SUSY charges, the extended (Jacobi-field) flow, Koopman-von Neumann
//! waves on a phase-space grid, time-sliced Gaussian path integrals and
//! coherent-state bases.
//!
//! Symbolic code is generic over a coefficient [`scalar::Ring`]; the
//! integrator is generic over `num_traits::Float`. Concrete aliases for the
//! common choices are exported here.

pub mod coherent;
pub mod dynamics;
pub mod grassmann;
pub mod kvn;
pub mod opalgebra;
pub mod pathint;
pub mod scalar;
pub mod superfield;
pub mod symexpr;

use num_complex::Complex;
use num_rational::BigRational;

/// Exact rational scalar.
pub type Rational = BigRational;
/// Exact complex rational scalar.
pub type ExactComplex = Complex<BigRational>;
/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Grassmann element with exact complex coefficients.
pub type GrassmannQ = grassmann::GrassmannElement<ExactComplex>;
/// Grassmann element with `f64` complex coefficients.
pub type GrassmannF64 = grassmann::GrassmannElement<C64>;
/// Rational polynomial, the Hamiltonian front end.
pub type Poly = symexpr::PolyExpr<Rational>;
/// Polynomial with exact complex coefficients.
pub type PolyC = symexpr::PolyExpr<ExactComplex>;
/// Grassmann element whose coefficients are polynomials in the even
/// symbols: the c-number superspace algebra.
pub type SuperPoly = grassmann::GrassmannElement<PolyC>;
/// Operator expression with exact complex coefficients.
pub type OpExprQ = opalgebra::OpExpr<ExactComplex>;
