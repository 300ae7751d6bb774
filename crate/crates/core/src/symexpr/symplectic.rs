use num_rational::BigRational;
use rand::Rng;

use super::poly::{Monomial, PolyExpr, Var};
use crate::scalar::Ring;

/// Canonical symplectic matrix `ω^{ab} = [[0, I], [-I, 0]]` on
/// `φ = (q_1..q_n, p_1..p_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `ω^{ab}`
    pub fn upper(&self, a: usize, b: usize) -> i64 {
        let n = self.n;
        if a < n && b == a + n {
            1
        } else if a >= n && b + n == a {
            -1
        } else {
            0
        }
    }

    /// `ω_{ab}`, the inverse matrix: `ω^{ab} ω_{bc} = δ^a_c`.
    pub fn lower(&self, a: usize, b: usize) -> i64 {
        -self.upper(a, b)
    }

    /// The unique partner index `b` with `ω^{ab} ≠ 0`.
    pub fn partner(&self, a: usize) -> usize {
        if a < self.n {
            a + self.n
        } else {
            a - self.n
        }
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        (0..d).map(|a| (0..d).map(|b| self.upper(a, b)).collect()).collect()
    }
}

/// `∂_a H` for every phase-space index.
pub fn gradient<R: Ring>(h: &PolyExpr<R>, n: usize) -> Vec<PolyExpr<R>> {
    (0..2 * n).map(|a| h.diff(Var::phi(a, n))).collect()
}

/// `∂_a ∂_b H`.
pub fn hessian<R: Ring>(h: &PolyExpr<R>, n: usize) -> Vec<Vec<PolyExpr<R>>> {
    gradient(h, n).iter().map(|g| gradient(g, n)).collect()
}

/// `∂_a ∂_b ∂_c H`.
pub fn third_derivatives<R: Ring>(h: &PolyExpr<R>, n: usize) -> Vec<Vec<Vec<PolyExpr<R>>>> {
    hessian(h, n)
        .iter()
        .map(|row| row.iter().map(|g| gradient(g, n)).collect())
        .collect()
}

/// Hamiltonian vector field `ω^{ab} ∂_b H`.
pub fn hamiltonian_vector_field<R: Ring>(h: &PolyExpr<R>, n: usize) -> Vec<PolyExpr<R>> {
    let w = SymplecticForm::new(n);
    let grad = gradient(h, n);
    (0..2 * n)
        .map(|a| {
            let b = w.partner(a);
            grad[b].scale(&R::from_i64(w.upper(a, b)))
        })
        .collect()
}

/// Poisson bracket `{F, G} = ∂_a F ω^{ab} ∂_b G`.
pub fn poisson_bracket<R: Ring>(f: &PolyExpr<R>, g: &PolyExpr<R>, n: usize) -> PolyExpr<R> {
    let w = SymplecticForm::new(n);
    let gf = gradient(f, n);
    let gg = gradient(g, n);
    let mut out = PolyExpr::zero();
    for a in 0..2 * n {
        let b = w.partner(a);
        out = &out + &(&gf[a] * &gg[b]).scale(&R::from_i64(w.upper(a, b)));
    }
    out
}

use num_traits::Zero;

/// Random polynomial in `q_1..q_n, p_1..p_n` of total degree at most
/// `max_degree`, with small rational coefficients.
pub fn random_polynomial<G: Rng + ?Sized>(
    rng: &mut G,
    n: usize,
    max_degree: u32,
    num_terms: usize,
) -> PolyExpr<BigRational> {
    let mut out = PolyExpr::zero();
    while out.num_terms() < num_terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut powers = Vec::new();
        for _ in 0..deg {
            powers.push((Var::phi(rng.gen_range(0..2 * n), n), 1));
        }
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=4);
        out.add_term(Monomial::from_powers(powers), BigRational::from_ratio(num, den));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_polynomial;

    fn parse(s: &str) -> PolyExpr<BigRational> {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn oscillator_vector_field() {
        let h = parse("p1^2/2 + q1^2/2");
        assert_eq!(hamiltonian_vector_field(&h, 1), vec![parse("p1"), parse("-q1")]);
    }

    #[test]
    fn dilation_vector_field() {
        assert_eq!(hamiltonian_vector_field(&parse("q1*p1"), 1), vec![parse("q1"), parse("-p1")]);
    }

    #[test]
    fn omega_inverse() {
        for n in 1..4 {
            let w = SymplecticForm::new(n);
            for a in 0..2 * n {
                for c in 0..2 * n {
                    let s: i64 = (0..2 * n).map(|b| w.upper(a, b) * w.lower(b, c)).sum();
                    assert_eq!(s, i64::from(a == c));
                    assert_eq!(w.upper(a, c), -w.upper(c, a));
                }
            }
        }
    }

    #[test]
    fn canonical_brackets() {
        assert_eq!(poisson_bracket(&parse("q1"), &parse("p1"), 1), parse("1"));
        assert_eq!(poisson_bracket(&parse("q1"), &parse("p2"), 2), parse("0"));
    }
}
