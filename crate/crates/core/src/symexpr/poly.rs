use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Conjugate, Ring};

/// Commuting symbol. `i` is 1-based; `dots` counts time derivatives.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q { i: u16, dots: u8 },
    P { i: u16, dots: u8 },
    /// `λ_{q_i}`
    LamQ { i: u16, dots: u8 },
    /// `λ_{p_i}`
    LamP { i: u16, dots: u8 },
    /// Auxiliary even parameter, e.g. a time label.
    T(u16),
}

impl Var {
    pub fn q(i: usize) -> Var {
        Var::Q { i: i as u16, dots: 0 }
    }

    pub fn p(i: usize) -> Var {
        Var::P { i: i as u16, dots: 0 }
    }

    /// `φ^a` for a 0-based phase-space index: `a < n` is `q_{a+1}`,
    /// otherwise `p_{a-n+1}`.
    pub fn phi(a: usize, n: usize) -> Var {
        if a < n {
            Var::q(a + 1)
        } else {
            Var::p(a - n + 1)
        }
    }

    /// `λ_a` for a 0-based phase-space index.
    pub fn lambda(a: usize, n: usize) -> Var {
        if a < n {
            Var::LamQ { i: (a + 1) as u16, dots: 0 }
        } else {
            Var::LamP { i: (a - n + 1) as u16, dots: 0 }
        }
    }

    pub fn dots(self) -> u8 {
        match self {
            Var::Q { dots, .. } | Var::P { dots, .. } | Var::LamQ { dots, .. } | Var::LamP { dots, .. } => dots,
            Var::T(_) => 0,
        }
    }

    /// Time derivative of the symbol; auxiliary parameters are constant.
    pub fn dot(self) -> Option<Var> {
        Some(match self {
            Var::Q { i, dots } => Var::Q { i, dots: dots + 1 },
            Var::P { i, dots } => Var::P { i, dots: dots + 1 },
            Var::LamQ { i, dots } => Var::LamQ { i, dots: dots + 1 },
            Var::LamP { i, dots } => Var::LamP { i, dots: dots + 1 },
            Var::T(_) => return None,
        })
    }

    /// Phase-space index of an undotted `q`/`p`.
    pub fn phase_index(self, n: usize) -> Option<usize> {
        match self {
            Var::Q { i, dots: 0 } if (i as usize) >= 1 && (i as usize) <= n => Some(i as usize - 1),
            Var::P { i, dots: 0 } if (i as usize) >= 1 && (i as usize) <= n => Some(n + i as usize - 1),
            _ => None,
        }
    }

    /// Degree-of-freedom label `i` of a phase-space or multiplier symbol.
    pub fn dof(self) -> Option<usize> {
        match self {
            Var::Q { i, .. } | Var::P { i, .. } | Var::LamQ { i, .. } | Var::LamP { i, .. } => Some(i as usize),
            Var::T(_) => None,
        }
    }

    pub fn is_phase(self) -> bool {
        matches!(self, Var::Q { dots: 0, .. } | Var::P { dots: 0, .. })
    }

    pub fn name(self) -> String {
        let (stem, i, dots) = match self {
            Var::Q { i, dots } => ("q", i, dots),
            Var::P { i, dots } => ("p", i, dots),
            Var::LamQ { i, dots } => ("lq", i, dots),
            Var::LamP { i, dots } => ("lp", i, dots),
            Var::T(i) => return format!("t{i}"),
        };
        format!("{}{}{}", "d".repeat(dots as usize), stem, i)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Sorted list of `(symbol, exponent)` with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `∂/∂v` of the monomial: `(exponent, reduced monomial)`.
    pub fn diff(&self, v: Var) -> Option<(u32, Monomial)> {
        let k = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let e = self.0[k].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(k);
        } else {
            out[k].1 = e - 1;
        }
        Some((e, Monomial(out)))
    }
}

/// Polynomial in commuting symbols with coefficients in `R`. Terms with
/// zero coefficient are never stored.
#[derive(Clone, PartialEq)]
pub struct PolyExpr<R> {
    terms: BTreeMap<Monomial, R>,
}

impl<R: Ring> PolyExpr<R> {
    pub fn constant(c: R) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), R::one())
    }

    pub fn term(m: Monomial, c: R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        PolyExpr { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(v, _)| *v))
            .collect()
    }

    /// Largest degree-of-freedom label among `q`/`p`/`λ` symbols.
    pub fn max_dof(&self) -> usize {
        self.vars().into_iter().filter_map(Var::dof).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let v = existing.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = v;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> PolyExpr<S> {
        let mut out = PolyExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Partial derivative `∂/∂v`.
    pub fn diff(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.diff(v) {
                out.add_term(rest, c.clone() * R::from_i64(e as i64));
            }
        }
        out
    }

    /// Total time derivative by the chain rule over dotted symbols.
    pub fn time_derivative(&self) -> Self {
        let mut out = Self::zero();
        for v in self.vars() {
            if let Some(vd) = v.dot() {
                out = &out + &(&self.diff(v) * &Self::var(vd));
            }
        }
        out
    }

    /// Evaluates in any ring: coefficients through `coeff`, symbols through
    /// `value`.
    pub fn eval_in<T: Ring>(&self, coeff: impl Fn(&R) -> T, value: impl Fn(Var) -> T) -> T {
        let mut total = T::zero();
        let mut cache: BTreeMap<Var, Vec<T>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (v, e) in m.powers() {
                let powers = cache.entry(*v).or_insert_with(|| vec![T::one(), value(*v)]);
                while powers.len() <= *e as usize {
                    let next = powers[powers.len() - 1].clone() * powers[1].clone();
                    powers.push(next);
                }
                t = t * powers[*e as usize].clone();
            }
            total = total + t;
        }
        total
    }

    /// Replaces symbols by polynomials (symbols without a replacement stay).
    pub fn substitute(&self, replace: impl Fn(Var) -> Option<PolyExpr<R>>) -> Self {
        self.eval_in(|c| Self::constant(c.clone()), |v| replace(v).unwrap_or_else(|| Self::var(v)))
    }
}

impl<R: Ring> Zero for PolyExpr<R> {
    fn zero() -> Self {
        PolyExpr { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<R: Ring> One for PolyExpr<R> {
    fn one() -> Self {
        Self::constant(R::one())
    }
}

impl<'a, R: Ring> Add<&'a PolyExpr<R>> for &'a PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn add(self, rhs: &'a PolyExpr<R>) -> PolyExpr<R> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<R: Ring> Add for PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn add(self, rhs: PolyExpr<R>) -> PolyExpr<R> {
        &self + &rhs
    }
}

impl<'a, R: Ring> Sub<&'a PolyExpr<R>> for &'a PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn sub(self, rhs: &'a PolyExpr<R>) -> PolyExpr<R> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<R: Ring> Sub for PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn sub(self, rhs: PolyExpr<R>) -> PolyExpr<R> {
        &self - &rhs
    }
}

impl<'a, R: Ring> Mul<&'a PolyExpr<R>> for &'a PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn mul(self, rhs: &'a PolyExpr<R>) -> PolyExpr<R> {
        let mut out = PolyExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<R: Ring> Mul for PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn mul(self, rhs: PolyExpr<R>) -> PolyExpr<R> {
        &self * &rhs
    }
}

impl<R: Ring> Neg for PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn neg(self) -> PolyExpr<R> {
        -&self
    }
}

impl<'a, R: Ring> Neg for &'a PolyExpr<R> {
    type Output = PolyExpr<R>;
    fn neg(self) -> PolyExpr<R> {
        PolyExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<R: Ring> Ring for PolyExpr<R> {
    fn from_i64(n: i64) -> Self {
        Self::constant(R::from_i64(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::constant(R::from_ratio(num, den))
    }
}

impl<R: Ring + Conjugate> Conjugate for PolyExpr<R> {
    fn conjugate(&self) -> Self {
        self.map_coeffs(|c| c.conjugate())
    }
}

/// Formatting of coefficients inside printed polynomials.
pub trait CoeffFormat {
    /// Text of the coefficient and whether it is negative (the sign is then
    /// printed by the caller).
    fn format_coeff(&self) -> (String, bool);
    fn is_unit(&self) -> bool;
}

impl CoeffFormat for num_rational::BigRational {
    fn format_coeff(&self) -> (String, bool) {
        use num_traits::Signed;
        (crate::scalar::format_rational(&self.abs()), self.is_negative())
    }
    fn is_unit(&self) -> bool {
        use num_traits::Signed;
        self.abs().is_one()
    }
}

impl CoeffFormat for crate::ExactComplex {
    fn format_coeff(&self) -> (String, bool) {
        use num_traits::Signed;
        if self.im.is_zero() {
            return self.re.format_coeff();
        }
        if self.re.is_zero() && self.im.is_negative() {
            let pos = crate::ExactComplex::new(self.re.clone(), -self.im.clone());
            return (crate::scalar::format_complex_rational(&pos), true);
        }
        (crate::scalar::format_complex_rational(self), false)
    }
    fn is_unit(&self) -> bool {
        self.im.is_zero() && self.re.is_unit()
    }
}

impl CoeffFormat for f64 {
    fn format_coeff(&self) -> (String, bool) {
        (format!("{}", self.abs()), *self < 0.0)
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1.0
    }
}

impl CoeffFormat for crate::C64 {
    fn format_coeff(&self) -> (String, bool) {
        if self.im == 0.0 {
            return self.re.format_coeff();
        }
        (format!("({})", self), false)
    }
    fn is_unit(&self) -> bool {
        self.im == 0.0 && self.re.abs() == 1.0
    }
}

impl<R: Ring + CoeffFormat> fmt::Display for PolyExpr<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (text, negative) = c.format_coeff();
            match (k == 0, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let mut parts: Vec<String> = Vec::new();
            if !c.is_unit() || m.is_one() {
                parts.push(text);
            }
            for (v, e) in m.powers() {
                if *e == 1 {
                    parts.push(v.name());
                } else {
                    parts.push(format!("{}^{}", v.name(), e));
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl<R: fmt::Debug> fmt::Debug for PolyExpr<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .powers()
                    .iter()
                    .map(|(v, e)| if *e == 1 { v.name() } else { format!("{}^{}", v.name(), e) })
                    .collect();
                if vars.is_empty() {
                    format!("{:?}", c)
                } else {
                    format!("{:?}*{}", c, vars.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
