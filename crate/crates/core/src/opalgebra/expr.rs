use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::grassmann::{bits, monomial_product_sign, Conjugation, GeneratorRegistry, GrassmannElement};
use crate::scalar::ComplexScalar;
use crate::symexpr::{PolyExpr, Var};

/// Operator symbol on an `n` degree-of-freedom phase space. Indices are
/// 0-based phase-space indices `a` (`a < n` is a `q` direction).
///
/// The derived order (`λ̂ < φ̂ < ĉ < c̄̂`, then index) is the normal order:
/// multipliers left of coordinates, ghosts left of anti-ghosts.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpSym {
    Lambda(u16),
    Phi(u16),
    C(u16),
    CBar(u16),
}

impl OpSym {
    pub fn is_odd(self) -> bool {
        matches!(self, OpSym::C(_) | OpSym::CBar(_))
    }

    pub fn index(self) -> usize {
        match self {
            OpSym::Lambda(a) | OpSym::Phi(a) | OpSym::C(a) | OpSym::CBar(a) => a as usize,
        }
    }

    /// Value of `[x, s}` when `x s = ± s x + [x, s}` with `x > s`.
    fn contraction<C: ComplexScalar>(x: OpSym, s: OpSym) -> Option<C> {
        match (x, s) {
            (OpSym::Phi(a), OpSym::Lambda(b)) if a == b => Some(C::i()),
            (OpSym::CBar(b), OpSym::C(a)) if a == b => Some(C::one()),
            _ => None,
        }
    }

    pub fn name(self, n: usize) -> String {
        let dir = |a: u16| {
            let a = a as usize;
            if a < n {
                format!("q{}", a + 1)
            } else {
                format!("p{}", a - n + 1)
            }
        };
        match self {
            OpSym::Lambda(a) => format!("λ{}", dir(a)),
            OpSym::Phi(a) => dir(a),
            OpSym::C(a) => format!("c{}", dir(a)),
            OpSym::CBar(a) => format!("c̄{}", dir(a)),
        }
    }
}

pub type Word = Vec<OpSym>;

fn word_parity(w: &[OpSym]) -> u32 {
    w.iter().filter(|s| s.is_odd()).count() as u32
}

/// Right-multiplies the normal-ordered word `w` by `s`, returning the
/// normal-ordered expansion.
fn insert_symbol<C: ComplexScalar>(w: &[OpSym], s: OpSym) -> Vec<(C, Word)> {
    let Some((&x, rest)) = w.split_last() else {
        return vec![(C::one(), vec![s])];
    };
    if x < s || (x == s && !s.is_odd()) {
        let mut out = w.to_vec();
        out.push(s);
        return vec![(C::one(), out)];
    }
    if x == s {
        // ĉ² = c̄̂² = 0
        return Vec::new();
    }
    let swap_sign = x.is_odd() && s.is_odd();
    let mut out: Vec<(C, Word)> = insert_symbol::<C>(rest, s)
        .into_iter()
        .map(|(c, mut word)| {
            word.push(x);
            (if swap_sign { -c } else { c }, word)
        })
        .collect();
    if let Some(k) = OpSym::contraction::<C>(x, s) {
        out.push((k, rest.to_vec()));
    }
    out
}

/// Normal-ordered expansion of an arbitrary word.
pub fn normal_order_word<C: ComplexScalar>(w: &[OpSym]) -> Vec<(C, Word)> {
    let mut acc: BTreeMap<Word, C> = BTreeMap::new();
    acc.insert(Vec::new(), C::one());
    for &s in w {
        let mut next: BTreeMap<Word, C> = BTreeMap::new();
        for (word, c) in acc {
            for (k, out) in insert_symbol::<C>(&word, s) {
                let entry = next.entry(out).or_insert_with(C::zero);
                *entry = entry.clone() + c.clone() * k;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc.into_iter().map(|(w, c)| (c, w)).collect()
}

/// Linear combination of normal-ordered operator words with coefficients in
/// the Grassmann algebra of outer (c-number) odd parameters.
///
/// Each term reads `coefficient · outer monomial · word`, outer parameters on
/// the left.
#[derive(Clone, PartialEq)]
pub struct OpExpr<C> {
    n: usize,
    outer: Arc<GeneratorRegistry>,
    terms: BTreeMap<(u64, Word), C>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpAlgebraError {
    #[error("operator expressions use different outer registries or dimensions")]
    Mismatch,
    #[error("symbol index {0} outside phase space of dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("polynomial symbol `{0}` has no operator counterpart")]
    UnsupportedSymbol(String),
    #[error(transparent)]
    Grassmann(#[from] crate::grassmann::GrassmannError),
}

impl<C: ComplexScalar> OpExpr<C> {
    pub fn zero(n: usize, outer: &Arc<GeneratorRegistry>) -> Self {
        OpExpr {
            n,
            outer: outer.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, outer: &Arc<GeneratorRegistry>, c: C) -> Self {
        let mut out = Self::zero(n, outer);
        out.add_raw(0, Vec::new(), c);
        out
    }

    pub fn one(n: usize, outer: &Arc<GeneratorRegistry>) -> Self {
        Self::scalar(n, outer, C::one())
    }

    pub fn symbol(n: usize, outer: &Arc<GeneratorRegistry>, s: OpSym) -> Result<Self, OpAlgebraError> {
        if s.index() >= 2 * n {
            return Err(OpAlgebraError::IndexOutOfRange(s.index(), 2 * n));
        }
        let mut out = Self::zero(n, outer);
        out.add_raw(0, vec![s], C::one());
        Ok(out)
    }

    /// `coefficient · outer monomial · word` for an arbitrary word.
    pub fn from_word(n: usize, outer: &Arc<GeneratorRegistry>, c: C, outer_mask: u64, word: &[OpSym]) -> Self {
        let mut out = Self::zero(n, outer);
        for (k, w) in normal_order_word::<C>(word) {
            out.add_raw(outer_mask, w, c.clone() * k);
        }
        out
    }

    /// Outer Grassmann element as a multiple of the identity operator.
    pub fn from_outer(n: usize, g: &GrassmannElement<C>) -> Self {
        let mut out = Self::zero(n, g.registry());
        for (m, c) in g.terms() {
            out.add_raw(m, Vec::new(), c.clone());
        }
        out
    }

    /// Outer generator `g` times the identity.
    pub fn outer_generator(n: usize, outer: &Arc<GeneratorRegistry>, index: usize) -> Self {
        let mut out = Self::zero(n, outer);
        out.add_raw(1u64 << index, Vec::new(), C::one());
        out
    }

    /// Operator polynomial from a commutative polynomial: `q, p ↦ φ̂`,
    /// `λ ↦ λ̂`, written with multipliers on the left.
    pub fn from_poly(n: usize, outer: &Arc<GeneratorRegistry>, p: &PolyExpr<C>) -> Result<Self, OpAlgebraError> {
        let mut out = Self::zero(n, outer);
        for (m, c) in p.terms() {
            let mut word = Vec::new();
            for &(v, e) in m.powers() {
                let sym = var_to_sym(v, n)?;
                word.extend(std::iter::repeat(sym).take(e as usize));
            }
            word.sort();
            out.add_raw(0, word, c.clone());
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outer(&self) -> &Arc<GeneratorRegistry> {
        &self.outer
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Word, &C)> {
        self.terms.iter().map(|((m, w), c)| (*m, w, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `outer_mask · word` (word must be normal-ordered).
    pub fn coefficient(&self, outer_mask: u64, word: &[OpSym]) -> C {
        self.terms
            .get(&(outer_mask, word.to_vec()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Operator multiplying the outer monomial `outer_mask`.
    pub fn outer_component(&self, outer_mask: u64) -> Self {
        let mut out = Self::zero(self.n, &self.outer);
        for ((m, w), c) in &self.terms {
            if *m == outer_mask {
                out.add_raw(0, w.clone(), c.clone());
            }
        }
        out
    }

    /// Scalar part if the expression is a multiple of the identity operator.
    pub fn as_outer(&self) -> Option<GrassmannElement<C>> {
        let mut g = GrassmannElement::zero(&self.outer);
        for ((m, w), c) in &self.terms {
            if !w.is_empty() {
                return None;
            }
            g = g + GrassmannElement::monomial(&self.outer, *m, c.clone());
        }
        Some(g)
    }

    fn add_raw(&mut self, mask: u64, word: Word, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (mask, word);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let v = existing.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = v;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), OpAlgebraError> {
        if self.n == other.n && self.outer.same_as(&other.outer) {
            Ok(())
        } else {
            Err(OpAlgebraError::Mismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, OpAlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for ((m, w), c) in &other.terms {
            out.add_raw(*m, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, OpAlgebraError> {
        self.try_add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n, &self.outer);
        for ((m, w), x) in &self.terms {
            out.add_raw(*m, w.clone(), x.clone() * c.clone());
        }
        out
    }

    /// Product, normal-ordered.
    pub fn multiply(&self, other: &Self) -> Result<Self, OpAlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(self.n, &self.outer);
        for ((m1, w1), c1) in &self.terms {
            let p1 = word_parity(w1);
            for ((m2, w2), c2) in &other.terms {
                let Some(sign) = monomial_product_sign(*m1, *m2) else { continue };
                // moving the outer monomial m2 left across w1
                let cross = p1 * m2.count_ones();
                let negative = (sign < 0) ^ (cross % 2 == 1);
                let base = c1.clone() * c2.clone();
                let base = if negative { -base } else { base };
                let mut partial: Vec<(C, Word)> = vec![(C::one(), w1.clone())];
                for &s in w2 {
                    let mut next = Vec::new();
                    for (k, w) in partial {
                        for (k2, w2n) in insert_symbol::<C>(&w, s) {
                            next.push((k.clone() * k2, w2n));
                        }
                    }
                    partial = next;
                }
                for (k, w) in partial {
                    out.add_raw(m1 | m2, w, base.clone() * k);
                }
            }
        }
        Ok(out)
    }

    /// Total parity of each term: outer degree plus odd symbols.
    fn parity_parts(&self) -> [Self; 2] {
        let mut even = Self::zero(self.n, &self.outer);
        let mut odd = Self::zero(self.n, &self.outer);
        for ((m, w), c) in &self.terms {
            let p = (m.count_ones() + word_parity(w)) % 2;
            let target = if p == 0 { &mut even } else { &mut odd };
            target.add_raw(*m, w.clone(), c.clone());
        }
        [even, odd]
    }

    pub fn is_even(&self) -> bool {
        self.parity_parts()[1].is_zero()
    }

    pub fn is_odd(&self) -> bool {
        self.parity_parts()[0].is_zero()
    }

    /// Graded commutator `[A, B} = AB - (-1)^{|A||B|} BA`, bilinear over
    /// homogeneous parts.
    pub fn graded_commutator(&self, other: &Self) -> Result<Self, OpAlgebraError> {
        let mut out = Self::zero(self.n, &self.outer);
        for (pa, a) in self.parity_parts().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (pb, b) in other.parity_parts().iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.multiply(b)?;
                let ba = b.multiply(a)?;
                let term = if pa * pb == 1 { ab.try_add(&ba)? } else { ab.try_sub(&ba)? };
                out = out.try_add(&term)?;
            }
        }
        Ok(out)
    }

    /// Left derivative with respect to an outer generator.
    pub fn outer_derivative(&self, index: usize) -> Self {
        let bit = 1u64 << index;
        let mut out = Self::zero(self.n, &self.outer);
        for ((m, w), c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            let v = if before % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_raw(m & !bit, w.clone(), v);
        }
        out
    }

    /// Adjoint with `φ̂, λ̂, ĉ, c̄̂` self-adjoint: words are reversed,
    /// coefficients and outer parameters conjugated.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.n, &self.outer);
        for ((m, w), c) in &self.terms {
            // (c m W)† = c* W† m* = c* (-1)^{|W||m|} m* W†
            let mut m_conj = GrassmannElement::one(&self.outer);
            for g in bits(*m).collect::<Vec<_>>().into_iter().rev() {
                let img = match self.outer.rule(g) {
                    Conjugation::Imaginary => -GrassmannElement::monomial(&self.outer, 1u64 << g, C::one()),
                    Conjugation::Paired(h) => GrassmannElement::monomial(&self.outer, 1u64 << h, C::one()),
                };
                m_conj = m_conj * img;
            }
            let cross = word_parity(w) * m.count_ones();
            let mut coeff = c.conjugate();
            if cross % 2 == 1 {
                coeff = -coeff;
            }
            let reversed: Word = w.iter().rev().copied().collect();
            for (k, nw) in normal_order_word::<C>(&reversed) {
                for (mm, mc) in m_conj.terms() {
                    out.add_raw(mm, nw.clone(), coeff.clone() * k.clone() * mc.clone());
                }
            }
        }
        out
    }

    /// Exponential of an even expression whose terms are all nilpotent
    /// (each term carries outer parameters), summed until it terminates.
    pub fn exp_nilpotent(&self) -> Result<Self, OpAlgebraError> {
        let mut sum = Self::one(self.n, &self.outer);
        let mut term = Self::one(self.n, &self.outer);
        for k in 1..=(self.outer.len() as i64 + 1) {
            term = term.multiply(self)?.scale(&C::from_ratio(1, k));
            if term.is_zero() {
                break;
            }
            sum = sum.try_add(&term)?;
        }
        Ok(sum)
    }

    /// Drops every word containing an annihilator of the ghost vacuum
    /// (`c̄̂`), i.e. applies the expression to `|0⟩_F` in normal order.
    pub fn on_ghost_vacuum(&self) -> Self {
        let mut out = Self::zero(self.n, &self.outer);
        for ((m, w), c) in &self.terms {
            if !w.iter().any(|s| matches!(s, OpSym::CBar(_))) {
                out.add_raw(*m, w.clone(), c.clone());
            }
        }
        out
    }
}

fn var_to_sym(v: Var, n: usize) -> Result<OpSym, OpAlgebraError> {
    match v.dof() {
        Some(i) if i >= 1 && i <= n => {}
        _ => return Err(OpAlgebraError::UnsupportedSymbol(v.name())),
    }
    let sym = match v {
        Var::Q { i, dots: 0 } => OpSym::Phi(i - 1),
        Var::P { i, dots: 0 } => OpSym::Phi((n + i as usize - 1) as u16),
        Var::LamQ { i, dots: 0 } => OpSym::Lambda(i - 1),
        Var::LamP { i, dots: 0 } => OpSym::Lambda((n + i as usize - 1) as u16),
        other => return Err(OpAlgebraError::UnsupportedSymbol(other.name())),
    };
    Ok(sym)
}

impl<C: ComplexScalar> fmt::Debug for OpExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, w), c)| {
                let mut s = format!("{:?}", c);
                for g in bits(*m) {
                    s.push(' ');
                    s.push_str(self.outer.name(g));
                }
                for sym in w {
                    s.push(' ');
                    s.push_str(&sym.name(self.n));
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

macro_rules! op_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl<C: ComplexScalar> std::ops::$trait for OpExpr<C> {
            type Output = OpExpr<C>;
            fn $method(self, rhs: OpExpr<C>) -> OpExpr<C> {
                self.$call(&rhs).expect("operator expressions differ in outer registry")
            }
        }
        impl<'a, C: ComplexScalar> std::ops::$trait<&'a OpExpr<C>> for &'a OpExpr<C> {
            type Output = OpExpr<C>;
            fn $method(self, rhs: &'a OpExpr<C>) -> OpExpr<C> {
                self.$call(rhs).expect("operator expressions differ in outer registry")
            }
        }
    };
}

op_binop!(Add, add, try_add);
op_binop!(Sub, sub, try_sub);
op_binop!(Mul, mul, multiply);

impl<C: ComplexScalar> std::ops::Neg for OpExpr<C> {
    type Output = OpExpr<C>;
    fn neg(self) -> OpExpr<C> {
        self.scale(&-C::one())
    }
}

impl<'a, C: ComplexScalar> std::ops::Neg for &'a OpExpr<C> {
    type Output = OpExpr<C>;
    fn neg(self) -> OpExpr<C> {
        self.scale(&-C::one())
    }
}
