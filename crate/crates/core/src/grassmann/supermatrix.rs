use std::sync::Arc;

use super::{GeneratorRegistry, GrassmannElement, GrassmannError};
use crate::scalar::{Field, Ring};

/// Square supermatrix `[[A, B], [C, D]]` with Grassmann-valued entries.
/// `A` (even × even) and `D` (odd × odd) hold even entries, `B` and `C` odd
/// ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix<C: Ring> {
    registry: Arc<GeneratorRegistry>,
    even: usize,
    odd: usize,
    entries: Vec<GrassmannElement<C>>,
}

impl<C: Field> SuperMatrix<C> {
    /// Row-major entries of a `(even + odd)²` matrix.
    pub fn new(
        registry: &Arc<GeneratorRegistry>,
        even: usize,
        odd: usize,
        entries: Vec<GrassmannElement<C>>,
    ) -> Result<Self, GrassmannError> {
        let n = even + odd;
        if entries.len() != n * n {
            return Err(GrassmannError::DimensionMismatch);
        }
        for (k, e) in entries.iter().enumerate() {
            if !e.registry().same_as(registry) {
                return Err(GrassmannError::RegistryMismatch);
            }
            let (i, j) = (k / n, k % n);
            let diagonal_block = (i < even) == (j < even);
            if diagonal_block && !e.is_even() {
                return Err(GrassmannError::BlockParity(if i < even { "A" } else { "D" }));
            }
            if !diagonal_block && !e.is_odd() && !e.is_zero() {
                return Err(GrassmannError::BlockParity(if i < even { "B" } else { "C" }));
            }
        }
        Ok(SuperMatrix {
            registry: registry.clone(),
            even,
            odd,
            entries,
        })
    }

    pub fn identity(registry: &Arc<GeneratorRegistry>, even: usize, odd: usize) -> Self {
        let n = even + odd;
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    GrassmannElement::one(registry)
                } else {
                    GrassmannElement::zero(registry)
                }
            })
            .collect();
        SuperMatrix {
            registry: registry.clone(),
            even,
            odd,
            entries,
        }
    }

    pub fn size(&self) -> usize {
        self.even + self.odd
    }

    pub fn entry(&self, i: usize, j: usize) -> &GrassmannElement<C> {
        &self.entries[i * self.size() + j]
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, GrassmannError> {
        if self.even != other.even || self.odd != other.odd {
            return Err(GrassmannError::DimensionMismatch);
        }
        let n = self.size();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GrassmannElement::zero(&self.registry);
                for k in 0..n {
                    acc = acc.try_add(&self.entry(i, k).multiply(other.entry(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(SuperMatrix {
            registry: self.registry.clone(),
            even: self.even,
            odd: self.odd,
            entries,
        })
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<GrassmannElement<C>>> {
        rows.map(|i| cols.clone().map(|j| self.entry(i, j).clone()).collect())
            .collect()
    }

    /// Berezinian `det(A - B D⁻¹ C) / det(D)`.
    pub fn sdet(&self) -> Result<GrassmannElement<C>, GrassmannError> {
        let (e, o) = (self.even, self.odd);
        let a = self.block(0..e, 0..e);
        let b = self.block(0..e, e..e + o);
        let c = self.block(e..e + o, 0..e);
        let d = self.block(e..e + o, e..e + o);
        let mut schur = a;
        if o == 0 {
            return determinant(&self.registry, schur);
        }
        let d_inv = invert(&self.registry, &d)?;
        let bdc = matmul(&self.registry, &matmul(&self.registry, &b, &d_inv)?, &c)?;
        for i in 0..e {
            for j in 0..e {
                schur[i][j] = schur[i][j].try_sub(&bdc[i][j])?;
            }
        }
        let num = determinant(&self.registry, schur)?;
        let den = determinant(&self.registry, d)?;
        num.multiply(&den.try_inverse()?)
    }
}

fn matmul<C: Field>(
    reg: &Arc<GeneratorRegistry>,
    x: &[Vec<GrassmannElement<C>>],
    y: &[Vec<GrassmannElement<C>>],
) -> Result<Vec<Vec<GrassmannElement<C>>>, GrassmannError> {
    let rows = x.len();
    let inner = y.len();
    let cols = y.first().map_or(0, |r| r.len());
    let mut out = vec![vec![GrassmannElement::zero(reg); cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            for k in 0..inner {
                out[i][j] = out[i][j].try_add(&x[i][k].multiply(&y[k][j])?)?;
            }
        }
    }
    Ok(out)
}

/// Determinant over the (commutative) even subalgebra by cofactor
/// expansion; entries may be nilpotent.
fn determinant<C: Field>(
    reg: &Arc<GeneratorRegistry>,
    m: Vec<Vec<GrassmannElement<C>>>,
) -> Result<GrassmannElement<C>, GrassmannError> {
    let n = m.len();
    if n == 0 {
        return Ok(GrassmannElement::one(reg));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut det = GrassmannElement::zero(reg);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GrassmannElement<C>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].multiply(&determinant(reg, minor)?)?;
        det = if j % 2 == 0 { det.try_add(&term)? } else { det.try_sub(&term)? };
    }
    Ok(det)
}

/// Gauss-Jordan inverse of a matrix with even entries.
fn invert<C: Field>(
    reg: &Arc<GeneratorRegistry>,
    m: &[Vec<GrassmannElement<C>>],
) -> Result<Vec<Vec<GrassmannElement<C>>>, GrassmannError> {
    let n = m.len();
    let mut a: Vec<Vec<GrassmannElement<C>>> = m.to_vec();
    let mut inv: Vec<Vec<GrassmannElement<C>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { GrassmannElement::one(reg) } else { GrassmannElement::zero(reg) })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a[r][col].body().try_inv().is_some())
            .ok_or(GrassmannError::NotInvertible)?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p_inv = a[col][col].try_inverse()?;
        for k in 0..n {
            a[col][k] = a[col][k].multiply(&p_inv)?;
            inv[col][k] = inv[col][k].multiply(&p_inv)?;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for k in 0..n {
                let da = factor.multiply(&a[col][k])?;
                let di = factor.multiply(&inv[col][k])?;
                a[r][k] = a[r][k].try_sub(&da)?;
                inv[r][k] = inv[r][k].try_sub(&di)?;
            }
        }
    }
    Ok(inv)
}
