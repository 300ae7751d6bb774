use nalgebra::{DMatrix, DVector};

use super::PathintError;
use crate::C64;

/// `exp(−½ xᵀAx + jᵀx + c)` with complex symmetric `A` whose real part is
/// positive semidefinite. Purely imaginary `A` gives Fresnel integrals,
/// defined as the limit from `Re A > 0`.
#[derive(Clone, Debug)]
pub struct GaussianForm {
    pub a: DMatrix<C64>,
    pub j: DVector<C64>,
    pub c: C64,
}

/// Relative pivot size below which a form counts as singular.
const PIVOT_TOL: f64 = 1e-13;

impl GaussianForm {
    pub fn zero(dim: usize) -> Self {
        GaussianForm {
            a: DMatrix::zeros(dim, dim),
            j: DVector::zeros(dim),
            c: C64::new(0.0, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.j.len()
    }

    /// Adds `k · x_u · x_v` to the exponent.
    pub fn add_bilinear(&mut self, k: C64, u: usize, v: usize) {
        if u == v {
            self.a[(u, u)] -= k * 2.0;
        } else {
            self.a[(u, v)] -= k;
            self.a[(v, u)] -= k;
        }
    }

    /// Adds `k · x_u` to the exponent.
    pub fn add_linear(&mut self, k: C64, u: usize) {
        self.j[u] += k;
    }

    pub fn log_eval(&self, x: &[f64]) -> C64 {
        let x = DVector::from_iterator(x.len(), x.iter().map(|v| C64::new(*v, 0.0)));
        let quad = (x.transpose() * &self.a * &x)[(0, 0)];
        -quad * 0.5 + (self.j.transpose() * &x)[(0, 0)] + self.c
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.log_eval(x).exp()
    }

    /// Sets `x_k = values[i]` for `k = indices[i]` and drops those
    /// variables.
    pub fn fix(&self, indices: &[usize], values: &[f64]) -> GaussianForm {
        let keep: Vec<usize> = (0..self.dim()).filter(|k| !indices.contains(k)).collect();
        let mut out = GaussianForm::zero(keep.len());
        out.c = self.c;
        for (&k, &v) in indices.iter().zip(values) {
            let v = C64::new(v, 0.0);
            out.c += self.j[k] * v;
            for (&l, &w) in indices.iter().zip(values) {
                out.c -= self.a[(k, l)] * v * w * 0.5;
            }
        }
        for (r, &u) in keep.iter().enumerate() {
            out.j[r] = self.j[u];
            for (&k, &v) in indices.iter().zip(values) {
                out.j[r] -= self.a[(u, k)] * v;
            }
            for (s, &w) in keep.iter().enumerate() {
                out.a[(r, s)] = self.a[(u, w)];
            }
        }
        out
    }

    /// Integrates over the listed variables, returning the form in the
    /// remaining ones (original order). Each step pivots on the largest
    /// diagonal entry; if all are negligible a 45° rotation of the two
    /// most strongly coupled variables creates one. Square roots are
    /// principal, which is the correct branch when `Re A ⪰ 0`.
    pub fn integrate_out(&self, indices: &[usize]) -> Result<GaussianForm, PathintError> {
        let mut a = self.a.clone();
        let mut j = self.j.clone();
        let mut c = self.c;
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut todo: Vec<usize> = indices.to_vec();
        let keep = self.others(indices);
        let two_pi = C64::new(2.0 * std::f64::consts::PI, 0.0);
        while !todo.is_empty() {
            let (pos, best) = todo
                .iter()
                .enumerate()
                .map(|(i, &k)| (i, a[(k, k)].norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= PIVOT_TOL * scale {
                let mut pair = None;
                let mut strongest = 0.0;
                for (x, &u) in todo.iter().enumerate() {
                    for &v in &todo[x + 1..] {
                        if a[(u, v)].norm() > strongest {
                            strongest = a[(u, v)].norm();
                            pair = Some((u, v));
                        }
                    }
                }
                let (u, v) = match pair {
                    Some(p) if strongest > PIVOT_TOL * scale => p,
                    _ => return Err(PathintError::Singular),
                };
                rotate(&mut a, &mut j, u, v);
                continue;
            }
            let k = todo.swap_remove(pos);
            let akk = a[(k, k)];
            let jk = j[k];
            c += (two_pi / akk).sqrt().ln() + jk * jk / (akk * 2.0);
            let col: Vec<C64> = (0..a.nrows()).map(|i| a[(i, k)]).collect();
            let rest: Vec<usize> = todo.iter().chain(&keep).copied().collect();
            for &u in &rest {
                if col[u] == C64::new(0.0, 0.0) {
                    continue;
                }
                j[u] -= col[u] * jk / akk;
                let f = col[u] / akk;
                for &v in &rest {
                    a[(u, v)] -= f * col[v];
                }
            }
        }
        let mut out = GaussianForm::zero(keep.len());
        out.c = c;
        for (r, &u) in keep.iter().enumerate() {
            out.j[r] = j[u];
            for (s, &v) in keep.iter().enumerate() {
                out.a[(r, s)] = a[(u, v)];
            }
        }
        Ok(out)
    }

    fn others(&self, indices: &[usize]) -> Vec<usize> {
        (0..self.dim()).filter(|k| !indices.contains(k)).collect()
    }

    /// `∫ d^k x exp(−½xᵀAx + jᵀx + c)` and the mean `A⁻¹j`.
    pub fn integrate(&self) -> Result<GaussianIntegral, PathintError> {
        let all: Vec<usize> = (0..self.dim()).collect();
        let log_value = self.integrate_out(&all)?.c;
        let mean = self.a.clone().lu().solve(&self.j).ok_or(PathintError::Singular)?;
        Ok(GaussianIntegral { log_value, mean })
    }
}

/// `x_u → (x_u + x_v)/√2`, `x_v → (x_v − x_u)/√2` applied to the form.
fn rotate(a: &mut DMatrix<C64>, j: &mut DVector<C64>, u: usize, v: usize) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let n = a.nrows();
    // columns, then rows
    for i in 0..n {
        let (x, y) = (a[(i, u)], a[(i, v)]);
        a[(i, u)] = (x + y) * s;
        a[(i, v)] = (y - x) * s;
    }
    for i in 0..n {
        let (x, y) = (a[(u, i)], a[(v, i)]);
        a[(u, i)] = (x + y) * s;
        a[(v, i)] = (y - x) * s;
    }
    let (x, y) = (j[u], j[v]);
    j[u] = (x + y) * s;
    j[v] = (y - x) * s;
}

#[derive(Clone, Debug)]
pub struct GaussianIntegral {
    pub log_value: C64,
    pub mean: DVector<C64>,
}

impl GaussianIntegral {
    pub fn value(&self) -> C64 {
        self.log_value.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrature(f: &GaussianForm, half: f64, n: usize) -> C64 {
        let h = 2.0 * half / n as f64;
        let mut sum = C64::new(0.0, 0.0);
        for i in 0..=n {
            for k in 0..=n {
                let x = [-half + i as f64 * h, -half + k as f64 * h];
                sum += f.eval(&x);
            }
        }
        sum * h * h
    }

    #[test]
    fn matches_brute_force_quadrature() {
        let mut f = GaussianForm::zero(2);
        f.a = DMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.3), C64::new(0.4, -0.2), C64::new(0.4, -0.2), C64::new(0.9, 0.5)]);
        f.j = DVector::from_vec(vec![C64::new(0.3, -0.4), C64::new(-0.5, 0.2)]);
        f.c = C64::new(0.1, 0.2);
        let exact = f.integrate().unwrap().value();
        let brute = quadrature(&f, 12.0, 600);
        assert!((exact - brute).norm() < 1e-9, "{exact} vs {brute}");
    }

    #[test]
    fn partial_integration_then_full_agrees() {
        let mut f = GaussianForm::zero(3);
        f.add_bilinear(C64::new(-0.7, 0.1), 0, 0);
        f.add_bilinear(C64::new(-0.5, 0.0), 1, 1);
        f.add_bilinear(C64::new(-0.4, -0.3), 2, 2);
        f.add_bilinear(C64::new(0.2, 0.1), 0, 1);
        f.add_bilinear(C64::new(-0.1, 0.2), 1, 2);
        f.add_linear(C64::new(0.3, 0.5), 0);
        f.add_linear(C64::new(-0.2, 0.1), 2);
        let whole = f.integrate().unwrap().log_value;
        let staged = f.integrate_out(&[1]).unwrap().integrate().unwrap().log_value;
        assert!((whole.exp() - staged.exp()).norm() < 1e-12);
    }

    #[test]
    fn off_diagonal_form_is_rotated() {
        // ∫dx dy exp(−i xy + x) is a Fresnel limit with zero diagonal
        let mut f = GaussianForm::zero(2);
        f.add_bilinear(C64::new(0.0, -1.0), 0, 1);
        f.add_bilinear(C64::new(-0.5, 0.0), 0, 0);
        let v = f.integrate().unwrap().value();
        // = ∫dx e^{−x²/2} 2π δ(x) = 2π
        assert!((v - C64::new(2.0 * std::f64::consts::PI, 0.0)).norm() < 1e-12);
        let mut g = GaussianForm::zero(2);
        g.add_bilinear(C64::new(0.0, -1.0), 0, 1);
        assert!(g.integrate().is_ok());
        assert_eq!(GaussianForm::zero(2).integrate().unwrap_err(), PathintError::Singular);
    }
}
