use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::KvnError;
use crate::C64;

/// Periodic rectangular grid on `[q_min, q_max) × [p_min, p_max)`.
/// Values are stored row-major with index `i_q · N_p + i_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub nq: usize,
    pub np: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl PhaseGrid {
    pub fn new(nq: usize, np: usize, q: (f64, f64), p: (f64, f64)) -> Result<Self, KvnError> {
        if !nq.is_power_of_two() || !np.is_power_of_two() || nq < 8 || np < 8 {
            return Err(KvnError::GridSize(nq, np));
        }
        if !(q.1 > q.0) || !(p.1 > p.0) || !q.0.is_finite() || !q.1.is_finite() || !p.0.is_finite() || !p.1.is_finite() {
            return Err(KvnError::Bounds);
        }
        Ok(PhaseGrid {
            nq,
            np,
            q_min: q.0,
            q_max: q.1,
            p_min: p.0,
            p_max: p.1,
        })
    }

    /// Square grid on `[−half, half)²`.
    pub fn square(n: usize, half: f64) -> Result<Self, KvnError> {
        Self::new(n, n, (-half, half), (-half, half))
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// `(q, p)` of a flat index.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.q(idx / self.np), self.p(idx % self.np))
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// Complex wave on a [`PhaseGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct KvNWave {
    pub grid: PhaseGrid,
    pub data: Vec<C64>,
}

impl KvNWave {
    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> C64) -> Self {
        let data = grid.points().map(|(q, p)| f(q, p)).collect();
        KvNWave { grid, data }
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        KvNWave {
            grid,
            data: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Normalised Gaussian `ψ ∝ exp(−|φ − φc|²/(4w²))`, so that
    /// `|ψ|²` has standard deviation `w` per axis.
    pub fn gaussian(grid: PhaseGrid, centre: (f64, f64), w: f64) -> Self {
        let norm = (2.0 * std::f64::consts::PI * w * w).sqrt().recip();
        Self::from_fn(grid, |q, p| {
            let r2 = (q - centre.0).powi(2) + (p - centre.1).powi(2);
            C64::new(norm * (-r2 / (4.0 * w * w)).exp(), 0.0)
        })
    }

    /// `‖ψ‖ = (∫|ψ|² dφ)^{1/2}`
    pub fn norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()).sqrt()
    }

    /// `|ψ|²` as a wave with zero imaginary part.
    pub fn density(&self) -> KvNWave {
        KvNWave {
            grid: self.grid,
            data: self.data.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect(),
        }
    }

    /// L² distance `(∫|ψ − χ|² dφ)^{1/2}`.
    pub fn distance(&self, other: &KvNWave) -> Result<f64, KvnError> {
        if self.grid != other.grid {
            return Err(KvnError::GridMismatch);
        }
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.cell()).sqrt())
    }

    pub fn scale(&self, c: C64) -> KvNWave {
        KvNWave {
            grid: self.grid,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &KvNWave) -> Result<KvNWave, KvnError> {
        if self.grid != other.grid {
            return Err(KvnError::GridMismatch);
        }
        Ok(KvNWave {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest `|ψ|` within `shell` cells of the domain boundary divided by
    /// the global maximum.
    pub fn boundary_fraction(&self, shell: usize) -> f64 {
        let g = &self.grid;
        let peak = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut edge: f64 = 0.0;
        for (idx, z) in self.data.iter().enumerate() {
            let (i, j) = (idx / g.np, idx % g.np);
            if i < shell || i + shell >= g.nq || j < shell || j + shell >= g.np {
                edge = edge.max(z.norm());
            }
        }
        edge / peak
    }

    /// `∫|ψ|² dp` on the `q` nodes and `∫|ψ|² dq` on the `p` nodes.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let mut mq = vec![0.0; g.nq];
        let mut mp = vec![0.0; g.np];
        for (idx, z) in self.data.iter().enumerate() {
            let r = z.norm_sqr();
            mq[idx / g.np] += r * g.dp();
            mp[idx % g.np] += r * g.dq();
        }
        (mq, mp)
    }

    /// Binary dump: `N_q`, `N_p`, number of components (2 for complex)
    /// as little-endian `u64`, then `q_min, q_max, p_min, p_max` and the
    /// values row-major as little-endian `f64`, real and imaginary parts
    /// interleaved.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let g = &self.grid;
        for v in [g.nq as u64, g.np as u64, 2] {
            out.write_all(&v.to_le_bytes())?;
        }
        for v in [g.q_min, g.q_max, g.p_min, g.p_max] {
            out.write_all(&v.to_le_bytes())?;
        }
        for z in &self.data {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`KvNWave::write_dump`].
    pub fn read_dump(bytes: &[u8]) -> Result<KvNWave, KvnError> {
        let word = |k: usize| -> Result<[u8; 8], KvnError> {
            bytes
                .get(8 * k..8 * k + 8)
                .and_then(|s| s.try_into().ok())
                .ok_or(KvnError::Dump)
        };
        let nq = u64::from_le_bytes(word(0)?) as usize;
        let np = u64::from_le_bytes(word(1)?) as usize;
        if u64::from_le_bytes(word(2)?) != 2 {
            return Err(KvnError::Dump);
        }
        let f = |k: usize| word(k).map(f64::from_le_bytes);
        let grid = PhaseGrid::new(nq, np, (f(3)?, f(4)?), (f(5)?, f(6)?))?;
        if bytes.len() != 8 * (7 + 2 * grid.len()) {
            return Err(KvnError::Dump);
        }
        let data = (0..grid.len())
            .map(|i| Ok(C64::new(f(7 + 2 * i)?, f(8 + 2 * i)?)))
            .collect::<Result<_, KvnError>>()?;
        Ok(KvNWave { grid, data })
    }

    /// CSV with columns `axis,coordinate,marginal`.
    pub fn write_marginals_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (mq, mp) = self.marginals();
        writeln!(out, "axis,coordinate,marginal")?;
        for (i, v) in mq.iter().enumerate() {
            writeln!(out, "q,{:.17e},{:.17e}", self.grid.q(i), v)?;
        }
        for (j, v) in mp.iter().enumerate() {
            writeln!(out, "p,{:.17e},{:.17e}", self.grid.p(j), v)?;
        }
        Ok(())
    }
}

/// FFT plans and wavenumbers for spectral differentiation on one grid.
pub(crate) struct Spectral {
    grid: PhaseGrid,
    fq: Arc<dyn Fft<f64>>,
    iq: Arc<dyn Fft<f64>>,
    fp: Arc<dyn Fft<f64>>,
    ip: Arc<dyn Fft<f64>>,
    kq: Vec<f64>,
    kp: Vec<f64>,
    scratch: Vec<C64>,
    buf: Vec<C64>,
}

/// `2π m / L` for `m` in FFT order with the Nyquist mode zeroed, which
/// keeps the derivative of a real field real.
fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let s = if m < n / 2 {
                m as f64
            } else if m == n / 2 {
                0.0
            } else {
                m as f64 - n as f64
            };
            2.0 * std::f64::consts::PI * s / length
        })
        .collect()
}

impl Spectral {
    pub fn new(grid: PhaseGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fq = planner.plan_fft_forward(grid.nq);
        let iq = planner.plan_fft_inverse(grid.nq);
        let fp = planner.plan_fft_forward(grid.np);
        let ip = planner.plan_fft_inverse(grid.np);
        let scratch_len = [&fq, &iq, &fp, &ip]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Spectral {
            grid,
            kq: wavenumbers(grid.nq, grid.q_max - grid.q_min),
            kp: wavenumbers(grid.np, grid.p_max - grid.p_min),
            fq,
            iq,
            fp,
            ip,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            buf: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// `out = ∂_p ψ`
    pub fn d_p(&mut self, psi: &[C64], out: &mut [C64]) {
        let np = self.grid.np;
        out.copy_from_slice(psi);
        self.fp.process_with_scratch(out, &mut self.scratch);
        let norm = 1.0 / np as f64;
        for (idx, z) in out.iter_mut().enumerate() {
            *z *= Complex::new(0.0, self.kp[idx % np] * norm);
        }
        self.ip.process_with_scratch(out, &mut self.scratch);
    }

    /// `out = ∂_q ψ`, via a transpose so the transforms run on
    /// contiguous rows.
    pub fn d_q(&mut self, psi: &[C64], out: &mut [C64]) {
        let (nq, np) = (self.grid.nq, self.grid.np);
        for i in 0..nq {
            for j in 0..np {
                self.buf[j * nq + i] = psi[i * np + j];
            }
        }
        self.fq.process_with_scratch(&mut self.buf, &mut self.scratch);
        let norm = 1.0 / nq as f64;
        for (idx, z) in self.buf.iter_mut().enumerate() {
            *z *= Complex::new(0.0, self.kq[idx % nq] * norm);
        }
        self.iq.process_with_scratch(&mut self.buf, &mut self.scratch);
        for i in 0..nq {
            for j in 0..np {
                out[i * np + j] = self.buf[j * nq + i];
            }
        }
    }

    /// Fraction of spectral energy in modes with `|m| ≥ 3N/8` along
    /// either axis.
    pub fn top_mode_fraction(&mut self, psi: &[C64]) -> f64 {
        let (nq, np) = (self.grid.nq, self.grid.np);
        let mut spec = psi.to_vec();
        self.fp.process_with_scratch(&mut spec, &mut self.scratch);
        for i in 0..nq {
            for j in 0..np {
                self.buf[j * nq + i] = spec[i * np + j];
            }
        }
        self.fq.process_with_scratch(&mut self.buf, &mut self.scratch);
        let high = |m: usize, n: usize| {
            let s = if m <= n / 2 { m } else { n - m };
            8 * s >= 3 * n
        };
        let (mut total, mut top) = (0.0, 0.0);
        for (idx, z) in self.buf.iter().enumerate() {
            let (j, i) = (idx / nq, idx % nq);
            let e = z.norm_sqr();
            total += e;
            if high(i, nq) || high(j, np) {
                top += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            top / total
        }
    }
}
