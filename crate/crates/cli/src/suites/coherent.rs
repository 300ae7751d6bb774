use std::io::Write;

use nalgebra::DMatrix;
use supertime::coherent::{
    classical_coherent_pair, coherent_state, completeness, displacement, grassmann_coherent_check,
    power_series_state, scalar_product_formula, truncation_tail, FockSpace,
};
use supertime::C64;

use crate::config::Prepared;
use crate::report::{Recorder, Report};
use crate::{CliError, Output};

const EXACT_TOL: f64 = 1e-12;
const SCALAR_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-6;

pub fn run(prep: &Prepared, out: &Output) -> Result<Report, CliError> {
    let cfg = &prep.config.coherent;
    let dim = cfg.dim;
    let z = C64::new(cfg.z[0], cfg.z[1]);
    let zp = C64::new(cfg.z_p[0], cfg.z_p[1]);
    let mut rec = Recorder::new("coherent");
    // beyond |z| = 1 the truncated tail dominates the rounding error
    let tol = |z: C64| EXACT_TOL.max(2.0 * truncation_tail(z, dim));

    rec.start();
    const EIGEN: &str = "â|z⟩ = z|z⟩";
    const SERIES: &str = "|z⟩ = e^{−|z|²/2} Σ z^n/√n! |n⟩";
    let fock = FockSpace::new(dim, 1);
    match (coherent_state(z, dim), fock) {
        (Ok(s), Ok(fock)) => {
            rec.record("eigen", EIGEN, s.eigen_residual(&fock), tol(z), format!("D = {dim}, z = {z}"));
            let series = power_series_state(z, dim);
            rec.record("series", SERIES, (&s.coeffs - &series).norm(), tol(z), "");
            let path = out.path("coherent_state.csv");
            let mut f = out.writer("coherent_state.csv")?;
            let io = |e| CliError::io(&path, e);
            writeln!(f, "n,re,im,probability,series_re,series_im").map_err(io)?;
            for (n, (c, p)) in s.coeffs.iter().zip(series.iter()).enumerate() {
                writeln!(f, "{n},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", c.re, c.im, c.norm_sqr(), p.re, p.im).map_err(io)?;
            }
            f.flush().map_err(io)?;
        }
        (Err(e), _) | (_, Err(e)) => {
            rec.error("eigen", EIGEN, &e);
            rec.error("series", SERIES, e);
        }
    }

    rec.start();
    const OVERLAP: &str = "|⟨z|w⟩|² = e^{−|z−w|²}";
    match (coherent_state(z, dim), coherent_state(zp, dim)) {
        (Ok(a), Ok(b)) => {
            let r = (a.inner(&b).norm_sqr() - (-(z - zp).norm_sqr()).exp()).abs();
            rec.record("overlap", OVERLAP, r, tol(z).max(tol(zp)), format!("w = {zp}"));
        }
        (Err(e), _) | (_, Err(e)) => rec.error("overlap", OVERLAP, e),
    }

    rec.start();
    const PAIR: &str = "â_q|z^q, z^p⟩ = z^q|z^q, z^p⟩, â_p|z^q, z^p⟩ = z^p|z^q, z^p⟩";
    const SCALAR: &str = "⟨z^q_1, z^p_1|z^q_0, z^p_0⟩ = exp Σ_a (z̄^a_1 z^a_0 − ½|z^a_1|² − ½|z^a_0|²)";
    match (classical_coherent_pair(z, zp, dim), FockSpace::new(dim, 2)) {
        (Ok(x), Ok(fock2)) => {
            rec.record("pair.eigen", PAIR, x.eigen_residual(&fock2), tol(z).max(tol(zp)), "");
            match classical_coherent_pair(zp, z, dim) {
                Ok(y) => {
                    let r = (x.inner(&y) - scalar_product_formula(z, zp, zp, z)).norm();
                    rec.record("pair.scalar_product", SCALAR, r, SCALAR_TOL, "");
                }
                Err(e) => rec.error("pair.scalar_product", SCALAR, e),
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            rec.error("pair.eigen", PAIR, &e);
            rec.error("pair.scalar_product", SCALAR, e);
        }
    }

    rec.start();
    const COMPLETE: &str = "∫d²z^q d²z^p/π² |z^q, z^p⟩⟨z^q, z^p| = 1 on the lower levels";
    match completeness(dim) {
        Ok(c) => rec.record("completeness", COMPLETE, c.pair_deviation, COMPLETENESS_TOL, format!("single mode {:.1e}", c.single_deviation)),
        Err(e) => rec.error("completeness", COMPLETE, e),
    }

    rec.start();
    const GHOST: &str = "c̄̂_a F̂|0⟩_F = c̄_a F̂|0⟩_F";
    match grassmann_coherent_check() {
        Ok(g) => {
            let r = [&g.q_residual, &g.p_residual, &g.vacuum_residual].iter().filter(|x| !x.is_zero()).count();
            rec.record("ghosts", GHOST, r as f64, 0.0, "exact");
        }
        Err(e) => rec.error("ghosts", GHOST, e),
    }

    rec.start();
    const UNITARY: &str = "D(z)†D(z) = 1";
    match displacement(z, dim) {
        Ok(d) => {
            let r = (d.adjoint() * &d - DMatrix::<C64>::identity(dim, dim)).iter().map(|c| c.norm()).fold(0.0, f64::max);
            rec.record("unitarity", UNITARY, r, EXACT_TOL, "");
        }
        Err(e) => rec.error("unitarity", UNITARY, e),
    }
    Ok(rec.finish())
}
