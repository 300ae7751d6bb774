use std::io::Write;

use supertime::dynamics::{flow_with_jacobian, Hamiltonian, Pendulum, PolyHamiltonian};
use supertime::pathint::{
    cpi_sliced_kernel, ds_residual_classical, ds_residual_quantum, fourier_to_momentum, free_propagator,
    oscillator_propagator, qpi_kernel_q, PathintError, Polarization, QuadraticAction, QuadraticHamiltonian, Slicing,
    SmoothCurrent,
};
use supertime::symexpr::parse_polynomial;
use supertime::C64;

use crate::config::Prepared;
use crate::report::{Recorder, Report};
use crate::{CliError, Output};

use super::{format_ratios, ratio_residual, RATIO_TOL};

const FREE_TOL: f64 = 1e-12;
const FOURIER_TOL: f64 = 1e-8;
const CPI_TOL: f64 = 1e-9;

fn io(path: std::path::PathBuf) -> impl Fn(std::io::Error) -> CliError {
    move |e| CliError::io(&path, e)
}

fn poly_ham(text: &str) -> PolyHamiltonian<f64> {
    PolyHamiltonian::new(&parse_polynomial(text).expect("literal"), 1).expect("literal")
}

fn fourier_check(hbar: f64, t: f64, slices: usize) -> Result<f64, PathintError> {
    let osc = QuadraticHamiltonian::oscillator(1.0, 1.0);
    let mut worst = 0.0f64;
    for slicing in [Slicing::Standard, Slicing::Dual] {
        let q = QuadraticAction::new(&osc, Polarization::Coordinate, slicing, slices, t, hbar, None)?;
        let p = QuadraticAction::new(&osc, Polarization::Momentum, slicing.dual(), slices, t, hbar, None)?;
        let form = q.kernel_form()?;
        for (p0, p1) in [(0.0, 0.5), (-1.0, 0.3), (0.8, 0.8)] {
            let ft = fourier_to_momentum(&form, p0, p1, hbar)?;
            worst = worst.max((ft - p.kernel(p0, p1)?).norm());
        }
    }
    Ok(worst)
}

pub fn run(prep: &Prepared, out: &Output) -> Result<Report, CliError> {
    let cfg = &prep.config.pathint;
    let seed = prep.config.system.seed;
    let mut rec = Recorder::new("pathint");
    let (hbar, t, q0, q1) = (cfg.hbar, cfg.t, cfg.q0, cfg.q1);

    rec.start();
    const FREE: &str = "sliced free-particle kernel = exact propagator for every N";
    let free = QuadraticHamiltonian::free(1.0);
    let exact = free_propagator(1.0, hbar, t, q0, q1);
    let mut free_err = 0.0f64;
    let mut failed = None;
    for n in std::iter::once(1).chain(cfg.ladder.iter().copied()) {
        match qpi_kernel_q(&free, q0, q1, t, n, hbar) {
            Ok(k) => free_err = free_err.max((k - exact).norm()),
            Err(e) => failed = Some(e),
        }
    }
    match failed {
        None => rec.record("free.exact", FREE, free_err, FREE_TOL, ""),
        Some(e) => rec.error("free.exact", FREE, e),
    }

    rec.start();
    const HALVING: &str = "|K_N − K_Mehler| halves as N doubles";
    let osc = QuadraticHamiltonian::oscillator(1.0, 1.0);
    let mut table = out.writer("kernel_table.csv")?;
    let table_io = io(out.path("kernel_table.csv"));
    writeln!(table, "slices,kernel_re,kernel_im,exact_re,exact_im,error,ratio").map_err(&table_io)?;
    match oscillator_propagator(1.0, 1.0, hbar, t, q0, q1) {
        Ok(mehler) => {
            let mut errs = Vec::new();
            let mut failed = None;
            for &n in &cfg.ladder {
                match qpi_kernel_q(&osc, q0, q1, t, n, hbar) {
                    Ok(k) => {
                        let e = (k - mehler).norm();
                        let ratio = errs.last().map(|p: &f64| p / e).unwrap_or(f64::NAN);
                        writeln!(table, "{n},{:.17e},{:.17e},{:.17e},{:.17e},{e:.17e},{ratio:.17e}", k.re, k.im, mehler.re, mehler.im)
                            .map_err(&table_io)?;
                        errs.push(e);
                    }
                    Err(e) => failed = Some(e),
                }
            }
            match failed {
                None => {
                    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
                    let worst = ratios.iter().map(|&r| ratio_residual(r)).fold(0.0, f64::max);
                    rec.record("oscillator.halving", HALVING, worst, RATIO_TOL, format_ratios(&ratios));
                }
                Some(e) => rec.error("oscillator.halving", HALVING, e),
            }
        }
        Err(e) => rec.error("oscillator.halving", HALVING, e),
    }
    table.flush().map_err(&table_io)?;

    rec.start();
    const FOURIER: &str = "∫dq1 dq0 e^{−ip1q1/ℏ} K(q1|q0) e^{ip0q0/ℏ} = K(p1|p0) with dual slicing";
    match fourier_check(hbar, t, cfg.fourier_slices) {
        Ok(e) => rec.record("fourier", FOURIER, e, FOURIER_TOL, format!("N = {}", cfg.fourier_slices)),
        Err(e) => rec.error("fourier", FOURIER, e),
    }

    // the configured Hamiltonian, when quadratic in one degree of freedom
    if prep.dof == 1 {
        if let Ok(user) = QuadraticHamiltonian::from_poly(&prep.hamiltonian) {
            rec.start();
            const USER: &str = "K_N converges at first order for the configured H";
            let ks: Result<Vec<C64>, _> = cfg.ladder.iter().map(|&n| qpi_kernel_q(&user, q0, q1, t, n, hbar)).collect();
            match ks {
                Ok(ks) if ks.len() >= 3 => {
                    let m = ks.len();
                    let (a, b) = ((ks[m - 3] - ks[m - 2]).norm(), (ks[m - 2] - ks[m - 1]).norm());
                    if b < FREE_TOL {
                        rec.record("user.convergence", USER, a.max(b), FREE_TOL, "slicing exact");
                    } else {
                        let r = a / b;
                        rec.record("user.convergence", USER, ratio_residual(r), RATIO_TOL, format!("difference ratio {r:.3}"));
                    }
                }
                Ok(_) => log::info!("ladder too short for the convergence ratio"),
                Err(e) => rec.error("user.convergence", USER, e),
            }
        }
    }

    rec.start();
    const DSQ: &str = "⟨∂_tφ^a − ω^{ab}∂_bH + ω^{ab}J_b⟩_J = 0, residual O(ε)";
    const DSC: &str = "classical Dyson-Schwinger residual O(ε) on the driven path";
    let mut sweep = out.writer("ds_sweep.csv")?;
    let sweep_io = io(out.path("ds_sweep.csv"));
    writeln!(sweep, "kind,system,slices,max_norm,ratio").map_err(&sweep_io)?;
    let (n1, n2) = (cfg.ds_slices, 2 * cfg.ds_slices);
    let jq = SmoothCurrent::random(seed, 2, 3, t, 1.0);
    let mut ratios = Vec::new();
    let mut failed = None;
    for (name, h) in [("free", QuadraticHamiltonian::free(1.0)), ("oscillator", osc)] {
        let pair = ds_residual_quantum(&h, q0, q1, t, n1, hbar, &jq).and_then(|a| Ok((a, ds_residual_quantum(&h, q0, q1, t, n2, hbar, &jq)?)));
        match pair {
            Ok((a, b)) => {
                let r = a.max_norm / b.max_norm;
                writeln!(sweep, "quantum,{name},{n1},{:.17e},", a.max_norm).map_err(&sweep_io)?;
                writeln!(sweep, "quantum,{name},{n2},{:.17e},{r:.17e}", b.max_norm).map_err(&sweep_io)?;
                ratios.push(r);
            }
            Err(e) => failed = Some(e),
        }
    }
    match failed {
        None => {
            let worst = ratios.iter().map(|&r| ratio_residual(r)).fold(0.0, f64::max);
            rec.record("ds.quantum", DSQ, worst, RATIO_TOL, format_ratios(&ratios));
        }
        Some(e) => rec.error("ds.quantum", DSQ, e),
    }

    rec.start();
    let jc = SmoothCurrent::random(seed.wrapping_add(1), 2, 3, t, 0.5);
    let systems: [(&str, Box<dyn Hamiltonian<f64>>); 3] = [
        ("free", Box::new(poly_ham("p1^2/2"))),
        ("oscillator", Box::new(poly_ham("p1^2/2 + q1^2/2"))),
        ("pendulum", Box::new(Pendulum::default())),
    ];
    let phi0 = [0.2, 0.5];
    let mut ratios = Vec::new();
    let mut failed = None;
    for (name, h) in &systems {
        let pair = ds_residual_classical(h.as_ref(), &phi0, t, n1, &jc)
            .and_then(|a| Ok((a, ds_residual_classical(h.as_ref(), &phi0, t, n2, &jc)?)));
        match pair {
            Ok((a, b)) => {
                let r = a.max_norm / b.max_norm;
                writeln!(sweep, "classical,{name},{n1},{:.17e},", a.max_norm).map_err(&sweep_io)?;
                writeln!(sweep, "classical,{name},{n2},{:.17e},{r:.17e}", b.max_norm).map_err(&sweep_io)?;
                ratios.push(r);
            }
            Err(e) => failed = Some(e),
        }
    }
    sweep.flush().map_err(&sweep_io)?;
    match failed {
        None => {
            let worst = ratios.iter().map(|&r| ratio_residual(r)).fold(0.0, f64::max);
            rec.record("ds.classical", DSC, worst, RATIO_TOL, format_ratios(&ratios));
        }
        Some(e) => rec.error("ds.classical", DSC, e),
    }

    rec.start();
    const CPI: &str = "N sliced delta kernels compose to δ(φ − φ_cl(t; φ0)), Π det M_n = 1";
    let pendulum = Pendulum::<f64>::default();
    let dt = 1e-3;
    let sliced = cpi_sliced_kernel(&pendulum, &phi0, t, 16, dt);
    let whole = flow_with_jacobian(&pendulum, &phi0, t, dt);
    match (sliced, whole) {
        (Ok(s), Ok((phi, m))) => {
            let dphi = s.phi.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let dm = s
                .jacobian
                .iter()
                .flatten()
                .zip(m.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let ddet = (s.det_product - 1.0).abs();
            rec.record("cpi.sliced", CPI, dphi.max(dm).max(ddet), CPI_TOL, format!("pendulum, N = 16, |Πdet − 1| = {ddet:.1e}"));
        }
        (Err(e), _) => rec.error("cpi.sliced", CPI, e),
        (_, Err(e)) => rec.error("cpi.sliced", CPI, e),
    }
    Ok(rec.finish())
}
