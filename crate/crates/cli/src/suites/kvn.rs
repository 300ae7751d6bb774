use std::f64::consts::PI;

use supertime::dynamics::PolyHamiltonian;
use supertime::kvn::{characteristics, rho_consistency, KvNWave, KvnError, PhaseGrid, RhoConsistency};
use supertime::symexpr::parse_polynomial;
use supertime::C64;

use crate::config::{KvnConfig, Prepared};
use crate::report::{Recorder, Report};
use crate::{CliError, Output};

const RHO_TOL: f64 = 1e-6;
const RECURRENCE_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-8;

/// The initial Gaussian `ψ0` evaluated off the grid.
fn gaussian(cfg: &KvnConfig) -> impl Fn(f64, f64) -> C64 {
    let ([q0, p0], w) = (cfg.centre, cfg.width);
    let norm = (2.0 * PI * w * w).sqrt().recip();
    move |q, p| C64::new(norm * (-((q - q0).powi(2) + (p - p0).powi(2)) / (4.0 * w * w)).exp(), 0.0)
}

fn dump(out: &Output, name: &str, w: &KvNWave) -> Result<(), CliError> {
    let mut f = out.writer(name)?;
    w.write_dump(&mut f).map_err(|e| CliError::io(&out.path(name), e))
}

fn record_rho(rec: &mut Recorder, id: &str, r: &Result<RhoConsistency, KvnError>) {
    const RHO: &str = "|ψ(t)|² = ρ(t) with ψ, ρ evolved by the same L̂";
    match r {
        Ok(r) => rec.record(id, RHO, r.error, RHO_TOL, ""),
        Err(e) => rec.error(id, RHO, e),
    }
}

pub fn run(prep: &Prepared, out: &Output) -> Result<Report, CliError> {
    let cfg = &prep.config.kvn;
    let mut rec = Recorder::new("kvn");
    let grid = match PhaseGrid::square(cfg.grid, cfg.half_width) {
        Ok(g) => g,
        Err(e) => {
            rec.error("grid", "periodic phase-space grid", e);
            return Ok(rec.finish());
        }
    };
    let psi0 = KvNWave::gaussian(grid, (cfg.centre[0], cfg.centre[1]), cfg.width);
    let period = 2.0 * PI;
    let t = cfg.periods * period;
    let osc_poly = parse_polynomial("p1^2/2 + q1^2/2").expect("literal");
    let osc = PolyHamiltonian::new(&osc_poly, 1).expect("literal");

    rec.start();
    let user_is_osc = prep.dof == 1 && prep.hamiltonian == osc_poly;
    let user_run = if user_is_osc {
        None
    } else {
        let r = PolyHamiltonian::new(&prep.hamiltonian, prep.dof)
            .map_err(KvnError::from)
            .and_then(|h| rho_consistency(&h, &psi0, t, cfg.dt));
        record_rho(&mut rec, "rho.user", &r);
        Some(r)
    };

    rec.start();
    let osc_run = rho_consistency(&osc, &psi0, t, cfg.dt);
    record_rho(&mut rec, if user_is_osc { "rho.user" } else { "rho.oscillator" }, &osc_run);
    const RECURRENCE: &str = "ψ(t) = ψ0(φ_cl(−t; φ)) for H = (p² + q²)/2";
    match &osc_run {
        Ok(r) => {
            let f0 = gaussian(cfg);
            let (s, c) = t.sin_cos();
            // backward rotation by t
            let oracle = characteristics(grid, f0, |q, p| (q * c - p * s, q * s + p * c));
            match r.psi.distance(&oracle) {
                Ok(d) => rec.record("recurrence", RECURRENCE, d, RECURRENCE_TOL, format!("{}², t = {t:.6}", cfg.grid)),
                Err(e) => rec.error("recurrence", RECURRENCE, e),
            }
            let drift = (r.psi.norm() - psi0.norm()).abs() / psi0.norm();
            rec.record("norm", "‖ψ(t)‖ = ‖ψ0‖", drift, NORM_TOL, "relative");
        }
        Err(e) => {
            rec.error("recurrence", RECURRENCE, e);
            rec.error("norm", "‖ψ(t)‖ = ‖ψ0‖", e);
        }
    }

    // data files come from the configured Hamiltonian when it evolved
    let shown = match user_run {
        Some(Ok(r)) => Some(r),
        Some(Err(_)) => None,
        None => osc_run.ok(),
    };
    if let Some(r) = shown {
        if cfg.dumps {
            dump(out, "psi0.bin", &psi0)?;
            dump(out, "psi_t.bin", &r.psi)?;
            dump(out, "rho_t.bin", &r.rho)?;
        }
        let mut f = out.writer("marginals.csv")?;
        r.psi.write_marginals_csv(&mut f).map_err(|e| CliError::io(&out.path("marginals.csv"), e))?;
    }
    Ok(rec.finish())
}
