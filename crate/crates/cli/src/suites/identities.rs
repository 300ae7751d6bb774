use rand::rngs::StdRng;
use rand::SeedableRng;
use supertime::opalgebra::{base_space_check, liouvillian_ordering, superfield_commutator, susy_check, LiouvillianSpec};
use supertime::scalar::Ring;
use supertime::superfield::{lagrangian_identity, susy_jacobian, IntervalSpace, Superspace};
use supertime::symexpr::{complexify, random_polynomial};
use supertime::{ExactComplex, Poly, Rational};

use crate::config::Prepared;
use crate::report::{Recorder, Report};

/// Counts failing Hamiltonians; an error counts as a failure.
fn count<E: std::fmt::Display>(hs: &[(Poly, usize)], check: impl Fn(&Poly, usize) -> Result<bool, E>) -> (f64, String) {
    let mut failures = 0;
    let mut first_error = String::new();
    for (h, n) in hs {
        match check(h, *n) {
            Ok(true) => {}
            Ok(false) => failures += 1,
            Err(e) => {
                failures += 1;
                if first_error.is_empty() {
                    first_error = format!("error: {e}");
                }
            }
        }
    }
    let note = if first_error.is_empty() {
        format!("{} Hamiltonians", hs.len())
    } else {
        first_error
    };
    (failures as f64, note)
}

fn berezin(h: &Poly, n: usize) -> Result<bool, Box<dyn std::error::Error>> {
    let s = Superspace::new(n);
    let hc = complexify(h);
    let lhs = s.berezin_reduce(&s.substitute(&hc)?)?;
    Ok((lhs - s.h_tilde(&hc)).is_zero())
}

fn lagrangian(h: &Poly, n: usize) -> Result<bool, Box<dyn std::error::Error>> {
    Ok(lagrangian_identity(&Superspace::new(n), &complexify(h))?.residual.is_zero())
}

fn susy(h: &Poly, n: usize) -> Result<bool, Box<dyn std::error::Error>> {
    let hc = complexify(h);
    let mut all = susy_check(&hc, n)?;
    all.extend(base_space_check(&hc, n)?);
    Ok(all.iter().all(|r| r.vanishes()))
}

const BEREZIN: &str = "∫dθdθ̄ H(Φ) = H̃";
const LAGRANGIAN: &str = "∫dθdθ̄ L(Φ) = L̃";
const SUSY: &str = "[Q_H, Q̄_H} = 2iH̃, Q_BRS² = 0, charges conserved, base-space realisation";

pub fn run(prep: &Prepared) -> Report {
    let cfg = &prep.config.identities;
    let mut rec = Recorder::new("identities");
    let mut rng = StdRng::seed_from_u64(prep.config.system.seed);
    let mut family = Vec::new();
    for n in 1..=2 {
        for _ in 0..cfg.random_hamiltonians {
            family.push((random_polynomial(&mut rng, n, cfg.max_degree, cfg.terms), n));
        }
    }
    let user = [(prep.hamiltonian.clone(), prep.dof)];

    type Check = fn(&Poly, usize) -> Result<bool, Box<dyn std::error::Error>>;
    let checks: [(&str, &str, Check); 3] = [("berezin", BEREZIN, berezin), ("lagrangian", LAGRANGIAN, lagrangian), ("susy", SUSY, susy)];
    for (id, anchor, check) in checks {
        rec.start();
        let (r, note) = count(&family, check);
        rec.record(&format!("{id}.family"), anchor, r, 0.0, note);
        let (r, note) = count(&user, check);
        let note = if note.starts_with("error") { note } else { prep.config.system.hamiltonian.clone() };
        rec.record(&format!("{id}.user"), anchor, r, 0.0, note);
    }

    rec.start();
    let mut failures = 0;
    let mut checks = 0;
    let mut note = String::new();
    for n in 1..=2 {
        match superfield_commutator::<ExactComplex>(n) {
            Ok(s) => {
                checks += s.residuals.len() + 1;
                failures += s.residuals.iter().filter(|r| !r.vanishes()).count();
                failures += usize::from(s.extracted != s.direct);
            }
            Err(e) => {
                failures += 1;
                note = format!("error: {e}");
            }
        }
    }
    if note.is_empty() {
        note = format!("{checks} checks over n = 1, 2");
    }
    rec.record("superfield_commutator", "[Φ^a(t,θ,θ̄), Φ^b(t,θ',θ̄')] = ω^{ab} δ(θ̄−θ̄')(θ−θ')", failures as f64, 0.0, note);

    rec.start();
    let (mut good, mut bad, mut total, mut errors) = (0usize, 0usize, 0usize, 0usize);
    for n in 1..=3 {
        for m in 1..=3 {
            for _ in 0..cfg.ordering_samples {
                total += 1;
                match liouvillian_ordering(&LiouvillianSpec::random(&mut rng, n, m, true)) {
                    Ok(r) if r.equals_prepoint && r.hermitian_by_dagger => good += 1,
                    Ok(_) => {}
                    Err(_) => errors += 1,
                }
                match liouvillian_ordering(&LiouvillianSpec::random(&mut rng, n, m, false)) {
                    Ok(r) if !r.hermitian_by_dagger => bad += 1,
                    Ok(_) => {}
                    Err(_) => errors += 1,
                }
            }
        }
    }
    let note = format!("{total} weight sets per class, {errors} errors");
    rec.record("ordering.hermitian", "Hermitian weights reduce Ĥ to the pre-point ordering", (total - good) as f64, 0.0, note.clone());
    rec.record("ordering.violating", "violating weights give a non-Hermitian Ĥ", (total - bad) as f64, 0.0, note);

    rec.start();
    let betas = ["1", "3/7", "-2"];
    let mut sdet_fail = 0;
    let mut interval_fail = 0;
    for text in betas {
        let beta: Rational = text.parse().expect("literal rational");
        let one = <ExactComplex as Ring>::from_i64(1);
        match susy_jacobian(&beta).and_then(|j| j.sdet()) {
            Ok(s) if s.body() == one && s.soul().is_zero() => {}
            _ => sdet_fail += 1,
        }
        if !IntervalSpace::new(beta).check_invariance().all_vanish() {
            interval_fail += 1;
        }
    }
    rec.record("sdet", "sdet of the SUSY superspace Jacobian = 1", sdet_fail as f64, 0.0, "β ∈ {1, 3/7, −2}");
    rec.record("intervals", "S, S_L, S_R invariant under the SUSY transformations", interval_fail as f64, 0.0, "β ∈ {1, 3/7, −2}");
    rec.finish()
}
