//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//! Runs without the libtest harness so that the lines are always shown.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use supertime::coherent::{
    classical_coherent_pair, coherent_state, completeness, grassmann_coherent_check, scalar_product_formula, FockSpace,
};
use supertime::dynamics::{
    charge_drift, integrate, jacobi_check, odd_basis, ExtendedState, Hamiltonian, Pendulum, PolyHamiltonian,
};
use supertime::kvn::{characteristics, rho_consistency, KvNWave, PhaseGrid};
use supertime::opalgebra::{base_space_check, superfield_commutator, susy_check, liouvillian_ordering, LiouvillianSpec};
use supertime::pathint::{
    ds_residual_classical, ds_residual_quantum, fourier_to_momentum, free_propagator, oscillator_propagator,
    qpi_kernel_q, Polarization, QuadraticAction, QuadraticHamiltonian, Slicing, SmoothCurrent,
};
use supertime::superfield::{lagrangian_identity, susy_jacobian, IntervalSpace, Superspace};
use supertime::symexpr::{complexify, parse_polynomial, random_polynomial};
use supertime::{ExactComplex, Poly, Rational, C64};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// The random Hamiltonian family shared by the symbolic criteria:
/// ten per `n ∈ {1, 2}`, degree at most 4.
fn family() -> Vec<(Poly, usize)> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for n in 1..=2 {
        for _ in 0..10 {
            out.push((random_polynomial(&mut rng, n, 4, 5), n));
        }
    }
    out
}

fn berezin_reduction() -> Outcome {
    let mut failures = 0;
    let hs = family();
    for (h, n) in &hs {
        let s = Superspace::new(*n);
        let hc = complexify(h);
        let lhs = s.berezin_reduce(&s.substitute(&hc).expect("substitute")).expect("berezin");
        if !(lhs - s.h_tilde(&hc)).is_zero() {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} Hamiltonians, {failures} non-zero residuals (exact)", hs.len()))
}

fn lagrangian() -> Outcome {
    let mut failures = 0;
    let hs = family();
    for (h, n) in &hs {
        let r = lagrangian_identity(&Superspace::new(*n), &complexify(h)).expect("lagrangian");
        if !r.residual.is_zero() {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} Hamiltonians, {failures} non-zero residuals (exact)", hs.len()))
}

fn susy_algebra() -> Outcome {
    let mut failures = 0;
    let mut checks = 0;
    for (h, n) in family() {
        let hc = complexify(&h);
        for r in susy_check(&hc, n).expect("susy").into_iter().chain(base_space_check(&hc, n).expect("base")) {
            checks += 1;
            if !r.vanishes() {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checks} residuals, {failures} non-zero (exact)"))
}

fn superfield_commutators() -> Outcome {
    let mut failures = 0;
    let mut checks = 0;
    for n in 1..=2 {
        let s = superfield_commutator::<ExactComplex>(n).expect("commutator");
        checks += s.residuals.len() + 1;
        failures += s.residuals.iter().filter(|r| !r.vanishes()).count();
        if s.extracted != s.direct {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{checks} checks over n = 1, 2, {failures} failures (exact)"))
}

fn ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut good, mut bad, mut total) = (0, 0, 0);
    for n in 1..=3 {
        for m in 1..=3 {
            for _ in 0..50 {
                total += 1;
                let r = liouvillian_ordering(&LiouvillianSpec::random(&mut rng, n, m, true)).expect("ordering");
                if r.equals_prepoint && r.hermitian_by_dagger {
                    good += 1;
                }
                let r = liouvillian_ordering(&LiouvillianSpec::random(&mut rng, n, m, false)).expect("ordering");
                if !r.hermitian_by_dagger {
                    bad += 1;
                }
            }
        }
    }
    outcome(
        good == total && bad == total,
        format!("{good}/{total} Hermitian sets reduce to pre-point, {bad}/{total} violating sets non-Hermitian"),
    )
}

fn sdet_and_intervals() -> Outcome {
    let mut ok = true;
    for beta in ["1", "3/7", "-2"] {
        let beta: Rational = beta.parse().expect("rational");
        let sdet = susy_jacobian(&beta).expect("jacobian").sdet().expect("sdet");
        ok &= sdet.body() == <ExactComplex as supertime::scalar::Ring>::from_i64(1) && sdet.soul().is_zero();
        ok &= IntervalSpace::new(beta).check_invariance().all_vanish();
    }
    outcome(ok, "sdet = 1 and S, S_L, S_R invariant for β ∈ {1, 3/7, −2} (exact)")
}

fn poly_ham(text: &str) -> PolyHamiltonian<f64> {
    PolyHamiltonian::new(&parse_polynomial(text).expect("parse"), 1).expect("hamiltonian")
}

fn jacobi() -> Outcome {
    let p = Pendulum::<f64>::default();
    let coarse = jacobi_check(&p, &[1.0, 0.2], &[0.6, 0.8], 5.0, 1e-4, 1e-3).expect("jacobi");
    let fine = jacobi_check(&p, &[1.0, 0.2], &[0.6, 0.8], 5.0, 5e-5, 1e-3).expect("jacobi");
    let ratio = coarse / fine;
    let osc = jacobi_check(&poly_ham("p1^2/2 + q1^2/2"), &[1.0, 0.2], &[0.6, 0.8], 5.0, 1e-4, 1e-3).expect("jacobi");
    outcome(
        (1.8..=2.2).contains(&ratio) && osc < 1e-10,
        format!("pendulum ratio {ratio:.4} ∈ [1.8, 2.2], oscillator error {osc:.2e} < 1e-10"),
    )
}

fn charges() -> Outcome {
    let c = vec![vec![1.0, 0.0, 0.3], vec![0.0, 1.0, -0.2]];
    let cb = vec![vec![0.5, -0.1, 0.0], vec![0.2, 0.7, 1.0]];
    let s0 = ExtendedState::new(&[1.2, 0.3], &[0.4, -0.6], &c, &cb).expect("state");
    let basis = odd_basis(3);
    let t = 5.0;
    let mut worst = 0.0f64;
    let mut count = 0;
    let systems: [(&str, Box<dyn Hamiltonian<f64>>); 2] =
        [("oscillator", Box::new(poly_ham("p1^2/2 + q1^2/2"))), ("pendulum", Box::new(Pendulum::default()))];
    for (_, h) in &systems {
        let flow = integrate(h.as_ref(), &s0, 0.0, t, 1e-3, 100).expect("flow");
        for (_, d) in charge_drift(h.as_ref(), &flow, &basis).expect("drift") {
            worst = worst.max(d / t);
            count += 1;
        }
    }
    outcome(worst < 1e-8, format!("{count} charge drifts, worst {worst:.2e} per unit time < 1e-8"))
}

fn kvn() -> Outcome {
    let grid = PhaseGrid::square(256, 8.0).expect("grid");
    let (centre, w) = ((2.0, 0.0), 0.5);
    let psi0 = KvNWave::gaussian(grid, centre, w);
    let h = poly_ham("p1^2/2 + q1^2/2");
    let period = 2.0 * PI;
    let r = rho_consistency(&h, &psi0, period, 2e-3).expect("kvn");
    let norm = (2.0 * PI * w * w).sqrt().recip();
    let f0 = |q: f64, p: f64| {
        C64::new(norm * (-((q - centre.0).powi(2) + (p - centre.1).powi(2)) / (4.0 * w * w)).exp(), 0.0)
    };
    // backward rotation by one full period
    let oracle = characteristics(grid, f0, |q, p| {
        let (s, c) = period.sin_cos();
        (q * c - p * s, q * s + p * c)
    });
    let recurrence = r.psi.distance(&oracle).expect("distance");
    outcome(
        r.error < 1e-6 && recurrence < 1e-6,
        format!("‖|ψ|² − ρ‖ = {:.2e} < 1e-6, recurrence {recurrence:.2e} < 1e-6 (256², one period)", r.error),
    )
}

fn sliced_qpi() -> Outcome {
    let free = QuadraticHamiltonian::free(1.0);
    let exact = free_propagator(1.0, 1.0, 1.0, 0.0, 1.0);
    let free_err = [1, 2, 4, 8, 16, 32, 64, 128]
        .iter()
        .map(|&n| (qpi_kernel_q(&free, 0.0, 1.0, 1.0, n, 1.0).expect("kernel") - exact).norm())
        .fold(0.0, f64::max);
    let osc = QuadraticHamiltonian::oscillator(1.0, 1.0);
    let mehler = oscillator_propagator(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).expect("mehler");
    let errs: Vec<f64> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&n| (qpi_kernel_q(&osc, 0.0, 1.0, 1.0, n, 1.0).expect("kernel") - mehler).norm())
        .collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let halving = ratios.iter().all(|r| (1.8..=2.2).contains(r));
    let mut fourier = 0.0f64;
    for slicing in [Slicing::Standard, Slicing::Dual] {
        let q = QuadraticAction::new(&osc, Polarization::Coordinate, slicing, 64, 1.0, 1.0, None).expect("action");
        let p = QuadraticAction::new(&osc, Polarization::Momentum, slicing.dual(), 64, 1.0, 1.0, None).expect("action");
        let form = q.kernel_form().expect("form");
        for (p0, p1) in [(0.0, 0.5), (-1.0, 0.3), (0.8, 0.8)] {
            let ft = fourier_to_momentum(&form, p0, p1, 1.0).expect("fourier");
            fourier = fourier.max((ft - p.kernel(p0, p1).expect("kernel")).norm());
        }
    }
    let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        free_err < 1e-12 && halving && fourier < 1e-8,
        format!(
            "free error {free_err:.1e} < 1e-12, oscillator ratios [{}] ∈ [1.8, 2.2], q/p Fourier {fourier:.1e} < 1e-8",
            ratio_text.join(", ")
        ),
    )
}

fn dyson_schwinger() -> Outcome {
    let j = SmoothCurrent::random(SEED, 2, 3, 1.0, 1.0);
    let mut ratios = Vec::new();
    for h in [QuadraticHamiltonian::free(1.0), QuadraticHamiltonian::oscillator(1.0, 1.0)] {
        let coarse = ds_residual_quantum(&h, 0.0, 0.5, 1.0, 100, 1.0, &j).expect("ds");
        let fine = ds_residual_quantum(&h, 0.0, 0.5, 1.0, 200, 1.0, &j).expect("ds");
        ratios.push(coarse.max_norm / fine.max_norm);
    }
    let jc = SmoothCurrent::random(SEED + 1, 2, 3, 1.0, 0.5);
    let systems: [Box<dyn Hamiltonian<f64>>; 3] =
        [Box::new(poly_ham("p1^2/2")), Box::new(poly_ham("p1^2/2 + q1^2/2")), Box::new(Pendulum::default())];
    for h in &systems {
        let coarse = ds_residual_classical(h.as_ref(), &[0.2, 0.5], 1.0, 100, &jc).expect("ds");
        let fine = ds_residual_classical(h.as_ref(), &[0.2, 0.5], 1.0, 200, &jc).expect("ds");
        ratios.push(coarse.max_norm / fine.max_norm);
    }
    let text: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        ratios.iter().all(|r| (1.8..=2.2).contains(r)),
        format!("quantum free/oscillator, classical free/oscillator/pendulum ratios [{}] ∈ [1.8, 2.2]", text.join(", ")),
    )
}

fn coherent() -> Outcome {
    let fock = FockSpace::new(32, 1).expect("fock");
    let mut eig = 0.0f64;
    for z in [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.6, 0.8), C64::new(-0.3, 0.2)] {
        eig = eig.max(coherent_state(z, 32).expect("state").eigen_residual(&fock));
    }
    let pairs = [
        (C64::new(0.3, 0.2), C64::new(-0.7, 0.1), C64::new(-0.1, 0.9), C64::new(0.5, -0.4)),
        (C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.2, -0.2), C64::new(-0.6, 0.0)),
    ];
    let mut scalar = 0.0f64;
    for (a, b, c, d) in pairs {
        let x = classical_coherent_pair(a, b, 32).expect("pair");
        let y = classical_coherent_pair(c, d, 32).expect("pair");
        scalar = scalar.max((x.inner(&y) - scalar_product_formula(a, b, c, d)).norm());
    }
    let comp = completeness(32).expect("completeness");
    let ghosts = grassmann_coherent_check().expect("ghosts").vanishes();
    outcome(
        eig < 1e-12 && scalar < 1e-10 && comp.pair_deviation < 1e-6 && ghosts,
        format!(
            "eigen {eig:.1e} < 1e-12, scalar product {scalar:.1e} < 1e-10, completeness {:.1e} < 1e-6, ghost residual {}",
            comp.pair_deviation,
            if ghosts { "0" } else { "non-zero" }
        ),
    )
}

fn main() {
    let criteria: [(u8, &str, u64, fn() -> Outcome); 12] = [
        (1, "Berezin reduction", 5, berezin_reduction),
        (2, "Lagrangian identity", 5, lagrangian),
        (3, "SUSY algebra", 10, susy_algebra),
        (4, "superfield commutator", 5, superfield_commutators),
        (5, "ordering equivalence", 30, ordering),
        (6, "sdet and intervals", 1, sdet_and_intervals),
        (7, "Jacobi fields", 10, jacobi),
        (8, "charge conservation", 10, charges),
        (9, "KvN consistency", 120, kvn),
        (10, "sliced QPI", 60, sliced_qpi),
        (11, "Dyson-Schwinger", 60, dyson_schwinger),
        (12, "coherent states", 30, coherent),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {name}: {} [{:.2}s / {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
