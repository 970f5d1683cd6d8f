//! Acceptance checks. Prints one PASS/FAIL line per criterion (with NOTE
//! lines for supporting numbers) and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;

use geophase_cli::config::Config;
use geophase_cli::experiments::{run_adiabatic_error, run_fig4, run_loop_phase, run_s_surface};
use geophase_cli::record::Value;
use geophase_core::hamiltonians::{
    eigenstate_on_cone, Branch, FieldParams, Form, HamiltonianSpec, RotationSchedule, SpinB,
};
use geophase_core::linalg::{evolve_constant, pauli, SpinState};
use geophase_core::phases::{
    dynamical_phase, energy_trajectory, wrap_pi, zero_dynamical_gamma, EnergyReference,
};
use geophase_core::propagation::{
    instantaneous_eigenstate_tracking_error, propagate_closed_form, propagate_numerical,
    IntegratorConfig, Propagator,
};
use geophase_core::sequences::{
    conditional_gate, lower_sequence, max_phase_difference, solve_s_controls, LoopMode,
    PulseSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn criterion(&mut self, n: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} [{n}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }

    fn note(&self, text: String) {
        println!("     note: {text}");
    }
}

const RATIOS: [f64; 5] = [
    0.1,
    0.316_227_766_016_837_94,
    1.0,
    3.162_277_660_168_379_5,
    10.0,
];

fn oracle_agreement(r: &mut Report) {
    let mut worst: f64 = 0.0;
    let mut worst_alt: f64 = f64::INFINITY;
    let mut count = 0;
    for &g in &RATIOS {
        for &r0 in &RATIOS {
            for &r1 in &RATIOS {
                let (w0, w1) = (r0 * g, r1 * g);
                let spec = HamiltonianSpec::rotating(w0, w1, g).unwrap();
                let tau = 2.0 * PI / g;
                let cfg = IntegratorConfig::with_steps(tau, 4096).unwrap();
                let h1 = spec.h0() - pauli::sigma_z().scale_real(0.5 * g);
                for t in [tau / 4.0, tau / 2.0, tau] {
                    let num = propagate_numerical(&spec, t, &cfg).unwrap().unitary;
                    let exact = propagate_closed_form(&spec, t).unwrap();
                    worst = worst.max(num.as_operator().max_abs_diff(exact.as_operator()));
                    // same form with the frame factor e^{-iγtσz} instead of e^{-iγtσz/2}
                    let alt = evolve_constant(&pauli::sigma_z().scale_real(g), t)
                        * evolve_constant(&h1, t);
                    worst_alt = worst_alt.min(num.as_operator().max_abs_diff(alt.as_operator()));
                    count += 1;
                }
            }
        }
    }
    r.criterion(
        1,
        "numerical vs closed-form propagator",
        worst < 1e-8,
        format!("max |U_num - U_exact| = {worst:.3e} over {count} (spec, t) pairs (tol 1e-8)"),
    );
    r.note(format!(
        "frame factor without the 1/2 misses the integrator by at least {worst_alt:.3e}"
    ));
}

fn cone_tracking(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let sign = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.gen_bool(0.5) {
                1.0
            } else {
                -1.0
            }
        };
        let w0: f64 = sign(&mut rng) * rng.gen_range(0.2..5.0);
        let w1 = rng.gen_range(0.2..5.0);
        let g: f64 = sign(&mut rng) * rng.gen_range(0.2..5.0);
        let tau = 2.0 * PI / g.abs();
        let schedule = if k < 15 {
            RotationSchedule::constant(g).unwrap()
        } else {
            let (a, b, phase) = (
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(0.0..2.0 * PI),
            );
            let n = 129;
            let samples = (0..n)
                .map(|i| {
                    let s = i as f64 / (n - 1) as f64;
                    g * (1.0 + a * (2.0 * PI * s + phase).sin() + b * (4.0 * PI * s).cos())
                })
                .collect();
            RotationSchedule::tabulated_loop(samples, tau).unwrap()
        };
        let spec = HamiltonianSpec::new(
            Form::Compensated,
            FieldParams::new(w0, w1).unwrap(),
            schedule,
        )
        .unwrap();
        let cfg = IntegratorConfig::auto(&spec, tau).unwrap();
        let err = instantaneous_eigenstate_tracking_error(&spec, tau, 64, &cfg).unwrap();
        worst = worst.max(err);
    }
    r.criterion(
        2,
        "compensated evolution tracks the instantaneous eigenstate",
        worst < 1e-8,
        format!("max tracking error {worst:.3e} over 20 specs, 5 tabulated (tol 1e-8)"),
    );
}

fn dynamical_nullity(r: &mut Report) {
    let mut worst_point: f64 = 0.0;
    let mut worst_integral: f64 = 0.0;
    let mut system_min: f64 = f64::INFINITY;
    for k in 0..10 {
        let w0 = 0.3 + 0.45 * k as f64;
        let w1 = 0.2 + 0.37 * ((3 * k) % 10) as f64;
        let g = zero_dynamical_gamma(w0, w1).unwrap();
        let spec = HamiltonianSpec::compensated(w0, w1, g).unwrap();
        let tau = 2.0 * PI / g.abs();
        let (psi0, lambda) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let cfg = IntegratorConfig::with_steps(tau, 4096).unwrap();
        let b = w0.hypot(w1);
        let e = energy_trajectory(&spec, &psi0, tau, &cfg, EnergyReference::Generator).unwrap();
        for (_, x) in e {
            worst_point = worst_point.max(x.abs() / b);
        }
        let phase = dynamical_phase(&spec, &psi0, tau, &cfg, EnergyReference::Generator).unwrap();
        worst_integral = worst_integral.max(phase.abs() / (lambda.abs() * tau));
        let bare =
            dynamical_phase(&spec, &psi0, tau, &cfg, EnergyReference::Uncompensated).unwrap();
        system_min = system_min.min(bare.abs() / (lambda.abs() * tau));
    }
    r.criterion(
        3,
        "dynamical phase vanishes at the zero-dynamical speed",
        worst_point < 1e-9 && worst_integral < 1e-8,
        format!(
            "max |<H_W>|/B = {worst_point:.3e} (tol 1e-9), max |phi_dyn|/(|lambda| tau) = {worst_integral:.3e} (tol 1e-8)"
        ),
    );
    r.note(format!(
        "energy taken against the generator H_W; against the bare rotating field |phi_dyn|/(|lambda| tau) >= {system_min:.3}"
    ));
}

/// Solves tan(y + x) = p, tan(y - x) = m by Newton iteration.
fn newton_s_controls(p: f64, m: f64) -> (f64, f64) {
    let (mut x, mut y) = (0.3f64, 0.3f64);
    for _ in 0..100 {
        let (f1, f2) = ((y + x).tan() - p, (y - x).tan() - m);
        let (s1, s2) = (1.0 / (y + x).cos().powi(2), 1.0 / (y - x).cos().powi(2));
        let det = 2.0 * s1 * s2;
        x -= (s2 * f1 - s1 * f2) / det;
        y -= (s2 * f1 + s1 * f2) / det;
    }
    (x, y)
}

fn s_controls(r: &mut Report) {
    let mut cfg = Config::default();
    cfg.s_surface.omega1_over_j.count = 50;
    cfg.s_surface.delta_over_j.count = 50;
    let surface = run_s_surface(&cfg).unwrap();
    let max_res = surface
        .summary_value("max_residual")
        .and_then(Value::as_f64)
        .unwrap();
    let errors = surface.summary_value("domain_errors").cloned();

    cfg.fig4.omega1_over_j = geophase_cli::config::Range::single(1.0);
    let slice = run_fig4(&cfg).unwrap();
    let row = slice
        .rows
        .iter()
        .find(|row| row[0] == Value::F(1.0))
        .expect("omega1/J = 1 row");
    let (jtc, phi) = (row[1].as_f64().unwrap(), row[2].as_f64().unwrap());
    let (x, y) = newton_s_controls(2.058 / 1.0, 0.058 / 1.0);
    let slice_err = (jtc - x).abs().max((phi - y).abs());

    r.criterion(
        4,
        "S-control tangent residuals and the delta/J = 1.058 slice",
        max_res < 1e-12 && errors == Some(Value::I(0)) && slice_err < 1e-5,
        format!(
            "max residual {max_res:.3e} on {} points (tol 1e-12); at omega1/J = 1: Jt_c = {jtc:.6}, phi' = {phi:.6}, |diff| to Newton solve {slice_err:.1e} (tol 1e-5)",
            surface.rows.len()
        ),
    );
    r.note(format!(
        "reference values 0.52996 and 0.58790 differ from the closed form by {:.2e} and {:.2e}",
        (jtc - 0.52996f64).abs(),
        (phi - 0.58790f64).abs()
    ));
}

fn s_operation(r: &mut Report) {
    let (delta, j) = (1.058f64, 1.0f64);
    let w1 = (delta * delta - j * j).sqrt();
    let controls = solve_s_controls(delta, j, w1).unwrap();
    let s = PulseSequence::s_operation(&controls).unwrap();
    let params = FieldParams::coupled(delta, j, w1).unwrap();
    let mut worst: f64 = 1.0;
    for b in SpinB::BOTH {
        let u = lower_sequence(&s, &params, b, &Propagator::ClosedForm).unwrap();
        let psi = u.apply(&SpinState::up());
        let (target, _) = eigenstate_on_cone(b.omega0(delta, j), w1, Branch::Plus).unwrap();
        worst = worst.min(target.inner(&psi).norm());
    }
    r.criterion(
        5,
        "S prepares the cone eigenstate for both spin-b states",
        worst > 1.0 - 1e-9,
        format!("min overlap {worst:.15} (tol 1 - 1e-9)"),
    );
}

fn conditional(r: &mut Report) {
    let (delta, j) = (1.058, 1.0);
    let tau = PI / delta;
    let prop = Propagator::Numerical(IntegratorConfig::with_steps(tau, 4096).unwrap());
    let first = conditional_gate(delta, j, LoopMode::Shared, &prop).unwrap();
    let second = conditional_gate(delta, j, LoopMode::Shared, &prop).unwrap();
    let per_branch = conditional_gate(delta, j, LoopMode::PerBranch, &prop).unwrap();
    let rerun = max_phase_difference(&first.simulated_phases, &second.simulated_phases);
    let quantified =
        first.max_prediction_discrepancy.is_finite() && first.max_model_discrepancy < 1e-6;
    let pass = first.max_off_diagonal < 1e-6
        && rerun < 1e-10
        && (first.agrees_with_prediction || quantified);
    let verdict = if first.agrees_with_prediction {
        format!("agreement within {:.1e}", first.max_prediction_discrepancy)
    } else {
        format!(
            "discrepancy {:.6} rad (quantified)",
            first.max_prediction_discrepancy
        )
    };
    r.criterion(
        6,
        "conditional gate is diagonal and reproducible; comparison with predicted phases",
        pass,
        format!(
            "off-diagonal {:.3e} (tol 1e-6), rerun difference {rerun:.1e} (tol 1e-10), {verdict}",
            first.max_off_diagonal
        ),
    );
    let fmt = |p: &[f64; 4]| p.map(|x| format!("{x:+.6}")).join(", ");
    r.note(format!(
        "simulated diagonal phases  ({})",
        fmt(&first.simulated_phases)
    ));
    r.note(format!(
        "predicted (G+, G-, -G-, -G+) ({})",
        fmt(&first.predicted_phases)
    ));
    r.note(format!(
        "single-loop model (g+, g-, -g+, -g-), g = -pi - pi cos(theta): ({}), max diff {:.1e}",
        fmt(&first.loop_model_phases),
        first.max_model_discrepancy
    ));
    r.note(format!(
        "entangling phase simulated {:+.6} = 2 pi (cos theta- - cos theta+) = {:+.6}; of the predicted diagonal {:+.6}; 2(G+ - G-) = {:+.6}",
        first.entangling_simulated,
        wrap_pi(2.0 * PI * (first.cos_theta_minus - first.cos_theta_plus)),
        first.entangling_predicted,
        wrap_pi(2.0 * (-2.0 * PI * first.cos_theta_plus - 2.0 * PI * first.cos_theta_minus)),
    ));
    r.note(format!(
        "dynamical residuals per-branch speed {:.1e}/{:.1e}, shared speed {:.1e}/{:.1e}; modes differ by {:.1e}",
        first.dynamical_residuals.per_branch[0],
        first.dynamical_residuals.per_branch[1],
        first.dynamical_residuals.shared[0],
        first.dynamical_residuals.shared[1],
        max_phase_difference(&first.simulated_phases, &per_branch.simulated_phases),
    ));
}

fn robustness(r: &mut Report) {
    let record = run_loop_phase(&Config::default()).unwrap();
    let shift = record
        .summary_value("max_geometric_shift")
        .and_then(Value::as_f64)
        .unwrap();
    let profiles = record.rows.len() - 1;
    r.criterion(
        7,
        "geometric phase ignores the speed profile",
        shift < 1e-6 && profiles >= 3,
        format!("max shift {shift:.3e} across {profiles} tabulated profiles (tol 1e-6)"),
    );
}

fn adiabatic(r: &mut Report) {
    let record = run_adiabatic_error(&Config::default()).unwrap();
    let col = |name| -> Vec<f64> {
        record
            .column(name)
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect()
    };
    let (speeds, unc, comp) = (
        col("gamma_over_omega0"),
        col("deviation_uncompensated"),
        col("deviation_compensated"),
    );
    let fastest = speeds
        .iter()
        .position(|&g| g == 1.0)
        .expect("gamma/omega0 = 1 row");
    let monotone = unc.windows(2).all(|p| p[1] < p[0]);
    let max_comp = comp.iter().cloned().fold(0.0, f64::max);
    r.criterion(
        8,
        "uncompensated loop fails at speed, compensated loop stays cyclic",
        unc[fastest] > 0.05 && max_comp < 1e-8 && monotone && speeds.len() == 7,
        format!(
            "uncompensated deviation {:.3e} at gamma/omega0 = 1 (> 0.05), max compensated {max_comp:.1e} (< 1e-8), decreasing over {} speeds: {monotone}",
            unc[fastest],
            speeds.len()
        ),
    );
    r.note(format!(
        "uncompensated deviations: {}",
        unc.iter()
            .map(|x| format!("{x:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
}

fn determinism(r: &mut Report) {
    let run = |verb: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_geophase"))
            .arg(verb)
            .output()
            .expect("run geophase");
        assert!(out.status.success(), "{verb} failed");
        out.stdout
    };
    let mut same = true;
    let mut sizes = Vec::new();
    for verb in ["fig4", "gate-report"] {
        let (a, b) = (run(verb), run(verb));
        same &= !a.is_empty() && a == b;
        sizes.push(format!("{verb} {} bytes", a.len()));
    }
    r.criterion(
        9,
        "default fig4 and gate-report outputs are byte-identical across runs",
        same,
        sizes.join(", "),
    );
}

fn main() {
    let mut r = Report { failures: 0 };
    oracle_agreement(&mut r);
    cone_tracking(&mut r);
    dynamical_nullity(&mut r);
    s_controls(&mut r);
    s_operation(&mut r);
    conditional(&mut r);
    robustness(&mut r);
    adiabatic(&mut r);
    determinism(&mut r);
    if r.failures > 0 {
        println!("{} criteria failed", r.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
