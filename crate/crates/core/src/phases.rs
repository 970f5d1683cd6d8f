//! Splitting the phase of a cyclic evolution into dynamical and geometric
//! parts, and the field settings under which the dynamical part vanishes.
//!
//! The dynamical phase is `-∫⟨ψ(t)|H(t)|ψ(t)⟩ dt`. By default `H(t)` is the
//! Hamiltonian that actually generates the evolution, so for a compensated
//! loop the vertical compensating field is part of the energy. The bare
//! rotating-field energy is available through
//! [`EnergyReference::Uncompensated`] for comparison.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{
    cone_cos_theta, FieldParams, Form, HamiltonianSpec, PiecewiseLinear, RotationSchedule,
    TimeDependentHamiltonian,
};
use crate::linalg::SpinState;
use crate::propagation::{propagate_numerical, IntegratorConfig};

/// Loops whose cyclicity deviation exceeds this are not decomposed.
pub const NONCYCLIC_THRESHOLD: f64 = 1e-6;
/// Smallest overlap magnitude for which a relative phase is defined.
pub const MIN_OVERLAP: f64 = 1e-6;
/// Relative drift allowed in `ω₁(t)/ω₀(t)` for time-dependent schedules.
pub const RATIO_TOL: f64 = 1e-9;

/// Which Hamiltonian the energy expectation is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EnergyReference {
    /// The generator of the evolution (includes any compensating field).
    #[default]
    Generator,
    /// The rotating field alone, without the compensating vertical field.
    Uncompensated,
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Maps an angle into `(-2π, 0]`.
pub fn wrap_nonpositive(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y == 0.0 {
        0.0
    } else {
        y - 2.0 * PI
    }
}

/// Composite Simpson rule on a uniform grid with an even number of intervals.
pub fn simpson(samples: &[(f64, f64)]) -> Result<f64> {
    let n = samples.len();
    if n == 1 {
        return Ok(0.0);
    }
    if n < 3 || !(n - 1).is_multiple_of(2) {
        return Err(invalid("Simpson's rule needs an even number of intervals"));
    }
    let h = (samples[n - 1].0 - samples[0].0) / (n - 1) as f64;
    let mut acc = samples[0].1 + samples[n - 1].1;
    for (k, (_, f)) in samples.iter().enumerate().take(n - 1).skip(1) {
        acc += if k % 2 == 1 { 4.0 * f } else { 2.0 * f };
    }
    Ok(acc * h / 3.0)
}

fn reference_spec(spec: &HamiltonianSpec, reference: EnergyReference) -> Result<HamiltonianSpec> {
    match (reference, spec.form) {
        (EnergyReference::Uncompensated, Form::Compensated) => spec.as_form(Form::Rotating),
        _ => Ok(spec.clone()),
    }
}

/// `(t, ⟨ψ(t)|H(t)|ψ(t)⟩)` along the numerically propagated trajectory.
pub fn energy_trajectory(
    spec: &HamiltonianSpec,
    psi0: &SpinState,
    t_final: f64,
    cfg: &IntegratorConfig,
    reference: EnergyReference,
) -> Result<Vec<(f64, f64)>> {
    let run = propagate_numerical(spec, t_final, &cfg.with_trajectory(true))?;
    energies(&run.states(psi0), spec, reference)
}

fn energies(
    states: &[(f64, SpinState)],
    spec: &HamiltonianSpec,
    reference: EnergyReference,
) -> Result<Vec<(f64, f64)>> {
    let h_ref = reference_spec(spec, reference)?;
    states
        .iter()
        .map(|(t, psi)| Ok((*t, psi.expectation(&h_ref.evaluate(*t)?).re)))
        .collect()
}

/// `-∫₀^{t_final} ⟨ψ(t)|H(t)|ψ(t)⟩ dt` by Simpson's rule on the trajectory.
pub fn dynamical_phase(
    spec: &HamiltonianSpec,
    psi0: &SpinState,
    t_final: f64,
    cfg: &IntegratorConfig,
    reference: EnergyReference,
) -> Result<f64> {
    Ok(-simpson(&energy_trajectory(
        spec, psi0, t_final, cfg, reference,
    )?)?)
}

/// Pancharatnam phase `arg⟨ψ₀|ψ_final⟩` in `(-π, π]`.
pub fn total_phase(psi0: &SpinState, psi_final: &SpinState) -> Result<f64> {
    let overlap = psi0.inner(psi_final);
    if overlap.norm() <= MIN_OVERLAP {
        return Err(Error::UndefinedPhase {
            overlap: overlap.norm(),
            threshold: MIN_OVERLAP,
        });
    }
    Ok(wrap_pi(overlap.arg()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDecomposition {
    /// `arg⟨ψ₀|ψ(τ)⟩` in `(-π, π]`.
    pub total: f64,
    pub dynamical: f64,
    /// `total - dynamical`, reported in `(-2π, 0]`.
    pub geometric: f64,
    pub cyclicity_defect: f64,
    /// Whether the evolution was cyclic enough for the split to mean anything.
    pub valid: bool,
}

/// Decomposes the phase of `ψ₀` after evolving for `tau`, without
/// insisting on cyclicity.
pub fn phase_decomposition(
    spec: &HamiltonianSpec,
    psi0: &SpinState,
    tau: f64,
    cfg: &IntegratorConfig,
    reference: EnergyReference,
) -> Result<PhaseDecomposition> {
    let run = propagate_numerical(spec, tau, &cfg.with_trajectory(true))?;
    let states = run.states(psi0);
    let psi_final = run.unitary.apply(psi0);
    let cyclicity_defect = (1.0 - psi0.inner(&psi_final).norm()).max(0.0);
    let total = total_phase(psi0, &psi_final)?;
    let dynamical = -simpson(&energies(&states, spec, reference)?)?;
    Ok(PhaseDecomposition {
        total,
        dynamical,
        geometric: wrap_nonpositive(total - dynamical),
        cyclicity_defect,
        valid: cyclicity_defect <= NONCYCLIC_THRESHOLD,
    })
}

/// Geometric phase of a cyclic loop of duration `tau`.
pub fn geometric_phase_loop(
    spec: &HamiltonianSpec,
    psi0: &SpinState,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<PhaseDecomposition> {
    let d = phase_decomposition(spec, psi0, tau, cfg, EnergyReference::Generator)?;
    if !d.valid {
        return Err(Error::NonCyclic {
            deviation: d.cyclicity_defect,
            threshold: NONCYCLIC_THRESHOLD,
        });
    }
    Ok(d)
}

/// Rotation speed that keeps the compensated loop free of dynamical phase:
/// `γ = -(ω₀² + ω₁²)/ω₀`.
pub fn zero_dynamical_gamma(omega0: f64, omega1: f64) -> Result<f64> {
    if omega0 == 0.0 || !omega0.is_finite() || !omega1.is_finite() {
        return Err(invalid("omega0 must be finite and nonzero"));
    }
    Ok(-(omega0 * omega0 + omega1 * omega1) / omega0)
}

/// Operating point of the conditional gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroDynConditions {
    /// Shared rotation speed, `-2δ`.
    pub gamma_star: f64,
    /// `√(δ² - J²)`.
    pub omega1_star: f64,
    pub cos_theta_plus: f64,
    pub cos_theta_minus: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    /// Per-branch zero-dynamical-phase speeds for `ω₀ = δ + J` and `δ - J`.
    pub gamma_per_branch: [f64; 2],
}

/// Field settings that null the dynamical phase for both states of spin b.
///
/// With `ω₁ = √(δ² - J²)` the field strength on each branch obeys
/// `(δ ± J)² + ω₁² = 2δ(δ ± J)`, so both branches share `γ = -2δ` and
/// `cos θ± = √((δ ± J)/(2δ))`.
pub fn zero_dyn_conditions(delta: f64, j: f64) -> Result<ZeroDynConditions> {
    if !(delta.is_finite() && j.is_finite()) || j < 0.0 {
        return Err(invalid("delta and J must be finite with J >= 0"));
    }
    if delta <= j {
        return Err(invalid(format!(
            "need delta > J for a real RF amplitude (delta={delta}, J={j})"
        )));
    }
    let omega1_star = ((delta - j) * (delta + j)).sqrt();
    let cos_theta_plus = ((delta + j) / (2.0 * delta)).sqrt();
    let cos_theta_minus = ((delta - j) / (2.0 * delta)).sqrt();
    let gamma_plus = zero_dynamical_gamma(delta + j, omega1_star)?;
    let gamma_minus = zero_dynamical_gamma(delta - j, omega1_star)?;
    Ok(ZeroDynConditions {
        gamma_star: -2.0 * delta,
        omega1_star,
        cos_theta_plus,
        cos_theta_minus,
        theta_plus: cos_theta_plus.acos(),
        theta_minus: cos_theta_minus.acos(),
        gamma_per_branch: [gamma_plus, gamma_minus],
    })
}

/// Compensated loop with time-dependent field amplitudes and the matching
/// zero-dynamical-phase speed profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroDynLoop {
    pub schedule: RotationSchedule,
    /// `a(t) = ω₀(t)/ω₀(0)`, shared by both amplitudes.
    pub envelope: PiecewiseLinear,
    pub omega0: f64,
    pub omega1: f64,
    pub duration: f64,
}

impl ZeroDynLoop {
    /// The compensated Hamiltonian driven by this loop.
    pub fn spec(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(
            Form::Compensated,
            FieldParams::new(self.omega0, self.omega1)?,
            self.schedule.clone(),
        )?
        .with_envelope(self.envelope.clone())
    }
}

/// Speed profile `γ(t) = -(ω₀²(t) + ω₁²(t))/ω₀(t)` for amplitudes with a
/// fixed ratio, tabulated on `n_samples` points over the duration for which
/// `∫γ dt = -2π`.
pub fn gamma_schedule_zero_dyn(
    omega0_fn: impl Fn(f64) -> f64,
    omega1_fn: impl Fn(f64) -> f64,
    n_samples: usize,
) -> Result<ZeroDynLoop> {
    if n_samples < 3 {
        return Err(invalid("need at least three samples"));
    }
    let gamma_at = |t: f64| -> Result<f64> {
        let (w0, w1) = (omega0_fn(t), omega1_fn(t));
        if !(w0.is_finite() && w1.is_finite()) || w0 <= 0.0 || w1 <= 0.0 {
            return Err(Error::ConstraintViolation(format!(
                "field amplitudes must be positive at t={t} (omega0={w0}, omega1={w1})"
            )));
        }
        Ok(-(w0 * w0 + w1 * w1) / w0)
    };
    let ratio0 = omega1_fn(0.0) / omega0_fn(0.0);
    gamma_at(0.0)?;

    let swept = |tau: f64| -> Result<f64> {
        let h = tau / (n_samples - 1) as f64;
        let mut acc = 0.0;
        let mut prev = gamma_at(0.0)?;
        for k in 1..n_samples {
            let g = gamma_at(k as f64 * h)?;
            acc += 0.5 * h * (prev + g);
            prev = g;
        }
        Ok(acc.abs())
    };

    // bracket the loop duration by marching, then bisect
    let nominal = 2.0 * PI / gamma_at(0.0)?.abs();
    let mut lo = 0.0;
    let mut hi = nominal;
    let mut grow = 0;
    while swept(hi)? < 2.0 * PI {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::ConstraintViolation(
                "rotation never completes a loop".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if swept(mid)? < 2.0 * PI {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let duration = 0.5 * (lo + hi);

    let h = duration / (n_samples - 1) as f64;
    let omega0_ref = omega0_fn(0.0);
    let mut gammas = Vec::with_capacity(n_samples);
    let mut scale = Vec::with_capacity(n_samples);
    for k in 0..2 * n_samples - 1 {
        // odd points are midpoints, probed only for the ratio constraint
        let t = 0.5 * k as f64 * h;
        let (w0, w1) = (omega0_fn(t), omega1_fn(t));
        let drift = (w1 / w0 - ratio0).abs() / ratio0.abs();
        if drift.is_nan() || drift > RATIO_TOL {
            return Err(Error::ConstraintViolation(format!(
                "omega1/omega0 drifts by {drift:e} at t={t}"
            )));
        }
        if k % 2 == 0 {
            gammas.push(gamma_at(t)?);
            scale.push(w0 / omega0_ref);
        }
    }
    let schedule = RotationSchedule::tabulated(gammas, duration)?;
    schedule.loop_duration()?;
    Ok(ZeroDynLoop {
        schedule,
        envelope: PiecewiseLinear::new(scale, duration)?,
        omega0: omega0_ref,
        omega1: omega1_fn(0.0),
        duration,
    })
}

/// `-π(1 - cos θ)`, the adiabatic cyclic phase of a cone traversed once
/// in the positive sense.
pub fn cone_berry_phase(omega0: f64, omega1: f64) -> Result<f64> {
    Ok(-PI * (1.0 - cone_cos_theta(omega0, omega1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{eigenstate_on_cone, Branch};
    use crate::linalg::C64;
    use crate::propagation::IntegratorConfig;

    fn loop_cfg(tau: f64) -> IntegratorConfig {
        IntegratorConfig::with_steps(tau, 4096).unwrap()
    }

    #[test]
    fn wrapping_conventions() {
        assert_eq!(wrap_pi(PI), PI);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_nonpositive(0.0), 0.0);
        assert!((wrap_nonpositive(PI / 2.0) + 3.0 * PI / 2.0).abs() < 1e-15);
        assert!((wrap_nonpositive(-2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let pts: Vec<(f64, f64)> = (0..=10)
            .map(|k| {
                let t = 0.3 * k as f64;
                (t, t * t * t - 2.0 * t + 1.0)
            })
            .collect();
        let exact = 3.0f64.powi(4) / 4.0 - 9.0 + 3.0;
        assert!((simpson(&pts).unwrap() - exact).abs() < 1e-12);
        assert!(simpson(&pts[..4]).is_err());
    }

    #[test]
    fn total_phase_examples() {
        let psi = SpinState::new(&[C64::new(0.6, 0.1), C64::new(-0.3, 0.7)]).unwrap();
        assert_eq!(total_phase(&psi, &psi).unwrap(), 0.0);
        let shifted = psi.scale(C64::from_polar(1.0, -PI / 3.0));
        assert!((total_phase(&psi, &shifted).unwrap() + PI / 3.0).abs() < 1e-14);
        assert!(matches!(
            total_phase(&SpinState::up(), &SpinState::down()),
            Err(Error::UndefinedPhase { .. })
        ));
    }

    #[test]
    fn static_up_state_accumulates_energy_phase() {
        let (w0, t) = (1.4, 3.0);
        let spec = HamiltonianSpec::rotating(w0, 0.0, 0.5).unwrap();
        let phase = dynamical_phase(
            &spec,
            &SpinState::up(),
            t,
            &loop_cfg(t),
            EnergyReference::Generator,
        )
        .unwrap();
        assert!((phase + w0 * t / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_dynamical_speed_nulls_energy() {
        let (w0, w1) = (1.0, 0.7);
        let gamma = zero_dynamical_gamma(w0, w1).unwrap();
        assert!(gamma < 0.0);
        let spec = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let tau = 2.0 * PI / gamma.abs();
        let (psi0, lambda) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let phase = dynamical_phase(
            &spec,
            &psi0,
            tau,
            &loop_cfg(tau),
            EnergyReference::Generator,
        )
        .unwrap();
        assert!(phase.abs() < 1e-8 * lambda.abs() * tau, "{phase}");
    }

    #[test]
    fn generic_compensated_loop_dynamical_phase() {
        let (w0, w1, gamma) = (0.9, 1.2, 0.4);
        let spec = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let tau = 2.0 * PI / gamma;
        let (psi0, lambda) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let cos_theta = cone_cos_theta(w0, w1).unwrap();
        let bare = dynamical_phase(
            &spec,
            &psi0,
            tau,
            &loop_cfg(tau),
            EnergyReference::Uncompensated,
        )
        .unwrap();
        assert!((bare + lambda * tau).abs() < 1e-8, "{bare}");
        let full = dynamical_phase(
            &spec,
            &psi0,
            tau,
            &loop_cfg(tau),
            EnergyReference::Generator,
        )
        .unwrap();
        let expected = -(lambda + 0.5 * gamma * cos_theta) * tau;
        assert!((full - expected).abs() < 1e-8, "{full} vs {expected}");
    }

    #[test]
    fn total_phase_at_zero_dynamical_speed() {
        let (w0, w1) = (1.3, 0.5);
        let gamma = zero_dynamical_gamma(w0, w1).unwrap();
        let spec = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let tau = 2.0 * PI / gamma.abs();
        let (psi0, _) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let d = geometric_phase_loop(&spec, &psi0, tau, &loop_cfg(tau)).unwrap();
        let cos_theta = cone_cos_theta(w0, w1).unwrap();
        assert!((wrap_pi(d.total - (-PI - PI * cos_theta))).abs() < 1e-9);
        assert!((wrap_pi(d.total - PI * (1.0 - cos_theta))).abs() < 1e-9);
        assert!(d.dynamical.abs() < 1e-9);
    }

    #[test]
    fn geometric_phase_limits() {
        // degenerate cone
        let spec = HamiltonianSpec::compensated(1.0, 1e-9, 0.3).unwrap();
        let tau = 2.0 * PI / 0.3;
        let (psi0, _) = eigenstate_on_cone(1.0, 1e-9, Branch::Plus).unwrap();
        let d = geometric_phase_loop(&spec, &psi0, tau, &loop_cfg(tau)).unwrap();
        assert!(wrap_pi(d.geometric).abs() < 1e-8);

        // equatorial cone
        let spec = HamiltonianSpec::compensated(0.0, 1.0, 0.3).unwrap();
        let (psi0, _) = eigenstate_on_cone(0.0, 1.0, Branch::Plus).unwrap();
        let d = geometric_phase_loop(&spec, &psi0, tau, &loop_cfg(tau)).unwrap();
        assert!((wrap_pi(d.geometric + PI)).abs() < 1e-8);
    }

    #[test]
    fn slow_compensated_loop_reproduces_berry_phase() {
        let (w0, w1, gamma) = (1.0, 0.6, 1e-2);
        let spec = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let tau = 2.0 * PI / gamma;
        let (psi0, _) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let cfg = IntegratorConfig::auto(&spec, tau).unwrap();
        let d = geometric_phase_loop(&spec, &psi0, tau, &cfg).unwrap();
        let berry = cone_berry_phase(w0, w1).unwrap();
        assert!(
            (d.geometric - berry).abs() < 1e-4,
            "{} vs {berry}",
            d.geometric
        );
        assert!(
            (wrap_pi(d.total - d.dynamical - d.geometric)).abs()
                < 1e-14 * d.dynamical.abs().max(1.0)
        );
    }

    #[test]
    fn noncyclic_loop_is_rejected() {
        let spec = HamiltonianSpec::rotating(1.0, 0.5, 0.5).unwrap();
        let tau = 2.0 * PI / 0.5;
        let (psi0, _) = eigenstate_on_cone(1.0, 0.5, Branch::Plus).unwrap();
        assert!(matches!(
            geometric_phase_loop(&spec, &psi0, tau, &loop_cfg(tau)),
            Err(Error::NonCyclic { .. })
        ));
    }

    #[test]
    fn operating_point_values() {
        let c = zero_dyn_conditions(1.058, 1.0).unwrap();
        let w1 = (1.058f64 * 1.058 - 1.0).sqrt();
        assert!((c.omega1_star - w1).abs() < 1e-15);
        assert!((c.omega1_star - 0.345_491).abs() < 1e-6);
        // cross-check against the direct cone geometry
        assert!((c.cos_theta_plus - cone_cos_theta(2.058, w1).unwrap()).abs() < 1e-12);
        assert!((c.cos_theta_minus - cone_cos_theta(0.058, w1).unwrap()).abs() < 1e-12);
        assert!((c.cos_theta_plus - 0.986_199_67).abs() < 1e-8);
        assert!((c.cos_theta_minus - 0.165_560_28).abs() < 1e-8);
        for g in c.gamma_per_branch {
            assert!((g - c.gamma_star).abs() < 1e-12);
        }
        assert!(c.gamma_star < 0.0);
    }

    #[test]
    fn weak_coupling_limit() {
        let c = zero_dyn_conditions(0.8, 1e-12).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.cos_theta_plus - s).abs() < 1e-10);
        assert!((c.cos_theta_minus - s).abs() < 1e-10);
        assert!((c.omega1_star - 0.8).abs() < 1e-10);
        assert!(zero_dyn_conditions(1.0, 1.0).is_err());
        assert!(zero_dyn_conditions(0.5, 1.0).is_err());
    }

    #[test]
    fn constant_amplitudes_reduce_to_constant_speed() {
        let lp = gamma_schedule_zero_dyn(|_| 1.2, |_| 0.5, 129).unwrap();
        let expected = zero_dynamical_gamma(1.2, 0.5).unwrap();
        for &g in match &lp.schedule {
            RotationSchedule::Tabulated(p) => p.samples(),
            _ => unreachable!(),
        } {
            assert!((g - expected).abs() < 1e-12);
        }
        assert!((lp.duration - 2.0 * PI / expected.abs()).abs() < 1e-10);
    }

    #[test]
    fn modulated_amplitudes_keep_dynamical_phase_zero() {
        let (w0, w1) = (1.0, 0.6);
        let tau0 = 2.0 * PI / zero_dynamical_gamma(w0, w1).unwrap().abs();
        let a = move |t: f64| 1.0 + 0.1 * (2.0 * PI * t / tau0).sin();
        let lp = gamma_schedule_zero_dyn(move |t| w0 * a(t), move |t| w1 * a(t), 257).unwrap();
        assert!((lp.duration - tau0).abs() < 1e-9 * tau0);
        let spec = lp.spec().unwrap();
        let (psi0, lambda) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let cfg = IntegratorConfig::with_steps(lp.duration, 8192).unwrap();
        let phase =
            dynamical_phase(&spec, &psi0, lp.duration, &cfg, EnergyReference::Generator).unwrap();
        assert!(phase.abs() < 1e-6 * lambda * lp.duration, "{phase}");
    }

    #[test]
    fn ratio_violation_is_reported() {
        let r = gamma_schedule_zero_dyn(|_| 1.0, |t| 0.5 * (1.0 + 0.01 * t.min(1.0)), 65);
        assert!(matches!(r, Err(Error::ConstraintViolation(_))));
        let r = gamma_schedule_zero_dyn(|_| -1.0, |_| 0.5, 65);
        assert!(matches!(r, Err(Error::ConstraintViolation(_))));
    }
}
