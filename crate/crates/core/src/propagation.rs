//! Time-evolution operators.
//!
//! Two independent routes are provided: closed forms obtained by moving to
//! the frame co-rotating with the field, and a fixed-step integrator of
//! `i dU/dt = H(t) U`. The integrator knows nothing about rotating frames
//! and serves as the oracle for the closed forms.

use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{
    field_eigenstate, Branch, Form, HamiltonianSpec, TimeDependentHamiltonian,
};
use crate::linalg::{evolve_constant, expm_su2, pauli, Operator, SpinState, Unitary, C64};

/// Steps per field loop used when no explicit step is configured.
pub const DEFAULT_STEPS_PER_LOOP: usize = 4096;
/// Largest rotation angle `‖H‖ dt` taken in one automatically sized step.
pub const DEFAULT_MAX_ANGLE_PER_STEP: f64 = 0.01;
/// The integrator re-projects onto the unitary group this often.
pub const PROJECTION_INTERVAL: usize = 64;
/// Upper bound on stored trajectory samples.
pub const MAX_TRAJECTORY_POINTS: usize = 4096;
/// Largest step count a single propagation may take.
pub const MAX_STEPS: usize = 200_000_000;
/// Results whose unitarity defect stays below this are accepted as-is.
pub const ACCEPTED_DEFECT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta on the matrix equation.
    Rk4,
    /// Midpoint exponential `U ← exp(-i H(t + dt/2) dt) U`.
    Magnus2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt_max: f64,
    /// Unitarity defect beyond which propagation fails.
    pub tolerance: f64,
    pub store_trajectory: bool,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt_max: f64) -> Result<Self> {
        let cfg = Self {
            method,
            dt_max,
            tolerance: 1e-6,
            store_trajectory: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// RK4 with `dt_max = t_final / steps`.
    pub fn with_steps(t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("step count must be positive"));
        }
        Self::new(Method::Rk4, t_final / steps as f64)
    }

    /// RK4 with `dt_max = min(t_final / 4096, 0.01 / ‖H‖)`, where the norm
    /// bound comes from [`rate_bound`].
    pub fn auto(spec: &HamiltonianSpec, t_final: f64) -> Result<Self> {
        let by_loop = t_final / DEFAULT_STEPS_PER_LOOP as f64;
        let by_rate = DEFAULT_MAX_ANGLE_PER_STEP / rate_bound(spec).max(f64::MIN_POSITIVE);
        let dt = if by_loop > 0.0 {
            by_loop.min(by_rate)
        } else {
            by_rate
        };
        Self::new(Method::Rk4, dt)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_trajectory(mut self, store: bool) -> Self {
        self.store_trajectory = store;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return Err(invalid("dt_max must be positive and finite"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive and finite"));
        }
        Ok(())
    }
}

/// Upper bound on the largest eigenvalue magnitude of `spec` over its domain.
pub fn rate_bound(spec: &HamiltonianSpec) -> f64 {
    let p = &spec.params;
    let amp = spec.envelope.as_ref().map_or(1.0, |e| {
        e.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    });
    let gamma = match &spec.schedule {
        crate::hamiltonians::RotationSchedule::Constant { gamma } => gamma.abs(),
        crate::hamiltonians::RotationSchedule::Tabulated(p) => {
            p.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()))
        }
    };
    let w0 = spec.effective_omega0().abs();
    0.5 * match spec.form {
        Form::Static => w0.hypot(p.omega1),
        Form::Rotating => amp * w0.hypot(p.omega1),
        Form::Compensated | Form::Shifted => (amp * w0 + gamma).hypot(amp * p.omega1),
        Form::LabFrame => (w0 + p.omega_a_prime.abs()).hypot(p.omega1),
        Form::Coupled => p.omega_a().abs() + p.omega_b.abs() + p.j,
    }
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    pub unitary: Unitary,
    /// `(t, U(t, t₀))` samples on a uniform grid with an even number of
    /// intervals, when requested.
    pub trajectory: Vec<(f64, Unitary)>,
    pub step_count: usize,
    /// Largest `max |(U†U - I)_ij|` seen before any re-projection.
    pub max_unitarity_defect: f64,
}

impl PropagationResult {
    pub fn is_accepted(&self) -> bool {
        self.max_unitarity_defect < ACCEPTED_DEFECT
    }

    /// The trajectory applied to an initial state.
    pub fn states(&self, psi0: &SpinState) -> Vec<(f64, SpinState)> {
        self.trajectory
            .iter()
            .map(|(t, u)| (*t, u.apply(psi0)))
            .collect()
    }
}

/// Integrates `i dU/dt = H(t) U` from 0 to `t_final` with `U(0) = 1`.
pub fn propagate_numerical<H>(
    h: &H,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagationResult>
where
    H: TimeDependentHamiltonian + ?Sized,
{
    propagate_interval(h, 0.0, t_final, cfg)
}

/// Integrates from `t0` to `t1`, returning `U(t1, t0)`.
pub fn propagate_interval<H>(
    h: &H,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagationResult>
where
    H: TimeDependentHamiltonian + ?Sized,
{
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite()) || t0 < 0.0 || t1 < t0 {
        return Err(invalid(format!(
            "invalid propagation interval [{t0}, {t1}]"
        )));
    }
    let dim = h.dim();
    let identity = Unitary::identity(dim)?;
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(PropagationResult {
            unitary: identity,
            trajectory: if cfg.store_trajectory {
                vec![(t0, identity)]
            } else {
                Vec::new()
            },
            step_count: 0,
            max_unitarity_defect: 0.0,
        });
    }

    let estimated = (span / cfg.dt_max).ceil();
    if estimated > MAX_STEPS as f64 {
        return Err(Error::StepBudget {
            required: estimated,
            limit: MAX_STEPS,
        });
    }

    let intervals = if cfg.store_trajectory {
        let n = (estimated as usize).clamp(1, MAX_TRAJECTORY_POINTS - 2);
        n + n % 2
    } else {
        1
    };

    let mut state = Integrator {
        h,
        cfg,
        u: *identity.as_operator(),
        steps: 0,
        defect: 0.0,
    };
    let mut trajectory = Vec::new();
    if cfg.store_trajectory {
        trajectory.push((t0, identity));
    }
    for j in 0..intervals {
        let a = t0 + span * j as f64 / intervals as f64;
        let b = if j + 1 == intervals {
            t1
        } else {
            t0 + span * (j + 1) as f64 / intervals as f64
        };
        for (pa, pb) in pieces(a, b, h.kink_spacing()) {
            state.advance(pa, pb)?;
        }
        if j + 1 == intervals {
            state.check_and_project()?;
        }
        if cfg.store_trajectory {
            trajectory.push((b, Unitary::from_operator_unchecked(state.u)));
        }
    }
    Ok(PropagationResult {
        unitary: Unitary::from_operator_unchecked(state.u),
        trajectory,
        step_count: state.steps,
        max_unitarity_defect: state.defect,
    })
}

/// Splits `[a, b]` at the kinks of a piecewise-smooth generator.
fn pieces(a: f64, b: f64, kink_spacing: Option<f64>) -> Vec<(f64, f64)> {
    let Some(h) = kink_spacing else {
        return vec![(a, b)];
    };
    let eps = 1e-12 * b.abs().max(h);
    let mut cuts = vec![a];
    let mut k = (a / h).floor() as i64 + 1;
    loop {
        let t = k as f64 * h;
        if t >= b - eps {
            break;
        }
        if t > a + eps {
            cuts.push(t);
        }
        k += 1;
    }
    cuts.push(b);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

struct Integrator<'a, H: ?Sized> {
    h: &'a H,
    cfg: &'a IntegratorConfig,
    u: Operator,
    steps: usize,
    defect: f64,
}

impl<H: TimeDependentHamiltonian + ?Sized> Integrator<'_, H> {
    fn advance(&mut self, a: f64, b: f64) -> Result<()> {
        let n = ((b - a) / self.cfg.dt_max).ceil().max(1.0) as usize;
        let dt = (b - a) / n as f64;
        for k in 0..n {
            let t = a + k as f64 * dt;
            let t_end = if k + 1 == n { b } else { t + dt };
            self.u = match self.cfg.method {
                Method::Rk4 => self.rk4_step(t, t_end - t)?,
                Method::Magnus2 => self.magnus_step(t, t_end - t)?,
            };
            self.steps += 1;
            if self.steps.is_multiple_of(PROJECTION_INTERVAL) {
                self.check_and_project()?;
            }
        }
        Ok(())
    }

    fn rk4_step(&self, t: f64, dt: f64) -> Result<Operator> {
        let minus_i = C64::new(0.0, -1.0);
        let h0 = self.h.evaluate(t)?.scale(minus_i);
        let hm = self.h.evaluate(t + 0.5 * dt)?.scale(minus_i);
        let h1 = self.h.evaluate(t + dt)?.scale(minus_i);
        let u = self.u;
        let k1 = h0 * u;
        let k2 = hm * (u + k1.scale_real(0.5 * dt));
        let k3 = hm * (u + k2.scale_real(0.5 * dt));
        let k4 = h1 * (u + k3.scale_real(dt));
        let incr = k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4;
        Ok(u + incr.scale_real(dt / 6.0))
    }

    fn magnus_step(&self, t: f64, dt: f64) -> Result<Operator> {
        let hm = self.h.evaluate(t + 0.5 * dt)?;
        Ok(*evolve_constant(&hm, dt).as_operator() * self.u)
    }

    fn check_and_project(&mut self) -> Result<()> {
        if !self.u.is_finite() {
            return Err(Error::Numerical("propagator became non-finite".into()));
        }
        let defect = self.u.unitarity_defect();
        self.defect = self.defect.max(defect);
        if defect > self.cfg.tolerance {
            return Err(Error::Numerical(format!(
                "unitarity defect {defect:e} exceeds {:e}",
                self.cfg.tolerance
            )));
        }
        self.u = self.u.project_unitary();
        Ok(())
    }
}

/// `e^{-i·angle·σz/2}`.
pub fn z_rotation(angle: f64) -> Unitary {
    expm_su2([0.0, 0.0, 1.0], angle).expect("unit axis")
}

/// Closed-form propagator `U(t)` with `U(0) = 1`.
///
/// - compensated: `e^{-iΦ(t)σz/2} e^{-i A(t) H₀}` with `Φ = ∫γ`, `A = ∫a`
///   (the envelope integral, `A = t` without an envelope);
/// - rotating (constant γ only): `e^{-iγtσz/2} e^{-iH₁t}`, `H₁ = H₀ - γσz/2`;
/// - static, shifted (constant γ), laboratory and coupled forms likewise.
pub fn propagate_closed_form(spec: &HamiltonianSpec, t: f64) -> Result<Unitary> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain {
            t,
            end: spec.domain_end().unwrap_or(f64::INFINITY),
        });
    }
    // domain check shared with evaluate
    spec.evaluate(t)?;
    let h0 = spec.h0();
    let sz = pauli::sigma_z();
    match spec.form {
        Form::Static => Ok(evolve_constant(&h0, t)),
        Form::Compensated => {
            let frame = z_rotation(spec.schedule.angle(t));
            Ok(frame * evolve_constant(&h0, spec.amplitude_integral(t)))
        }
        Form::Rotating | Form::Shifted => {
            let gamma =
                match spec.schedule {
                    crate::hamiltonians::RotationSchedule::Constant { gamma } => gamma,
                    _ => return Err(invalid(
                        "no closed form for the uncompensated field with a time-dependent speed",
                    )),
                };
            if spec.envelope.is_some() {
                return Err(invalid(
                    "no closed form for the uncompensated field with an amplitude envelope",
                ));
            }
            let h1 = h0 - sz.scale_real(0.5 * gamma);
            let inner = evolve_constant(&h1, t);
            if spec.form == Form::Rotating {
                Ok(z_rotation(gamma * t) * inner)
            } else {
                Ok(inner)
            }
        }
        Form::LabFrame => Ok(z_rotation(spec.params.omega_a_prime * t) * evolve_constant(&h0, t)),
        Form::Coupled => Ok(evolve_constant(&spec.evaluate(0.0)?, t)),
    }
}

/// How a propagator is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Propagator {
    ClosedForm,
    Numerical(IntegratorConfig),
    /// Numerical with [`IntegratorConfig::auto`] sized to each request.
    NumericalAuto,
}

impl Propagator {
    pub fn propagate(&self, spec: &HamiltonianSpec, t: f64) -> Result<Unitary> {
        match self {
            Self::ClosedForm => propagate_closed_form(spec, t),
            Self::Numerical(cfg) => {
                let cfg = cfg.with_trajectory(false);
                Ok(propagate_numerical(spec, t, &cfg)?.unitary)
            }
            Self::NumericalAuto => {
                let cfg = IntegratorConfig::auto(spec, t)?;
                Ok(propagate_numerical(spec, t, &cfg)?.unitary)
            }
        }
    }
}

/// `1 - |⟨ψ₀|U(τ)|ψ₀⟩|`; zero for a perfectly cyclic evolution.
pub fn cyclicity_deviation(
    spec: &HamiltonianSpec,
    psi0: &SpinState,
    tau: f64,
    propagator: &Propagator,
) -> Result<f64> {
    if psi0.dim() != spec.dim() {
        return Err(invalid("state and Hamiltonian dimensions differ"));
    }
    let u = propagator.propagate(spec, tau)?;
    let overlap = psi0.inner(&u.apply(psi0)).norm();
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}

/// Largest `1 - |⟨ψ_inst(t)|ψ(t)⟩|` over `n_samples` uniform times in
/// `(0, τ]`, where `ψ(t)` evolves numerically under the compensated
/// Hamiltonian from the cone eigenstate and `ψ_inst(t)` is the matching
/// eigenstate of the uncompensated rotating field at `t`.
pub fn instantaneous_eigenstate_tracking_error(
    spec: &HamiltonianSpec,
    tau: f64,
    n_samples: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if spec.form != Form::Compensated {
        return Err(invalid(
            "tracking error is defined for the compensated form",
        ));
    }
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let cfg = cfg.with_trajectory(false);
    let (mut psi, _) = field_eigenstate(spec.rotating_field(0.0), Branch::Plus)?;
    let mut worst = 0.0f64;
    let mut t_prev = 0.0;
    for k in 1..=n_samples {
        let t = tau * k as f64 / n_samples as f64;
        let step = propagate_interval(spec, t_prev, t, &cfg)?;
        psi = step.unitary.apply(&psi);
        let (inst, _) = field_eigenstate(spec.rotating_field(t), Branch::Plus)?;
        worst = worst.max(1.0 - inst.inner(&psi).norm());
        t_prev = t;
    }
    Ok(worst.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{eigenstate_on_cone, FieldParams, RotationSchedule};
    use std::f64::consts::PI;

    #[test]
    fn static_diagonal_generator_matches_su2() {
        let (w0, t) = (1.7, 3.2);
        let spec = HamiltonianSpec::rotating(w0, 0.0, 0.4).unwrap();
        let cfg = IntegratorConfig::with_steps(t, 4096).unwrap();
        let u = propagate_numerical(&spec, t, &cfg).unwrap().unitary;
        let expected = expm_su2([0.0, 0.0, 1.0], w0 * t).unwrap();
        assert!(u.as_operator().max_abs_diff(expected.as_operator()) < 1e-10);
    }

    #[test]
    fn zero_duration_is_identity() {
        let spec = HamiltonianSpec::rotating(1.0, 0.5, 0.2).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 0.01).unwrap();
        let r = propagate_numerical(&spec, 0.0, &cfg).unwrap();
        assert_eq!(r.step_count, 0);
        assert_eq!(r.unitary, Unitary::identity(2).unwrap());
    }

    #[test]
    fn one_rotating_loop_matches_closed_form() {
        let spec = HamiltonianSpec::rotating(1.0, 0.5, 0.2).unwrap();
        let tau = 2.0 * PI / 0.2;
        let cfg = IntegratorConfig::with_steps(tau, 4096).unwrap();
        let numerical = propagate_numerical(&spec, tau, &cfg).unwrap();
        let closed = propagate_closed_form(&spec, tau).unwrap();
        assert!(
            numerical
                .unitary
                .as_operator()
                .max_abs_diff(closed.as_operator())
                < 1e-8
        );
        assert!(numerical.is_accepted());
    }

    #[test]
    fn closed_form_without_rotation_is_plain_exponential() {
        let spec = HamiltonianSpec::compensated(0.9, 0.7, 0.0).unwrap();
        let u = propagate_closed_form(&spec, 2.5).unwrap();
        assert_eq!(u, evolve_constant(&spec.h0(), 2.5));
    }

    #[test]
    fn compensated_loop_returns_to_ray_with_expected_phase() {
        let (w0, w1, gamma) = (1.2, 0.8, 0.5);
        let spec = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let tau = 2.0 * PI / gamma;
        let (psi0, lambda) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        let out = propagate_closed_form(&spec, tau).unwrap().apply(&psi0);
        let expected = psi0.scale(C64::from_polar(1.0, -PI - lambda * tau));
        let overlap = psi0.inner(&out);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        assert!((expected.inner(&out) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn uncompensated_loop_is_not_cyclic() {
        let spec = HamiltonianSpec::rotating(1.0, 0.6, 0.3).unwrap();
        let tau = 2.0 * PI / 0.3;
        let (psi0, _) = eigenstate_on_cone(1.0, 0.6, Branch::Plus).unwrap();
        let closed = cyclicity_deviation(&spec, &psi0, tau, &Propagator::ClosedForm).unwrap();
        let cfg = IntegratorConfig::with_steps(tau, 8192).unwrap();
        let numerical =
            cyclicity_deviation(&spec, &psi0, tau, &Propagator::Numerical(cfg)).unwrap();
        assert!(closed > 1e-4);
        assert!((closed - numerical).abs() < 1e-9);
    }

    #[test]
    fn matched_initial_states_are_cyclic() {
        let (w0, w1, gamma) = (1.0, 0.6, 0.3);
        let tau = 2.0 * PI / gamma;
        let cfg = IntegratorConfig::with_steps(tau, 8192).unwrap();
        let comp = HamiltonianSpec::compensated(w0, w1, gamma).unwrap();
        let (psi0, _) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
        assert!(
            cyclicity_deviation(&comp, &psi0, tau, &Propagator::Numerical(cfg)).unwrap() < 1e-9
        );

        // H₁ eigenstate under the bare rotating field
        let rot = HamiltonianSpec::rotating(w0, w1, gamma).unwrap();
        let (psi1, _) = eigenstate_on_cone(w0 - gamma, w1, Branch::Plus).unwrap();
        assert!(cyclicity_deviation(&rot, &psi1, tau, &Propagator::Numerical(cfg)).unwrap() < 1e-9);
    }

    #[test]
    fn deviation_matches_precession_formula() {
        // ψ₀ precesses about the H₁ axis: 1-|⟨⟩|² = sin²ε sin²(|B₁|τ/2)
        let (w0, w1) = (1.0, 0.5);
        for gamma in [0.1, 0.01, 0.001] {
            let spec = HamiltonianSpec::rotating(w0, w1, gamma).unwrap();
            let tau = 2.0 * PI / gamma;
            let (psi0, _) = eigenstate_on_cone(w0, w1, Branch::Plus).unwrap();
            let cfg = IntegratorConfig::auto(&spec, tau).unwrap();
            let dev = cyclicity_deviation(&spec, &psi0, tau, &Propagator::Numerical(cfg)).unwrap();
            let b0 = w0.hypot(w1);
            let b1 = (w0 - gamma).hypot(w1);
            let cos_eps = (w1 * w1 + w0 * (w0 - gamma)) / (b0 * b1);
            let sin2_eps = 1.0 - cos_eps * cos_eps;
            let loss = sin2_eps * (0.5 * b1 * tau).sin().powi(2);
            let expected = 1.0 - (1.0 - loss).sqrt();
            assert!(
                (dev - expected).abs() < 1e-9 + 1e-6 * expected,
                "gamma={gamma}: {dev} vs {expected}"
            );
        }
    }

    #[test]
    fn deviation_envelope_is_quadratic_in_speed() {
        let (w0, w1) = (1.0f64, 0.5f64);
        let envelope = |gamma: f64| {
            let b0 = w0.hypot(w1);
            let b1 = (w0 - gamma).hypot(w1);
            let c = (w1 * w1 + w0 * (w0 - gamma)) / (b0 * b1);
            1.0 - c * c
        };
        let slope = (envelope(1e-2).ln() - envelope(1e-3).ln()) / (10f64).ln();
        assert!((slope - 2.0).abs() < 0.01, "slope {slope}");
    }

    #[test]
    fn composition_over_split_interval() {
        let sched = RotationSchedule::tabulated_loop(
            (0..65)
                .map(|k| 1.0 + 0.3 * (k as f64 * 0.2).sin())
                .collect(),
            7.0,
        )
        .unwrap();
        let spec = HamiltonianSpec::new(
            Form::Compensated,
            FieldParams::new(0.8, 1.1).unwrap(),
            sched,
        )
        .unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 7.0 / 4096.0).unwrap();
        let whole = propagate_interval(&spec, 0.0, 7.0, &cfg).unwrap().unitary;
        let first = propagate_interval(&spec, 0.0, 2.9, &cfg).unwrap().unitary;
        let second = propagate_interval(&spec, 2.9, 7.0, &cfg).unwrap().unitary;
        assert!(
            (second * first)
                .as_operator()
                .max_abs_diff(whole.as_operator())
                < 1e-8
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        let spec = HamiltonianSpec::rotating(2.0, 1.5, 0.7).unwrap();
        let t = 2.0 * PI / 0.7;
        let exact = propagate_closed_form(&spec, t).unwrap();
        let err = |n: usize| {
            let cfg = IntegratorConfig::with_steps(t, n).unwrap();
            propagate_numerical(&spec, t, &cfg)
                .unwrap()
                .unitary
                .as_operator()
                .max_abs_diff(exact.as_operator())
        };
        let ratio = err(256) / err(512);
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn magnus_agrees_with_closed_form() {
        let spec = HamiltonianSpec::compensated(1.0, 0.5, -0.8).unwrap();
        let t = 2.0 * PI / 0.8;
        let cfg = IntegratorConfig::with_steps(t, 40_000)
            .unwrap()
            .with_method(Method::Magnus2);
        let r = propagate_numerical(&spec, t, &cfg).unwrap();
        let exact = propagate_closed_form(&spec, t).unwrap();
        assert!(r.unitary.as_operator().max_abs_diff(exact.as_operator()) < 1e-6);
        assert!(r.max_unitarity_defect < 1e-12);
    }

    #[test]
    fn trajectory_grid_is_uniform_and_even() {
        let spec = HamiltonianSpec::rotating(1.0, 0.5, 0.2).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 1e-3)
            .unwrap()
            .with_trajectory(true);
        let r = propagate_numerical(&spec, 31.4, &cfg).unwrap();
        assert!(r.trajectory.len() <= MAX_TRAJECTORY_POINTS);
        assert_eq!((r.trajectory.len() - 1) % 2, 0);
        assert_eq!(r.trajectory.last().unwrap().1, r.unitary);
        let h = r.trajectory[1].0 - r.trajectory[0].0;
        for w in r.trajectory.windows(2) {
            assert!(((w[1].0 - w[0].0) - h).abs() < 1e-12);
        }
    }

    #[test]
    fn step_budget_and_bad_configs() {
        let spec = HamiltonianSpec::rotating(1.0, 0.5, 0.2).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 1e-12).unwrap();
        assert!(matches!(
            propagate_numerical(&spec, 10.0, &cfg),
            Err(Error::StepBudget { .. })
        ));
        assert!(IntegratorConfig::new(Method::Rk4, 0.0).is_err());
        assert!(IntegratorConfig::new(Method::Rk4, 0.1)
            .unwrap()
            .with_tolerance(-1.0)
            .is_err());
    }

    #[test]
    fn wild_steps_report_numerical_failure() {
        let spec = HamiltonianSpec::rotating(50.0, 30.0, 0.2).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 0.5).unwrap();
        assert!(matches!(
            propagate_numerical(&spec, 100.0, &cfg),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn closed_form_rejects_uncompensated_tabulated() {
        let sched = RotationSchedule::tabulated_loop(vec![1.0, 2.0, 1.0], 3.0).unwrap();
        let spec = HamiltonianSpec::new(Form::Rotating, FieldParams::new(1.0, 0.5).unwrap(), sched)
            .unwrap();
        assert!(matches!(
            propagate_closed_form(&spec, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn tracking_is_exact_when_compensated() {
        let spec = HamiltonianSpec::compensated(0.7, 1.3, 2.1).unwrap();
        let tau = 2.0 * PI / 2.1;
        let cfg = IntegratorConfig::with_steps(tau, 4096).unwrap();
        let err = instantaneous_eigenstate_tracking_error(&spec, tau, 32, &cfg).unwrap();
        assert!(err < 1e-9, "{err}");

        let still = HamiltonianSpec::compensated(0.7, 1.3, 0.0).unwrap();
        let err = instantaneous_eigenstate_tracking_error(&still, 5.0, 10, &cfg).unwrap();
        assert!(err < 1e-12, "{err}");
    }
}
