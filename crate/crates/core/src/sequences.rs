//! Pulse sequences on spin a, conditioned on the state of spin b.
//!
//! The S operation prepares spin a in the cone eigenstate of `H₀` for both
//! states of spin b. The conditional gate is `S`, one compensated field
//! loop, then `S⁻¹`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{
    eigenstate_on_cone, Branch, FieldParams, Form, HamiltonianSpec, RotationSchedule, SpinB,
    TimeDependentHamiltonian,
};
use crate::linalg::{expm_su2, Operator, Unitary, C64, ZERO};
use crate::phases::{
    dynamical_phase, wrap_pi, zero_dyn_conditions, zero_dynamical_gamma, EnergyReference,
};
use crate::propagation::{propagate_numerical, z_rotation, IntegratorConfig, Propagator};

/// Residual allowed in the tangent conditions solved by [`solve_s_controls`].
pub const S_RESIDUAL_TOL: f64 = 1e-12;
/// Largest off-diagonal magnitude for which a two-spin gate counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-6;
/// Agreement threshold between simulated and predicted gate phases.
pub const PHASE_AGREEMENT_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn vector(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// Speed profile of a field loop.
#[derive(Clone, Debug, PartialEq)]
pub enum LoopSpeed {
    /// The same schedule on both spin-b branches.
    Schedule(RotationSchedule),
    /// Constant `γ = -(ω₀² + ω₁²)/ω₀` evaluated with the branch's own `ω₀ = δ ± J`.
    ZeroDynamical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulseStep {
    /// `e^{-i·angle·σ_axis/2}` on spin a.
    Rotation { axis: Axis, angle: f64 },
    /// Free evolution under `½(δ ± J)σz` for `duration`; run backwards when inverted.
    JEvolution { duration: f64, inverted: bool },
    /// One full turn of the transverse field.
    ///
    /// The inverted loop is driven by `-H(τ - t)`: the field turns the other
    /// way and every field component, compensation included, flips sign.
    FieldLoop {
        speed: LoopSpeed,
        compensated: bool,
        inverted: bool,
    },
}

impl PulseStep {
    pub fn rotation(axis: Axis, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(invalid("rotation angle must be finite"));
        }
        Ok(Self::Rotation { axis, angle })
    }

    pub fn j_evolution(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(invalid("evolution time must be finite and non-negative"));
        }
        Ok(Self::JEvolution {
            duration,
            inverted: false,
        })
    }

    pub fn field_loop(speed: LoopSpeed, compensated: bool) -> Self {
        Self::FieldLoop {
            speed,
            compensated,
            inverted: false,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Self::Rotation { axis, angle } => Self::Rotation {
                axis: *axis,
                angle: -angle,
            },
            Self::JEvolution { duration, inverted } => Self::JEvolution {
                duration: *duration,
                inverted: !inverted,
            },
            Self::FieldLoop {
                speed,
                compensated,
                inverted,
            } => Self::FieldLoop {
                speed: speed.clone(),
                compensated: *compensated,
                inverted: !inverted,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pub name: String,
    pub steps: Vec<PulseStep>,
}

impl PulseSequence {
    pub fn new(name: impl Into<String>, steps: Vec<PulseStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(invalid("a pulse sequence needs at least one step"));
        }
        Ok(Self {
            name: name.into(),
            steps,
        })
    }

    /// `[π/2]^y → J(t_c) → [-δt_c]^z → [π/2]^x → [-φ']^y`.
    pub fn s_operation(controls: &SControls) -> Result<Self> {
        Self::new(
            "S",
            vec![
                PulseStep::rotation(Axis::Y, FRAC_PI_2)?,
                PulseStep::j_evolution(controls.t_c)?,
                PulseStep::rotation(Axis::Z, -controls.delta * controls.t_c)?,
                PulseStep::rotation(Axis::X, FRAC_PI_2)?,
                PulseStep::rotation(Axis::Y, -controls.phi_prime)?,
            ],
        )
    }

    /// This sequence followed by `other`.
    pub fn then(mut self, other: &PulseSequence) -> Self {
        self.name = format!("{} -> {}", self.name, other.name);
        self.steps.extend(other.steps.iter().cloned());
        self
    }
}

/// Reversed order, each step inverted.
pub fn inverse_sequence(seq: &PulseSequence) -> PulseSequence {
    PulseSequence {
        name: format!("{}^-1", seq.name),
        steps: seq.steps.iter().rev().map(PulseStep::inverse).collect(),
    }
}

/// Controls of the S operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SControls {
    /// Free-evolution time; zero when `J = 0`.
    pub t_c: f64,
    /// Dimensionless `J·t_c`.
    pub j_t_c: f64,
    pub phi_prime: f64,
    pub delta: f64,
    pub j: f64,
    pub omega1: f64,
    /// Largest of the two tangent-condition residuals, relative to `max(1, |(δ±J)/ω₁|)`.
    pub residual: f64,
}

/// Solves `tan(φ' ± J t_c) = (δ ± J)/ω₁`.
pub fn solve_s_controls(delta: f64, j: f64, omega1: f64) -> Result<SControls> {
    if !(delta.is_finite() && j.is_finite() && omega1.is_finite()) {
        return Err(invalid("S controls need finite delta, J and omega1"));
    }
    if j < 0.0 {
        return Err(invalid("J must be non-negative"));
    }
    if omega1 <= 0.0 {
        return Err(invalid(format!(
            "omega1 must be positive to fix the S controls (got {omega1})"
        )));
    }
    let a_plus = ((delta + j) / omega1).atan();
    let a_minus = ((delta - j) / omega1).atan();
    let j_t_c = 0.5 * (a_plus - a_minus);
    let phi_prime = 0.5 * (a_plus + a_minus);
    let residual = s_residual(delta, j, omega1, j_t_c, phi_prime);
    if residual.is_nan() || residual >= S_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "S controls leave residual {residual:e}"
        )));
    }
    Ok(SControls {
        t_c: if j > 0.0 { j_t_c / j } else { 0.0 },
        j_t_c,
        phi_prime,
        delta,
        j,
        omega1,
        residual,
    })
}

fn s_residual(delta: f64, j: f64, omega1: f64, j_t_c: f64, phi_prime: f64) -> f64 {
    [1.0, -1.0]
        .iter()
        .map(|s| {
            let target = (delta + s * j) / omega1;
            ((phi_prime + s * j_t_c).tan() - target).abs() / target.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `-H(τ - t)` for a Hamiltonian defined on `[0, τ]`.
struct TimeReversed<'a> {
    inner: &'a HamiltonianSpec,
    tau: f64,
}

impl TimeDependentHamiltonian for TimeReversed<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, t: f64) -> Result<Operator> {
        Ok(self
            .inner
            .evaluate((self.tau - t).max(0.0))?
            .scale_real(-1.0))
    }

    fn kink_spacing(&self) -> Option<f64> {
        self.inner.kink_spacing()
    }
}

fn loop_spec(
    speed: &LoopSpeed,
    compensated: bool,
    params: &FieldParams,
    spin_b: SpinB,
) -> Result<HamiltonianSpec> {
    let schedule = match speed {
        LoopSpeed::Schedule(s) => s.clone(),
        LoopSpeed::ZeroDynamical => RotationSchedule::constant(zero_dynamical_gamma(
            spin_b.omega0(params.delta, params.j),
            params.omega1,
        )?)?,
    };
    let form = if compensated {
        Form::Compensated
    } else {
        Form::Rotating
    };
    HamiltonianSpec::new(form, *params, schedule)?.with_spin_b(spin_b)
}

fn lower_loop(spec: &HamiltonianSpec, inverted: bool, propagator: &Propagator) -> Result<Unitary> {
    let tau = spec.schedule.loop_duration()?;
    if !inverted {
        return propagator.propagate(spec, tau);
    }
    let reversed = TimeReversed { inner: spec, tau };
    match propagator {
        Propagator::ClosedForm => Ok(propagator.propagate(spec, tau)?.adjoint()),
        Propagator::Numerical(cfg) => {
            Ok(propagate_numerical(&reversed, tau, &cfg.with_trajectory(false))?.unitary)
        }
        Propagator::NumericalAuto => {
            Ok(propagate_numerical(&reversed, tau, &IntegratorConfig::auto(spec, tau)?)?.unitary)
        }
    }
}

/// Spin-a unitary of `seq` with spin b fixed; the first step acts first.
pub fn lower_sequence(
    seq: &PulseSequence,
    params: &FieldParams,
    spin_b: SpinB,
    propagator: &Propagator,
) -> Result<Unitary> {
    params.validate()?;
    let mut acc = Unitary::identity(2)?;
    for step in &seq.steps {
        let u = match step {
            PulseStep::Rotation { axis, angle } => expm_su2(axis.vector(), *angle)?,
            PulseStep::JEvolution { duration, inverted } => {
                let sign = if *inverted { -1.0 } else { 1.0 };
                z_rotation(sign * spin_b.omega0(params.delta, params.j) * duration)
            }
            PulseStep::FieldLoop {
                speed,
                compensated,
                inverted,
            } => lower_loop(
                &loop_spec(speed, *compensated, params, spin_b)?,
                *inverted,
                propagator,
            )?,
        };
        acc = u * acc;
    }
    Ok(acc)
}

/// How the loop speed is chosen on the two spin-b branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopMode {
    /// Each branch runs at its own zero-dynamical-phase speed.
    PerBranch,
    /// One physical rotation at `γ = -2δ` for both branches.
    Shared,
}

/// Largest `|∫⟨H⟩dt|` of the loop on the + cone eigenstate, per spin-b branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicalResiduals {
    pub per_branch: [f64; 2],
    pub shared: [f64; 2],
}

/// Simulated conditional gate and its comparison with the predicted phases.
#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    pub delta: f64,
    pub j: f64,
    pub mode: LoopMode,
    pub omega1: f64,
    pub gamma: f64,
    pub tau: f64,
    pub cos_theta_plus: f64,
    pub cos_theta_minus: f64,
    pub controls: SControls,
    pub unitary: Unitary,
    /// `arg U_kk` in basis order `↑↑, ↑↓, ↓↑, ↓↓` (spin a first).
    pub simulated_phases: [f64; 4],
    /// `(Γ₊, Γ₋, -Γ₋, -Γ₊)` with `Γ± = -π ∓ 2π cos θ±`, wrapped to `(-π, π]`.
    pub predicted_phases: [f64; 4],
    /// `(g₊, g₋, -g₊, -g₋)` with the single-loop phase `g± = -π - π cos θ±`.
    pub loop_model_phases: [f64; 4],
    pub max_off_diagonal: f64,
    pub entangling_simulated: f64,
    pub entangling_predicted: f64,
    /// Largest wrapped `|simulated - predicted|` over the diagonal.
    pub max_prediction_discrepancy: f64,
    /// Largest wrapped `|simulated - loop model|` over the diagonal.
    pub max_model_discrepancy: f64,
    pub dynamical_residuals: DynamicalResiduals,
    pub agrees_with_prediction: bool,
}

/// Largest wrapped difference between two phase lists.
pub fn max_phase_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| wrap_pi(x - y).abs())
        .fold(0.0, f64::max)
}

fn loop_dynamical_residual(
    delta: f64,
    j: f64,
    omega1: f64,
    spin_b: SpinB,
    mode: LoopMode,
) -> Result<f64> {
    let params = FieldParams::coupled(delta, j, omega1)?;
    let speed = match mode {
        LoopMode::PerBranch => LoopSpeed::ZeroDynamical,
        LoopMode::Shared => LoopSpeed::Schedule(RotationSchedule::constant(-2.0 * delta)?),
    };
    let spec = loop_spec(&speed, true, &params, spin_b)?;
    let tau = spec.schedule.loop_duration()?;
    let (psi0, _) = eigenstate_on_cone(spin_b.omega0(delta, j), omega1, Branch::Plus)?;
    let cfg = IntegratorConfig::with_steps(tau, 4096)?;
    Ok(dynamical_phase(&spec, &psi0, tau, &cfg, EnergyReference::Generator)?.abs())
}

/// Block-diagonal two-spin operator from the spin-a unitaries for b = ↑, ↓.
pub fn embed_conditional(up: &Unitary, down: &Unitary) -> Result<Unitary> {
    if up.dim() != 2 || down.dim() != 2 {
        return Err(invalid("conditional blocks must be single-spin unitaries"));
    }
    let mut entries = [ZERO; 16];
    for (b, u) in [up, down].into_iter().enumerate() {
        for a in 0..2 {
            for a2 in 0..2 {
                entries[(2 * a + b) * 4 + 2 * a2 + b] = u.get(a, a2);
            }
        }
    }
    Unitary::new(Operator::from_rows(4, &entries)?)
}

/// `S → compensated loop → S⁻¹` at the operating point `ω₁ = √(δ² - J²)`.
pub fn conditional_gate(
    delta: f64,
    j: f64,
    mode: LoopMode,
    propagator: &Propagator,
) -> Result<GateReport> {
    let op = zero_dyn_conditions(delta, j)?;
    let params = FieldParams::coupled(delta, j, op.omega1_star)?;
    let controls = solve_s_controls(delta, j, op.omega1_star)?;
    let s = PulseSequence::s_operation(&controls)?;
    let speed = match mode {
        LoopMode::PerBranch => LoopSpeed::ZeroDynamical,
        LoopMode::Shared => LoopSpeed::Schedule(RotationSchedule::constant(op.gamma_star)?),
    };
    let gate_seq = s
        .clone()
        .then(&PulseSequence::new(
            "loop",
            vec![PulseStep::field_loop(speed, true)],
        )?)
        .then(&inverse_sequence(&s));

    let up = lower_sequence(&gate_seq, &params, SpinB::Up, propagator)?;
    let down = lower_sequence(&gate_seq, &params, SpinB::Down, propagator)?;
    let unitary = embed_conditional(&up, &down)?;

    let max_off_diagonal = unitary.as_operator().max_off_diagonal();
    let mut simulated_phases = [0.0; 4];
    for (k, p) in simulated_phases.iter_mut().enumerate() {
        *p = unitary.get(k, k).arg();
    }
    let big_plus = -PI - 2.0 * PI * op.cos_theta_plus;
    let big_minus = -PI + 2.0 * PI * op.cos_theta_minus;
    let predicted_phases = [big_plus, big_minus, -big_minus, -big_plus].map(wrap_pi);
    let g_plus = -PI - PI * op.cos_theta_plus;
    let g_minus = -PI - PI * op.cos_theta_minus;
    let loop_model_phases = [g_plus, g_minus, -g_plus, -g_minus].map(wrap_pi);

    let entangling_simulated = if max_off_diagonal <= DIAGONAL_TOL {
        gate_entangling_phase(&unitary)?
    } else {
        f64::NAN
    };
    let entangling_predicted = entangling_from_phases(&predicted_phases);
    let max_prediction_discrepancy = max_phase_difference(&simulated_phases, &predicted_phases);
    let max_model_discrepancy = max_phase_difference(&simulated_phases, &loop_model_phases);

    let mut dynamical_residuals = DynamicalResiduals {
        per_branch: [0.0; 2],
        shared: [0.0; 2],
    };
    for b in SpinB::BOTH {
        dynamical_residuals.per_branch[b.index()] =
            loop_dynamical_residual(delta, j, op.omega1_star, b, LoopMode::PerBranch)?;
        dynamical_residuals.shared[b.index()] =
            loop_dynamical_residual(delta, j, op.omega1_star, b, LoopMode::Shared)?;
    }

    Ok(GateReport {
        delta,
        j,
        mode,
        omega1: op.omega1_star,
        gamma: op.gamma_star,
        tau: 2.0 * PI / op.gamma_star.abs(),
        cos_theta_plus: op.cos_theta_plus,
        cos_theta_minus: op.cos_theta_minus,
        controls,
        unitary,
        simulated_phases,
        predicted_phases,
        loop_model_phases,
        max_off_diagonal,
        entangling_simulated,
        entangling_predicted,
        max_prediction_discrepancy,
        max_model_discrepancy,
        dynamical_residuals,
        agrees_with_prediction: max_off_diagonal <= DIAGONAL_TOL
            && max_prediction_discrepancy <= PHASE_AGREEMENT_TOL,
    })
}

fn entangling_from_phases(p: &[f64; 4]) -> f64 {
    wrap_pi(p[0] - p[1] - p[2] + p[3])
}

/// `arg U₀₀ - arg U₁₁ - arg U₂₂ + arg U₃₃`, wrapped to `(-π, π]`.
pub fn gate_entangling_phase(u: &Unitary) -> Result<f64> {
    if u.dim() != 4 {
        return Err(invalid("entangling phase needs a two-spin operator"));
    }
    let off = u.as_operator().max_off_diagonal();
    if off > DIAGONAL_TOL {
        return Err(invalid(format!(
            "operator is not diagonal (off-diagonal magnitude {off:e})"
        )));
    }
    let d: [C64; 4] = [u.get(0, 0), u.get(1, 1), u.get(2, 2), u.get(3, 3)];
    // product form avoids branch cuts in the individual arguments
    Ok(wrap_pi((d[0] * d[1].conj() * d[2].conj() * d[3]).arg()))
}
