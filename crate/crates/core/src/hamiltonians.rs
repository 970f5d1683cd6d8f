//! Spin Hamiltonians in the laboratory and rotating frames.
//!
//! Units: angular frequencies in rad/s with ħ = 1. The horizontal field
//! rotates about z with accumulated angle `Φ(t) = ∫₀ᵗ γ(t') dt'`, entering
//! through `σx(Φ) = cos Φ σx + sin Φ σy`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::linalg::{pauli, tensor, Operator, SpinState, C64};

/// Tolerance on `|∫γ dt| = 2π` for schedules that describe one full loop.
pub const LOOP_ANGLE_TOL: f64 = 1e-9;

/// Field amplitudes and NMR constants shared by all Hamiltonian forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldParams {
    /// Vertical effective field in the rotating frame.
    pub omega0: f64,
    /// RF amplitude.
    pub omega1: f64,
    /// Detuning `ω_a - ω_a'`.
    pub delta: f64,
    /// Ising coupling constant.
    pub j: f64,
    /// RF carrier frequency.
    pub omega_a_prime: f64,
    /// Resonance frequency of spin b.
    pub omega_b: f64,
}

impl FieldParams {
    pub fn new(omega0: f64, omega1: f64) -> Result<Self> {
        let p = Self {
            omega0,
            omega1,
            delta: 0.0,
            j: 0.0,
            omega_a_prime: 0.0,
            omega_b: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters of the coupled pair: `ω₀` is later selected as `δ ± J`.
    pub fn coupled(delta: f64, j: f64, omega1: f64) -> Result<Self> {
        let p = Self {
            omega0: delta,
            omega1,
            delta,
            j,
            omega_a_prime: 0.0,
            omega_b: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lab_frequencies(mut self, omega_a_prime: f64, omega_b: f64) -> Result<Self> {
        self.omega_a_prime = omega_a_prime;
        self.omega_b = omega_b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega0,
            self.omega1,
            self.delta,
            self.j,
            self.omega_a_prime,
            self.omega_b,
        ];
        if !all.iter().all(|x| x.is_finite()) {
            return Err(invalid("field parameters must be finite"));
        }
        if self.omega1 < 0.0 {
            return Err(invalid("omega1 must be non-negative"));
        }
        if self.j < 0.0 {
            return Err(invalid("J must be non-negative"));
        }
        Ok(())
    }

    /// Spin-a resonance frequency `ω_a = δ + ω_a'`.
    pub fn omega_a(&self) -> f64 {
        self.delta + self.omega_a_prime
    }
}

/// State of the spectator spin b, which shifts spin a's vertical field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinB {
    Up,
    Down,
}

impl SpinB {
    pub const BOTH: [SpinB; 2] = [SpinB::Up, SpinB::Down];

    pub fn sign(self) -> f64 {
        match self {
            SpinB::Up => 1.0,
            SpinB::Down => -1.0,
        }
    }

    /// Basis index of spin b (0 = up).
    pub fn index(self) -> usize {
        match self {
            SpinB::Up => 0,
            SpinB::Down => 1,
        }
    }

    /// `ω₀ = δ ± J`.
    pub fn omega0(self, delta: f64, j: f64) -> f64 {
        delta + self.sign() * j
    }
}

/// Eigenbranch of a single-spin field Hamiltonian `½ B·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Eigenvalue `+|B|/2`, Bloch vector parallel to the field.
    Plus,
    /// Eigenvalue `-|B|/2`.
    Minus,
}

/// Piecewise-linear function on a uniform grid over `[0, duration]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    samples: Vec<f64>,
    duration: f64,
    cumulative: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(samples: Vec<f64>, duration: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("a tabulated profile needs at least two samples"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid("tabulated duration must be positive and finite"));
        }
        if !samples.iter().all(|x| x.is_finite()) {
            return Err(invalid("tabulated samples must be finite"));
        }
        let h = duration / (samples.len() - 1) as f64;
        let mut cumulative = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in samples.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Ok(Self {
            samples,
            duration,
            cumulative,
        })
    }

    /// Samples `f` at `n` uniform points including both endpoints.
    pub fn from_fn(f: impl Fn(f64) -> f64, duration: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("a tabulated profile needs at least two samples"));
        }
        let h = duration / (n - 1) as f64;
        Self::new((0..n).map(|k| f(k as f64 * h)).collect(), duration)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn spacing(&self) -> f64 {
        self.duration / (self.samples.len() - 1) as f64
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let h = self.spacing();
        let last = self.samples.len() - 2;
        let k = ((t / h).floor().max(0.0) as usize).min(last);
        (k, t - k as f64 * h)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (k, s) = self.locate(t);
        let slope = (self.samples[k + 1] - self.samples[k]) / self.spacing();
        self.samples[k] + slope * s
    }

    /// Exact integral of the interpolant over `[0, t]`.
    pub fn integral(&self, t: f64) -> f64 {
        let (k, s) = self.locate(t);
        let slope = (self.samples[k + 1] - self.samples[k]) / self.spacing();
        self.cumulative[k] + self.samples[k] * s + 0.5 * slope * s * s
    }

    pub fn total_integral(&self) -> f64 {
        *self.cumulative.last().expect("at least two samples")
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.samples.iter().map(|&x| f(x)).collect(), self.duration)
            .expect("mapping preserves validity")
    }

    fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self::new(samples, self.duration).expect("reversal preserves validity")
    }
}

/// Rotation speed of the horizontal field.
#[derive(Clone, Debug, PartialEq)]
pub enum RotationSchedule {
    Constant {
        gamma: f64,
    },
    /// `γ_a(t)` interpolated linearly between uniform samples.
    Tabulated(PiecewiseLinear),
}

impl RotationSchedule {
    pub fn constant(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(invalid("rotation speed must be finite"));
        }
        Ok(Self::Constant { gamma })
    }

    /// Tabulated schedule used as-is.
    pub fn tabulated(samples: Vec<f64>, duration: f64) -> Result<Self> {
        Ok(Self::Tabulated(PiecewiseLinear::new(samples, duration)?))
    }

    /// Tabulated loop: the samples are rescaled so that the trapezoid
    /// integral is exactly `±2π`, keeping the sign of the raw integral.
    pub fn tabulated_loop(samples: Vec<f64>, duration: f64) -> Result<Self> {
        let raw = PiecewiseLinear::new(samples, duration)?;
        let total = raw.total_integral();
        if total.is_nan() || total.abs() <= 1e-300 {
            return Err(invalid("rotation profile integrates to zero"));
        }
        let scale = 2.0 * PI / total.abs();
        Ok(Self::Tabulated(raw.map(|x| x * scale)))
    }

    /// Speed `γ(t)`.
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant { gamma } => *gamma,
            Self::Tabulated(p) => p.value(t),
        }
    }

    /// Accumulated rotation angle `∫₀ᵗ γ dt'`.
    pub fn angle(&self, t: f64) -> f64 {
        match self {
            Self::Constant { gamma } => gamma * t,
            Self::Tabulated(p) => p.integral(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    /// Last time at which a tabulated schedule is defined.
    pub fn end(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } => None,
            Self::Tabulated(p) => Some(p.duration()),
        }
    }

    pub fn kink_spacing(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } => None,
            Self::Tabulated(p) => Some(p.spacing()),
        }
    }

    /// Duration of one full `2π` loop.
    pub fn loop_duration(&self) -> Result<f64> {
        match self {
            Self::Constant { gamma } => {
                if *gamma == 0.0 {
                    Err(invalid("a static field never completes a loop"))
                } else {
                    Ok(2.0 * PI / gamma.abs())
                }
            }
            Self::Tabulated(p) => {
                let total = p.total_integral();
                if (total.abs() - 2.0 * PI).abs() > LOOP_ANGLE_TOL {
                    Err(Error::ConstraintViolation(format!(
                        "tabulated schedule sweeps {total} rad, not a full loop"
                    )))
                } else {
                    Ok(p.duration())
                }
            }
        }
    }

    /// Schedule `t -> -γ(τ - t)`, the speed profile of the time-reversed loop.
    pub fn reversed_negated(&self) -> Self {
        match self {
            Self::Constant { gamma } => Self::Constant { gamma: -gamma },
            Self::Tabulated(p) => Self::Tabulated(p.reversed().map(|x| -x)),
        }
    }
}

/// The named Hamiltonian forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `H₀ = ½(ω₀σz + ω₁σx)`.
    Static,
    /// `H(t) = ½(ω₀σz + ω₁σx(Φ(t)))`.
    Rotating,
    /// `H_W(t) = ½((ω₀ + γ(t))σz + ω₁σx(Φ(t)))`, with the compensating vertical field.
    Compensated,
    /// `H₁ = H₀ - γσz/2`.
    Shifted,
    /// Laboratory frame spin-a Hamiltonian `½(ω₀ + ω_a')σz + ½ω₁σx(ω_a' t)`.
    LabFrame,
    /// Two-spin `½(ω_a σz⊗1 + ω_b 1⊗σz + J σz⊗σz)`.
    Coupled,
}

/// Anything that yields a Hermitian matrix at each time.
pub trait TimeDependentHamiltonian {
    fn dim(&self) -> usize;

    fn evaluate(&self, t: f64) -> Result<Operator>;

    /// Uniform spacing of derivative discontinuities, if any.
    fn kink_spacing(&self) -> Option<f64> {
        None
    }
}

/// Declarative description of one Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub form: Form,
    pub params: FieldParams,
    pub schedule: RotationSchedule,
    /// When set, `ω₀` is replaced by `δ ± J`.
    pub spin_b: Option<SpinB>,
    /// Common scale factor `a(t)` on `ω₀` and `ω₁` (their ratio stays fixed).
    pub envelope: Option<PiecewiseLinear>,
    /// Phase offset of the transverse field.
    pub rf_phase: f64,
}

impl HamiltonianSpec {
    pub fn new(form: Form, params: FieldParams, schedule: RotationSchedule) -> Result<Self> {
        let spec = Self {
            form,
            params,
            schedule,
            spin_b: None,
            envelope: None,
            rf_phase: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rotating(omega0: f64, omega1: f64, gamma: f64) -> Result<Self> {
        Self::new(
            Form::Rotating,
            FieldParams::new(omega0, omega1)?,
            RotationSchedule::constant(gamma)?,
        )
    }

    pub fn compensated(omega0: f64, omega1: f64, gamma: f64) -> Result<Self> {
        Self::new(
            Form::Compensated,
            FieldParams::new(omega0, omega1)?,
            RotationSchedule::constant(gamma)?,
        )
    }

    pub fn with_spin_b(mut self, spin_b: SpinB) -> Result<Self> {
        self.spin_b = Some(spin_b);
        self.validate()?;
        Ok(self)
    }

    pub fn with_envelope(mut self, envelope: PiecewiseLinear) -> Result<Self> {
        self.envelope = Some(envelope);
        self.validate()?;
        Ok(self)
    }

    pub fn with_rf_phase(mut self, rf_phase: f64) -> Result<Self> {
        if !rf_phase.is_finite() {
            return Err(invalid("rf phase must be finite"));
        }
        self.rf_phase = rf_phase;
        Ok(self)
    }

    /// Same fields, different form.
    pub fn as_form(&self, form: Form) -> Result<Self> {
        let mut out = self.clone();
        out.form = form;
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.rf_phase.is_finite() {
            return Err(invalid("rf phase must be finite"));
        }
        let uses_schedule = matches!(
            self.form,
            Form::Rotating | Form::Compensated | Form::Shifted
        );
        if self.envelope.is_some() && !matches!(self.form, Form::Rotating | Form::Compensated) {
            return Err(invalid(format!(
                "{:?} form does not accept an amplitude envelope",
                self.form
            )));
        }
        if self.form == Form::Coupled && self.spin_b.is_some() {
            return Err(invalid("the coupled form already contains spin b"));
        }
        if let (true, Some(end), Some(env)) = (uses_schedule, self.schedule.end(), &self.envelope) {
            if (end - env.duration()).abs() > 1e-12 * end {
                return Err(invalid("schedule and envelope durations differ"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self.form {
            Form::Coupled => 4,
            _ => 2,
        }
    }

    /// `ω₀`, or `δ ± J` when a spin-b branch is selected.
    pub fn effective_omega0(&self) -> f64 {
        match self.spin_b {
            Some(b) => b.omega0(self.params.delta, self.params.j),
            None => self.params.omega0,
        }
    }

    /// Last admissible evaluation time, if bounded.
    pub fn domain_end(&self) -> Option<f64> {
        match self.form {
            Form::Rotating | Form::Compensated | Form::Shifted => {
                match (self.schedule.end(), &self.envelope) {
                    (Some(e), _) => Some(e),
                    (None, Some(env)) => Some(env.duration()),
                    (None, None) => None,
                }
            }
            _ => None,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let end = self.domain_end().unwrap_or(f64::INFINITY);
        let slack = if end.is_finite() {
            1e-12 * end.max(1.0)
        } else {
            0.0
        };
        if !t.is_finite() || t < 0.0 || t > end + slack {
            return Err(Error::Domain { t, end });
        }
        Ok(())
    }

    /// Scale factor `a(t)` on the field amplitudes.
    pub fn amplitude_scale(&self, t: f64) -> f64 {
        self.envelope.as_ref().map_or(1.0, |e| e.value(t))
    }

    /// `∫₀ᵗ a(t') dt'`.
    pub fn amplitude_integral(&self, t: f64) -> f64 {
        self.envelope.as_ref().map_or(t, |e| e.integral(t))
    }

    /// The static rotating-frame Hamiltonian `H₀ = ½(ω₀σz + ω₁σx(rf))`.
    pub fn h0(&self) -> Operator {
        field_hamiltonian(self.effective_omega0(), self.params.omega1, self.rf_phase)
    }

    /// Field vector `(B_x, B_y, B_z)` of the rotating (uncompensated) field at `t`.
    pub fn rotating_field(&self, t: f64) -> [f64; 3] {
        let a = self.amplitude_scale(t);
        let phi = self.schedule.angle(t) + self.rf_phase;
        let w1 = a * self.params.omega1;
        [w1 * phi.cos(), w1 * phi.sin(), a * self.effective_omega0()]
    }
}

/// `½(ω_z σz + ω₁ σx(φ))`, built so that Hermiticity is exact.
pub fn field_hamiltonian(omega_z: f64, omega1: f64, phase: f64) -> Operator {
    let off = C64::from_polar(0.5 * omega1, phase);
    Operator::from_rows(
        2,
        &[
            C64::new(0.5 * omega_z, 0.0),
            off.conj(),
            off,
            C64::new(-0.5 * omega_z, 0.0),
        ],
    )
    .expect("finite field")
}

impl TimeDependentHamiltonian for HamiltonianSpec {
    fn dim(&self) -> usize {
        HamiltonianSpec::dim(self)
    }

    fn evaluate(&self, t: f64) -> Result<Operator> {
        self.check_time(t)?;
        let p = &self.params;
        let w0 = self.effective_omega0();
        let op = match self.form {
            Form::Static => self.h0(),
            Form::Rotating => {
                let a = self.amplitude_scale(t);
                let phi = self.schedule.angle(t) + self.rf_phase;
                field_hamiltonian(a * w0, a * p.omega1, phi)
            }
            Form::Compensated => {
                let a = self.amplitude_scale(t);
                let phi = self.schedule.angle(t) + self.rf_phase;
                field_hamiltonian(a * w0 + self.schedule.rate(t), a * p.omega1, phi)
            }
            Form::Shifted => field_hamiltonian(w0 - self.schedule.rate(t), p.omega1, self.rf_phase),
            Form::LabFrame => field_hamiltonian(
                w0 + p.omega_a_prime,
                p.omega1,
                p.omega_a_prime * t + self.rf_phase,
            ),
            Form::Coupled => {
                let za = tensor(&pauli::sigma_z(), &pauli::identity())?;
                let zb = tensor(&pauli::identity(), &pauli::sigma_z())?;
                let zz = tensor(&pauli::sigma_z(), &pauli::sigma_z())?;
                (za.scale_real(p.omega_a()) + zb.scale_real(p.omega_b) + zz.scale_real(p.j))
                    .scale_real(0.5)
            }
        };
        Ok(op)
    }

    fn kink_spacing(&self) -> Option<f64> {
        match self.form {
            Form::Rotating | Form::Compensated | Form::Shifted => {
                let env = self.envelope.as_ref().map(|e| e.spacing());
                match (self.schedule.kink_spacing(), env) {
                    (Some(a), Some(b)) if (a - b).abs() <= 1e-12 * a => Some(a),
                    (Some(_), Some(_)) => None,
                    (a, b) => a.or(b),
                }
            }
            _ => None,
        }
    }
}

/// Hamiltonian seen in a frame rotating about z at `frame_speed`:
/// `R H R† + i (dR/dt) R†` with `R = e^{i·frame_speed·σz·t/2}` acting on spin a.
pub struct RotatingFrame<'a, H: ?Sized> {
    inner: &'a H,
    frame_speed: f64,
}

pub fn rotating_frame_transform<H>(h_lab: &H, frame_speed: f64) -> RotatingFrame<'_, H>
where
    H: TimeDependentHamiltonian + ?Sized,
{
    RotatingFrame {
        inner: h_lab,
        frame_speed,
    }
}

impl<H: TimeDependentHamiltonian + ?Sized> RotatingFrame<'_, H> {
    pub fn frame_speed(&self) -> f64 {
        self.frame_speed
    }
}

/// Spin-a σz eigenvalue (+1 / -1) of each basis index.
fn spin_a_sign(dim: usize, k: usize) -> f64 {
    let half = dim / 2;
    if k < half {
        1.0
    } else {
        -1.0
    }
}

impl<H: TimeDependentHamiltonian + ?Sized> TimeDependentHamiltonian for RotatingFrame<'_, H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, t: f64) -> Result<Operator> {
        let h = self.inner.evaluate(t)?;
        let n = h.dim();
        let theta = self.frame_speed * t;
        let mut out = Operator::zeros(n)?;
        for r in 0..n {
            let sr = spin_a_sign(n, r);
            let diag = h.get(r, r).re - 0.5 * self.frame_speed * sr;
            out.set(r, r, C64::new(diag, 0.0));
            for c in (r + 1)..n {
                let sc = spin_a_sign(n, c);
                let z = h.get(r, c) * C64::from_polar(1.0, 0.5 * theta * (sr - sc));
                out.set(r, c, z);
                out.set(c, r, z.conj());
            }
        }
        Ok(out)
    }

    fn kink_spacing(&self) -> Option<f64> {
        self.inner.kink_spacing()
    }
}

/// Eigenstate of `½ B·σ` on the chosen branch, with its eigenvalue `±|B|/2`.
pub fn field_eigenstate(field: [f64; 3], branch: Branch) -> Result<(SpinState, f64)> {
    if !field.iter().all(|x| x.is_finite()) {
        return Err(invalid("field components must be finite"));
    }
    let strength = field.iter().map(|x| x * x).sum::<f64>().sqrt();
    if strength == 0.0 {
        return Err(invalid("zero field: the cone angle is undefined"));
    }
    let cos_theta = (field[2] / strength).clamp(-1.0, 1.0);
    // half-angle forms stay accurate near the poles
    let c = ((1.0 + cos_theta) / 2.0).sqrt();
    let s = ((1.0 - cos_theta) / 2.0).sqrt();
    let azimuth = C64::from_polar(1.0, field[1].atan2(field[0]));
    let (amps, value) = match branch {
        Branch::Plus => ([C64::new(c, 0.0), azimuth * s], 0.5 * strength),
        Branch::Minus => ([C64::new(s, 0.0), -azimuth * c], -0.5 * strength),
    };
    Ok((SpinState::new(&amps)?, value))
}

/// Eigenstate of `H₀ = ½(ω₀σz + ω₁σx)`:
/// `cos(θ/2)|↑⟩ + sin(θ/2)|↓⟩` with `cos θ = ω₀/√(ω₀² + ω₁²)` on the plus branch.
pub fn eigenstate_on_cone(omega0: f64, omega1: f64, branch: Branch) -> Result<(SpinState, f64)> {
    field_eigenstate([omega1, 0.0, omega0], branch)
}

/// `cos θ` of the cone defined by `(ω₀, ω₁)`.
pub fn cone_cos_theta(omega0: f64, omega1: f64) -> Result<f64> {
    let b = omega0.hypot(omega1);
    if b == 0.0 {
        return Err(invalid("zero field: the cone angle is undefined"));
    }
    Ok(omega0 / b)
}
