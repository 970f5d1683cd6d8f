//! Run configuration: a TOML file with one section per experiment, plus
//! command-line overrides that take precedence over file values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub const fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn single(x: f64) -> Self {
        Self::new(x, x, 1)
    }

    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::Usage(format!(
                "{name}: range bounds must be finite"
            )));
        }
        let single = self.count == 1 && self.min == self.max;
        if !single && (self.count < 2 || self.min >= self.max) {
            return Err(CliError::Usage(format!(
                "{name}: need min < max and count >= 2 (got {} .. {}, {} points)",
                self.min, self.max, self.count
            )));
        }
        Ok(())
    }

    /// Evenly spaced points from `min` to `max`.
    pub fn linear(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.max
                } else {
                    self.min + step * k as f64
                }
            })
            .collect()
    }

    /// Logarithmically spaced points from `max` down to `min`.
    pub fn log_descending(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.max];
        }
        let (hi, lo) = (self.max.log10(), self.min.log10());
        let step = (hi - lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| match k {
                0 => self.max,
                k if k + 1 == self.count => self.min,
                k => 10f64.powf(hi - step * k as f64),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Rk4,
    Magnus2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LoopModeName {
    Shared,
    PerBranch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    /// Upper bound on the step size is `τ / steps_per_loop`.
    pub steps_per_loop: usize,
    pub method: MethodName,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            steps_per_loop: 4096,
            method: MethodName::Rk4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceSection {
    pub omega1_over_j: Range,
    pub delta_over_j: Range,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self {
            omega1_over_j: Range::new(0.2, 10.0, 50),
            delta_over_j: Range::new(0.0, 5.0, 50),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4Section {
    pub delta_over_j: f64,
    pub omega1_over_j: Range,
}

impl Default for Fig4Section {
    fn default() -> Self {
        Self {
            delta_over_j: 1.058,
            omega1_over_j: Range::new(0.05, 10.0, 200),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdiabaticSection {
    pub omega1_over_omega0: f64,
    /// Swept logarithmically, fastest loop first.
    pub gamma_over_omega0: Range,
}

impl Default for AdiabaticSection {
    fn default() -> Self {
        Self {
            omega1_over_omega0: 0.5,
            gamma_over_omega0: Range::new(1e-3, 1.0, 7),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub delta_over_j: f64,
    pub loop_mode: LoopModeName,
}

impl Default for GateSection {
    fn default() -> Self {
        Self {
            delta_over_j: 1.058,
            loop_mode: LoopModeName::Shared,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoopPhaseSection {
    pub omega1_over_omega0: f64,
    pub gamma_over_omega0: f64,
    /// Relative modulation depth of the tabulated speed profiles.
    pub wobble: f64,
    pub samples: usize,
}

impl Default for LoopPhaseSection {
    fn default() -> Self {
        Self {
            omega1_over_omega0: 0.6,
            gamma_over_omega0: 0.5,
            wobble: 0.3,
            samples: 257,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub integrator: IntegratorSection,
    pub s_surface: SurfaceSection,
    pub fig4: Fig4Section,
    pub adiabatic_error: AdiabaticSection,
    pub gate_report: GateSection,
    pub loop_phase: LoopPhaseSection,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.integrator.steps_per_loop < 2 {
            return Err(CliError::Usage("steps_per_loop must be at least 2".into()));
        }
        self.s_surface
            .omega1_over_j
            .validate("s_surface.omega1_over_j")?;
        self.s_surface
            .delta_over_j
            .validate("s_surface.delta_over_j")?;
        self.fig4.omega1_over_j.validate("fig4.omega1_over_j")?;
        let g = &self.adiabatic_error.gamma_over_omega0;
        g.validate("adiabatic_error.gamma_over_omega0")?;
        if g.min < 0.0 || (g.min == 0.0 && g.count > 1) {
            return Err(CliError::Usage(
                "adiabatic_error.gamma_over_omega0 is swept logarithmically and must be positive"
                    .into(),
            ));
        }
        if self.loop_phase.samples < 3 {
            return Err(CliError::Usage(
                "loop_phase.samples must be at least 3".into(),
            ));
        }
        if self.loop_phase.wobble.is_nan() || self.loop_phase.wobble.abs() >= 0.6 {
            return Err(CliError::Usage(
                "loop_phase.wobble must stay below 0.6 so every profile keeps its sign".into(),
            ));
        }
        Ok(())
    }
}

/// Values given on the command line; each one overrides the file.
#[derive(Clone, Debug, Default, PartialEq, clap::Args)]
pub struct Overrides {
    /// Fixed δ/J (fig4, gate-report).
    #[arg(long)]
    pub delta_over_j: Option<f64>,
    /// Evaluate a single ω₁/J instead of a sweep (s-surface, fig4).
    #[arg(long)]
    pub omega1_over_j: Option<f64>,
    /// Single γ/ω₀ (adiabatic-error) or the loop speed (loop-phase).
    #[arg(long)]
    pub gamma_over_omega0: Option<f64>,
    /// ω₁/ω₀ (adiabatic-error, loop-phase).
    #[arg(long)]
    pub omega1_over_omega0: Option<f64>,
    #[arg(long)]
    pub omega1_min: Option<f64>,
    #[arg(long)]
    pub omega1_max: Option<f64>,
    #[arg(long)]
    pub omega1_count: Option<usize>,
    #[arg(long)]
    pub delta_min: Option<f64>,
    #[arg(long)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_count: Option<usize>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_count: Option<usize>,
    #[arg(long)]
    pub steps_per_loop: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodName>,
    #[arg(long, value_enum)]
    pub loop_mode: Option<LoopModeName>,
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn override_range(r: &mut Range, min: Option<f64>, max: Option<f64>, count: Option<usize>) {
    set(&mut r.min, min);
    set(&mut r.max, max);
    set(&mut r.count, count);
}

impl Overrides {
    pub fn apply(&self, cfg: &mut Config) {
        set(&mut cfg.integrator.steps_per_loop, self.steps_per_loop);
        set(&mut cfg.integrator.method, self.method);

        for r in [
            &mut cfg.s_surface.omega1_over_j,
            &mut cfg.fig4.omega1_over_j,
        ] {
            override_range(r, self.omega1_min, self.omega1_max, self.omega1_count);
            if let Some(w) = self.omega1_over_j {
                *r = Range::single(w);
            }
        }
        override_range(
            &mut cfg.s_surface.delta_over_j,
            self.delta_min,
            self.delta_max,
            self.delta_count,
        );
        set(&mut cfg.fig4.delta_over_j, self.delta_over_j);
        set(&mut cfg.gate_report.delta_over_j, self.delta_over_j);
        set(&mut cfg.gate_report.loop_mode, self.loop_mode);

        let g = &mut cfg.adiabatic_error.gamma_over_omega0;
        override_range(g, self.gamma_min, self.gamma_max, self.gamma_count);
        if let Some(x) = self.gamma_over_omega0 {
            *g = Range::single(x);
        }
        set(
            &mut cfg.adiabatic_error.omega1_over_omega0,
            self.omega1_over_omega0,
        );
        set(
            &mut cfg.loop_phase.gamma_over_omega0,
            self.gamma_over_omega0,
        );
        set(
            &mut cfg.loop_phase.omega1_over_omega0,
            self.omega1_over_omega0,
        );
    }
}
