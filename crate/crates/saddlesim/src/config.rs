//! Scenario files.
//!
//! TOML is the primary format; a file that fails to parse as TOML (or has a
//! `.json` extension) is read as JSON with the same schema. Every section has
//! defaults matching the reference optics: 50 nm silica at 1550 nm, 70 mW,
//! NA 0.6, a 150 kHz reference tweezer with n̄ = 0.8.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use saddle_core::dynamics::{check_step, Segment, TrapSchedule};
use saddle_core::stability::threshold;
use saddle_core::{ParticleParams, ReferenceTweezer, Setup, TrapConfig};
use serde::Deserialize;

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Purity,
    Expand,
    EntangleMap,
    SqueezeMetrology,
    FeedbackRecovery,
    StabilityScan,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Purity,
        Scenario::Expand,
        Scenario::EntangleMap,
        Scenario::SqueezeMetrology,
        Scenario::FeedbackRecovery,
        Scenario::StabilityScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Purity => "purity",
            Scenario::Expand => "expand",
            Scenario::EntangleMap => "entangle-map",
            Scenario::SqueezeMetrology => "squeeze-metrology",
            Scenario::FeedbackRecovery => "feedback-recovery",
            Scenario::StabilityScan => "stability-scan",
        }
    }

    /// Whether the scenario sweeps `sweep.omega_ratios` (as opposed to a schedule).
    fn uses_ratios(self) -> bool {
        !matches!(self, Scenario::Expand)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| RunError::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub particle: ParticleSection,
    #[serde(default)]
    pub trap: TrapSection,
    #[serde(default)]
    pub reference: ReferenceSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    /// Piecewise rotation protocol (expand only).
    #[serde(default)]
    pub schedule: Vec<SegmentSection>,
    #[serde(default)]
    pub measurement: MeasurementSection,
    #[serde(default)]
    pub feedback: FeedbackSection,
    #[serde(default)]
    pub recovery: RecoverySection,
    #[serde(default)]
    pub metrology: MetrologySection,
    #[serde(default)]
    pub field_map: FieldMapSection,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParticleSection {
    /// [m]
    pub radius: f64,
    /// [kg/m³]
    pub density: f64,
    pub relative_permittivity: f64,
}

impl Default for ParticleSection {
    fn default() -> Self {
        let p = ParticleParams::silica(50e-9);
        Self {
            radius: p.radius,
            density: p.density,
            relative_permittivity: p.relative_permittivity,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    /// [W]
    pub power: f64,
    /// [m]
    pub wavelength: f64,
    pub numerical_aperture: f64,
    /// [1/s]; enters the stability scan only.
    pub gas_damping: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            power: 0.07,
            wavelength: 1.55e-6,
            numerical_aperture: 0.6,
            gas_damping: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSection {
    /// [Hz]
    pub frequency_hz: f64,
    pub occupation: f64,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        Self {
            frequency_hz: 150e3,
            occupation: 0.8,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub laguerre_fractions: Vec<f64>,
    /// Rotation rates in units of the threshold `Ω₀` of each `I_L`.
    pub omega_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationSection {
    /// [s]
    pub duration: f64,
    /// [s]; defaults to the largest step allowed at each grid point.
    pub step: Option<f64>,
    pub record_every: usize,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            duration: 1e-3,
            step: None,
            record_every: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSection {
    pub omega_ratio: f64,
    /// [s]
    pub duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementSection {
    /// Fraction of the scattered light that is detected.
    pub efficiency: f64,
}

impl Default for MeasurementSection {
    fn default() -> Self {
        Self { efficiency: 0.3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackSection {
    pub enabled: bool,
    /// Momentum (cold) damping rate [1/s].
    pub damping_rate: f64,
    /// Position gain [N/m].
    pub position_gain: f64,
}

impl Default for FeedbackSection {
    fn default() -> Self {
        Self {
            enabled: true,
            damping_rate: 2e4,
            position_gain: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisplacementUnit {
    /// Particle radii.
    Radius,
    /// Zero-point amplitudes `x_zpf` of the reference tweezer.
    Zpf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoverySection {
    /// Initial `⟨x⟩`.
    pub displacement: f64,
    pub unit: DisplacementUnit,
    /// [s]
    pub time_cap: f64,
    /// [s]
    pub hold: f64,
    pub energy_factor: f64,
}

impl Default for RecoverySection {
    fn default() -> Self {
        Self {
            displacement: 1.0,
            unit: DisplacementUnit::Radius,
            time_cap: 2e-3,
            hold: 50e-6,
            energy_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceChoice {
    #[default]
    Unconditional,
    Conditional,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetrologySection {
    pub covariance: CovarianceChoice,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldMapSection {
    /// Radial extent in waists.
    pub extent: f64,
    pub radial_points: usize,
    pub angular_points: usize,
    /// Relative mode phase [rad].
    pub theta: f64,
}

impl Default for FieldMapSection {
    fn default() -> Self {
        Self {
            extent: 1.5,
            radial_points: 61,
            angular_points: 72,
            theta: 0.0,
        }
    }
}

/// One point of the `(I_L, Ω/Ω₀)` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub laguerre_fraction: f64,
    /// `NaN` for schedule-driven scenarios.
    pub omega_ratio: f64,
}

impl ScenarioConfig {
    /// Reads TOML, falling back to JSON.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::config("<file>", format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            return Self::from_json(&text);
        }
        match Self::from_toml(&text) {
            Ok(c) => Ok(c),
            Err(toml_err) => Self::from_json(&text).map_err(|_| toml_err),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::config(toml_key(&e), e.message()))
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::config("<json>", e))
    }

    pub fn scenario(&self) -> Result<Scenario, RunError> {
        self.scenario.parse()
    }

    /// Static checks, then the step bound at every grid point.
    pub fn validate(&self) -> Result<Scenario, RunError> {
        let scenario = self.scenario()?;
        self.particle_params()
            .validate()
            .map_err(|e| RunError::config("particle", e))?;
        ReferenceTweezer::isotropic(TAU * self.reference.frequency_hz, self.reference.occupation)
            .validate()
            .map_err(|e| RunError::config("reference", e))?;
        self.base_trap(0.0).validate().map_err(|e| RunError::config("trap", e))?;
        if !(self.trap.numerical_aperture > 0.0 && self.trap.numerical_aperture < 1.0) {
            return Err(RunError::config("trap.numerical_aperture", "must lie in (0, 1)"));
        }

        if self.sweep.laguerre_fractions.is_empty() {
            return Err(RunError::config("sweep.laguerre_fractions", "must not be empty"));
        }
        for &il in &self.sweep.laguerre_fractions {
            if !(0.0..1.0).contains(&il) {
                return Err(RunError::config("sweep.laguerre_fractions", format!("{il} is outside [0, 1)")));
            }
        }
        if scenario.uses_ratios() {
            if self.sweep.omega_ratios.is_empty() {
                return Err(RunError::config("sweep.omega_ratios", "must not be empty"));
            }
            for &r in &self.sweep.omega_ratios {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(RunError::config("sweep.omega_ratios", format!("{r} must be positive")));
                }
            }
        } else {
            if self.schedule.is_empty() {
                return Err(RunError::config("schedule", "expand needs at least one segment"));
            }
            for s in &self.schedule {
                if !(s.omega_ratio > 0.0) || !(s.duration > 0.0) {
                    return Err(RunError::config("schedule", "omega_ratio and duration must be positive"));
                }
            }
        }
        if scenario == Scenario::StabilityScan {
            return Ok(scenario);
        }

        let int = &self.integration;
        if scenario != Scenario::FeedbackRecovery && !(int.duration > 0.0 && int.duration.is_finite()) {
            return Err(RunError::config("integration.duration", "must be positive"));
        }
        if int.record_every == 0 {
            return Err(RunError::config("integration.record_every", "must be at least 1"));
        }
        if let Some(step) = int.step {
            if !(step > 0.0) || !step.is_finite() {
                return Err(RunError::config("integration.step", "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.measurement.efficiency) {
            return Err(RunError::config("measurement.efficiency", "must lie in [0, 1]"));
        }
        if scenario == Scenario::FeedbackRecovery {
            let r = &self.recovery;
            if !(r.time_cap > 0.0) || !(r.hold >= 0.0) || !(r.energy_factor > 0.0) || !r.displacement.is_finite() {
                return Err(RunError::config("recovery", "time_cap, energy_factor must be positive and hold non-negative"));
            }
            let f = &self.feedback;
            if !(f.damping_rate >= 0.0) || !(f.position_gain >= 0.0) {
                return Err(RunError::config("feedback", "gains must be non-negative"));
            }
        }
        for point in self.grid(scenario) {
            let setup = self.setup(point.laguerre_fraction, self.first_ratio(point))?;
            let schedule = self.schedule_for(&setup, point, scenario)?;
            let models = schedule
                .models(&setup)
                .map_err(|e| RunError::config("trap", e))?;
            let step = self.step_for(&setup, point, scenario)?;
            check_step(&models, step).map_err(|e| RunError::config("integration.step", e))?;
        }
        Ok(scenario)
    }

    pub fn particle_params(&self) -> ParticleParams {
        ParticleParams {
            radius: self.particle.radius,
            density: self.particle.density,
            relative_permittivity: self.particle.relative_permittivity,
        }
    }

    fn base_trap(&self, il: f64) -> TrapConfig {
        let t = &self.trap;
        let mut trap = TrapConfig::from_numerical_aperture(t.power, t.wavelength, t.numerical_aperture, il);
        trap.gas_damping = t.gas_damping;
        trap
    }

    fn reference_tweezer(&self) -> ReferenceTweezer {
        ReferenceTweezer::isotropic(TAU * self.reference.frequency_hz, self.reference.occupation)
    }

    /// Threshold `Ω₀` [rad/s] at `il`; `None` without a saddle.
    pub fn omega0(&self, il: f64) -> Result<Option<f64>, RunError> {
        let setup = Setup::new(self.particle_params(), self.base_trap(il), self.reference_tweezer());
        let derived = setup.derive().map_err(|e| RunError::config("particle", e))?;
        Ok(threshold(&setup.trap, &derived).omega0())
    }

    /// Setup at `il` rotating at `ratio · Ω₀`. Without a saddle there is no
    /// threshold and the trap is left static.
    pub fn setup(&self, il: f64, ratio: f64) -> Result<Setup, RunError> {
        let rate = self.omega0(il)?.map_or(0.0, |w0| ratio * w0);
        Ok(Setup::new(
            self.particle_params(),
            self.base_trap(il).with_rotation(rate),
            self.reference_tweezer(),
        ))
    }

    /// Grid points in row-major `(I_L, Ω/Ω₀)` order.
    pub fn grid(&self, scenario: Scenario) -> Vec<GridPoint> {
        let ratios: Vec<f64> = if scenario.uses_ratios() {
            self.sweep.omega_ratios.clone()
        } else {
            vec![f64::NAN]
        };
        let mut out = Vec::new();
        for &il in &self.sweep.laguerre_fractions {
            for &r in &ratios {
                out.push(GridPoint {
                    index: out.len(),
                    laguerre_fraction: il,
                    omega_ratio: r,
                });
            }
        }
        out
    }

    fn first_ratio(&self, point: GridPoint) -> f64 {
        if point.omega_ratio.is_nan() {
            self.schedule.first().map_or(1.0, |s| s.omega_ratio)
        } else {
            point.omega_ratio
        }
    }

    /// Rotation protocol at a grid point: the configured segments for expand,
    /// a single constant segment otherwise.
    pub fn schedule_for(&self, setup: &Setup, point: GridPoint, scenario: Scenario) -> Result<TrapSchedule, RunError> {
        if scenario.uses_ratios() {
            let duration = if scenario == Scenario::FeedbackRecovery {
                self.recovery.time_cap
            } else {
                self.integration.duration
            };
            return Ok(TrapSchedule::constant(setup, duration));
        }
        let w0 = self.omega0(point.laguerre_fraction)?.unwrap_or(0.0);
        Ok(TrapSchedule::new(
            self.schedule
                .iter()
                .map(|s| Segment {
                    duration: s.duration,
                    rotation_rate: s.omega_ratio * w0,
                    laguerre_fraction: setup.trap.laguerre_fraction,
                    power: setup.trap.power,
                })
                .collect(),
        ))
    }

    /// The configured step, or the largest one allowed by every segment.
    pub fn step_for(&self, setup: &Setup, point: GridPoint, scenario: Scenario) -> Result<f64, RunError> {
        if let Some(step) = self.integration.step {
            return Ok(step);
        }
        let models = self
            .schedule_for(setup, point, scenario)?
            .models(setup)
            .map_err(|e| RunError::config("trap", e))?;
        let bound = models.iter().map(|(m, _, _)| m.max_step()).fold(f64::INFINITY, f64::min);
        if bound.is_finite() {
            Ok(bound)
        } else {
            Ok(self.integration.duration / 1000.0)
        }
    }
}

fn toml_key(err: &toml::de::Error) -> String {
    // toml reports unknown keys in the message; the span is the best pointer
    // for the rest.
    match err.span() {
        Some(span) => format!("<toml bytes {}..{}>", span.start, span.end),
        None => "<toml>".into(),
    }
}
