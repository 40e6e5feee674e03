//! Continuous position measurement and linear feedback.
//!
//! Conditioned on the homodyne record, the covariance follows a deterministic
//! Riccati equation and the means pick up innovation noise
//! `dd = A d dt − u dt + σ C dW`, `C = diag(√(2η_xμ_x), 0, √(2η_yμ_y), 0)` on
//! the position columns. The conditional mean is also the optimal (Kalman)
//! estimate, so the feedback acts on it directly.
//!
//! Times passed to the model are measured from `θ = 0`.

use alloc::vec::Vec;

use nalgebra::Vector4;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{moment_rhs, moments_from_state, state_from_moments, Moments, MEAN_PX, MEAN_PY};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::integrator::{rk4_step, step_count};
use crate::model::SaddleModel;
use crate::noise::NoiseStream;
use crate::params::Axis;
use crate::stability::threshold;
use crate::units::QuadratureUnits;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    /// Detection efficiencies `η_q`.
    pub efficiency: [f64; 2],
    /// Measurement rates `Λ_q` [1/(m² s)].
    pub rate: [f64; 2],
    pub seed: u64,
}

impl MeasurementModel {
    pub fn symmetric(efficiency: f64, rate: f64, seed: u64) -> Self {
        Self {
            efficiency: [efficiency; 2],
            rate: [rate; 2],
            seed,
        }
    }

    /// Detection of the scattered light that causes the recoil heating.
    pub fn recoil_limited(model: &SaddleModel, efficiency: f64, seed: u64) -> Self {
        Self {
            efficiency: [efficiency; 2],
            rate: [model.localization_rate(Axis::X), model.localization_rate(Axis::Y)],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for e in self.efficiency {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter {
                    name: "efficiency",
                    value: e,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        for r in self.rate {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "measurement rate",
                    value: r,
                    reason: "must be non-negative and finite",
                });
            }
        }
        Ok(())
    }

    /// `η_q μ_q` [1/s] in the quadratures of `units`.
    pub fn information(&self, units: &QuadratureUnits) -> [f64; 2] {
        [
            self.efficiency[0] * units.dimensionless_rate(self.rate[0], 0),
            self.efficiency[1] * units.dimensionless_rate(self.rate[1], 1),
        ]
    }

    pub fn noise(&self) -> NoiseStream {
        NoiseStream::new(self.seed)
    }
}

/// Feedback `u_q = g_q q + h_q p_q` on the estimated state; the applied force is `−u_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackLaw {
    pub enabled: bool,
    /// `g_q` [N/m].
    pub gain_position: [f64; 2],
    /// `h_q` [1/s]: the momentum damping rate.
    pub gain_momentum: [f64; 2],
}

impl FeedbackLaw {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            gain_position: [0.0; 2],
            gain_momentum: [0.0; 2],
        }
    }

    /// Momentum damping at `rate` [1/s] on both axes.
    pub fn cold_damping(rate: f64) -> Self {
        Self {
            enabled: true,
            gain_position: [0.0; 2],
            gain_momentum: [rate; 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled {
            for g in self.gain_position.iter().chain(&self.gain_momentum) {
                if !(*g >= 0.0) || !g.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "feedback gain",
                        value: *g,
                        reason: "must be non-negative and finite",
                    });
                }
            }
        }
        Ok(())
    }

    /// Dimensionless coefficients `(c_q, h_q)` with `dp̃_q/dt ⊃ −c_q q̃ − h_q p̃_q`.
    fn quadrature_gains(&self, units: &QuadratureUnits) -> ([f64; 2], [f64; 2]) {
        if !self.enabled {
            return ([0.0; 2], [0.0; 2]);
        }
        let c = [
            self.gain_position[0] * units.length[0] / units.momentum[0],
            self.gain_position[1] * units.length[1] / units.momentum[1],
        ];
        (c, self.gain_momentum)
    }
}

/// Applied feedback force `−u` [N] for an estimated mean in quadrature units.
pub fn feedback_force(mean: &Vector4<f64>, law: &FeedbackLaw, units: &QuadratureUnits) -> [f64; 2] {
    if !law.enabled {
        return [0.0; 2];
    }
    let axis = |q: usize| {
        let position = mean[2 * q] * units.length[q];
        let momentum = mean[2 * q + 1] * units.momentum[q];
        -(law.gain_position[q] * position + law.gain_momentum[q] * momentum)
    };
    [axis(0), axis(1)]
}

fn conditional_rhs(
    y: &Moments,
    t: f64,
    model: &SaddleModel,
    info: [f64; 2],
    gains: &([f64; 2], [f64; 2]),
    feedback: bool,
) -> Moments {
    let mut d = moment_rhs(y, t, model, info);
    if feedback {
        let (c, h) = gains;
        d[MEAN_PX] -= c[0] * y[0] + h[0] * y[1];
        d[MEAN_PY] -= c[1] * y[2] + h[1] * y[3];
    }
    d
}

/// One step of length `dt` from `state`. `draws` are the two standard-normal
/// variates for this step. The drift and the Riccati equation take a
/// fourth-order step; the innovation is added Euler–Maruyama style with the
/// covariance at the start of the step. With zero efficiency and feedback off
/// this is exactly one step of the unconditional integrator.
pub fn step_conditional(
    state: &GaussianState,
    dt: f64,
    model: &SaddleModel,
    meas: &MeasurementModel,
    feedback: &FeedbackLaw,
    draws: [f64; 2],
) -> Result<GaussianState> {
    let info = meas.information(&model.units);
    let gains = feedback.quadrature_gains(&model.units);
    let y0 = moments_from_state(state);
    let y = rk4_step(&y0, state.time, dt, |t, y| {
        conditional_rhs(y, t, model, info, &gains, feedback.enabled)
    });
    let mut next = state_from_moments(&y, state.time + dt);
    add_innovation(&mut next, &state.cov, info, draws, dt);
    if next.mean.iter().chain(next.cov.iter()).any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure {
            time: next.time,
            step: dt,
        });
    }
    next.check_physical()?;
    Ok(next)
}

fn add_innovation(next: &mut GaussianState, cov: &nalgebra::Matrix4<f64>, info: [f64; 2], draws: [f64; 2], dt: f64) {
    let sdt = dt.sqrt();
    for (q, col) in [0usize, 2].into_iter().enumerate() {
        if info[q] == 0.0 {
            continue;
        }
        let kick = (2.0 * info[q]).sqrt() * draws[q] * sdt;
        for a in 0..4 {
            next.mean[a] += cov[(a, col)] * kick;
        }
    }
}

/// Runs `steps` conditional steps of length `dt`, drawing noise
/// `(seed, axis, k)` for step `k`. `visit` sees the initial state and every
/// subsequent one; returning `false` stops the run early.
pub fn run_conditional(
    initial: &GaussianState,
    model: &SaddleModel,
    meas: &MeasurementModel,
    feedback: &FeedbackLaw,
    dt: f64,
    steps: u64,
    mut visit: impl FnMut(&GaussianState, u64) -> bool,
) -> Result<GaussianState> {
    meas.validate()?;
    feedback.validate()?;
    let info = meas.information(&model.units);
    for q in 0..2 {
        if info[q] > model.diffusion[q] * (1.0 + 1e-9) {
            return Err(Error::InvalidParameter {
                name: "measurement rate",
                value: meas.rate[q],
                reason: "detected information exceeds the recoil back-action",
            });
        }
    }
    let bound = model.max_step();
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { step: dt, bound });
    }
    let noise = meas.noise();
    let mut state = *initial;
    if !visit(&state, 0) {
        return Ok(state);
    }
    for k in 0..steps {
        state = step_conditional(&state, dt, model, meas, feedback, noise.pair(k))?;
        if !visit(&state, k + 1) {
            break;
        }
    }
    Ok(state)
}

/// Expected energy `½(|d|² + tr σ)` in units of `ħΩ_ref`.
pub fn mean_energy(state: &GaussianState) -> f64 {
    0.5 * (state.mean.norm_squared() + state.cov.trace())
}

/// Energy of the conditional spread alone, `½ tr σ`.
pub fn covariance_energy(state: &GaussianState) -> f64 {
    0.5 * state.cov.trace()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// [s]
    pub step: f64,
    /// Give up after this much time [s].
    pub time_cap: f64,
    /// The energy criterion must hold this long to count as settled [s].
    pub hold: f64,
    /// Settled when `mean_energy ≤ energy_factor · covariance_energy`.
    pub energy_factor: f64,
    pub record_every: usize,
}

impl RecoveryOptions {
    pub fn new(step: f64, time_cap: f64) -> Self {
        Self {
            step,
            time_cap,
            hold: 50e-6,
            energy_factor: 3.0,
            record_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub success: bool,
    /// Time from the start until the energy criterion began to hold [s].
    pub settling_time: Option<f64>,
    pub samples: Vec<GaussianState>,
    pub final_energy: f64,
    /// Covariance energy when the run stopped; the conditional reference level.
    pub steady_energy: f64,
}

/// Feedback cooling from `initial` until the expected energy stays within
/// `energy_factor` times the conditional covariance energy for `hold`, or
/// until `time_cap`. Missing the cap is reported, not raised.
pub fn recover(
    initial: &GaussianState,
    model: &SaddleModel,
    meas: &MeasurementModel,
    feedback: &FeedbackLaw,
    options: &RecoveryOptions,
) -> Result<RecoveryReport> {
    if let Some(w0) = threshold(&model.trap, &model.derived).omega0() {
        if !(model.trap.rotation_rate > w0) {
            return Err(Error::InvalidParameter {
                name: "rotation_rate",
                value: model.trap.rotation_rate,
                reason: "recovery needs a rotation rate above the stability threshold",
            });
        }
    }
    let steps = step_count(options.time_cap, options.step) as u64;
    let dt = if steps > 0 { options.time_cap / steps as f64 } else { options.step };
    let every = options.record_every.max(1) as u64;
    let mut samples = Vec::new();
    let mut below_since: Option<f64> = None;
    let mut success = false;
    let last = run_conditional(initial, model, meas, feedback, dt, steps, |s, k| {
        if k % every == 0 {
            samples.push(*s);
        }
        if mean_energy(s) <= options.energy_factor * covariance_energy(s) {
            let since = *below_since.get_or_insert(s.time);
            if s.time - since >= options.hold {
                success = true;
            }
        } else {
            below_since = None;
        }
        !success
    })?;
    if samples.last().map_or(true, |s| s.time < last.time) {
        samples.push(last);
    }
    Ok(RecoveryReport {
        success,
        settling_time: if success { below_since.map(|t| t - initial.time) } else { None },
        samples,
        final_energy: mean_energy(&last),
        steady_energy: covariance_energy(&last),
    })
}
