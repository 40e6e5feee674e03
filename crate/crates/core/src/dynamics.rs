//! Unconditional moment equations: four first moments and ten covariances,
//! driven by the rotating saddle and recoil diffusion.
//!
//! The flat 14-vector is ordered
//! `⟨x⟩, ⟨p_x⟩, ⟨y⟩, ⟨p_y⟩, σ_x², σ_y², σ_px², σ_py², C_xy, C_pxpy, C_xpx, C_ypy, C_xpy, C_ypx`.

use alloc::vec::Vec;

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::integrator::{rk4_step, step_count};
use crate::model::{SaddleModel, Setup};

pub const MEAN_X: usize = 0;
pub const MEAN_PX: usize = 1;
pub const MEAN_Y: usize = 2;
pub const MEAN_PY: usize = 3;
pub const VAR_X: usize = 4;
pub const VAR_Y: usize = 5;
pub const VAR_PX: usize = 6;
pub const VAR_PY: usize = 7;
pub const COV_X_Y: usize = 8;
pub const COV_PX_PY: usize = 9;
pub const COV_X_PX: usize = 10;
pub const COV_Y_PY: usize = 11;
pub const COV_X_PY: usize = 12;
pub const COV_Y_PX: usize = 13;

pub type Moments = [f64; 14];

/// (row, column) in `(x, p_x, y, p_y)` ordering of each covariance slot.
const COV_SLOTS: [(usize, usize); 10] = [
    (0, 0),
    (2, 2),
    (1, 1),
    (3, 3),
    (0, 2),
    (1, 3),
    (0, 1),
    (2, 3),
    (0, 3),
    (2, 1),
];

pub fn moments_from_state(state: &GaussianState) -> Moments {
    let mut m = [0.0; 14];
    m[..4].copy_from_slice(state.mean.as_slice());
    for (k, &(i, j)) in COV_SLOTS.iter().enumerate() {
        m[4 + k] = state.cov[(i, j)];
    }
    m
}

pub fn state_from_moments(m: &Moments, time: f64) -> GaussianState {
    let mean = Vector4::new(m[0], m[1], m[2], m[3]);
    let mut cov = Matrix4::zeros();
    for (k, &(i, j)) in COV_SLOTS.iter().enumerate() {
        cov[(i, j)] = m[4 + k];
        cov[(j, i)] = m[4 + k];
    }
    GaussianState::new(mean, cov, time)
}

/// Time derivative of the 14 moments without measurement.
pub fn rhs_unconditional(m: &Moments, t: f64, model: &SaddleModel) -> Moments {
    moment_rhs(m, t, model, [0.0; 2])
}

/// Moment derivative with measurement strengths `info = (η_x μ_x, η_y μ_y)`,
/// which add the Riccati terms `−2 σ M σ`, `M = diag(info_x, 0, info_y, 0)`.
/// The means obey the drift only.
pub fn moment_rhs(m: &Moments, t: f64, model: &SaddleModel, info: [f64; 2]) -> Moments {
    let g = model.curvature_rates(t);
    let [wx, wy] = model.units.frequency;
    let [mux, muy] = model.diffusion;
    let (gxx, gxy, gyx, gyy) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);

    let sxx = m[VAR_X];
    let syy = m[VAR_Y];
    let spx = m[VAR_PX];
    let spy = m[VAR_PY];
    let cxy = m[COV_X_Y];
    let cpp = m[COV_PX_PY];
    let cxpx = m[COV_X_PX];
    let cypy = m[COV_Y_PY];
    let cxpy = m[COV_X_PY];
    let cypx = m[COV_Y_PX];

    // C_{∂_qV, a} for the linear gradient ∂_xV = gxx x + gxy y, ∂_yV = gyx x + gyy y.
    let dxv_x = gxx * sxx + gxy * cxy;
    let dxv_y = gxx * cxy + gxy * syy;
    let dxv_px = gxx * cxpx + gxy * cypx;
    let dxv_py = gxx * cxpy + gxy * cypy;
    let dyv_x = gyx * sxx + gyy * cxy;
    let dyv_y = gyx * cxy + gyy * syy;
    let dyv_px = gyx * cxpx + gyy * cypx;
    let dyv_py = gyx * cxpy + gyy * cypy;

    let mut d = [0.0; 14];
    d[MEAN_X] = wx * m[MEAN_PX];
    d[MEAN_PX] = -(gxx * m[MEAN_X] + gxy * m[MEAN_Y]);
    d[MEAN_Y] = wy * m[MEAN_PY];
    d[MEAN_PY] = -(gyx * m[MEAN_X] + gyy * m[MEAN_Y]);

    d[VAR_X] = 2.0 * wx * cxpx;
    d[VAR_Y] = 2.0 * wy * cypy;
    d[VAR_PX] = -2.0 * dxv_px + 2.0 * mux;
    d[VAR_PY] = -2.0 * dyv_py + 2.0 * muy;
    d[COV_X_Y] = wx * cypx + wy * cxpy;
    d[COV_PX_PY] = -(dxv_py + dyv_px);
    d[COV_X_PX] = wx * spx - dxv_x;
    d[COV_Y_PY] = wy * spy - dyv_y;
    d[COV_X_PY] = wy * cpp - dyv_x;
    d[COV_Y_PX] = wx * cpp - dxv_y;

    let [ax, ay] = info;
    if ax != 0.0 || ay != 0.0 {
        // (σ M σ)_ab = ax σ_ax σ_xb + ay σ_ay σ_yb
        let col_x = [sxx, cxpx, cxy, cxpy];
        let col_y = [cxy, cypx, syy, cypy];
        for (k, &(i, j)) in COV_SLOTS.iter().enumerate() {
            d[4 + k] -= 2.0 * (ax * col_x[i] * col_x[j] + ay * col_y[i] * col_y[j]);
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// [s]
    pub duration: f64,
    /// [rad/s]
    pub rotation_rate: f64,
    pub laguerre_fraction: f64,
    /// [W]
    pub power: f64,
}

/// Piecewise-constant trap settings. The state is carried unchanged across
/// segment boundaries and the rotation phase stays continuous.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrapSchedule {
    pub segments: Vec<Segment>,
}

impl TrapSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    /// A single segment with the settings of `setup.trap`.
    pub fn constant(setup: &Setup, duration: f64) -> Self {
        Self::new(alloc::vec![Segment {
            duration,
            rotation_rate: setup.trap.rotation_rate,
            laguerre_fraction: setup.trap.laguerre_fraction,
            power: setup.trap.power,
        }])
    }

    pub fn then(mut self, segment: Segment) -> Self {
        self.segments.push(segment);
        self
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::EmptySchedule);
        }
        for s in &self.segments {
            if !(s.duration >= 0.0) || !s.duration.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "duration",
                    value: s.duration,
                    reason: "must be non-negative and finite",
                });
            }
        }
        Ok(())
    }

    /// Models for every segment, each starting where the previous one ended.
    pub fn models(&self, setup: &Setup) -> Result<Vec<(SaddleModel, f64, f64)>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.segments.len());
        let (mut t0, mut phase) = (0.0, 0.0);
        for s in &self.segments {
            let trap = setup
                .trap
                .with_rotation(s.rotation_rate)
                .with_laguerre_fraction(s.laguerre_fraction)
                .with_power(s.power);
            let model = SaddleModel::new(setup, trap, phase, t0)?;
            out.push((model, t0, s.duration));
            t0 += s.duration;
            phase = model.phase(t0);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Requested step [s]; segments use the largest equal step not above it.
    pub step: f64,
    /// Keep every n-th step in the trajectory (segment ends are always kept).
    pub record_every: usize,
}

impl IntegrationOptions {
    pub fn new(step: f64) -> Self {
        Self {
            step,
            record_every: 1,
        }
    }

    pub fn recording_every(mut self, n: usize) -> Self {
        self.record_every = n.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<GaussianState>,
    pub schedule: TrapSchedule,
    pub step: f64,
}

impl Trajectory {
    pub fn last(&self) -> &GaussianState {
        self.samples.last().expect("trajectory holds the initial state")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }
}

/// Checks `step` against the bound of every model.
pub fn check_step(models: &[(SaddleModel, f64, f64)], step: f64) -> Result<()> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "must be positive and finite",
        });
    }
    for (m, _, _) in models {
        let bound = m.max_step();
        if step > bound * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { step, bound });
        }
    }
    Ok(())
}

/// Runs the moment equations over `schedule`, calling `visit` with the
/// initial state and after every step. `visit` receives the segment index.
pub fn integrate_each(
    initial: &GaussianState,
    schedule: &TrapSchedule,
    setup: &Setup,
    step: f64,
    mut visit: impl FnMut(&GaussianState, usize, bool),
) -> Result<()> {
    let models = schedule.models(setup)?;
    check_step(&models, step)?;
    initial.check_physical()?;
    let mut y = moments_from_state(initial);
    visit(&state_from_moments(&y, initial.time), 0, true);
    for (index, (model, t0, duration)) in models.iter().enumerate() {
        let n = step_count(*duration, step);
        if n == 0 {
            continue;
        }
        let h = duration / n as f64;
        for i in 0..n {
            let t = t0 + i as f64 * h;
            y = rk4_step(&y, t, h, |t, m| rhs_unconditional(m, t, model));
            let time = initial.time + t0 + (i + 1) as f64 * h;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::IntegrationFailure { time, step: h });
            }
            let state = state_from_moments(&y, time);
            state.check_physical()?;
            visit(&state, index, i + 1 == n);
        }
    }
    Ok(())
}

/// Fixed-step fourth-order integration over the schedule.
pub fn integrate(
    initial: &GaussianState,
    schedule: &TrapSchedule,
    setup: &Setup,
    options: &IntegrationOptions,
) -> Result<Trajectory> {
    let every = options.record_every.max(1);
    let mut samples = Vec::new();
    let mut count = 0usize;
    integrate_each(initial, schedule, setup, options.step, |s, _, segment_end| {
        if count % every == 0 || segment_end {
            if samples.last().map_or(true, |p: &GaussianState| s.time > p.time) {
                samples.push(*s);
            }
        }
        count += 1;
    })?;
    Ok(Trajectory {
        samples,
        schedule: schedule.clone(),
        step: options.step,
    })
}
