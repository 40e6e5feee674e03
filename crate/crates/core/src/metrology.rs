//! Force sensing with the rotating saddle.
//!
//! A weak constant force `f = (f_x, f_y)` shifts only the means. Their
//! derivatives `s_i = ∂d/∂f_i`, with `f_i` counted in units of
//! `ħΩ_i / L_i`, obey `ds_i/dt = A s_i + b_i`, `b_x = (0, Ω_x, 0, 0)`,
//! `b_y = (0, 0, 0, Ω_y)`. For a Gaussian state whose covariance does not
//! depend on `f`, the quantum Fisher information matrix is
//! `F_ij = 2 s_iᵀ σ⁻¹ s_j` (vacuum `σ = I/2`), and the Cramér–Rao bound on a
//! single shot is `δf_i ≥ √((F⁻¹)_ii)`.

use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector4};
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{check_step, moment_rhs, moments_from_state, state_from_moments, Moments, TrapSchedule};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::integrator::{rk4_step, step_count};
use crate::model::{SaddleModel, Setup};
use crate::units::QuadratureUnits;

/// Relative eigenvalue below which the information matrix counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Which covariance enters the information matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CovarianceSource {
    /// Unconditional (recoil-heated) covariance.
    #[default]
    Unconditional,
    /// Covariance conditioned on continuous position detection with these
    /// efficiencies; the measurement rates are the recoil localization rates.
    Conditional { efficiency: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBound {
    pub time: f64,
    /// Dimensionless Fisher information in force units `ħΩ_i / L_i`.
    pub qfim: Matrix2<f64>,
    /// [N]; infinite when the direction is not resolvable.
    pub min_force_x: f64,
    pub min_force_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivitySample {
    pub state: GaussianState,
    pub s_x: Vector4<f64>,
    pub s_y: Vector4<f64>,
}

/// Fisher information of the mean shifts `s_x`, `s_y` against covariance
/// `cov`, and the resulting bounds in newtons.
pub fn qfim(s_x: &Vector4<f64>, s_y: &Vector4<f64>, cov: &nalgebra::Matrix4<f64>, units: &QuadratureUnits, time: f64) -> Result<ForceBound> {
    let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let (wx, wy) = (chol.solve(s_x), chol.solve(s_y));
    let fxy = 2.0 * s_x.dot(&wy);
    let f = Matrix2::new(2.0 * s_x.dot(&wx), fxy, fxy, 2.0 * s_y.dot(&wy));
    let [vx, vy] = inverse_diagonal(&f);
    Ok(ForceBound {
        time,
        qfim: f,
        min_force_x: vx.sqrt() * units.force_scale(0),
        min_force_y: vy.sqrt() * units.force_scale(1),
    })
}

/// Diagonal of `F⁻¹` for symmetric positive semidefinite `F`, with infinity
/// for components along a null direction.
fn inverse_diagonal(f: &Matrix2<f64>) -> [f64; 2] {
    let eig = f.symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    if !(scale > 0.0) {
        return [f64::INFINITY; 2];
    }
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        for k in 0..2 {
            let v = eig.eigenvectors[(i, k)];
            let lambda = eig.eigenvalues[k];
            if lambda <= SINGULAR_TOL * scale {
                if v.abs() > 1e-9 {
                    *o = f64::INFINITY;
                }
            } else {
                *o += v * v / lambda;
            }
        }
    }
    out
}

fn sensitivity_rhs(s: &[f64; 8], t: f64, model: &SaddleModel) -> [f64; 8] {
    let a = model.drift(t);
    let mut out = [0.0; 8];
    for block in 0..2 {
        let v = Vector4::from_column_slice(&s[4 * block..4 * block + 4]);
        let dv = a * v;
        out[4 * block..4 * block + 4].copy_from_slice(dv.as_slice());
    }
    out[1] += model.units.frequency[0];
    out[7] += model.units.frequency[1];
    out
}

/// Integrates covariance and sensitivities over `schedule`, starting from
/// `s = 0` at the initial state, and calls `visit` after every step (and once
/// for the initial state) with the segment-end flag.
pub fn sensitivities_each(
    initial: &GaussianState,
    schedule: &TrapSchedule,
    setup: &Setup,
    step: f64,
    source: CovarianceSource,
    mut visit: impl FnMut(&SensitivitySample, bool),
) -> Result<()> {
    let models = schedule.models(setup)?;
    check_step(&models, step)?;
    initial.check_physical()?;
    let mut y: Moments = moments_from_state(initial);
    let mut s = [0.0; 8];
    let sample = |y: &Moments, s: &[f64; 8], time| SensitivitySample {
        state: state_from_moments(y, time),
        s_x: Vector4::from_column_slice(&s[..4]),
        s_y: Vector4::from_column_slice(&s[4..]),
    };
    visit(&sample(&y, &s, initial.time), true);
    for (model, t0, duration) in &models {
        let info = match source {
            CovarianceSource::Unconditional => [0.0; 2],
            CovarianceSource::Conditional { efficiency } => [efficiency[0] * model.diffusion[0], efficiency[1] * model.diffusion[1]],
        };
        let n = step_count(*duration, step);
        if n == 0 {
            continue;
        }
        let h = duration / n as f64;
        for i in 0..n {
            let t = t0 + i as f64 * h;
            y = rk4_step(&y, t, h, |t, m| moment_rhs(m, t, model, info));
            s = rk4_step(&s, t, h, |t, v| sensitivity_rhs(v, t, model));
            let time = initial.time + t0 + (i + 1) as f64 * h;
            if y.iter().chain(s.iter()).any(|v| !v.is_finite()) {
                return Err(Error::IntegrationFailure { time, step: h });
            }
            let smp = sample(&y, &s, time);
            smp.state.check_physical()?;
            visit(&smp, i + 1 == n);
        }
    }
    Ok(())
}

/// Force bounds along the schedule, recorded every `record_every` steps and at
/// segment ends.
pub fn force_bounds(
    initial: &GaussianState,
    schedule: &TrapSchedule,
    setup: &Setup,
    step: f64,
    record_every: usize,
    source: CovarianceSource,
) -> Result<Vec<ForceBound>> {
    let units = setup.units();
    let every = record_every.max(1);
    let mut out: Vec<ForceBound> = Vec::new();
    let mut count = 0usize;
    let mut failure = None;
    sensitivities_each(initial, schedule, setup, step, source, |smp, end| {
        if (count % every == 0 || end) && out.last().map_or(true, |b| smp.state.time > b.time) && failure.is_none() {
            match qfim(&smp.s_x, &smp.s_y, &smp.state.cov, &units, smp.state.time) {
                Ok(b) => out.push(b),
                Err(e) => failure = Some(e),
            }
        }
        count += 1;
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::TAU;
    use crate::dynamics::Segment;
    use crate::gaussian::thermal_state;
    use crate::params::{ParticleParams, ReferenceTweezer, TrapConfig};
    use approx::assert_relative_eq;
    use nalgebra::Matrix4;

    fn units() -> QuadratureUnits {
        QuadratureUnits::isotropic(1e-18, TAU * 1e5)
    }

    #[test]
    fn vacuum_unit_shifts() {
        let b = qfim(&Vector4::x(), &Vector4::z(), &(Matrix4::identity() * 0.5), &units(), 0.0).unwrap();
        assert_relative_eq!(b.qfim, Matrix2::new(4.0, 0.0, 0.0, 4.0), epsilon = 1e-14);
        assert_relative_eq!(b.min_force_x, 0.5 * units().force_scale(0), max_relative = 1e-14);
    }

    #[test]
    fn zero_sensitivity_is_unresolvable() {
        let b = qfim(&Vector4::zeros(), &Vector4::z(), &(Matrix4::identity() * 0.5), &units(), 0.0).unwrap();
        assert!(b.min_force_x.is_infinite());
        assert!(b.min_force_y.is_finite());
        let parallel = qfim(&Vector4::x(), &(Vector4::x() * 2.0), &(Matrix4::identity() * 0.5), &units(), 0.0).unwrap();
        assert!(parallel.min_force_x.is_infinite() && parallel.min_force_y.is_infinite());
    }

    #[test]
    fn qfim_scales_quadratically_and_orders_with_noise() {
        let cov = thermal_state(0.3, 1.1).cov;
        let sx = Vector4::new(0.3, -1.0, 0.2, 0.5);
        let sy = Vector4::new(-0.1, 0.4, 1.5, 0.0);
        let a = qfim(&sx, &sy, &cov, &units(), 0.0).unwrap();
        let b = qfim(&(sx * 3.0), &(sy * 3.0), &cov, &units(), 0.0).unwrap();
        assert_relative_eq!(b.qfim, a.qfim * 9.0, max_relative = 1e-12);
        let noisy = qfim(&sx, &sy, &(cov * 2.0), &units(), 0.0).unwrap();
        let diff = a.qfim - noisy.qfim;
        assert!(diff.symmetric_eigen().eigenvalues.min() >= -1e-12);
        assert!(noisy.min_force_x > a.min_force_x);
    }

    #[test]
    fn free_particle_displacement() {
        // With a negligible trap the shift is Δx = F t² / 2m, so s_x(0) maps to t²/(2m) in SI.
        let setup = Setup::new(
            ParticleParams::silica(50e-9),
            TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, 0.5).with_power(1e-24),
            ReferenceTweezer::isotropic(TAU * 1e5, 0.0),
        );
        let schedule = TrapSchedule::new(alloc::vec![Segment {
            duration: 2e-6,
            rotation_rate: 0.0,
            laguerre_fraction: 0.5,
            power: 1e-24,
        }]);
        let u = setup.units();
        let mut last = None;
        sensitivities_each(&setup.initial_state(), &schedule, &setup, 1e-8, CovarianceSource::Unconditional, |s, _| {
            last = Some(s.clone())
        })
        .unwrap();
        let s = last.unwrap();
        let t = s.state.time;
        let si = s.s_x[0] * u.length[0] / u.force_scale(0);
        assert_relative_eq!(si, t * t / (2.0 * setup.particle.mass()), max_relative = 1e-10);
        assert_eq!(s.s_x[2], 0.0);
    }

    #[test]
    fn conditioning_tightens_the_bound() {
        let setup = Setup::new(
            ParticleParams::silica(50e-9),
            TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, 0.9).with_rotation(TAU * 3e5),
            ReferenceTweezer::isotropic(TAU * 150e3, 0.8),
        );
        let schedule = TrapSchedule::constant(&setup, 2e-5);
        let step = setup.model().unwrap().max_step();
        let run = |source| force_bounds(&setup.initial_state(), &schedule, &setup, step, 100, source).unwrap();
        let plain = run(CovarianceSource::Unconditional);
        let cond = run(CovarianceSource::Conditional { efficiency: [1.0; 2] });
        assert_eq!(plain.len(), cond.len());
        let (p, c) = (plain.last().unwrap(), cond.last().unwrap());
        assert!(c.min_force_x <= p.min_force_x && c.min_force_y <= p.min_force_y);
        assert!(plain[0].min_force_x.is_infinite());
    }
}
