//! Linear equations of motion of the transverse centre of mass in the
//! dimensionless quadratures of [`crate::units`].

#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::consts::TAU;
use crate::error::Result;
use crate::gaussian::{thermal_state, GaussianState};
use crate::params::{derive, Axis, DerivedParams, ParticleParams, ReferenceTweezer, TrapConfig};
use crate::potential::{hessian, StiffnessMatrix};
use crate::units::QuadratureUnits;

/// Minimum number of integrator steps per period of the fastest motion.
pub const STEPS_PER_PERIOD: f64 = 200.0;

/// Particle, beam and reference tweezer: everything needed to build a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub particle: ParticleParams,
    pub trap: TrapConfig,
    pub reference: ReferenceTweezer,
}

impl Setup {
    pub fn new(particle: ParticleParams, trap: TrapConfig, reference: ReferenceTweezer) -> Self {
        Self {
            particle,
            trap,
            reference,
        }
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(&self.particle, &self.trap, &self.reference)
    }

    pub fn units(&self) -> QuadratureUnits {
        QuadratureUnits::new(
            self.particle.mass(),
            self.reference.frequency_x,
            self.reference.frequency_y,
        )
    }

    /// Thermal state of the reference tweezer.
    pub fn initial_state(&self) -> GaussianState {
        thermal_state(self.reference.occupation_x, self.reference.occupation_y)
    }

    pub fn with_trap(mut self, trap: TrapConfig) -> Self {
        self.trap = trap;
        self
    }

    /// Model of the saddle at `self.trap`, with phase `θ = Ω t`.
    pub fn model(&self) -> Result<SaddleModel> {
        SaddleModel::new(self, self.trap, 0.0, 0.0)
    }
}

/// The saddle with fixed settings, rotating as `θ(t) = θ₀ + Ω (t − t₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleModel {
    pub trap: TrapConfig,
    pub derived: DerivedParams,
    pub units: QuadratureUnits,
    pub phase_origin: f64,
    pub time_origin: f64,
    /// Dimensionless recoil rates `μ_q = 2 Λ_q q_zpf²` [1/s].
    pub diffusion: [f64; 2],
}

impl SaddleModel {
    pub fn new(setup: &Setup, trap: TrapConfig, phase_origin: f64, time_origin: f64) -> Result<Self> {
        let derived = derive(&setup.particle, &trap, &setup.reference)?;
        let units = setup.units();
        let diffusion = [
            units.dimensionless_rate(derived.localization_rate_x, 0),
            units.dimensionless_rate(derived.localization_rate_y, 1),
        ];
        Ok(Self {
            trap,
            derived,
            units,
            phase_origin,
            time_origin,
            diffusion,
        })
    }

    /// Copy with recoil diffusion switched off.
    pub fn without_recoil(mut self) -> Self {
        self.diffusion = [0.0; 2];
        self
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.phase_origin + self.trap.rotation_rate * (t - self.time_origin)
    }

    pub fn stiffness(&self, t: f64) -> StiffnessMatrix {
        StiffnessMatrix {
            time: t,
            ..StiffnessMatrix::at_phase(self.phase(t), self.trap.laguerre_fraction)
        }
    }

    /// `G` with `dp̃/dt = −G q̃`, i.e. `G_ab = K_ab L_b / P_a` [1/s].
    pub fn curvature_rates(&self, t: f64) -> Matrix2<f64> {
        let k = hessian(&self.stiffness(t), &self.derived);
        let u = &self.units;
        Matrix2::from_fn(|a, b| k[(a, b)] * u.length[b] / u.momentum[a])
    }

    /// Drift matrix `A(t)` of `d(x̃, p̃_x, ỹ, p̃_y)/dt = A d`.
    pub fn drift(&self, t: f64) -> Matrix4<f64> {
        drift_from(&self.curvature_rates(t), &self.units.frequency)
    }

    /// `D = diag(0, 2μ_x, 0, 2μ_y)`.
    pub fn diffusion_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::new(0.0, 2.0 * self.diffusion[0], 0.0, 2.0 * self.diffusion[1]))
    }

    /// Largest step allowed for this model [s].
    pub fn max_step(&self) -> f64 {
        max_step(&self.trap, &self.derived)
    }

    pub fn localization_rate(&self, axis: Axis) -> f64 {
        self.derived.localization_rate(axis)
    }
}

pub(crate) fn drift_from(g: &Matrix2<f64>, frequency: &[f64; 2]) -> Matrix4<f64> {
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0,      frequency[0], 0.0,      0.0,
        -g[(0, 0)], 0.0,        -g[(0, 1)], 0.0,
        0.0,      0.0,          0.0,      frequency[1],
        -g[(1, 0)], 0.0,        -g[(1, 1)], 0.0,
    );
    a
}

/// `2π / (200 f_max)` with `f_max` the largest of the rotation rate and the
/// curvature frequencies. Folded Floquet frequencies never exceed `Ω`, so the
/// beating frequency is covered.
pub fn max_step(trap: &TrapConfig, derived: &DerivedParams) -> f64 {
    let f_max = trap
        .rotation_rate
        .abs()
        .max(derived.omega_sq_x.abs().sqrt())
        .max(derived.omega_sq_y.abs().sqrt());
    if f_max > 0.0 {
        TAU / (STEPS_PER_PERIOD * f_max)
    } else {
        f64::INFINITY
    }
}
