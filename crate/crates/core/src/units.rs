//! Map between SI phase-space coordinates and the dimensionless quadratures
//! used internally.
//!
//! For axis `q` with reference frequency `Ω_q`:
//! `q̃ = q / (√2 q_zpf)`, `p̃ = p / (√2 p_zpf)` with `q_zpf p_zpf = ħ/2`.
//! Times stay in seconds. A constant force `f` enters as `dp̃/dt = F Ω_q` with
//! `f = F ħ Ω_q / (√2 q_zpf)`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::consts::HBAR;
use crate::params::{zero_point_amplitude, DerivedParams, ReferenceTweezer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureUnits {
    /// [kg]
    pub mass: f64,
    /// Reference angular frequencies `Ω_q` [rad/s].
    pub frequency: [f64; 2],
    /// `√2 q_zpf` [m].
    pub length: [f64; 2],
    /// `√2 p_zpf` [kg m/s].
    pub momentum: [f64; 2],
}

impl QuadratureUnits {
    pub fn new(mass: f64, frequency_x: f64, frequency_y: f64) -> Self {
        let axis = |w: f64| {
            let zpf = zero_point_amplitude(mass, w);
            (2.0.sqrt() * zpf, 2.0.sqrt() * HBAR / (2.0 * zpf))
        };
        let (lx, px) = axis(frequency_x);
        let (ly, py) = axis(frequency_y);
        Self {
            mass,
            frequency: [frequency_x, frequency_y],
            length: [lx, ly],
            momentum: [px, py],
        }
    }

    pub fn isotropic(mass: f64, frequency: f64) -> Self {
        Self::new(mass, frequency, frequency)
    }

    pub fn from_reference(derived: &DerivedParams, reference: &ReferenceTweezer) -> Self {
        Self::new(derived.mass, reference.frequency_x, reference.frequency_y)
    }

    /// SI force [N] corresponding to a dimensionless force along `axis`.
    pub fn force_scale(&self, axis: usize) -> f64 {
        HBAR * self.frequency[axis] / self.length[axis]
    }

    /// Rate `μ_q = 2 Λ_q q_zpf²` [1/s] for a localization rate `Λ_q` [1/(m² s)].
    /// Momentum diffusion is `dσ_p̃²/dt = 2μ`; measurement terms scale with `ημ`.
    pub fn dimensionless_rate(&self, localization_rate: f64, axis: usize) -> f64 {
        localization_rate * self.length[axis] * self.length[axis]
    }
}
