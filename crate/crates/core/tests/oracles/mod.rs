//! Independent oracles shared by the integration tests and the acceptance
//! suite. Each returns the measured discrepancy; callers pick the tolerance.

#![allow(dead_code)]

pub mod convergence;
pub mod fock;
pub mod langevin;
pub mod riccati;
pub mod sensitivity;

use nalgebra::Matrix2;
use std::f64::consts::TAU;
use saddle_core::stability::threshold;
use saddle_core::{ParticleParams, ReferenceTweezer, Setup, TrapConfig};

/// 100 nm silica, 70 mW at 1550 nm focused with NA 0.6, 150 kHz reference.
pub fn scenario(il: f64, ratio: f64) -> Setup {
    let base = Setup::new(
        ParticleParams::silica(50e-9),
        TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, il),
        ReferenceTweezer::isotropic(TAU * 150e3, 0.8),
    );
    let rate = match threshold(&base.trap, &base.derive().unwrap()).omega0() {
        Some(w0) => ratio * w0,
        None => 0.0,
    };
    base.with_trap(base.trap.with_rotation(rate))
}

/// SI Hessian of the rotating saddle, written out from the beam decomposition:
/// `V = v0 [(1 − I_L)(x² + y²) − 2√(I_L(1 − I_L)) ((x² − y²) cos 2θ + 2xy sin 2θ)]`.
pub fn si_hessian(v0: f64, il: f64, theta: f64) -> Matrix2<f64> {
    let c = 2.0 * (il * (1.0 - il)).sqrt();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let g = 1.0 - il;
    2.0 * v0 * Matrix2::new(g - c * c2, -c * s2, -c * s2, g + c * c2)
}
