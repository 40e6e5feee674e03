#![allow(dead_code)]

use nalgebra::Matrix4;
use std::f64::consts::TAU;
use saddle_core::stability::threshold;
use saddle_core::{ParticleParams, ReferenceTweezer, Setup, TrapConfig};

/// 100 nm silica in a 1550 nm, NA 0.6 beam, referenced to a 150 kHz tweezer.
pub fn setup(il: f64, ratio: f64) -> Setup {
    let base = Setup::new(
        ParticleParams::silica(50e-9),
        TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, il),
        ReferenceTweezer::isotropic(TAU * 150e3, 0.8),
    );
    let rate = threshold(&base.trap, &base.derive().unwrap()).omega0().map_or(0.0, |w0| ratio * w0);
    base.with_trap(base.trap.with_rotation(rate))
}

pub fn omega0(s: &Setup) -> f64 {
    threshold(&s.trap, &s.derive().unwrap()).omega0().unwrap()
}

pub fn omega() -> Matrix4<f64> {
    #[rustfmt::skip]
    let j = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    j
}

/// Local squeeze `r` and rotation `phi` on one mode (0 or 1).
pub fn local(mode: usize, r: f64, phi: f64) -> Matrix4<f64> {
    let (c, s) = (phi.cos(), phi.sin());
    let rot = nalgebra::Matrix2::new(c, -s, s, c);
    let sq = nalgebra::Matrix2::new((-r).exp(), 0.0, 0.0, r.exp());
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<2, 2>(2 * mode, 2 * mode).copy_from(&(rot * sq));
    m
}

/// Two-mode squeezer with parameter `r`.
pub fn two_mode(r: f64) -> Matrix4<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let m = Matrix4::new(
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    );
    m
}

/// Beam splitter of angle `t`.
pub fn beam_splitter(t: f64) -> Matrix4<f64> {
    let (c, s) = (t.cos(), t.sin());
    #[rustfmt::skip]
    let m = Matrix4::new(
        c, 0.0, s, 0.0,
        0.0, c, 0.0, s,
        -s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    );
    m
}

/// `S diag(ν₁, ν₁, ν₂, ν₂) Sᵀ`.
pub fn williamson(nu1: f64, nu2: f64, s: &Matrix4<f64>) -> Matrix4<f64> {
    s * Matrix4::from_diagonal(&nalgebra::Vector4::new(nu1, nu1, nu2, nu2)) * s.transpose()
}
