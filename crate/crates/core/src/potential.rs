//! The rotating saddle: quadratic stiffness, full three-mode intensity, and
//! the geometric diagnostics derived from them.

#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::consts::{PI, TAU};
use crate::error::{Error, Result};
use crate::params::{DerivedParams, TrapConfig};

/// Dimensionless coefficients of `V = v0 (kxx x² + kyy y² − kxy x y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix {
    /// `k₋(t)`
    pub kxx: f64,
    /// `k₊(t)`
    pub kyy: f64,
    /// `k_xy(t)`
    pub kxy: f64,
    pub time: f64,
}

impl StiffnessMatrix {
    /// Coefficients at rotation phase `theta`.
    pub fn at_phase(theta: f64, laguerre_fraction: f64) -> Self {
        let ig = 1.0 - laguerre_fraction;
        let c = 2.0 * (ig * laguerre_fraction).sqrt();
        let (s2, c2) = (2.0 * theta).sin_cos();
        Self {
            kxx: ig - c * c2,
            kyy: ig + c * c2,
            kxy: 2.0 * c * s2,
            time: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.kxx + self.kyy
    }

    /// The symmetric matrix `[[kxx, −kxy/2], [−kxy/2, kyy]]`.
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.kxx, -0.5 * self.kxy, -0.5 * self.kxy, self.kyy)
    }
}

/// Stiffness at time `t` for a saddle rotating at `trap.rotation_rate`.
pub fn stiffness(t: f64, trap: &TrapConfig) -> StiffnessMatrix {
    StiffnessMatrix {
        time: t,
        ..StiffnessMatrix::at_phase(trap.rotation_rate * t, trap.laguerre_fraction)
    }
}

/// Hessian of the quadratic potential [N/m]: `2 v0 · [[k₋, −k_xy/2], [−k_xy/2, k₊]]`.
pub fn hessian(k: &StiffnessMatrix, derived: &DerivedParams) -> Matrix2<f64> {
    k.matrix() * (2.0 * derived.v0)
}

/// Force `−∇V` [N] at transverse position `position` [m] and the Hessian of `V`.
pub fn force_and_curvature(
    position: Vector2<f64>,
    t: f64,
    trap: &TrapConfig,
    derived: &DerivedParams,
) -> (Vector2<f64>, Matrix2<f64>) {
    let h = hessian(&stiffness(t, trap), derived);
    (-(h * position), h)
}

/// A point of the transverse field map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    /// `|E_tw / E₀|²` in units of the peak of a unit-power Gaussian at focus,
    /// `2 / (π w₀²)`.
    pub intensity: f64,
}

/// Paraxial beam quantities at axial position `z`.
struct BeamProfile {
    w: f64,
    /// `k / (2 R(z))`, zero at the focus.
    curvature: f64,
    gouy: f64,
}

impl BeamProfile {
    fn at(z: f64, trap: &TrapConfig) -> Self {
        let zr = trap.rayleigh_range();
        let w = trap.waist * (1.0 + (z / zr).powi(2)).sqrt();
        // 1 / R(z) = z / (z² + z_R²)
        let curvature = trap.wavenumber() * z / (2.0 * (z * z + zr * zr));
        Self {
            w,
            curvature,
            gouy: (z / zr).atan(),
        }
    }
}

/// Normalized fundamental Gaussian `LG₀,₀` [1/m].
fn lg00(r: f64, profile: &BeamProfile) -> Complex64 {
    let w = profile.w;
    let amp = (2.0 / PI).sqrt() / w * (-(r * r) / (w * w)).exp();
    amp * Complex64::from_polar(1.0, -profile.curvature * r * r + profile.gouy)
}

/// Normalized `LG₀,±2` [1/m].
fn lg02(r: f64, phi: f64, charge: f64, profile: &BeamProfile) -> Complex64 {
    let w = profile.w;
    let amp = (1.0 / PI).sqrt() * 2.0 * r * r / (w * w * w) * (-(r * r) / (w * w)).exp();
    amp * Complex64::from_polar(
        1.0,
        -profile.curvature * r * r + charge * phi + 3.0 * profile.gouy,
    )
}

/// Complex field `E_tw / E₀` [1/m] at cylindrical point `(r, φ, z)` for relative
/// mode phase `theta`.
pub fn field_amplitude(r: f64, phi: f64, z: f64, theta: f64, trap: &TrapConfig) -> Complex64 {
    let profile = BeamProfile::at(z, trap);
    let ig = trap.gaussian_fraction();
    let il = trap.laguerre_fraction;
    let side = (il / 2.0).sqrt();
    lg00(r, &profile) * ig.sqrt()
        + lg02(r, phi, 2.0, &profile) * Complex64::from_polar(side, -2.0 * theta)
        + lg02(r, phi, -2.0, &profile) * Complex64::from_polar(side, 2.0 * theta)
}

/// Normalized intensity of the three-mode field. The phase `theta` is a free
/// parameter so static saddles can be studied.
pub fn field_intensity(r: f64, phi: f64, z: f64, theta: f64, trap: &TrapConfig) -> f64 {
    let w0 = trap.waist;
    field_amplitude(r, phi, z, theta, trap).norm_sqr() * PI * w0 * w0 / 2.0
}

pub fn field_sample(r: f64, phi: f64, z: f64, theta: f64, trap: &TrapConfig) -> FieldSample {
    FieldSample {
        r,
        phi,
        z,
        intensity: field_intensity(r, phi, z, theta, trap),
    }
}

/// Full (non-quadratic) optical potential in the focal plane [J].
pub fn optical_potential(x: f64, y: f64, theta: f64, trap: &TrapConfig, derived: &DerivedParams) -> f64 {
    let r = x.hypot(y);
    let phi = y.atan2(x);
    -derived.potential_depth * field_intensity(r, phi, 0.0, theta, trap)
}

/// Length scale `w₀ / √(1 + 2√(I_L/I_G))` below which the quadratic
/// approximation holds.
pub fn characteristic_length(trap: &TrapConfig) -> Result<f64> {
    let ig = trap.gaussian_fraction();
    if !(ig > 0.0) {
        return Err(Error::UndefinedLength);
    }
    let ratio = (trap.laguerre_fraction / ig).sqrt();
    Ok(trap.waist / (1.0 + 2.0 * ratio).sqrt())
}

/// Depth [J] of the well at the origin: the potential barrier met when moving
/// from the origin outward along the instantaneous stable axis (y at θ = 0),
/// located as the first local maximum of the full potential within `3 w₀`.
/// Zero when the potential rises monotonically over that range.
pub fn trap_depth(trap: &TrapConfig, derived: &DerivedParams) -> f64 {
    let along = |r: f64| optical_potential(0.0, r, 0.0, trap, derived);
    let r_max = 3.0 * trap.waist;
    const SAMPLES: usize = 600;
    let dr = r_max / SAMPLES as f64;
    let mut prev = along(0.0);
    let mut cur = along(dr);
    for i in 2..=SAMPLES {
        let next = along(i as f64 * dr);
        if cur >= prev && cur > next {
            let r_peak = golden_max(along, (i - 2) as f64 * dr, i as f64 * dr);
            return (along(r_peak) - along(0.0)).max(0.0);
        }
        prev = cur;
        cur = next;
    }
    0.0
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Period of the stiffness, `π / Ω`.
pub fn stiffness_period(rotation_rate: f64) -> f64 {
    TAU / (2.0 * rotation_rate)
}
