//! Rotational stabilization of the saddle: closed-form threshold and Floquet
//! analysis of the classical motion `ẍ + γẋ + K(t) x / m = 0`.

#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::rk4_step;
use crate::params::{DerivedParams, TrapConfig};
use crate::potential::{hessian, stiffness_period, StiffnessMatrix};

/// Steps per stiffness period used by [`floquet`].
pub const DEFAULT_STEPS_PER_PERIOD: usize = 1000;
/// Fewest steps per period accepted by [`floquet_with_steps`].
pub const MIN_STEPS_PER_PERIOD: usize = 400;
/// Tolerance on `|µ| ≤ 1` for a stable verdict.
pub const MULTIPLIER_TOL: f64 = 1e-6;
/// Relative size below which a negative discriminant of the multiplier
/// polynomial is treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// No saddle (`I_L ≤ 0.2`): the static potential already confines.
    StaticallyStable,
    /// Rotation rate `Ω₀` [rad/s] above which the saddle is stabilized.
    Rotating(f64),
}

impl Threshold {
    pub fn omega0(&self) -> Option<f64> {
        match *self {
            Threshold::StaticallyStable => None,
            Threshold::Rotating(w) => Some(w),
        }
    }
}

/// `Ω₀² = [−γ² + ω_y² − ω_x² + √((γ² + ω_x² − ω_y²)² + 4ω_x²ω_y²)] / 2`
/// with `ω_x²`, `ω_y²` the magnitudes of the two curvatures.
pub fn threshold_from_curvatures(omega_sq_x: f64, omega_sq_y: f64, gamma: f64) -> f64 {
    let (wx2, wy2, g2) = (omega_sq_x.abs(), omega_sq_y.abs(), gamma * gamma);
    let root = ((g2 + wx2 - wy2).powi(2) + 4.0 * wx2 * wy2).sqrt();
    (0.5 * (-g2 + wy2 - wx2 + root)).max(0.0).sqrt()
}

pub fn threshold(trap: &TrapConfig, derived: &DerivedParams) -> Threshold {
    if !trap.has_saddle() {
        return Threshold::StaticallyStable;
    }
    Threshold::Rotating(threshold_from_curvatures(
        derived.omega_sq_x,
        derived.omega_sq_y,
        trap.gas_damping,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub threshold: Threshold,
    pub rotation_rate: f64,
    pub is_stable: bool,
    pub floquet_multipliers: [Complex64; 4],
    /// The two mode frequencies folded into `[0, π/T]`, ascending [rad/s].
    pub mode_frequencies: [f64; 2],
    /// Mean of the two mode frequencies [rad/s].
    pub beating_frequency: f64,
    /// Monodromy over one stiffness period in `(x, v_x, y, v_y)` coordinates.
    pub monodromy: Matrix4<f64>,
}

impl StabilityReport {
    pub fn spectral_radius(&self) -> f64 {
        self.floquet_multipliers.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Monodromy over `T = π/Ω` of `ẋ = v`, `v̇ = −K(t)x/m − γv`.
pub fn monodromy(
    trap: &TrapConfig,
    derived: &DerivedParams,
    rotation_rate: f64,
    gamma: f64,
    steps: usize,
) -> Result<Matrix4<f64>> {
    if !(rotation_rate > 0.0) || !rotation_rate.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rotation_rate",
            value: rotation_rate,
            reason: "Floquet analysis needs a positive rotation rate",
        });
    }
    let period = stiffness_period(rotation_rate);
    let h = period / steps as f64;
    let il = trap.laguerre_fraction;
    let rhs = |t: f64, y: &[f64; 16]| {
        let k: Matrix2<f64> = hessian(&StiffnessMatrix::at_phase(rotation_rate * t, il), derived) / derived.mass;
        let mut d = [0.0; 16];
        // column-major 4×4: entry (r, c) at 4c + r
        for c in 0..4 {
            let col = &y[4 * c..4 * c + 4];
            d[4 * c] = col[1];
            d[4 * c + 2] = col[3];
            d[4 * c + 1] = -k[(0, 0)] * col[0] - k[(0, 1)] * col[2] - gamma * col[1];
            d[4 * c + 3] = -k[(1, 0)] * col[0] - k[(1, 1)] * col[2] - gamma * col[3];
        }
        d
    };
    let mut y = [0.0; 16];
    for i in 0..4 {
        y[5 * i] = 1.0;
    }
    for i in 0..steps {
        y = rk4_step(&y, i as f64 * h, h, rhs);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure {
                time: (i + 1) as f64 * h,
                step: h,
            });
        }
    }
    Ok(Matrix4::from_column_slice(&y))
}

/// Eigenvalues of `M = e^{−γT/2} N` with `N` symplectic, from the palindromic
/// characteristic polynomial of `N`: `λ + 1/λ = s` with `s² − a s + b − 2 = 0`.
pub fn floquet_multipliers(monodromy: &Matrix4<f64>, gamma: f64, period: f64) -> [Complex64; 4] {
    let scale = (0.5 * gamma * period).exp();
    let n = monodromy * scale;
    let a = n.trace();
    let b = 0.5 * (a * a - (n * n).trace());
    let mut d = a * a - 4.0 * (b - 2.0);
    // Nearly degenerate mode pairs (fast rotation) leave `d` at rounding
    // level; its sign there is noise, not a Krein collision.
    if d < 0.0 && -d <= DEGENERACY_TOL * (a * a).max(1.0) {
        d = 0.0;
    }
    let disc = Complex64::new(d, 0.0).sqrt();
    let s = [0.5 * (a + disc), 0.5 * (a - disc)];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (k, sk) in s.iter().enumerate() {
        let r = (sk * sk - 4.0).sqrt();
        out[2 * k] = 0.5 * (sk + r) / scale;
        out[2 * k + 1] = 0.5 * (sk - r) / scale;
    }
    out
}

pub fn floquet(trap: &TrapConfig, derived: &DerivedParams, rotation_rate: f64, gamma: f64) -> Result<StabilityReport> {
    floquet_with_steps(trap, derived, rotation_rate, gamma, DEFAULT_STEPS_PER_PERIOD)
}

pub fn floquet_with_steps(
    trap: &TrapConfig,
    derived: &DerivedParams,
    rotation_rate: f64,
    gamma: f64,
    steps: usize,
) -> Result<StabilityReport> {
    let steps = steps.max(MIN_STEPS_PER_PERIOD);
    let m = monodromy(trap, derived, rotation_rate, gamma, steps)?;
    let period = stiffness_period(rotation_rate);
    let mu = floquet_multipliers(&m, gamma, period);
    let is_stable = mu.iter().all(|z| z.norm() <= 1.0 + MULTIPLIER_TOL);
    // Phases of one member of each reciprocal pair; folded into [0, π/T].
    let mut freqs = [mu[0].arg().abs() / period, mu[2].arg().abs() / period];
    if freqs[0] > freqs[1] {
        freqs.swap(0, 1);
    }
    Ok(StabilityReport {
        threshold: threshold(trap, derived),
        rotation_rate,
        is_stable,
        floquet_multipliers: mu,
        mode_frequencies: freqs,
        beating_frequency: 0.5 * (freqs[0] + freqs[1]),
        monodromy: m,
    })
}
