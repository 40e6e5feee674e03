//! Steady conditional covariance of a static harmonic trap against the
//! closed-form fixed point of the algebraic Riccati equation.
//!
//! Per axis, with `A = [[0, Ω], [−g, 0]]`, diffusion `2μ` on `p̃` and
//! information rate `k = ημ` on `x̃`, the fixed point of
//! `Aσ + σAᵀ + D − 2σMσ = 0` is
//! `σ_xp = 2μ / (g + √(g² + 4kμ))`, `σ_xx = √(Ω σ_xp / k)`,
//! `σ_pp = σ_xx (g + 2k σ_xp) / Ω`.

use saddle_core::monitor::{run_conditional, FeedbackLaw, MeasurementModel};

use super::{scenario, si_hessian};

pub struct RiccatiReport {
    pub relative_error: f64,
    pub var_x: f64,
    pub fixed_point_var_x: f64,
}

pub fn fixed_point(omega: f64, g: f64, mu: f64, k: f64) -> [f64; 3] {
    let sxp = 2.0 * mu / (g + (g * g + 4.0 * k * mu).sqrt());
    let sxx = (omega * sxp / k).sqrt();
    [sxx, sxp, sxx * (g + 2.0 * k * sxp) / omega]
}

/// Isotropic trap (`I_L = 0`), no rotation, diffusion `mu` [1/s] on both
/// axes and detection efficiency `eta`, run for `duration` seconds.
pub fn compare(mu: f64, eta: f64, duration: f64) -> RiccatiReport {
    let setup = scenario(0.0, 0.0);
    let mut model = setup.model().unwrap();
    model.diffusion = [mu; 2];
    let units = model.units;
    let meas = MeasurementModel {
        efficiency: [eta; 2],
        rate: [mu / (units.length[0] * units.length[0]), mu / (units.length[1] * units.length[1])],
        seed: 0,
    };
    let dt = model.max_step();
    let steps = (duration / dt).ceil() as u64;
    let last = run_conditional(&setup.initial_state(), &model, &meas, &FeedbackLaw::disabled(), dt, steps, |_, _| true).unwrap();

    let k = si_hessian(model.derived.v0, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for q in 0..2 {
        let g = k[(q, q)] * units.length[q] / units.momentum[q];
        let target = fixed_point(units.frequency[q], g, mu, eta * mu);
        let (i, j) = (2 * q, 2 * q + 1);
        let got = [last.cov[(i, i)], last.cov[(i, j)], last.cov[(j, j)]];
        for (a, b) in got.iter().zip(target) {
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    let g = k[(0, 0)] * units.length[0] / units.momentum[0];
    RiccatiReport {
        relative_error: worst,
        var_x: last.cov[(0, 0)],
        fixed_point_var_x: fixed_point(units.frequency[0], g, mu, eta * mu)[0],
    }
}
