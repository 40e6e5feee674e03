//! Force sensitivities against finite differences of two SI mean
//! trajectories, one with a constant force and one without.

use nalgebra::Vector4;
use saddle_core::dynamics::TrapSchedule;
use saddle_core::metrology::{sensitivities_each, CovarianceSource};
use saddle_core::{GaussianState, Setup};

use super::si_hessian;

/// Largest `‖s_fd − s‖ / ‖s‖` over the run, for both force directions.
pub fn worst_relative_error(setup: &Setup, duration: f64) -> f64 {
    let model = setup.model().unwrap();
    let units = model.units;
    let step = model.max_step();
    let mean0 = Vector4::new(5.0, -2.0, 1.0, -3.0);
    let initial = GaussianState::vacuum().with_mean(mean0);
    let schedule = TrapSchedule::constant(setup, duration);
    let mut samples = Vec::new();
    sensitivities_each(&initial, &schedule, setup, step, CovarianceSource::Unconditional, |s, _| {
        samples.push((s.state.time, s.s_x, s.s_y))
    })
    .unwrap();
    let n = samples.len() - 1;
    let h = duration / n as f64;

    let mass = setup.particle.mass();
    let (omega, il, v0) = (setup.trap.rotation_rate, setup.trap.laguerre_fraction, model.derived.v0);
    let scale = Vector4::new(units.length[0], units.momentum[0], units.length[1], units.momentum[1]);
    let run = |force: [f64; 2]| {
        let f = |t: f64, s: &Vector4<f64>| {
            let k = si_hessian(v0, il, omega * t);
            Vector4::new(
                s[1] / mass,
                force[0] - k[(0, 0)] * s[0] - k[(0, 1)] * s[2],
                s[3] / mass,
                force[1] - k[(1, 0)] * s[0] - k[(1, 1)] * s[2],
            )
        };
        let mut s = mean0.component_mul(&scale);
        let mut out = vec![mean0];
        for i in 0..n {
            let t = i as f64 * h;
            let k1 = f(t, &s);
            let k2 = f(t + 0.5 * h, &(s + k1 * (0.5 * h)));
            let k3 = f(t + 0.5 * h, &(s + k2 * (0.5 * h)));
            let k4 = f(t + h, &(s + k3 * h));
            s += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
            out.push(s.component_div(&scale));
        }
        out
    };
    // ε of a few force units keeps the shift comparable to the initial mean.
    let eps = [3.0, 3.0];
    let base = run([0.0, 0.0]);
    let fx = run([eps[0] * units.force_scale(0), 0.0]);
    let fy = run([0.0, eps[1] * units.force_scale(1)]);
    let mut worst: f64 = 0.0;
    for (i, (_, sx, sy)) in samples.iter().enumerate().skip(1) {
        let dx = (fx[i] - base[i]) / eps[0];
        let dy = (fy[i] - base[i]) / eps[1];
        worst = worst.max((dx - sx).norm() / sx.norm());
        worst = worst.max((dy - sy).norm() / sy.norm());
    }
    worst
}
