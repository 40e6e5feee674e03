//! Classical Langevin Monte Carlo in SI units. The Wigner function of a
//! Gaussian state under a quadratic Hamiltonian with momentum diffusion
//! `2ħ²Λ` evolves exactly as this ensemble, so its sample moments must agree
//! with the moment equations.

use nalgebra::{Matrix4, Vector4};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use saddle_core::consts::HBAR;
use saddle_core::dynamics::{moments_from_state, rhs_unconditional, state_from_moments};
use saddle_core::integrator::rk4_step;
use saddle_core::{GaussianState, Setup};

use super::si_hessian;

pub struct LangevinReport {
    /// Largest |difference| / standard error over all checkpoints and moments.
    pub worst_z: f64,
    pub checkpoints: usize,
    pub trajectories: usize,
}

/// Runs `trajectories` realizations for `checkpoints` equal intervals of
/// `interval` seconds each, with localization rate `lambda` on both axes.
pub fn compare(
    setup: &Setup,
    initial: &GaussianState,
    lambda: f64,
    trajectories: usize,
    checkpoints: usize,
    interval: f64,
    seed: u64,
) -> LangevinReport {
    let mut model = setup.model().unwrap();
    let units = model.units;
    model.diffusion = [units.dimensionless_rate(lambda, 0), units.dimensionless_rate(lambda, 1)];
    let derived = model.derived;
    let mass = setup.particle.mass();
    let (omega, il) = (setup.trap.rotation_rate, setup.trap.laguerre_fraction);

    let steps_per = (interval / model.max_step()).ceil() as usize;
    let h = interval / steps_per as f64;

    // Moment equations.
    let mut y = moments_from_state(initial);
    let mut reference = Vec::new();
    for c in 0..checkpoints {
        for i in 0..steps_per {
            let t = (c * steps_per + i) as f64 * h;
            y = rk4_step(&y, t, h, |t, m| rhs_unconditional(m, t, &model));
        }
        reference.push(state_from_moments(&y, (c + 1) as f64 * interval));
    }

    // Ensemble in SI: dx = p/m dt, dp = −K x dt + √(2ħ²Λ) dW, four substeps
    // per moment step with the noise split symmetrically around each drift step.
    let sub = 4;
    let hs = h / sub as f64;
    let kick = (HBAR * HBAR * lambda * hs).sqrt();
    let scale = Vector4::new(units.length[0], units.momentum[0], units.length[1], units.momentum[1]);
    let chol = initial.cov.cholesky().unwrap().l();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut particles: Vec<Vector4<f64>> = (0..trajectories)
        .map(|_| {
            let z = Vector4::from_fn(|_, _| normal());
            (initial.mean + chol * z).component_mul(&scale)
        })
        .collect();
    let drift = |t: f64, s: &Vector4<f64>| {
        let k = si_hessian(derived.v0, il, omega * t);
        let (x, y) = (s[0], s[2]);
        Vector4::new(
            s[1] / mass,
            -(k[(0, 0)] * x + k[(0, 1)] * y),
            s[3] / mass,
            -(k[(1, 0)] * x + k[(1, 1)] * y),
        )
    };
    let mut worst: f64 = 0.0;
    for (c, target) in reference.iter().enumerate() {
        for i in 0..steps_per * sub {
            let t = (c * steps_per * sub + i) as f64 * hs;
            for s in particles.iter_mut() {
                s[1] += kick * normal();
                s[3] += kick * normal();
                let k1 = drift(t, s);
                let k2 = drift(t + 0.5 * hs, &(*s + k1 * (0.5 * hs)));
                let k3 = drift(t + 0.5 * hs, &(*s + k2 * (0.5 * hs)));
                let k4 = drift(t + hs, &(*s + k3 * hs));
                *s += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (hs / 6.0);
                s[1] += kick * normal();
                s[3] += kick * normal();
            }
        }
        let n = trajectories as f64;
        let samples: Vec<Vector4<f64>> = particles.iter().map(|s| s.component_div(&scale)).collect();
        let mean = samples.iter().sum::<Vector4<f64>>() / n;
        let cov = samples.iter().fold(Matrix4::zeros(), |acc, s| {
            let d = s - mean;
            acc + d * d.transpose()
        }) / (n - 1.0);
        let sig = &target.cov;
        for a in 0..4 {
            let se = (sig[(a, a)] / n).sqrt();
            worst = worst.max((mean[a] - target.mean[a]).abs() / se);
            for b in a..4 {
                let se = ((sig[(a, a)] * sig[(b, b)] + sig[(a, b)].powi(2)) / n).sqrt();
                worst = worst.max((cov[(a, b)] - sig[(a, b)]).abs() / se);
            }
        }
    }
    LangevinReport {
        worst_z: worst,
        checkpoints,
        trajectories,
    }
}
