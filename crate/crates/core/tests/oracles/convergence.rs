//! Richardson self-convergence of the moment integrator.

use saddle_core::dynamics::{integrate, IntegrationOptions, TrapSchedule};
use saddle_core::Setup;

pub struct ConvergenceReport {
    /// Largest terminal covariance change on halving the step, relative to the
    /// largest entry.
    pub halving_change: f64,
    /// `log₂(e(h, h/2) / e(h/2, h/4))`.
    pub observed_order: f64,
}

pub fn richardson(setup: &Setup, duration: f64) -> ConvergenceReport {
    let step = setup.model().unwrap().max_step();
    let schedule = TrapSchedule::constant(setup, duration);
    let terminal = |h: f64| {
        integrate(&setup.initial_state(), &schedule, setup, &IntegrationOptions::new(h).recording_every(usize::MAX))
            .unwrap()
            .last()
            .cov
    };
    let (a, b, c) = (terminal(step), terminal(step / 2.0), terminal(step / 4.0));
    let scale = c.amax();
    let (e1, e2) = ((a - b).amax(), (b - c).amax());
    ConvergenceReport {
        halving_change: e1 / scale,
        observed_order: (e1 / e2).log2(),
    }
}
