//! The six experiments. Each grid point is independent and runs on the rayon
//! pool; results come back in grid order so output is deterministic.

use rayon::prelude::*;
use saddle_core::dynamics::{integrate, integrate_each, IntegrationOptions};
use saddle_core::metrology::{qfim, sensitivities_each, CovarianceSource, ForceBound};
use saddle_core::monitor::{recover, FeedbackLaw, MeasurementModel, RecoveryOptions, RecoveryReport};
use saddle_core::noise::split_seed;
use saddle_core::potential::{characteristic_length, trap_depth};
use saddle_core::stability::{floquet, threshold};
use saddle_core::units::QuadratureUnits;
use saddle_core::GaussianState;

use crate::config::{CovarianceChoice, DisplacementUnit, GridPoint, Scenario, ScenarioConfig};
use crate::error::{classify, RunError};

/// A recorded trajectory at one grid point.
#[derive(Debug, Clone)]
pub struct TrajectoryRun {
    pub point: GridPoint,
    /// [m]
    pub radius: f64,
    pub units: QuadratureUnits,
    pub samples: Vec<GaussianState>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglePoint {
    pub point: GridPoint,
    pub max_log_negativity: f64,
    /// [s]
    pub time_of_max: f64,
}

#[derive(Debug, Clone)]
pub struct MetrologyRun {
    pub trajectory: TrajectoryRun,
    pub bounds: Vec<ForceBound>,
}

#[derive(Debug, Clone)]
pub struct RecoveryRun {
    pub trajectory: TrajectoryRun,
    /// Initial `⟨x⟩` [m].
    pub displacement: f64,
    pub report: RecoveryReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub point: GridPoint,
    /// [rad/s]; zero without a saddle.
    pub omega0: f64,
    /// [J]
    pub trap_depth: f64,
    /// [m]; `NaN` where undefined.
    pub char_length: f64,
    /// [rad/s]; `NaN` without a saddle.
    pub beating_frequency: f64,
    pub stable: bool,
}

#[derive(Debug, Clone)]
pub enum Results {
    Trajectories(Vec<TrajectoryRun>),
    EntangleMap(Vec<EntanglePoint>),
    Metrology(Vec<MetrologyRun>),
    Recovery(Vec<RecoveryRun>),
    Stability(Vec<StabilityRow>),
}

/// Validates `config` and runs its scenario on the current rayon pool.
pub fn run(config: &ScenarioConfig) -> Result<(Scenario, Results), RunError> {
    let scenario = config.validate()?;
    let results = match scenario {
        Scenario::Purity | Scenario::Expand => Results::Trajectories(trajectories(config, scenario)?),
        Scenario::EntangleMap => Results::EntangleMap(entangle_map(config)?),
        Scenario::SqueezeMetrology => Results::Metrology(metrology(config)?),
        Scenario::FeedbackRecovery => Results::Recovery(recovery(config)?),
        Scenario::StabilityScan => Results::Stability(stability_scan(config)?),
    };
    Ok((scenario, results))
}

fn par_grid<T: Send>(
    config: &ScenarioConfig,
    scenario: Scenario,
    f: impl Fn(GridPoint) -> Result<T, RunError> + Sync + Send,
) -> Result<Vec<T>, RunError> {
    config.grid(scenario).into_par_iter().map(f).collect()
}

pub fn trajectories(config: &ScenarioConfig, scenario: Scenario) -> Result<Vec<TrajectoryRun>, RunError> {
    par_grid(config, scenario, |point| {
        let il = point.laguerre_fraction;
        let setup = config.setup(il, point.omega_ratio)?;
        let schedule = config.schedule_for(&setup, point, scenario)?;
        let step = config.step_for(&setup, point, scenario)?;
        let opts = IntegrationOptions::new(step).recording_every(config.integration.record_every);
        let traj = integrate(&setup.initial_state(), &schedule, &setup, &opts)
            .map_err(|e| classify(e, "integration", il, point.omega_ratio))?;
        Ok(TrajectoryRun {
            point,
            radius: setup.particle.radius,
            units: setup.units(),
            samples: traj.samples,
        })
    })
}

pub fn entangle_map(config: &ScenarioConfig) -> Result<Vec<EntanglePoint>, RunError> {
    let scenario = Scenario::EntangleMap;
    let every = config.integration.record_every;
    par_grid(config, scenario, |point| {
        let il = point.laguerre_fraction;
        let setup = config.setup(il, point.omega_ratio)?;
        let schedule = config.schedule_for(&setup, point, scenario)?;
        let step = config.step_for(&setup, point, scenario)?;
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut failure = None;
        let mut count = 0usize;
        integrate_each(&setup.initial_state(), &schedule, &setup, step, |s, _, end| {
            if (count % every == 0 || end) && failure.is_none() {
                match s.log_negativity() {
                    Ok(ln) if ln > best.0 => best = (ln, s.time),
                    Ok(_) => {}
                    Err(e) => failure = Some(e),
                }
            }
            count += 1;
        })
        .and_then(|_| failure.map_or(Ok(()), Err))
        .map_err(|e| classify(e, "integration", il, point.omega_ratio))?;
        Ok(EntanglePoint {
            point,
            max_log_negativity: best.0,
            time_of_max: best.1,
        })
    })
}

pub fn metrology(config: &ScenarioConfig) -> Result<Vec<MetrologyRun>, RunError> {
    let scenario = Scenario::SqueezeMetrology;
    let every = config.integration.record_every;
    let source = match config.metrology.covariance {
        CovarianceChoice::Unconditional => CovarianceSource::Unconditional,
        CovarianceChoice::Conditional => CovarianceSource::Conditional {
            efficiency: [config.measurement.efficiency; 2],
        },
    };
    par_grid(config, scenario, |point| {
        let il = point.laguerre_fraction;
        let setup = config.setup(il, point.omega_ratio)?;
        let schedule = config.schedule_for(&setup, point, scenario)?;
        let step = config.step_for(&setup, point, scenario)?;
        let units = setup.units();
        let (mut samples, mut bounds) = (Vec::new(), Vec::new());
        let mut failure = None;
        let mut count = 0usize;
        sensitivities_each(&setup.initial_state(), &schedule, &setup, step, source, |smp, end| {
            if (count % every == 0 || end) && failure.is_none() {
                samples.push(smp.state);
                match qfim(&smp.s_x, &smp.s_y, &smp.state.cov, &units, smp.state.time) {
                    Ok(b) => bounds.push(b),
                    Err(e) => failure = Some(e),
                }
            }
            count += 1;
        })
        .and_then(|_| failure.map_or(Ok(()), Err))
        .map_err(|e| classify(e, "integration", il, point.omega_ratio))?;
        Ok(MetrologyRun {
            trajectory: TrajectoryRun {
                point,
                radius: setup.particle.radius,
                units,
                samples,
            },
            bounds,
        })
    })
}

pub fn recovery(config: &ScenarioConfig) -> Result<Vec<RecoveryRun>, RunError> {
    let scenario = Scenario::FeedbackRecovery;
    let rc = &config.recovery;
    par_grid(config, scenario, |point| {
        let il = point.laguerre_fraction;
        let ratio = point.omega_ratio;
        let setup = config.setup(il, ratio)?;
        let model = setup.model().map_err(|e| RunError::config("trap", e))?;
        let step = config.step_for(&setup, point, scenario)?;
        let units = setup.units();
        let displacement = match rc.unit {
            DisplacementUnit::Radius => rc.displacement * setup.particle.radius,
            DisplacementUnit::Zpf => rc.displacement * units.length[0] / std::f64::consts::SQRT_2,
        };
        let mut initial = setup.initial_state();
        initial.mean[0] = displacement / units.length[0];
        let seed = split_seed(config.seed, point.index as u64);
        let meas = MeasurementModel::recoil_limited(&model, config.measurement.efficiency, seed);
        let feedback = if config.feedback.enabled {
            let mut law = FeedbackLaw::cold_damping(config.feedback.damping_rate);
            law.gain_position = [config.feedback.position_gain; 2];
            law
        } else {
            FeedbackLaw::disabled()
        };
        let opts = RecoveryOptions {
            hold: rc.hold,
            energy_factor: rc.energy_factor,
            record_every: config.integration.record_every,
            ..RecoveryOptions::new(step, rc.time_cap)
        };
        let report = recover(&initial, &model, &meas, &feedback, &opts).map_err(|e| classify(e, "recovery", il, ratio))?;
        Ok(RecoveryRun {
            trajectory: TrajectoryRun {
                point,
                radius: setup.particle.radius,
                units,
                samples: report.samples.clone(),
            },
            displacement,
            report,
        })
    })
}

pub fn stability_scan(config: &ScenarioConfig) -> Result<Vec<StabilityRow>, RunError> {
    par_grid(config, Scenario::StabilityScan, |point| {
        let il = point.laguerre_fraction;
        let setup = config.setup(il, point.omega_ratio)?;
        let derived = setup.derive().map_err(|e| RunError::config("particle", e))?;
        let trap = setup.trap;
        let (omega0, beating, stable) = match threshold(&trap, &derived).omega0() {
            Some(w0) => {
                let report = floquet(&trap, &derived, trap.rotation_rate, trap.gas_damping)
                    .map_err(|e| classify(e, "sweep", il, point.omega_ratio))?;
                (w0, report.beating_frequency, report.is_stable)
            }
            None => (0.0, f64::NAN, true),
        };
        Ok(StabilityRow {
            point,
            omega0,
            trap_depth: trap_depth(&trap, &derived),
            char_length: characteristic_length(&trap).unwrap_or(f64::NAN),
            beating_frequency: beating,
            stable,
        })
    })
}
