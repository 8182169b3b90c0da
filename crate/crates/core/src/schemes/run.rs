//! Time loop with diagnostics, snapshots and timing.

use std::sync::Arc;
use std::time::{Duration, Instant};

use super::stepper::{Discretization, Stepper};
use super::{FsiState, SchemeConfig, Snapshot};
use crate::analysis::{EnergyMonitor, EnergyRow, EnergyTrace};
use crate::benchmark::Scenario;
use crate::error::Result;
use crate::scalar::{norm2, norm_inf, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Store the interface displacement profile every `profile_stride` coarse steps (0: never).
    pub profile_stride: usize,
    pub energy: bool,
    pub divergence: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { profile_stride: 0, energy: true, divergence: true }
    }
}

/// Diagnostics after one coarse step (step 0 is the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub step: usize,
    pub time: T,
    pub energy: Option<EnergyRow<T>>,
    /// `||B u_f|| / max(1, ||u_f||)`.
    pub divergence: Option<T>,
    pub max_abs_d: T,
    /// Wall displacement at the quadratic interface nodes.
    pub profile: Option<Vec<T>>,
    /// Seconds since the start of marching.
    pub wall_clock: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub assembly: Duration,
    pub factorization: Duration,
    /// Time-stepping only, diagnostics excluded.
    pub marching: Duration,
    pub diagnostics: Duration,
}

impl Timings {
    /// Assembly, factorization and marching.
    pub fn total(&self) -> Duration {
        self.assembly + self.factorization + self.marching
    }
}

#[derive(Debug, Clone)]
pub struct SimulationResult<T> {
    pub config: SchemeConfig<T>,
    pub records: Vec<StepRecord<T>>,
    /// Fields at the scenario's output times that fall on the coarse grid.
    pub snapshots: Vec<Snapshot<T>>,
    pub final_state: FsiState<T>,
    pub timings: Timings,
}

impl<T: Scalar> SimulationResult<T> {
    pub fn energy_trace(&self) -> EnergyTrace<T> {
        EnergyTrace { rows: self.records.iter().filter_map(|r| r.energy).collect() }
    }

    pub fn max_divergence(&self) -> T {
        self.records.iter().filter_map(|r| r.divergence).fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_displacement(&self) -> T {
        self.records.iter().fold(T::zero(), |a, r| a.max(r.max_abs_d))
    }

    /// Snapshot whose time is within `1e-9` (relative) of `t`.
    pub fn snapshot_at(&self, t: T) -> Option<&Snapshot<T>> {
        let tol = T::lit(1e-9) * t.abs().max(T::one());
        self.snapshots.iter().find(|s| (s.time - t).abs() <= tol)
    }
}

/// Assembles and runs one simulation.
pub fn run_simulation<T: Scalar>(scenario: &Scenario<T>, cfg: SchemeConfig<T>) -> Result<SimulationResult<T>> {
    Simulation::new(scenario, cfg)?.run(&RunOptions::default())
}

/// A scenario with its assembled discretization, ready to march any scheme.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub scenario: Scenario<T>,
    pub config: SchemeConfig<T>,
    pub disc: Arc<Discretization<T>>,
    pub assembly_time: Duration,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(scenario: &Scenario<T>, cfg: SchemeConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let start = Instant::now();
        let disc = Arc::new(Discretization::new(scenario)?);
        Ok(Simulation { scenario: scenario.clone(), config: cfg, disc, assembly_time: start.elapsed() })
    }

    /// Reuses an assembled discretization for another scheme.
    pub fn with_config(&self, cfg: SchemeConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Simulation { config: cfg, ..self.clone() })
    }

    pub fn run(&self, opts: &RunOptions) -> Result<SimulationResult<T>> {
        let disc: &Discretization<T> = &self.disc;
        let cfg = self.config;
        let n_steps = cfg.num_steps()?;
        let start = Instant::now();
        let stepper = Stepper::new(disc, &self.scenario, cfg)?;
        let mut timings = Timings { assembly: self.assembly_time, factorization: start.elapsed(), ..Timings::default() };
        let monitor = opts.energy.then(|| EnergyMonitor::new(&disc.forms));

        let dt_f = cfg.dt_f().to_f64_();
        let output_steps: Vec<usize> = self
            .scenario
            .output_times
            .iter()
            .map(|t| (t.to_f64_() / dt_f - 1e-6).ceil().max(0.0) as usize)
            .collect();

        let mut state = disc.init_state(&self.scenario)?;
        let mut records = Vec::with_capacity(n_steps + 1);
        let mut snapshots = Vec::new();
        let march_start = Instant::now();
        let mut diag = Duration::ZERO;
        let mut record = |s: &FsiState<T>, snapshots: &mut Vec<Snapshot<T>>, diag: &mut Duration| {
            let t0 = Instant::now();
            let energy = monitor.as_ref().map(|m| m.energy(s, &disc.forms, &cfg));
            let divergence = opts.divergence.then(|| {
                let bu = disc.forms.divergence.mul_vec(&s.u_f);
                norm2(&bu) / norm2(&s.u_f).max(T::one())
            });
            let profile = (opts.profile_stride > 0 && s.step % opts.profile_stride == 0).then(|| disc.dofs.wall_to_nodal(&s.d));
            if output_steps.contains(&s.step) {
                snapshots.push(disc.snapshot(s));
            }
            records.push(StepRecord {
                step: s.step,
                time: s.time,
                energy,
                divergence,
                max_abs_d: norm_inf(&s.d),
                profile,
                wall_clock: march_start.elapsed().as_secs_f64(),
            });
            *diag += t0.elapsed();
        };
        record(&state, &mut snapshots, &mut diag);
        for _ in 0..n_steps {
            stepper.advance(&mut state);
            stepper.check(&state)?;
            record(&state, &mut snapshots, &mut diag);
        }
        timings.marching = march_start.elapsed().saturating_sub(diag);
        timings.diagnostics = diag;
        Ok(SimulationResult { config: cfg, records, snapshots, final_state: state, timings })
    }
}
