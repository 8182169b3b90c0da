//! Wall-clock comparison of schemes and the stability sweep over `r`.

use super::error::{profile_difference, ProfileDifference};
use crate::benchmark::Scenario;
use crate::error::{FsiError, Result};
use crate::schemes::{RunOptions, SchemeConfig, SchemeKind, Simulation, Timings};

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub kind: SchemeKind,
    pub ratio: usize,
    pub timings: Timings,
    pub max_divergence: f64,
}

impl TimingRow {
    pub fn label(&self) -> String {
        match self.kind {
            SchemeKind::MultirateBeta | SchemeKind::Beta => format!("multirate_beta r={}", self.ratio),
            k => k.name().to_string(),
        }
    }

    pub fn seconds(&self) -> f64 {
        self.timings.total().as_secs_f64()
    }
}

/// Ratios of total wall-clock time; `None` where a configuration is missing.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimingRatios {
    pub implicit_over_r1: Option<f64>,
    pub implicit_over_r10: Option<f64>,
    pub r1_over_r10: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
    pub ratios: TimingRatios,
}

impl TimingRatios {
    pub fn from_rows(rows: &[TimingRow]) -> Self {
        let find = |pred: &dyn Fn(&TimingRow) -> bool| rows.iter().find(|r| pred(r)).map(|r| r.seconds());
        let imp = find(&|r| r.kind == SchemeKind::Implicit);
        let r1 = find(&|r| matches!(r.kind, SchemeKind::Beta | SchemeKind::MultirateBeta) && r.ratio == 1);
        let r10 = find(&|r| r.kind == SchemeKind::MultirateBeta && r.ratio == 10);
        let div = |a: Option<f64>, b: Option<f64>| Some(a? / b?);
        TimingRatios { implicit_over_r1: div(imp, r1), implicit_over_r10: div(imp, r10), r1_over_r10: div(r1, r10) }
    }
}

/// Runs each configuration from scratch (assembly included) and tabulates wall-clock times.
pub fn timing_report(scenario: &Scenario<f64>, configs: &[SchemeConfig<f64>]) -> Result<TimingTable> {
    let mut rows = Vec::with_capacity(configs.len());
    let opts = RunOptions { profile_stride: 0, energy: false, divergence: true };
    for cfg in configs {
        let res = Simulation::new(scenario, *cfg)?.run(&opts)?;
        rows.push(TimingRow { kind: cfg.kind, ratio: cfg.ratio, timings: res.timings, max_divergence: res.max_divergence() });
    }
    let ratios = TimingRatios::from_rows(&rows);
    Ok(TimingTable { rows, ratios })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ratio: usize,
    pub completed: bool,
    pub failure: Option<String>,
    pub max_abs_d: f64,
    /// Final wall profile (nodal, endpoints included).
    pub profile: Option<Vec<f64>>,
    pub vs_implicit: Option<ProfileDifference<f64>>,
    pub max_divergence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub h: f64,
    pub dt_s: f64,
    pub t_end: f64,
    pub implicit_profile: Vec<f64>,
    pub implicit_max_divergence: f64,
    pub rows: Vec<SweepRow>,
}

/// Multirate beta (`beta = 1`) for each `r` against the implicit scheme with `dt = dt_s`.
pub fn stability_sweep(scenario: &Scenario<f64>, dt_s: f64, ratios: &[usize], t_end: f64) -> Result<SweepReport> {
    let opts = RunOptions { profile_stride: 0, energy: false, divergence: true };
    let base = Simulation::new(scenario, SchemeConfig::implicit(dt_s, t_end))?;
    let imp = base.run(&opts)?;
    let implicit_profile = base.disc.dofs.wall_to_nodal(&imp.final_state.d);
    let implicit_max_divergence = imp.max_divergence();
    let mut rows = Vec::new();
    for &r in ratios {
        let sim = base.with_config(SchemeConfig::multirate(1.0, dt_s, r, t_end))?;
        rows.push(match sim.run(&opts) {
            Ok(res) => {
                let profile = sim.disc.dofs.wall_to_nodal(&res.final_state.d);
                let diff = profile_difference(&base.disc.iface, &profile, &implicit_profile);
                SweepRow {
                    ratio: r,
                    completed: true,
                    failure: None,
                    max_abs_d: res.max_abs_displacement(),
                    max_divergence: res.max_divergence(),
                    profile: Some(profile),
                    vs_implicit: Some(diff),
                }
            }
            Err(e @ FsiError::BlowUp { .. }) => SweepRow {
                ratio: r,
                completed: false,
                failure: Some(e.to_string()),
                max_abs_d: f64::INFINITY,
                profile: None,
                vs_implicit: None,
                max_divergence: f64::NAN,
            },
            Err(e) => return Err(e),
        });
    }
    Ok(SweepReport {
        h: scenario.h,
        dt_s,
        t_end,
        implicit_profile,
        implicit_max_divergence,
        rows,
    })
}
