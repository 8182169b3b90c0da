//! Convergence study under the coupled refinement schedule.

use super::error::{Field, ReferenceGrid};
use crate::benchmark::Scenario;
use crate::error::{FsiError, Result};
use crate::schemes::{RunOptions, SchemeConfig, SchemeKind, Simulation};

/// `(h, dt_s)` of level `i`: `(0.1 * 0.5^i, 1e-4 * 0.25^i)`.
pub fn refinement_schedule(level: usize) -> (f64, f64) {
    let i = level as i32;
    (0.1 * 0.5f64.powi(i), 1e-4 * 0.25f64.powi(i))
}

/// Scheme settings shared by every level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub kind: SchemeKind,
    pub beta: f64,
    pub ratio: usize,
    /// Evaluation (and end) time.
    pub t_eval: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub level: usize,
    pub h: f64,
    pub dt_s: f64,
    /// Relative L2 errors of `u_f`, `p_f`, `d`; `None` if the level failed.
    pub errors: Option<[f64; 3]>,
    pub failure: Option<String>,
    /// Largest divergence ratio seen during the run.
    pub max_divergence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub study: StudyConfig,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// `err(i) / err(i+1)` between consecutive schedule levels, per field.
    pub fn factors(&self) -> Vec<Option<[f64; 3]>> {
        self.rows
            .windows(2)
            .map(|w| match (w[0].errors, w[1].errors) {
                (Some(a), Some(b)) if w[1].level == w[0].level + 1 => Some([0, 1, 2].map(|k| a[k] / b[k])),
                _ => None,
            })
            .collect()
    }

    /// Least-squares slope of `log err` against `log h` per field, over successful rows.
    pub fn orders(&self) -> Option<[f64; 3]> {
        let pts: Vec<(f64, [f64; 3])> = self.rows.iter().filter_map(|r| r.errors.map(|e| (r.h, e))).collect();
        if pts.len() < 2 {
            return None;
        }
        Some([0, 1, 2].map(|k| {
            let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1[k].ln()).collect();
            least_squares_slope(&xs, &ys)
        }))
    }
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs the given schedule levels and measures errors against the reference at `t_eval`.
///
/// A level that blows up is recorded as a failure row; other errors abort the study.
pub fn convergence_study<F>(levels: &[usize], study: &StudyConfig, reference: &ReferenceGrid, scenario_for: F) -> Result<ErrorReport>
where
    F: Fn(f64) -> Scenario<f64>,
{
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let (h, dt_s) = refinement_schedule(level);
        let mut sc = scenario_for(h);
        sc.h = h;
        sc.output_times = vec![study.t_eval];
        let cfg = SchemeConfig::new(study.kind, study.beta, dt_s, study.ratio, study.t_eval);
        let sim = Simulation::new(&sc, cfg)?;
        let opts = RunOptions { profile_stride: 0, energy: false, divergence: true };
        let row = match sim.run(&opts) {
            Ok(res) => {
                let snap = res
                    .snapshot_at(study.t_eval)
                    .ok_or_else(|| FsiError::Config(format!("t_eval = {} is not on the coarse grid", study.t_eval)))?;
                let mut errors = [0.0; 3];
                for (k, f) in Field::ALL.into_iter().enumerate() {
                    errors[k] = reference.error(&sim.disc.mesh, &sim.disc.dofs, snap, f)?.value;
                }
                ErrorRow { level, h, dt_s, errors: Some(errors), failure: None, max_divergence: res.max_divergence() }
            }
            Err(e @ FsiError::BlowUp { .. }) => {
                ErrorRow { level, h, dt_s, errors: None, failure: Some(e.to_string()), max_divergence: f64::NAN }
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(ErrorReport { study: *study, rows })
}
