//! Discrete energy of the coupled state at coarse time levels.

use crate::fem::{FormSet, InterfaceRiesz};
use crate::scalar::Scalar;
use crate::schemes::{FsiState, SchemeConfig};

/// Energy terms at one coarse level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow<T> {
    pub step: usize,
    pub time: T,
    /// `rho_f/2 ||u_f||^2`.
    pub kinetic_fluid: T,
    /// `rho_s eps/2 ||u_s||^2` on the interface.
    pub kinetic_wall: T,
    /// `1/2 a_s(d, d)`.
    pub elastic: T,
    /// `dt_f^2 / (2 rho_s eps) ||T||^2` with the L2(interface) norm of the traction.
    pub traction: T,
    pub total: T,
}

/// Holds the interface mass factorization needed for the traction term.
#[derive(Debug, Clone)]
pub struct EnergyMonitor<T> {
    riesz: InterfaceRiesz<T>,
}

impl<T: Scalar> EnergyMonitor<T> {
    pub fn new(forms: &FormSet<T>) -> Self {
        EnergyMonitor { riesz: InterfaceRiesz::new(&forms.iface_mass) }
    }

    pub fn energy(&self, s: &FsiState<T>, forms: &FormSet<T>, cfg: &SchemeConfig<T>) -> EnergyRow<T> {
        let half = T::lit(0.5);
        let kinetic_fluid = half * forms.fluid_mass.bilinear(&s.u_f, &s.u_f);
        let kinetic_wall = half * forms.wall_mass.bilinear(&s.u_s, &s.u_s);
        let elastic = half * forms.wall_stiffness.bilinear(&s.d, &s.d);
        let dt = cfg.dt_f();
        let tn = self.riesz.norm(&s.traction);
        let traction = dt * dt / (T::lit(2.0) * forms.params.wall_inertia()) * tn * tn;
        EnergyRow {
            step: s.step,
            time: s.time,
            kinetic_fluid,
            kinetic_wall,
            elastic,
            traction,
            total: kinetic_fluid + kinetic_wall + elastic + traction,
        }
    }
}

/// Energy of one state (factors the interface mass on every call; use [`EnergyMonitor`] in loops).
pub fn discrete_energy<T: Scalar>(s: &FsiState<T>, forms: &FormSet<T>, cfg: &SchemeConfig<T>) -> EnergyRow<T> {
    EnergyMonitor::new(forms).energy(s, forms, cfg)
}

/// Energy per coarse step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace<T> {
    pub rows: Vec<EnergyRow<T>>,
}

/// Outcome of a monotonicity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityCheck<T> {
    /// Steps `k -> k+1` examined.
    pub steps_checked: usize,
    /// Largest `E^{k+1} / E^k - 1` seen (0 when every step decreased or stayed at zero).
    pub worst_growth: T,
    /// First step `k` with `E^{k+1} > E^k (1 + tol)`.
    pub first_violation: Option<usize>,
}

impl<T> MonotonicityCheck<T> {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

impl<T: Scalar> EnergyTrace<T> {
    /// Checks `E^{k+1} <= E^k (1 + rel_tol)` for every pair with `t_k >= from_time`.
    pub fn check_non_increasing(&self, rel_tol: T, from_time: T) -> MonotonicityCheck<T> {
        let mut out = MonotonicityCheck { steps_checked: 0, worst_growth: T::zero(), first_violation: None };
        for w in self.rows.windows(2) {
            if w[0].time < from_time {
                continue;
            }
            out.steps_checked += 1;
            let (e0, e1) = (w[0].total, w[1].total);
            if e0 > T::zero() {
                out.worst_growth = out.worst_growth.max(e1 / e0 - T::one());
            } else if e1 > T::zero() {
                out.worst_growth = T::infinity();
            }
            if e1 > e0 * (T::one() + rel_tol) && out.first_violation.is_none() {
                out.first_violation = Some(w[0].step);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::pressure_wave_scenario;
    use crate::schemes::Discretization;

    #[test]
    fn terms_of_simple_states() {
        let mut sc = pressure_wave_scenario(0.25);
        sc.length = 1.0;
        let disc = Discretization::new(&sc).unwrap();
        let cfg = SchemeConfig::beta(1.0, 1e-4, 1e-3);
        let mut s = disc.init_state(&sc).unwrap();
        let e = discrete_energy(&s, &disc.forms, &cfg);
        assert_eq!(e.total, 0.0);
        s.d = (0..s.d.len()).map(|k| 1e-3 * (k as f64 + 1.0)).collect();
        let e = discrete_energy(&s, &disc.forms, &cfg);
        assert_eq!(e.kinetic_fluid + e.kinetic_wall + e.traction, 0.0);
        assert!((e.total - 0.5 * disc.forms.wall_stiffness.bilinear(&s.d, &s.d)).abs() < 1e-15 * e.total);
    }

    #[test]
    fn monotonicity_check() {
        let row = |k: usize, e: f64| EnergyRow {
            step: k,
            time: k as f64,
            kinetic_fluid: e,
            kinetic_wall: 0.0,
            elastic: 0.0,
            traction: 0.0,
            total: e,
        };
        let t = EnergyTrace { rows: vec![row(0, 1.0), row(1, 2.0), row(2, 1.5), row(3, 1.5)] };
        let c = t.check_non_increasing(1e-8, 0.0);
        assert_eq!(c.first_violation, Some(0));
        assert_eq!(c.steps_checked, 3);
        let c = t.check_non_increasing(1e-8, 1.0);
        assert!(c.passed());
        assert_eq!(c.steps_checked, 2);
    }
}
