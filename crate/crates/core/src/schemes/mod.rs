//! Time marching for the coupled Stokes / thin-wall problem.
//!
//! Four schemes share one set of assembled forms:
//!
//! * `Implicit`: backward Euler on the monolithic problem.
//! * `Beta`: one wall step with the lagged traction `beta T^n`, then one fluid
//!   step with a Robin-type interface term.
//! * `MultirateBeta`: `r` wall substeps of size `dt_s` per fluid step of size
//!   `dt_f = r dt_s`. With `r = 1` it runs exactly the `Beta` code path.
//! * `RobinNeumann`: the fluid step first, Robin data taken from the previous
//!   wall velocity, then a Neumann wall step driven by the new traction.
//!
//! The interface traction `sigma_f n` is never differentiated from the fluid
//! fields. It lives as a load vector `T` on the wall unknowns and is updated by
//! `T <- beta T - (rho_s eps / dt_f) M^ (u_s - u~_s)` after each fluid step.

mod rigid;
mod run;
mod stepper;

pub use crate::params::PhysicalParams;
pub use rigid::RigidChannel;
pub use run::{run_simulation, RunOptions, Simulation, SimulationResult, StepRecord, Timings};
pub use stepper::{coupled_system, Discretization, Stepper};
pub use crate::fem::FormSet;

use std::fmt;
use std::str::FromStr;

use crate::error::{FsiError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Implicit,
    Beta,
    RobinNeumann,
    MultirateBeta,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Implicit => "implicit",
            SchemeKind::Beta => "beta",
            SchemeKind::RobinNeumann => "robin_neumann",
            SchemeKind::MultirateBeta => "multirate_beta",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = FsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "implicit" | "monolithic" => Ok(SchemeKind::Implicit),
            "beta" => Ok(SchemeKind::Beta),
            "robin_neumann" | "rn" => Ok(SchemeKind::RobinNeumann),
            "multirate_beta" | "multirate" => Ok(SchemeKind::MultirateBeta),
            other => Err(FsiError::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Scheme choice and time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig<T> {
    pub kind: SchemeKind,
    /// Splitting parameter in `[0, 1]`; the implicit and Robin–Neumann schemes ignore it.
    pub beta: T,
    /// Wall (fine) step.
    pub dt_s: T,
    /// Number of wall substeps per fluid step.
    pub ratio: usize,
    pub t_end: T,
}

impl<T: Scalar> SchemeConfig<T> {
    pub fn new(kind: SchemeKind, beta: T, dt_s: T, ratio: usize, t_end: T) -> Self {
        SchemeConfig { kind, beta, dt_s, ratio, t_end }
    }

    pub fn implicit(dt: T, t_end: T) -> Self {
        Self::new(SchemeKind::Implicit, T::one(), dt, 1, t_end)
    }

    pub fn beta(beta: T, dt: T, t_end: T) -> Self {
        Self::new(SchemeKind::Beta, beta, dt, 1, t_end)
    }

    pub fn multirate(beta: T, dt_s: T, ratio: usize, t_end: T) -> Self {
        Self::new(SchemeKind::MultirateBeta, beta, dt_s, ratio, t_end)
    }

    pub fn robin_neumann(dt: T, t_end: T) -> Self {
        Self::new(SchemeKind::RobinNeumann, T::one(), dt, 1, t_end)
    }

    /// Fluid (coarse) step `r dt_s`.
    pub fn dt_f(&self) -> T {
        T::from_usize_(self.ratio) * self.dt_s
    }

    /// Effective splitting parameter (1 for the schemes that do not use it).
    pub fn effective_beta(&self) -> T {
        match self.kind {
            SchemeKind::Beta | SchemeKind::MultirateBeta => self.beta,
            _ => T::one(),
        }
    }

    /// Number of coarse steps `N = t_end / dt_f`.
    pub fn num_steps(&self) -> Result<usize> {
        let ratio = self.t_end.to_f64_() / self.dt_f().to_f64_();
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
            return Err(FsiError::Config(format!(
                "t_end = {} is not an integer multiple of the fluid step {}",
                self.t_end,
                self.dt_f()
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratio == 0 {
            return Err(FsiError::Config("ratio must be at least 1".into()));
        }
        if self.ratio != 1 {
            match self.kind {
                SchemeKind::Implicit => return Err(FsiError::Config("implicit requires r=1".into())),
                SchemeKind::RobinNeumann => return Err(FsiError::Config("robin_neumann requires r=1".into())),
                SchemeKind::Beta => return Err(FsiError::Config("beta requires r=1 (use multirate_beta)".into())),
                SchemeKind::MultirateBeta => {}
            }
        }
        if !(self.beta >= T::zero() && self.beta <= T::one()) {
            return Err(FsiError::Config(format!("beta must lie in [0, 1] (got {})", self.beta)));
        }
        if !(self.dt_s > T::zero() && self.dt_s.is_finite()) {
            return Err(FsiError::Config(format!("dt_s must be positive (got {})", self.dt_s)));
        }
        if !(self.t_end >= T::zero()) {
            return Err(FsiError::Config(format!("t_end must be non-negative (got {})", self.t_end)));
        }
        self.num_steps().map(|_| ())
    }
}

/// Discrete unknowns of every scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct FsiState<T> {
    /// Free fluid velocity unknowns.
    pub u_f: Vec<T>,
    /// Pressure at mesh vertices.
    pub p_f: Vec<T>,
    /// Wall displacement (free wall unknowns).
    pub d: Vec<T>,
    /// Wall velocity at the last fluid step (equals the fluid trace).
    pub u_s: Vec<T>,
    /// Intermediate wall velocity from the wall step. For Robin–Neumann this is
    /// the wall velocity produced by the Neumann step.
    pub u_tilde: Vec<T>,
    /// Interface traction as a load vector on the wall unknowns.
    pub traction: Vec<T>,
    /// Wall substep counter `m`.
    pub substep: usize,
    /// Fluid step counter `k`.
    pub step: usize,
    pub time: T,
}

impl<T: Scalar> FsiState<T> {
    pub fn zeros(n_vel: usize, n_pres: usize, n_struct: usize) -> Self {
        let z = |n| vec![T::zero(); n];
        FsiState {
            u_f: z(n_vel),
            p_f: z(n_pres),
            d: z(n_struct),
            u_s: z(n_struct),
            u_tilde: z(n_struct),
            traction: z(n_struct),
            substep: 0,
            step: 0,
            time: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.u_f, &self.p_f, &self.d, &self.u_s, &self.u_tilde, &self.traction]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Fields at one instant in ordering-independent nodal layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub time: T,
    /// `[ux, uy]` per quadratic node, row-major over the `(2nx+1) x (2ny+1)` grid.
    pub velocity: Vec<T>,
    /// One value per mesh vertex, mesh order.
    pub pressure: Vec<T>,
    /// Wall displacement at the `2nx + 1` quadratic interface nodes.
    pub displacement: Vec<T>,
}
