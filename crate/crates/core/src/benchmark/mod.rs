//! The pressure-wave benchmark: a straight channel closed on top by an elastic wall,
//! driven by a half-cosine pressure pulse at the inlet.

mod reference;

use std::fmt;
use std::sync::Arc;

pub use reference::{generate_reference, generate_reference_for, load_or_generate, ReferenceRun, ReferenceSolution, REFERENCE_BUDGET, REFERENCE_MAGIC, REFERENCE_VERSION};

use crate::error::{FsiError, Result};
use crate::params::PhysicalParams;
use crate::scalar::Scalar;

/// Channel length (cm).
pub const LENGTH: f64 = 6.0;
/// Channel height (cm).
pub const HEIGHT: f64 = 0.5;
pub const RHO_F: f64 = 1.0;
pub const RHO_S: f64 = 1.1;
pub const MU: f64 = 0.035;
/// Wall thickness (cm).
pub const THICKNESS: f64 = 0.1;
pub const YOUNG: f64 = 0.75e6;
pub const POISSON: f64 = 0.5;
/// Pulse amplitude (dyn/cm^2).
pub const P_MAX: f64 = 2.0e4;
/// Pulse duration (s).
pub const T_STAR: f64 = 5.0e-3;
/// Times at which fields are reported.
pub const OUTPUT_TIMES: [f64; 3] = [0.005, 0.010, 0.015];

/// Wall coefficients `(c0, c1)` of the generalized string operator `-c1 d'' + c0 d`.
///
/// `c1 = E eps / (2 (1 + nu))`, `c0 = E eps / (R^2 (1 - nu^2))`.
pub fn derive_coefficients<T: Scalar>(young: T, poisson: T, thickness: T, radius: T) -> Result<(T, T)> {
    if !(poisson >= T::zero() && poisson < T::one()) {
        return Err(FsiError::Config(format!("Poisson ratio must lie in [0, 1) (got {poisson})")));
    }
    if !(young > T::zero() && thickness > T::zero() && radius > T::zero()) {
        return Err(FsiError::Config("E, thickness and radius must be positive".into()));
    }
    let one = T::one();
    let c1 = young * thickness / (T::lit(2.0) * (one + poisson));
    let c0 = young * thickness / (radius * radius * (one - poisson * poisson));
    Ok((c0, c1))
}

/// Material data of the benchmark.
pub fn benchmark_params<T: Scalar>() -> PhysicalParams<T> {
    PhysicalParams::from_material(
        T::lit(RHO_F),
        T::lit(RHO_S),
        T::lit(MU),
        T::lit(THICKNESS),
        T::lit(YOUNG),
        T::lit(POISSON),
        T::lit(HEIGHT),
    )
    .expect("benchmark parameters are valid")
}

/// Half-cosine pulse `P(t) = P_max (1 - cos(2 pi t / T*)) / 2` on `[0, T*]`, zero afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InletPressure<T> {
    pub p_max: T,
    pub duration: T,
}

impl<T: Scalar> InletPressure<T> {
    pub fn at(&self, t: T) -> T {
        inlet_pressure(t, self.p_max, self.duration)
    }
}

pub fn inlet_pressure<T: Scalar>(t: T, p_max: T, duration: T) -> T {
    if t < T::zero() || t > duration {
        return T::zero();
    }
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    p_max * (T::one() - (two_pi * t / duration).cos()) / T::lit(2.0)
}

/// Boundary condition applied on one tagged part of the channel boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Normal traction `-P(t) n` from the inlet pressure law.
    PressureTraction,
    ZeroTraction,
    NoSlip,
    /// Velocity continuity with the wall and the wall equation.
    Coupled,
}

/// Condition on each of the four boundary parts; every part is covered exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryAssignment {
    pub inlet: BoundaryCondition,
    pub outlet: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub interface: BoundaryCondition,
}

impl Default for BoundaryAssignment {
    fn default() -> Self {
        BoundaryAssignment {
            inlet: BoundaryCondition::PressureTraction,
            outlet: BoundaryCondition::ZeroTraction,
            bottom: BoundaryCondition::NoSlip,
            interface: BoundaryCondition::Coupled,
        }
    }
}

pub type VelocityField<T> = Arc<dyn Fn(T, T) -> [T; 2] + Send + Sync>;
pub type WallField<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Initial fluid velocity and wall displacement; `None` means zero.
#[derive(Clone, Default)]
pub struct InitialData<T> {
    pub velocity: Option<VelocityField<T>>,
    pub displacement: Option<WallField<T>>,
}

impl<T> InitialData<T> {
    pub fn is_zero(&self) -> bool {
        self.velocity.is_none() && self.displacement.is_none()
    }
}

impl<T> fmt::Debug for InitialData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("velocity", &self.velocity.as_ref().map(|_| "<field>"))
            .field("displacement", &self.displacement.as_ref().map(|_| "<field>"))
            .finish()
    }
}

/// Everything that defines a run except the time-marching scheme.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub length: T,
    pub height: T,
    pub h: T,
    pub params: PhysicalParams<T>,
    pub inlet: InletPressure<T>,
    pub boundary: BoundaryAssignment,
    pub initial: InitialData<T>,
    pub output_times: Vec<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.inlet.duration > T::zero()) {
            return Err(FsiError::Config(format!("pulse duration must be positive (got {})", self.inlet.duration)));
        }
        if !(self.inlet.p_max >= T::zero() && self.inlet.p_max.is_finite()) {
            return Err(FsiError::Config(format!("p_max must be finite and non-negative (got {})", self.inlet.p_max)));
        }
        let b = self.boundary;
        let ok = matches!(b.inlet, BoundaryCondition::PressureTraction | BoundaryCondition::ZeroTraction)
            && b.outlet == BoundaryCondition::ZeroTraction
            && b.bottom == BoundaryCondition::NoSlip
            && b.interface == BoundaryCondition::Coupled;
        if !ok {
            return Err(FsiError::Config(format!("unsupported boundary assignment {b:?}")));
        }
        Ok(())
    }

    /// Same scenario with the inlet switched off.
    pub fn unforced(mut self) -> Self {
        self.inlet.p_max = T::zero();
        self
    }

    /// Inlet pressure at time `t` (zero for a traction-free inlet).
    pub fn inlet_pressure(&self, t: T) -> T {
        match self.boundary.inlet {
            BoundaryCondition::PressureTraction => self.inlet.at(t),
            _ => T::zero(),
        }
    }
}

/// The benchmark at mesh size `h`.
pub fn pressure_wave_scenario<T: Scalar>(h: T) -> Scenario<T> {
    Scenario {
        length: T::lit(LENGTH),
        height: T::lit(HEIGHT),
        h,
        params: benchmark_params(),
        inlet: InletPressure { p_max: T::lit(P_MAX), duration: T::lit(T_STAR) },
        boundary: BoundaryAssignment::default(),
        initial: InitialData::default(),
        output_times: OUTPUT_TIMES.iter().map(|&t| T::lit(t)).collect(),
    }
}
