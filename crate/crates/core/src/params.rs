use crate::error::{FsiError, Result};
use crate::scalar::Scalar;

/// Material data in CGS units (cm, g, s, dyn).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    /// Fluid density (g/cm^3).
    pub rho_f: T,
    /// Wall density (g/cm^3).
    pub rho_s: T,
    /// Dynamic viscosity (poise).
    pub mu: T,
    /// Wall thickness (cm).
    pub thickness: T,
    /// Young modulus (dyn/cm^2).
    pub young: T,
    /// Poisson ratio.
    pub poisson: T,
    /// Zeroth-order (spring) coefficient of the wall operator.
    pub c0: T,
    /// Tension coefficient of the wall operator.
    pub c1: T,
}

impl<T: Scalar> PhysicalParams<T> {
    /// Wall coefficients derived from `(E, nu, thickness, radius)`.
    pub fn from_material(rho_f: T, rho_s: T, mu: T, thickness: T, young: T, poisson: T, radius: T) -> Result<Self> {
        let (c0, c1) = crate::benchmark::derive_coefficients(young, poisson, thickness, radius)?;
        let p = PhysicalParams { rho_f, rho_s, mu, thickness, young, poisson, c0, c1 };
        p.validate()?;
        Ok(p)
    }

    /// Wall mass per unit length, `rho_s * thickness`.
    pub fn wall_inertia(&self) -> T {
        self.rho_s * self.thickness
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho_f", self.rho_f),
            ("rho_s", self.rho_s),
            ("mu", self.mu),
            ("thickness", self.thickness),
            ("young", self.young),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(FsiError::Config(format!("{name} must be positive and finite (got {v})")));
            }
        }
        if !(self.poisson >= T::zero() && self.poisson <= T::lit(0.5)) {
            return Err(FsiError::Config(format!("poisson must lie in [0, 0.5] (got {})", self.poisson)));
        }
        if !(self.c0 >= T::zero() && self.c1 >= T::zero() && self.c0.is_finite() && self.c1.is_finite()) {
            return Err(FsiError::Config(format!(
                "wall coefficients must be non-negative (c0 = {}, c1 = {})",
                self.c0, self.c1
            )));
        }
        Ok(())
    }
}
