//! Discrete spaces, assembled forms and field evaluation.

mod assemble;
mod dofs;
mod element;
mod eval;

pub use assemble::{
    assemble_boundary_traction_full, assemble_fluid_forms, assemble_fluid_full, assemble_inlet_load_full,
    assemble_structure_forms, assemble_wall_full, FluidMatrices, FormSet,
};
pub use dofs::FsiDofMap;
pub use element::{p2_gradients, p2_segment_values, p2_values, segment_matrices, segment_rule, triangle_rule, TriangleGeometry};
pub use eval::{interpolate_velocity, FieldEvaluator};

use crate::scalar::Scalar;
use crate::skyline::{LdltFactor, SkylineMatrix};
use crate::sparse::Csr;

/// Factorization of the unweighted interface mass, for Riesz-norm evaluations.
#[derive(Debug, Clone)]
pub struct InterfaceRiesz<T> {
    factor: LdltFactor<T>,
}

impl<T: Scalar> InterfaceRiesz<T> {
    pub fn new(iface_mass: &Csr<T>) -> Self {
        let n = iface_mass.nrows;
        let factor = SkylineMatrix::assemble(n, |e| {
            for (r, c, v) in iface_mass.iter() {
                if r >= c {
                    e(r, c, v);
                }
            }
        })
        .factor()
        .expect("interface mass matrix is positive definite");
        InterfaceRiesz { factor }
    }

    /// `sqrt(T^T M^-1 T)`: the L2(interface) norm of the function whose load vector is `load`.
    pub fn norm(&self, load: &[T]) -> T {
        let x = self.factor.solve(load);
        crate::scalar::dot(load, &x).max(T::zero()).sqrt()
    }
}

/// L2(interface) norm of the function represented by an interface load vector.
pub fn riesz_interface_norm<T: Scalar>(load: &[T], forms: &FormSet<T>) -> T {
    InterfaceRiesz::new(&forms.iface_mass).norm(load)
}
