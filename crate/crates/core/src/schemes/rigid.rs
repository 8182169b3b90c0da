//! Stokes flow in the channel with a rigid no-slip top wall.

use crate::error::Result;
use crate::fem::{assemble_boundary_traction_full, assemble_fluid_forms, FsiDofMap};
use crate::mesh::{BoundaryTag, ChannelMesh};
use crate::params::PhysicalParams;
use crate::scalar::Scalar;
use crate::skyline::{LdltFactor, SkylineMatrix};
use crate::sparse::Csr;

/// Rigid-wall channel: fluid forms on the no-slip spaces.
#[derive(Debug, Clone)]
pub struct RigidChannel<T> {
    pub mesh: ChannelMesh<T>,
    pub dofs: FsiDofMap,
    pub fluid_mass: Csr<T>,
    pub viscous: Csr<T>,
    pub divergence: Csr<T>,
    /// Unit inlet load on free velocities.
    pub inlet_load: Vec<T>,
}

impl<T: Scalar> RigidChannel<T> {
    pub fn new(length: T, height: T, h: T, params: &PhysicalParams<T>) -> Result<Self> {
        params.validate()?;
        let mesh = ChannelMesh::build(length, height, h)?;
        let dofs = FsiDofMap::rigid(&mesh);
        let (fluid_mass, viscous, divergence, inlet_load) = assemble_fluid_forms(&mesh, &dofs, params);
        Ok(RigidChannel { mesh, dofs, fluid_mass, viscous, divergence, inlet_load })
    }

    /// Load `int f . v` on one boundary part, restricted to free velocities.
    pub fn traction_load(&self, tag: BoundaryTag, f: impl Fn(T, T) -> [T; 2]) -> Vec<T> {
        let full = assemble_boundary_traction_full(&self.mesh, &self.dofs, tag, f);
        self.dofs.vel_nodal.iter().map(|&k| full[k]).collect()
    }

    fn factor(&self, inv_dt: T) -> Result<LdltFactor<T>> {
        let sv = &self.dofs.sys_vel;
        let sp = &self.dofs.sys_pres;
        SkylineMatrix::assemble(self.dofs.num_system(), |e| {
            if inv_dt != T::zero() {
                for (r, c, v) in self.fluid_mass.iter() {
                    if sv[r] >= sv[c] {
                        e(sv[r], sv[c], inv_dt * v);
                    }
                }
            }
            for (r, c, v) in self.viscous.iter() {
                if sv[r] >= sv[c] {
                    e(sv[r], sv[c], v);
                }
            }
            for (p, u, v) in self.divergence.iter() {
                let (a, b) = (sp[p], sv[u]);
                e(a.max(b), a.min(b), v);
            }
        })
        .factor()
    }

    fn solve_with(&self, f: &LdltFactor<T>, load: &[T]) -> (Vec<T>, Vec<T>) {
        let mut x = vec![T::zero(); self.dofs.num_system()];
        for (k, &v) in load.iter().enumerate() {
            x[self.dofs.sys_vel[k]] = v;
        }
        f.solve_in_place(&mut x);
        let u = self.dofs.sys_vel.iter().map(|&i| x[i]).collect();
        let p = self.dofs.sys_pres.iter().map(|&i| x[i]).collect();
        (u, p)
    }

    /// Steady Stokes solve `A u + B^T p = load, B u = 0`; returns free velocities and vertex pressures.
    pub fn solve_steady(&self, load: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let f = self.factor(T::zero())?;
        Ok(self.solve_with(&f, load))
    }

    /// Backward Euler from rest with a constant load until the velocity update
    /// falls below `tol` (relative, max norm) or `max_steps` is reached.
    /// Returns velocities, pressures and the number of steps taken.
    pub fn march_to_steady(&self, load: &[T], dt: T, max_steps: usize, tol: T) -> Result<(Vec<T>, Vec<T>, usize)> {
        let inv = T::one() / dt;
        let f = self.factor(inv)?;
        let mut u = vec![T::zero(); self.dofs.num_vel()];
        let mut p = vec![T::zero(); self.dofs.num_pres()];
        for step in 1..=max_steps {
            let mut rhs = load.to_vec();
            self.fluid_mass.mul_vec_add(inv, &u, &mut rhs);
            let (un, pn) = self.solve_with(&f, &rhs);
            let change = un.iter().zip(&u).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
            let scale = crate::scalar::norm_inf(&un).max(T::min_positive_value());
            u = un;
            p = pn;
            if change <= tol * scale {
                return Ok((u, p, step));
            }
        }
        Ok((u, p, max_steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::benchmark_params;
    use crate::fem::FieldEvaluator;

    #[test]
    fn poiseuille_is_reproduced() {
        let (l, r, p0) = (6.0, 0.5, 100.0);
        let params = benchmark_params::<f64>();
        let mu = params.mu;
        let ch = RigidChannel::new(l, r, 0.25, &params).unwrap();
        let du = |y: f64| p0 * (r - 2.0 * y) / (2.0 * mu * l);
        let mut load: Vec<f64> = ch.inlet_load.iter().map(|v| p0 * v).collect();
        for (k, v) in ch.traction_load(BoundaryTag::Inlet, |_, y| [0.0, -mu * du(y)]).iter().enumerate() {
            load[k] += v;
        }
        for (k, v) in ch.traction_load(BoundaryTag::Outlet, |_, y| [0.0, mu * du(y)]).iter().enumerate() {
            load[k] += v;
        }
        let (u, p) = ch.solve_steady(&load).unwrap();
        let nodal = ch.dofs.velocity_to_nodal(&u);
        let ev = FieldEvaluator::new(&ch.mesh, &ch.dofs);
        let v = ev.velocity(&nodal, 3.0, 0.25).unwrap();
        assert!((v[0] - 100.0 * 0.0625 / (2.0 * 0.035 * 6.0)).abs() < 1e-8 * v[0]);
        assert!(v[1].abs() < 1e-8);
        let pm = ev.linear(&p, 3.0, 0.1).unwrap();
        assert!((pm - p0 * 0.5).abs() < 1e-8 * p0);
    }
}
