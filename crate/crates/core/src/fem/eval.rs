//! Point evaluation of finite-element fields stored as nodal arrays.

use super::dofs::FsiDofMap;
use super::element::{p2_segment_values, p2_values, TriangleGeometry};
use crate::error::{FsiError, Result};
use crate::mesh::ChannelMesh;
use crate::scalar::Scalar;

/// Fluid/wall field evaluator bound to one mesh.
#[derive(Debug, Clone, Copy)]
pub struct FieldEvaluator<'a, T> {
    pub mesh: &'a ChannelMesh<T>,
    pub dofs: &'a FsiDofMap,
}

impl<'a, T: Scalar> FieldEvaluator<'a, T> {
    pub fn new(mesh: &'a ChannelMesh<T>, dofs: &'a FsiDofMap) -> Self {
        FieldEvaluator { mesh, dofs }
    }

    fn tolerance(&self) -> T {
        T::lit(1e-12) * self.mesh.length.max(self.mesh.height).max(T::one())
    }

    fn locate(&self, x: T, y: T) -> Result<(usize, [T; 3])> {
        let (_, _, t) = self
            .mesh
            .locate(x, y, self.tolerance())
            .ok_or(FsiError::OutsideDomain { x: x.to_f64_(), y: y.to_f64_() })?;
        let geo = TriangleGeometry::new(self.mesh.triangles[t].map(|v| self.mesh.nodes[v]));
        Ok((t, geo.barycentric(x, y)))
    }

    /// Velocity from a nodal array (`[ux, uy]` per quadratic node).
    pub fn velocity(&self, nodal: &[T], x: T, y: T) -> Result<[T; 2]> {
        let (t, l) = self.locate(x, y)?;
        let nodes = self.dofs.triangle_p2_nodes(self.mesh, t);
        let phi = p2_values(l);
        let mut v = [T::zero(); 2];
        for (k, &q) in nodes.iter().enumerate() {
            v[0] += phi[k] * nodal[2 * q];
            v[1] += phi[k] * nodal[2 * q + 1];
        }
        Ok(v)
    }

    /// Scalar quadratic field (one value per quadratic node).
    pub fn quadratic(&self, nodal: &[T], x: T, y: T) -> Result<T> {
        let (t, l) = self.locate(x, y)?;
        let nodes = self.dofs.triangle_p2_nodes(self.mesh, t);
        let phi = p2_values(l);
        Ok(nodes.iter().zip(phi).fold(T::zero(), |s, (&q, p)| s + p * nodal[q]))
    }

    /// Linear field on mesh vertices (pressure).
    pub fn linear(&self, vertex_values: &[T], x: T, y: T) -> Result<T> {
        let (t, l) = self.locate(x, y)?;
        let tri = self.mesh.triangles[t];
        Ok((0..3).fold(T::zero(), |s, k| s + l[k] * vertex_values[tri[k]]))
    }

    /// Wall field given at the `2nx + 1` quadratic interface nodes.
    pub fn wall(&self, nodal: &[T], x: T) -> Result<T> {
        let tol = self.tolerance();
        if x < -tol || x > self.mesh.length + tol {
            return Err(FsiError::OutsideDomain { x: x.to_f64_(), y: self.mesh.height.to_f64_() });
        }
        let seg = (x / self.mesh.h).floor().max(T::zero()).to_usize().unwrap_or(0).min(self.mesh.nx - 1);
        let x0 = T::from_usize_(seg) * self.mesh.h;
        let s = (x - x0) / self.mesh.h;
        let n = p2_segment_values(s);
        Ok((0..3).fold(T::zero(), |acc, k| acc + n[k] * nodal[2 * seg + k]))
    }

    /// Evaluates a velocity field at many points.
    pub fn velocity_at(&self, nodal: &[T], points: &[[T; 2]]) -> Result<Vec<[T; 2]>> {
        points.iter().map(|p| self.velocity(nodal, p[0], p[1])).collect()
    }
}

/// Interpolates `f` at the quadratic nodes (nodal velocity layout).
pub fn interpolate_velocity<T: Scalar>(mesh: &ChannelMesh<T>, dofs: &FsiDofMap, f: impl Fn(T, T) -> [T; 2]) -> Vec<T> {
    let mut u = vec![T::zero(); 2 * dofs.num_p2_nodes()];
    for q in 0..dofs.num_p2_nodes() {
        let [x, y] = dofs.p2_coords(mesh, q);
        let v = f(x, y);
        u[2 * q] = v[0];
        u[2 * q + 1] = v[1];
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::InterfaceMesh;

    fn setup() -> (ChannelMesh<f64>, FsiDofMap) {
        let m = ChannelMesh::build(1.0, 0.5, 0.125).unwrap();
        let d = FsiDofMap::build(&m, &InterfaceMesh::extract(&m)).unwrap();
        (m, d)
    }

    #[test]
    fn reproduces_linear_and_quadratic() {
        let (m, d) = setup();
        let ev = FieldEvaluator::new(&m, &d);
        let u = interpolate_velocity(&m, &d, |x, y| [x, x * y]);
        for &(x, y) in &[(0.55, 0.23), (0.0, 0.0), (1.0, 0.5), (0.3, 0.4999)] {
            let v = ev.velocity(&u, x, y).unwrap();
            assert!((v[0] - x).abs() < 1e-12);
            assert!((v[1] - x * y).abs() < 1e-12);
        }
        let v = ev.velocity(&u, 0.55, 0.23).unwrap();
        assert!((v[1] - 0.1265).abs() < 1e-12);
    }

    #[test]
    fn nodal_values_returned_at_nodes() {
        let (m, d) = setup();
        let ev = FieldEvaluator::new(&m, &d);
        let u: Vec<f64> = (0..2 * d.num_p2_nodes()).map(|k| (k as f64).sin()).collect();
        for q in [0, 7, 40, d.num_p2_nodes() - 1] {
            let [x, y] = d.p2_coords(&m, q);
            let v = ev.velocity(&u, x, y).unwrap();
            assert!((v[0] - u[2 * q]).abs() < 1e-12 && (v[1] - u[2 * q + 1]).abs() < 1e-12);
        }
        let p: Vec<f64> = (0..m.num_nodes()).map(|k| k as f64).collect();
        let [x, y] = m.nodes[11];
        assert!((ev.linear(&p, x, y).unwrap() - 11.0).abs() < 1e-12);
    }

    #[test]
    fn wall_field_reproduces_quadratic() {
        let (m, d) = setup();
        let ev = FieldEvaluator::new(&m, &d);
        let nodal: Vec<f64> = (0..d.p2x).map(|i| {
            let x = i as f64 * 0.0625;
            x * (1.0 - x)
        }).collect();
        for x in [0.0, 0.1, 0.33, 1.0] {
            assert!((ev.wall(&nodal, x).unwrap() - x * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_point_named() {
        let (m, d) = setup();
        let ev = FieldEvaluator::new(&m, &d);
        let u = vec![0.0; 2 * d.num_p2_nodes()];
        let err = ev.velocity(&u, 1.5, 0.2).unwrap_err();
        assert!(err.to_string().contains("(1.5, 0.2)"));
        assert!(ev.velocity(&u, 1.0 + 1e-14, 0.2).is_ok());
    }
}
