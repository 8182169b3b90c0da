//! L2 errors between fields on nested meshes.

use crate::benchmark::ReferenceSolution;
use crate::error::{FsiError, Result};
use crate::fem::{assemble_wall_full, p2_segment_values, p2_values, segment_rule, triangle_rule, FieldEvaluator, FsiDofMap, TriangleGeometry};
use crate::mesh::{ChannelMesh, InterfaceMesh};
use crate::scalar::Scalar;
use crate::schemes::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Velocity,
    Pressure,
    Displacement,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Velocity, Field::Pressure, Field::Displacement];

    pub fn name(self) -> &'static str {
        match self {
            Field::Velocity => "u_f",
            Field::Pressure => "p_f",
            Field::Displacement => "d",
        }
    }
}

/// A nodal snapshot together with the mesh and spaces it lives on.
#[derive(Debug, Clone, Copy)]
pub struct FieldSource<'a, T> {
    pub mesh: &'a ChannelMesh<T>,
    pub dofs: &'a FsiDofMap,
    pub snapshot: &'a Snapshot<T>,
}

/// Error value; `relative` is false when the reference norm vanished and the absolute error is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorValue<T> {
    pub value: T,
    pub relative: bool,
}

fn check_nested<T: Scalar>(coarse: &ChannelMesh<T>, fine: &ChannelMesh<T>) -> Result<()> {
    let same = |a: T, b: T| (a - b).abs() <= T::lit(1e-12) * b.abs().max(T::one());
    if !same(coarse.length, fine.length) || !same(coarse.height, fine.height) {
        return Err(FsiError::NotNested(format!(
            "domains differ ({} x {} vs {} x {})",
            coarse.length, coarse.height, fine.length, fine.height
        )));
    }
    if fine.nx % coarse.nx != 0 || fine.ny % coarse.ny != 0 || fine.nx / coarse.nx != fine.ny / coarse.ny {
        return Err(FsiError::NotNested(format!(
            "{} x {} cells do not refine {} x {} uniformly",
            fine.nx, fine.ny, coarse.nx, coarse.ny
        )));
    }
    Ok(())
}

/// `||sol - ref||_L2 / ||ref||_L2`, integrated on the reference mesh.
///
/// The solution mesh must coarsen the reference mesh; on every reference
/// element the solution is then polynomial and the quadrature is exact.
pub fn relative_error<T: Scalar>(sol: FieldSource<T>, reference: FieldSource<T>, field: Field) -> Result<ErrorValue<T>> {
    check_nested(sol.mesh, reference.mesh)?;
    let ev = FieldEvaluator::new(sol.mesh, sol.dofs);
    let (mut err2, mut ref2) = (T::zero(), T::zero());
    let (rm, rd, rs) = (reference.mesh, reference.dofs, reference.snapshot);
    match field {
        Field::Velocity | Field::Pressure => {
            let rule = triangle_rule::<T>();
            for t in 0..rm.num_triangles() {
                let tri = rm.triangles[t];
                let geo = TriangleGeometry::new(tri.map(|v| rm.nodes[v]));
                let nodes = rd.triangle_p2_nodes(rm, t);
                for (l, w) in rule.iter() {
                    let wa = *w * geo.area;
                    let [x, y] = geo.point(*l);
                    if field == Field::Velocity {
                        let phi = p2_values(*l);
                        let mut r = [T::zero(); 2];
                        for (k, &q) in nodes.iter().enumerate() {
                            r[0] += phi[k] * rs.velocity[2 * q];
                            r[1] += phi[k] * rs.velocity[2 * q + 1];
                        }
                        let s = ev.velocity(&sol.snapshot.velocity, x, y)?;
                        err2 += wa * ((s[0] - r[0]).powi(2) + (s[1] - r[1]).powi(2));
                        ref2 += wa * (r[0] * r[0] + r[1] * r[1]);
                    } else {
                        let r = (0..3).fold(T::zero(), |a, k| a + l[k] * rs.pressure[tri[k]]);
                        let s = ev.linear(&sol.snapshot.pressure, x, y)?;
                        err2 += wa * (s - r).powi(2);
                        ref2 += wa * r * r;
                    }
                }
            }
        }
        Field::Displacement => {
            let rule = segment_rule::<T>();
            for seg in 0..rm.nx {
                let x0 = rm.nodes[rm.node_id(seg, rm.ny)][0];
                let x1 = rm.nodes[rm.node_id(seg + 1, rm.ny)][0];
                let len = x1 - x0;
                for (s, w) in rule {
                    let n = p2_segment_values(s);
                    let r = (0..3).fold(T::zero(), |a, k| a + n[k] * rs.displacement[2 * seg + k]);
                    let v = ev.wall(&sol.snapshot.displacement, x0 + s * len)?;
                    err2 += w * len * (v - r).powi(2);
                    ref2 += w * len * r * r;
                }
            }
        }
    }
    let err = err2.sqrt();
    if ref2 > T::zero() {
        Ok(ErrorValue { value: err / ref2.sqrt(), relative: true })
    } else {
        Ok(ErrorValue { value: err, relative: false })
    }
}

/// A loaded reference with its mesh and spaces, for repeated error evaluations.
#[derive(Debug, Clone)]
pub struct ReferenceGrid<'a> {
    pub solution: &'a ReferenceSolution,
    pub mesh: ChannelMesh<f64>,
    pub dofs: FsiDofMap,
}

impl<'a> ReferenceGrid<'a> {
    pub fn new(solution: &'a ReferenceSolution) -> Result<Self> {
        Ok(ReferenceGrid { solution, mesh: solution.mesh()?, dofs: solution.dofs()? })
    }

    /// Error of a snapshot against the reference frame at the same time.
    pub fn error(&self, mesh: &ChannelMesh<f64>, dofs: &FsiDofMap, snapshot: &Snapshot<f64>, field: Field) -> Result<ErrorValue<f64>> {
        let frame = self
            .solution
            .frame_at(snapshot.time)
            .ok_or_else(|| FsiError::Format(format!("reference has no frame at t = {}", snapshot.time)))?;
        relative_error(
            FieldSource { mesh, dofs, snapshot },
            FieldSource { mesh: &self.mesh, dofs: &self.dofs, snapshot: frame },
            field,
        )
    }
}

/// Relative L2(interface) and max-norm differences of two wall profiles on the same mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDifference<T> {
    pub l2: T,
    pub linf: T,
}

/// Difference of `a` from `reference` (nodal wall arrays), relative to the reference norms.
/// A vanishing reference norm yields the absolute difference.
pub fn profile_difference<T: Scalar>(iface: &InterfaceMesh<T>, a: &[T], reference: &[T]) -> ProfileDifference<T> {
    let (m, _) = assemble_wall_full(iface);
    let e: Vec<T> = a.iter().zip(reference).map(|(x, y)| *x - *y).collect();
    let rel = |num: T, den: T| if den > T::zero() { num / den } else { num };
    let l2 = rel(m.bilinear(&e, &e).max(T::zero()).sqrt(), m.bilinear(reference, reference).max(T::zero()).sqrt());
    let linf = rel(crate::scalar::norm_inf(&e), crate::scalar::norm_inf(reference));
    ProfileDifference { l2, linf }
}
