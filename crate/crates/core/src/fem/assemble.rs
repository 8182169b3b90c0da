//! Global matrices and load vectors.

use super::dofs::FsiDofMap;
use super::element::{p2_gradients, p2_segment_values, p2_values, segment_matrices, segment_rule, triangle_rule, TriangleGeometry};
use crate::mesh::{BoundaryTag, ChannelMesh, InterfaceMesh};
use crate::params::PhysicalParams;
use crate::sparse::{Csr, Triplets};
use crate::scalar::Scalar;

/// Fluid matrices over every nodal velocity component (no boundary conditions).
#[derive(Debug, Clone)]
pub struct FluidMatrices<T> {
    /// Unweighted velocity mass, `2 n_p2` square.
    pub mass: Csr<T>,
    /// `2 mu (eps(u), eps(v))`.
    pub visc: Csr<T>,
    /// `b(u, q) = -(q, div u)`, vertices by velocity components.
    pub div: Csr<T>,
}

/// Assembles the Taylor–Hood fluid forms over all nodal unknowns.
pub fn assemble_fluid_full<T: Scalar>(mesh: &ChannelMesh<T>, dofs: &FsiDofMap, mu: T) -> FluidMatrices<T> {
    let nv = 2 * dofs.num_p2_nodes();
    let np = dofs.num_vertices();
    let nt = mesh.num_triangles();
    let mut mass = Triplets::with_capacity(nv, nv, nt * 72);
    let mut visc = Triplets::with_capacity(nv, nv, nt * 144);
    let mut div = Triplets::with_capacity(np, nv, nt * 36);
    let rule = triangle_rule::<T>();
    let two = T::lit(2.0);
    for t in 0..nt {
        let tri = mesh.triangles[t];
        let geo = TriangleGeometry::new(tri.map(|v| mesh.nodes[v]));
        let nodes = dofs.triangle_p2_nodes(mesh, t);
        let mut me = [[T::zero(); 6]; 6];
        let mut ae = [[[[T::zero(); 2]; 2]; 6]; 6];
        let mut be = [[[T::zero(); 2]; 6]; 3];
        for (l, w) in rule.iter() {
            let wa = *w * geo.area;
            let phi = p2_values(*l);
            let g = p2_gradients(*l, geo.grad_bary);
            for a in 0..6 {
                for b in 0..6 {
                    me[a][b] += wa * phi[a] * phi[b];
                    let (ga, gb) = (g[a], g[b]);
                    ae[a][b][0][0] += wa * mu * (two * ga[0] * gb[0] + ga[1] * gb[1]);
                    ae[a][b][1][1] += wa * mu * (ga[0] * gb[0] + two * ga[1] * gb[1]);
                    ae[a][b][0][1] += wa * mu * ga[1] * gb[0];
                    ae[a][b][1][0] += wa * mu * ga[0] * gb[1];
                }
            }
            for (k, lk) in l.iter().enumerate() {
                for b in 0..6 {
                    for c in 0..2 {
                        be[k][b][c] -= wa * *lk * g[b][c];
                    }
                }
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..2 {
                    mass.push(2 * nodes[a] + c, 2 * nodes[b] + c, me[a][b]);
                    for e in 0..2 {
                        visc.push(2 * nodes[a] + c, 2 * nodes[b] + e, ae[a][b][c][e]);
                    }
                }
            }
        }
        for k in 0..3 {
            for b in 0..6 {
                for c in 0..2 {
                    div.push(tri[k], 2 * nodes[b] + c, be[k][b][c]);
                }
            }
        }
    }
    FluidMatrices { mass: mass.into_csr(), visc: visc.into_csr(), div: div.into_csr() }
}

/// Load vector `int_{tag} f . v ds` over every nodal velocity component.
pub fn assemble_boundary_traction_full<T, F>(mesh: &ChannelMesh<T>, dofs: &FsiDofMap, tag: BoundaryTag, f: F) -> Vec<T>
where
    T: Scalar,
    F: Fn(T, T) -> [T; 2],
{
    let mut load = vec![T::zero(); 2 * dofs.num_p2_nodes()];
    let rule = segment_rule::<T>();
    for e in mesh.edges_with_tag(tag) {
        let [a, b] = e.nodes;
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        let vc = |v: usize| (2 * (v % (mesh.nx + 1)), 2 * (v / (mesh.nx + 1)));
        let (ca, cb) = (vc(a), vc(b));
        let qa = dofs.p2_index(ca.0, ca.1);
        let qb = dofs.p2_index(cb.0, cb.1);
        let qm = dofs.p2_index((ca.0 + cb.0) / 2, (ca.1 + cb.1) / 2);
        let local = [qa, qm, qb];
        for (s, w) in rule {
            let x = pa[0] + s * (pb[0] - pa[0]);
            let y = pa[1] + s * (pb[1] - pa[1]);
            let fv = f(x, y);
            let n = p2_segment_values(s);
            for k in 0..3 {
                for c in 0..2 {
                    load[2 * local[k] + c] += w * len * n[k] * fv[c];
                }
            }
        }
    }
    load
}

/// Unit inlet load over every nodal component: the traction `-P n = P e_x` with `P = 1`.
pub fn assemble_inlet_load_full<T: Scalar>(mesh: &ChannelMesh<T>, dofs: &FsiDofMap) -> Vec<T> {
    assemble_boundary_traction_full(mesh, dofs, BoundaryTag::Inlet, |_, _| [T::one(), T::zero()])
}

/// Quadratic mass and stiffness on the interface, over all `2nx + 1` interface nodes.
pub fn assemble_wall_full<T: Scalar>(iface: &InterfaceMesh<T>) -> (Csr<T>, Csr<T>) {
    let n = 2 * iface.num_segments() + 1;
    let mut m = Triplets::with_capacity(n, n, 9 * iface.num_segments());
    let mut k = Triplets::with_capacity(n, n, 9 * iface.num_segments());
    for (s, seg) in iface.segments.iter().enumerate() {
        let h = iface.nodes[seg[1]] - iface.nodes[seg[0]];
        let (me, ke) = segment_matrices(h);
        let local = [2 * s, 2 * s + 1, 2 * s + 2];
        for a in 0..3 {
            for b in 0..3 {
                m.push(local[a], local[b], me[a][b]);
                k.push(local[a], local[b], ke[a][b]);
            }
        }
    }
    (m.into_csr(), k.into_csr())
}

/// Every bilinear form and load the schemes use, restricted to free unknowns.
#[derive(Debug, Clone)]
pub struct FormSet<T> {
    pub params: PhysicalParams<T>,
    /// `rho_f`-weighted velocity mass.
    pub fluid_mass: Csr<T>,
    /// Viscous form `2 mu (eps(u), eps(v))`.
    pub viscous: Csr<T>,
    /// Divergence form, pressures by free velocities.
    pub divergence: Csr<T>,
    /// Unweighted interface mass `M^`.
    pub iface_mass: Csr<T>,
    /// `rho_s eps M^`.
    pub wall_mass: Csr<T>,
    /// `c1 (d', v') + c0 (d, v)`.
    pub wall_stiffness: Csr<T>,
    /// Unit inlet load on free velocities.
    pub inlet_load: Vec<T>,
}

impl<T: Scalar> FormSet<T> {
    pub fn assemble(mesh: &ChannelMesh<T>, iface: &InterfaceMesh<T>, dofs: &FsiDofMap, params: &PhysicalParams<T>) -> Self {
        let (fluid_mass, viscous, divergence, inlet_load) = assemble_fluid_forms(mesh, dofs, params);
        let (iface_mass, wall_mass, wall_stiffness) = assemble_structure_forms(iface, dofs, params);
        FormSet { params: *params, fluid_mass, viscous, divergence, iface_mass, wall_mass, wall_stiffness, inlet_load }
    }

    pub fn num_vel(&self) -> usize {
        self.fluid_mass.nrows
    }

    pub fn num_struct(&self) -> usize {
        self.iface_mass.nrows
    }
}

/// Fluid part: `(rho_f M, A, B, l_in)` on free velocity unknowns.
pub fn assemble_fluid_forms<T: Scalar>(
    mesh: &ChannelMesh<T>,
    dofs: &FsiDofMap,
    params: &PhysicalParams<T>,
) -> (Csr<T>, Csr<T>, Csr<T>, Vec<T>) {
    let full = assemble_fluid_full(mesh, dofs, params.mu);
    let nv = dofs.num_vel();
    let np = dofs.num_pres();
    let pres_map: Vec<Option<usize>> = (0..np).map(Some).collect();
    let mass = full.mass.restrict(&dofs.vel_free, nv, &dofs.vel_free, nv).scaled(params.rho_f);
    let visc = full.visc.restrict(&dofs.vel_free, nv, &dofs.vel_free, nv);
    let div = full.div.restrict(&pres_map, np, &dofs.vel_free, nv);
    let load_full = assemble_inlet_load_full(mesh, dofs);
    let load = dofs.vel_nodal.iter().map(|&k| load_full[k]).collect();
    (mass, visc, div, load)
}

/// Structure part: `(M^, rho_s eps M^, K_s)` on free wall unknowns.
pub fn assemble_structure_forms<T: Scalar>(
    iface: &InterfaceMesh<T>,
    dofs: &FsiDofMap,
    params: &PhysicalParams<T>,
) -> (Csr<T>, Csr<T>, Csr<T>) {
    let (m, k) = assemble_wall_full(iface);
    let ns = dofs.num_struct();
    let mhat = m.restrict(&dofs.struct_free, ns, &dofs.struct_free, ns);
    let stiff = k.restrict(&dofs.struct_free, ns, &dofs.struct_free, ns);
    let mut t = Triplets::with_capacity(ns, ns, 2 * mhat.nnz());
    for (r, c, v) in stiff.iter() {
        t.push(r, c, params.c1 * v);
    }
    for (r, c, v) in mhat.iter() {
        t.push(r, c, params.c0 * v);
    }
    let wall_mass = mhat.scaled(params.wall_inertia());
    (mhat, wall_mass, t.into_csr())
}
