//! Taylor–Hood spaces on the channel and the quadratic wall space on its top edge.
//!
//! Quadratic nodes of a structured mesh with spacing `h` form the uniform grid of
//! spacing `h/2`; node `(I, J)` of that grid has *nodal index* `J (2nx + 1) + I`.
//! Nodal arrays (velocity interleaved as `[ux, uy]` per node, pressure per
//! vertex in mesh order, wall values per quadratic interface node) are the
//! ordering-independent representation used for output and persistence.
//!
//! Unknowns of the linear systems are numbered differently: column by column
//! in `x`, bottom to top, with the pressures of vertex column `i` placed after
//! the velocities of quadratic column `2i + 1`. This keeps the envelope of the
//! saddle-point matrices narrow and puts each pressure after the velocities it
//! couples to, so the symmetric factorization needs no pivoting.

use crate::error::{FsiError, Result};
use crate::mesh::{ChannelMesh, InterfaceMesh};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct FsiDofMap {
    pub nx: usize,
    pub ny: usize,
    /// Quadratic grid columns `2nx + 1`.
    pub p2x: usize,
    /// Quadratic grid rows `2ny + 1`.
    pub p2y: usize,
    /// Free-velocity index of each nodal velocity component (`2 q + c`), `None` if Dirichlet.
    pub vel_free: Vec<Option<usize>>,
    /// Nodal component index of each free velocity unknown.
    pub vel_nodal: Vec<usize>,
    /// Free index of each quadratic interface node, `None` at the two endpoints.
    pub struct_free: Vec<Option<usize>>,
    /// Interface node index (`I`) of each free wall unknown.
    pub struct_nodal: Vec<usize>,
    /// Free-velocity index of the vertical velocity shared with each wall unknown.
    pub iface_vel: Vec<usize>,
    /// Position of each free velocity unknown in the coupled system.
    pub sys_vel: Vec<usize>,
    /// Position of each pressure unknown (vertex) in the coupled system.
    pub sys_pres: Vec<usize>,
    /// Nodal velocity components fixed to zero on the bottom wall.
    pub dirichlet_bottom: Vec<usize>,
    /// Horizontal velocity on the interface (tangential no-slip).
    pub dirichlet_tangential: Vec<usize>,
    /// Vertical velocity at the interface corners `(0, R)` and `(L, R)`.
    pub dirichlet_corners: Vec<usize>,
    /// Wall endpoints (interface node indices).
    pub dirichlet_wall: Vec<usize>,
    /// Vertical velocity on the interface is free (coupled). When `false` the
    /// interface is a rigid no-slip wall and there are no wall unknowns.
    pub coupled: bool,
}

impl FsiDofMap {
    /// Spaces for the coupled problem.
    pub fn build<T: Scalar>(mesh: &ChannelMesh<T>, iface: &InterfaceMesh<T>) -> Result<Self> {
        if iface.num_nodes() != mesh.nx + 1 {
            return Err(FsiError::Mesh(format!(
                "interface mesh has {} nodes, channel top edge has {}",
                iface.num_nodes(),
                mesh.nx + 1
            )));
        }
        for (k, (&x, &parent)) in iface.nodes.iter().zip(&iface.parent_nodes).enumerate() {
            let expect = mesh.node_id(k, mesh.ny);
            if parent != expect || x != mesh.nodes[expect][0] {
                return Err(FsiError::Mesh(format!("interface node {k} does not match the channel top edge")));
            }
        }
        Ok(Self::with_interface(mesh.nx, mesh.ny, true))
    }

    /// Spaces for the rigid-wall channel (no-slip on `y = R`, no wall unknowns).
    pub fn rigid<T: Scalar>(mesh: &ChannelMesh<T>) -> Self {
        Self::with_interface(mesh.nx, mesh.ny, false)
    }

    fn with_interface(nx: usize, ny: usize, coupled: bool) -> Self {
        let (p2x, p2y) = (2 * nx + 1, 2 * ny + 1);
        let n_p2 = p2x * p2y;
        let top = p2y - 1;
        let mut vel_free = vec![None; 2 * n_p2];
        let mut vel_nodal = Vec::new();
        let mut sys_vel = Vec::new();
        let mut sys_pres = vec![usize::MAX; (nx + 1) * (ny + 1)];
        let mut dirichlet_bottom = Vec::new();
        let mut dirichlet_tangential = Vec::new();
        let mut dirichlet_corners = Vec::new();
        let mut next_sys = 0usize;
        for col in 0..p2x {
            for row in 0..p2y {
                let q = row * p2x + col;
                for c in 0..2 {
                    let k = 2 * q + c;
                    let fixed = if row == 0 {
                        dirichlet_bottom.push(k);
                        true
                    } else if row == top && c == 0 {
                        dirichlet_tangential.push(k);
                        true
                    } else if row == top && (col == 0 || col == p2x - 1 || !coupled) {
                        dirichlet_corners.push(k);
                        true
                    } else {
                        false
                    };
                    if !fixed {
                        vel_free[k] = Some(vel_nodal.len());
                        vel_nodal.push(k);
                        sys_vel.push(next_sys);
                        next_sys += 1;
                    }
                }
            }
            // pressures of vertex column i follow quadratic column 2i+1 (or the last column)
            let pres_col = if col % 2 == 1 {
                Some((col - 1) / 2)
            } else if col == p2x - 1 {
                Some(nx)
            } else {
                None
            };
            if let Some(i) = pres_col {
                for j in 0..=ny {
                    sys_pres[j * (nx + 1) + i] = next_sys;
                    next_sys += 1;
                }
            }
        }
        let mut struct_free = vec![None; p2x];
        let mut struct_nodal = Vec::new();
        let mut iface_vel = Vec::new();
        if coupled {
            for (col, slot) in struct_free.iter_mut().enumerate().take(p2x - 1).skip(1) {
                *slot = Some(struct_nodal.len());
                struct_nodal.push(col);
                let q = top * p2x + col;
                iface_vel.push(vel_free[2 * q + 1].expect("interface vertical velocity is free"));
            }
        }
        let dirichlet_wall = if coupled { vec![0, p2x - 1] } else { Vec::new() };
        FsiDofMap {
            nx,
            ny,
            p2x,
            p2y,
            vel_free,
            vel_nodal,
            struct_free,
            struct_nodal,
            iface_vel,
            sys_vel,
            sys_pres,
            dirichlet_bottom,
            dirichlet_tangential,
            dirichlet_corners,
            dirichlet_wall,
            coupled,
        }
    }

    pub fn num_p2_nodes(&self) -> usize {
        self.p2x * self.p2y
    }

    pub fn num_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_vel(&self) -> usize {
        self.vel_nodal.len()
    }

    pub fn num_pres(&self) -> usize {
        self.num_vertices()
    }

    pub fn num_struct(&self) -> usize {
        self.struct_nodal.len()
    }

    /// Size of the coupled velocity-pressure system.
    pub fn num_system(&self) -> usize {
        self.num_vel() + self.num_pres()
    }

    /// Interface nodes (quadratic resolution), endpoints included.
    pub fn num_interface_nodes(&self) -> usize {
        self.p2x
    }

    #[inline]
    pub fn p2_index(&self, col: usize, row: usize) -> usize {
        row * self.p2x + col
    }

    /// Quadratic node coordinates `(I h/2, J h/2)`, exact on the outer boundary.
    pub fn p2_coords<T: Scalar>(&self, mesh: &ChannelMesh<T>, q: usize) -> [T; 2] {
        let (col, row) = (q % self.p2x, q / self.p2x);
        let coord = |k: usize, n2: usize, extent: T| {
            if k == n2 {
                extent
            } else {
                T::from_usize_(k) * extent / T::from_usize_(n2)
            }
        };
        [coord(col, self.p2x - 1, mesh.length), coord(row, self.p2y - 1, mesh.height)]
    }

    /// Quadratic nodal indices of a mesh triangle: vertices then edge midpoints 01, 12, 20.
    pub fn triangle_p2_nodes<T>(&self, mesh: &ChannelMesh<T>, t: usize) -> [usize; 6] {
        let tri = mesh.triangles[t];
        let vc = |v: usize| (2 * (v % (mesh.nx + 1)), 2 * (v / (mesh.nx + 1)));
        let c = tri.map(vc);
        let mid = |a: (usize, usize), b: (usize, usize)| self.p2_index((a.0 + b.0) / 2, (a.1 + b.1) / 2);
        [
            self.p2_index(c[0].0, c[0].1),
            self.p2_index(c[1].0, c[1].1),
            self.p2_index(c[2].0, c[2].1),
            mid(c[0], c[1]),
            mid(c[1], c[2]),
            mid(c[2], c[0]),
        ]
    }

    /// Expands free velocity coefficients to the nodal layout (zeros on Dirichlet nodes).
    pub fn velocity_to_nodal<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); 2 * self.num_p2_nodes()];
        for (k, &n) in self.vel_nodal.iter().enumerate() {
            out[n] = u[k];
        }
        out
    }

    /// Restricts a nodal velocity array to the free unknowns; fails if a Dirichlet value is nonzero.
    pub fn velocity_from_nodal<T: Scalar>(&self, nodal: &[T], tol: T) -> Result<Vec<T>> {
        let mut u = vec![T::zero(); self.num_vel()];
        for (k, &v) in nodal.iter().enumerate() {
            match self.vel_free[k] {
                Some(f) => u[f] = v,
                None if v.abs() > tol => {
                    return Err(FsiError::Config(format!(
                        "initial velocity violates the Dirichlet condition at nodal component {k} (value {v})"
                    )))
                }
                None => {}
            }
        }
        Ok(u)
    }

    pub fn wall_to_nodal<T: Scalar>(&self, d: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.p2x];
        for (k, &n) in self.struct_nodal.iter().enumerate() {
            out[n] = d[k];
        }
        out
    }

    pub fn wall_from_nodal<T: Scalar>(&self, nodal: &[T]) -> Vec<T> {
        self.struct_nodal.iter().map(|&n| nodal[n]).collect()
    }

    /// Vertical fluid velocity on the interface, one value per wall unknown.
    pub fn interface_trace<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        self.iface_vel.iter().map(|&k| u[k]).collect()
    }
}
