//! Structured triangulations of the rectangular channel `[0, L] x [0, R]` and the
//! one-dimensional wall mesh living on its top edge.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{FsiError, Result};
use crate::scalar::Scalar;

/// Tag carried by every boundary edge of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// `x = 0`, traction (pressure wave) boundary.
    Inlet,
    /// `x = L`, zero-traction boundary.
    Outlet,
    /// `y = 0`, no-slip wall.
    Bottom,
    /// `y = R`, the fluid-structure interface.
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// End nodes, ordered so that the domain lies to the left (counterclockwise traversal).
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Structured triangular mesh of the channel.
///
/// Nodes are numbered lexicographically by `(row, column)`: node `(i, j)` sits at
/// `(i h, j h)` and has index `j (nx + 1) + i`. Each cell is split by its
/// lower-left to upper-right diagonal into two counterclockwise triangles.
#[derive(Debug, Clone)]
pub struct ChannelMesh<T> {
    pub length: T,
    pub height: T,
    pub h: T,
    pub nx: usize,
    pub ny: usize,
    pub nodes: Vec<[T; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
}

fn cell_count<T: Scalar>(extent: T, h: T, axis: &str) -> Result<usize> {
    let (e, hh) = (extent.to_f64_(), h.to_f64_());
    let ratio = e / hh;
    let n = ratio.round();
    // single precision cannot meet 1e-9; scale the divisibility check to the type
    let tol = 1e-9_f64.max(T::epsilon().to_f64_() * 16.0 * ratio.max(1.0));
    if n < 1.0 || (ratio - n).abs() > tol {
        return Err(FsiError::Mesh(format!(
            "h = {hh} does not divide the {axis} extent {e} (ratio {ratio})"
        )));
    }
    Ok(n as usize)
}

impl<T: Scalar> ChannelMesh<T> {
    /// Builds the structured mesh of `[0, length] x [0, height]` with cell size `h`.
    pub fn build(length: T, height: T, h: T) -> Result<Self> {
        if !(length > T::zero() && height > T::zero() && h > T::zero()) {
            return Err(FsiError::Mesh(format!(
                "length, height and h must be positive (got {length}, {height}, {h})"
            )));
        }
        let nx = cell_count(length, h, "x (length)")?;
        let ny = cell_count(height, h, "y (height)")?;
        Ok(Self::with_counts(length, height, nx, ny))
    }

    /// Mesh with `nx x ny` cells.
    pub fn from_counts(length: T, height: T, nx: usize, ny: usize) -> Result<Self> {
        if !(length > T::zero() && height > T::zero()) || nx == 0 || ny == 0 {
            return Err(FsiError::Mesh(format!("invalid extents {length} x {height} or counts {nx} x {ny}")));
        }
        Ok(Self::with_counts(length, height, nx, ny))
    }

    fn with_counts(length: T, height: T, nx: usize, ny: usize) -> Self {
        let hx = length / T::from_usize_(nx);
        let hy = height / T::from_usize_(ny);
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // exact endpoints on the boundary lines
                let x = if i == nx { length } else { T::from_usize_(i) * hx };
                let y = if j == ny { height } else { T::from_usize_(j) * hy };
                nodes.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let a = id(i, j);
                let b = id(i + 1, j);
                let c = id(i + 1, j + 1);
                let d = id(i, j + 1);
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let mut boundary = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary.push(BoundaryEdge { nodes: [id(i, 0), id(i + 1, 0)], tag: BoundaryTag::Bottom });
        }
        for j in 0..ny {
            boundary.push(BoundaryEdge { nodes: [id(nx, j), id(nx, j + 1)], tag: BoundaryTag::Outlet });
        }
        for i in (0..nx).rev() {
            boundary.push(BoundaryEdge { nodes: [id(i + 1, ny), id(i, ny)], tag: BoundaryTag::Interface });
        }
        for j in (0..ny).rev() {
            boundary.push(BoundaryEdge { nodes: [id(0, j + 1), id(0, j)], tag: BoundaryTag::Inlet });
        }
        ChannelMesh { length, height, h: hx, nx, ny, nodes, triangles, boundary }
    }

    /// Uniform refinement: every cell split into four, `h -> h/2`.
    ///
    /// Coarse node `(i, j)` becomes fine node `(2i, 2j)`.
    pub fn refine(&self) -> Self {
        Self::with_counts(self.length, self.height, 2 * self.nx, 2 * self.ny)
    }

    #[inline]
    pub fn node_id(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Twice the signed area of triangle `t`.
    pub fn signed_area2(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary.iter().filter(move |e| e.tag == tag)
    }

    /// Outward unit normal of a boundary tag.
    pub fn outward_normal(tag: BoundaryTag) -> [T; 2] {
        let (o, z) = (T::one(), T::zero());
        match tag {
            BoundaryTag::Inlet => [-o, z],
            BoundaryTag::Outlet => [o, z],
            BoundaryTag::Bottom => [z, -o],
            BoundaryTag::Interface => [z, o],
        }
    }

    /// Cell `(i, j)` and triangle index containing `(x, y)`, within `tol` of the closure.
    pub fn locate(&self, x: T, y: T, tol: T) -> Option<(usize, usize, usize)> {
        if x < -tol || y < -tol || x > self.length + tol || y > self.height + tol {
            return None;
        }
        let fx = (x / self.h).floor().max(T::zero());
        let fy = (y / self.h).floor().max(T::zero());
        let i = fx.to_usize().unwrap_or(0).min(self.nx - 1);
        let j = fy.to_usize().unwrap_or(0).min(self.ny - 1);
        let [x0, y0] = self.nodes[self.node_id(i, j)];
        let upper = (y - y0) > (x - x0);
        let t = 2 * (j * self.nx + i) + usize::from(upper);
        Some((i, j, t))
    }

    /// Legacy-VTK ASCII unstructured grid, with optional nodal scalar fields.
    pub fn to_vtk(&self, fields: &[(&str, &[T])]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(s, "channel mesh nx={} ny={}", self.nx, self.ny);
        let _ = writeln!(s, "ASCII");
        let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
        let _ = writeln!(s, "POINTS {} double", self.nodes.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:.17e} {:.17e} 0", p[0].to_f64_(), p[1].to_f64_());
        }
        let nt = self.triangles.len();
        let _ = writeln!(s, "CELLS {} {}", nt, 4 * nt);
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "CELL_TYPES {nt}");
        for _ in 0..nt {
            let _ = writeln!(s, "5");
        }
        if !fields.is_empty() {
            let _ = writeln!(s, "POINT_DATA {}", self.nodes.len());
            for (name, values) in fields {
                let _ = writeln!(s, "SCALARS {name} double 1");
                let _ = writeln!(s, "LOOKUP_TABLE default");
                for v in values.iter() {
                    let _ = writeln!(s, "{:.17e}", v.to_f64_());
                }
            }
        }
        s
    }

    pub fn write_vtk(&self, path: &Path, fields: &[(&str, &[T])]) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_vtk(fields).as_bytes())?;
        Ok(())
    }
}

/// The wall mesh: the `nx` interface edges of the channel, as a 1D mesh sorted by `x`.
#[derive(Debug, Clone)]
pub struct InterfaceMesh<T> {
    pub nodes: Vec<T>,
    /// Index of each interface node in the parent channel mesh.
    pub parent_nodes: Vec<usize>,
    pub segments: Vec<[usize; 2]>,
    /// `true` for the two extreme nodes (`x = 0` and `x = L`).
    pub endpoint: Vec<bool>,
    pub height: T,
}

impl<T: Scalar> InterfaceMesh<T> {
    pub fn extract(mesh: &ChannelMesh<T>) -> Self {
        let mut pairs: Vec<(T, usize)> = Vec::with_capacity(mesh.nx + 1);
        for e in mesh.edges_with_tag(BoundaryTag::Interface) {
            for &n in &e.nodes {
                if !pairs.iter().any(|&(_, m)| m == n) {
                    pairs.push((mesh.nodes[n][0], n));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
        let nodes: Vec<T> = pairs.iter().map(|p| p.0).collect();
        let parent_nodes = pairs.iter().map(|p| p.1).collect();
        let n = nodes.len();
        let segments = (0..n - 1).map(|k| [k, k + 1]).collect();
        let endpoint = (0..n).map(|k| k == 0 || k == n - 1).collect();
        InterfaceMesh { nodes, parent_nodes, segments, endpoint, height: mesh.height }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn length(&self) -> T {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }
}
