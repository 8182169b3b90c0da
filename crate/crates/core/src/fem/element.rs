//! Quadratic Lagrange elements and the quadrature rules used to integrate them.

use crate::scalar::Scalar;

/// Six-point rule on the reference triangle, exact for degree 4.
/// Barycentric coordinates `(l0, l1, l2)` and weights summing to one.
pub fn triangle_rule<T: Scalar>() -> [([T; 3], T); 6] {
    let (a1, b1, w1) = (0.108_103_018_168_070_23, 0.445_948_490_915_964_9, 0.223_381_589_678_011_47);
    let (a2, b2, w2) = (0.816_847_572_980_458_5, 0.091_576_213_509_770_74, 0.109_951_743_655_321_86);
    let p = |a: f64, b: f64, c: f64, w: f64| ([T::lit(a), T::lit(b), T::lit(c)], T::lit(w));
    [
        p(a1, b1, b1, w1),
        p(b1, a1, b1, w1),
        p(b1, b1, a1, w1),
        p(a2, b2, b2, w2),
        p(b2, a2, b2, w2),
        p(b2, b2, a2, w2),
    ]
}

/// Three-point Gauss rule on `[0, 1]`, exact for degree 5.
pub fn segment_rule<T: Scalar>() -> [(T, T); 3] {
    let d = 0.5 * (0.6f64).sqrt();
    [
        (T::lit(0.5 - d), T::lit(5.0 / 18.0)),
        (T::lit(0.5), T::lit(8.0 / 18.0)),
        (T::lit(0.5 + d), T::lit(5.0 / 18.0)),
    ]
}

/// Quadratic basis on a triangle in barycentric coordinates.
/// Local order: vertices 0, 1, 2, then midpoints of edges 01, 12, 20.
pub fn p2_values<T: Scalar>(l: [T; 3]) -> [T; 6] {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    [
        l[0] * (two * l[0] - T::one()),
        l[1] * (two * l[1] - T::one()),
        l[2] * (two * l[2] - T::one()),
        four * l[0] * l[1],
        four * l[1] * l[2],
        four * l[2] * l[0],
    ]
}

/// Physical gradients of the quadratic basis given the barycentric gradients.
pub fn p2_gradients<T: Scalar>(l: [T; 3], gl: [[T; 2]; 3]) -> [[T; 2]; 6] {
    let four = T::lit(4.0);
    let mut g = [[T::zero(); 2]; 6];
    for k in 0..3 {
        let s = four * l[k] - T::one();
        g[k] = [s * gl[k][0], s * gl[k][1]];
    }
    let pairs = [(0, 1), (1, 2), (2, 0)];
    for (m, &(a, b)) in pairs.iter().enumerate() {
        for c in 0..2 {
            g[3 + m][c] = four * (l[a] * gl[b][c] + l[b] * gl[a][c]);
        }
    }
    g
}

/// Affine triangle geometry: area and constant barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry<T> {
    pub vertices: [[T; 2]; 3],
    pub area: T,
    pub grad_bary: [[T; 2]; 3],
}

impl<T: Scalar> TriangleGeometry<T> {
    pub fn new(vertices: [[T; 2]; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let g1 = [(p2[1] - p0[1]) / det, -(p2[0] - p0[0]) / det];
        let g2 = [-(p1[1] - p0[1]) / det, (p1[0] - p0[0]) / det];
        let g0 = [-(g1[0] + g2[0]), -(g1[1] + g2[1])];
        TriangleGeometry { vertices, area: det / T::lit(2.0), grad_bary: [g0, g1, g2] }
    }

    pub fn point(&self, l: [T; 3]) -> [T; 2] {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }

    pub fn barycentric(&self, x: T, y: T) -> [T; 3] {
        let p0 = self.vertices[0];
        let (dx, dy) = (x - p0[0], y - p0[1]);
        let l1 = self.grad_bary[1][0] * dx + self.grad_bary[1][1] * dy;
        let l2 = self.grad_bary[2][0] * dx + self.grad_bary[2][1] * dy;
        [T::one() - l1 - l2, l1, l2]
    }
}

/// Quadratic basis on `[0, 1]` ordered (left, middle, right).
pub fn p2_segment_values<T: Scalar>(s: T) -> [T; 3] {
    let two = T::lit(2.0);
    [
        (T::one() - s) * (T::one() - two * s),
        T::lit(4.0) * s * (T::one() - s),
        s * (two * s - T::one()),
    ]
}

/// Derivatives of [`p2_segment_values`] with respect to `s`.
pub fn p2_segment_derivatives<T: Scalar>(s: T) -> [T; 3] {
    let four = T::lit(4.0);
    [four * s - T::lit(3.0), four - T::lit(8.0) * s, four * s - T::one()]
}

/// Element mass and stiffness of the quadratic segment of length `h`.
pub fn segment_matrices<T: Scalar>(h: T) -> ([[T; 3]; 3], [[T; 3]; 3]) {
    let mut mass = [[T::zero(); 3]; 3];
    let mut stiff = [[T::zero(); 3]; 3];
    for (s, w) in segment_rule::<T>() {
        let n = p2_segment_values(s);
        let dn = p2_segment_derivatives(s);
        for a in 0..3 {
            for b in 0..3 {
                mass[a][b] += w * h * n[a] * n[b];
                stiff[a][b] += w * dn[a] * dn[b] / h;
            }
        }
    }
    (mass, stiff)
}
