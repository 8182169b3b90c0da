//! Brute-force dense re-implementation of the coupled problem on a small channel.
//!
//! Shares no code with the library: its own mesh walk, P2/P1 bases written as
//! polynomials in barycentric coordinates, exact monomial integration and dense
//! Gaussian elimination with partial pivoting. Only the governing equations and
//! the time-stepping formulas are common ground.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Polynomial in barycentric coordinates: exponent triple -> coefficient.
#[derive(Debug, Clone, Default)]
struct Poly(BTreeMap<[u32; 3], f64>);

impl Poly {
    fn lambda(k: usize) -> Poly {
        let mut e = [0; 3];
        e[k] = 1;
        Poly(BTreeMap::from([(e, 1.0)]))
    }

    fn constant(c: f64) -> Poly {
        Poly(BTreeMap::from([([0, 0, 0], c)]))
    }

    fn add(&self, o: &Poly, s: f64) -> Poly {
        let mut r = self.0.clone();
        for (e, c) in &o.0 {
            *r.entry(*e).or_insert(0.0) += s * c;
        }
        Poly(r)
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut r = BTreeMap::new();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &o.0 {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *r.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Poly(r)
    }

    fn d(&self, k: usize) -> Poly {
        let mut r = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[k] > 0 {
                let mut f = *e;
                f[k] -= 1;
                *r.entry(f).or_insert(0.0) += c * e[k] as f64;
            }
        }
        Poly(r)
    }

    /// Exact integral over a triangle: `2A a! b! c! / (a+b+c+2)!`.
    fn integrate_triangle(&self, area: f64) -> f64 {
        self.0.iter().map(|(e, c)| c * 2.0 * area * fact(e[0]) * fact(e[1]) * fact(e[2]) / fact(e[0] + e[1] + e[2] + 2)).sum()
    }

    /// Exact integral over a segment of length `len` in the first two coordinates: `len a! b! / (a+b+1)!`.
    fn integrate_segment(&self, len: f64) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| {
                assert_eq!(e[2], 0, "segment polynomials use two coordinates");
                c * len * fact(e[0]) * fact(e[1]) / fact(e[0] + e[1] + 1)
            })
            .sum()
    }
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Quadratic Lagrange basis on the simplex: three vertex functions, then the
/// edge functions of (0,1), (1,2), (2,0).
fn p2_basis() -> Vec<Poly> {
    let l: Vec<Poly> = (0..3).map(Poly::lambda).collect();
    let mut b = Vec::new();
    for li in &l {
        b.push(li.mul(li).mul(&Poly::constant(2.0)).add(li, -1.0));
    }
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        b.push(l[i].mul(&l[j]).mul(&Poly::constant(4.0)));
    }
    b
}

/// Benchmark material data with the wall coefficients worked out by hand.
#[derive(Debug, Clone, Copy)]
pub struct Material {
    pub rho_f: f64,
    pub mu: f64,
    /// `rho_s * thickness`.
    pub wall_inertia: f64,
    pub c0: f64,
    pub c1: f64,
    pub p_max: f64,
    pub pulse: f64,
}

impl Material {
    pub fn benchmark() -> Self {
        // c1 = E eps / (2 (1 + nu)) = 0.75e6 * 0.1 / 3; c0 = E eps / (R^2 (1 - nu^2)) = 75000 / 0.1875
        Material { rho_f: 1.0, mu: 0.035, wall_inertia: 0.11, c0: 400_000.0, c1: 25_000.0, p_max: 2.0e4, pulse: 5.0e-3 }
    }

    pub fn inlet(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.pulse {
            0.0
        } else {
            self.p_max * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * t / self.pulse).cos())
        }
    }
}

/// Dense matrices of the coupled problem in nodal numbering.
///
/// Velocity unknown `2q + c` for the quadratic node at `(I h/2, J h/2)`,
/// `q = J (2nx + 1) + I`; pressure unknown `nvel + j (nx + 1) + i` for the vertex
/// `(i h, j h)`; wall node `i` sits at `x = i h / 2` on the top side.
pub struct DenseModel {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub mat: Material,
    pub nvel: usize,
    pub npres: usize,
    pub nwall: usize,
    /// `rho_f` mass, viscous and `-div` coupling (velocity rows, pressure columns).
    pub mass: Vec<Vec<f64>>,
    pub visc: Vec<Vec<f64>>,
    pub grad: Vec<Vec<f64>>,
    /// Wall mass (already times `rho_s eps`) and stiffness on all wall nodes.
    pub wall_mass: Vec<Vec<f64>>,
    pub wall_stiff: Vec<Vec<f64>>,
    /// Unit-pressure inlet load on the velocity unknowns.
    pub inlet: Vec<f64>,
    pub dirichlet: Vec<bool>,
}

impl DenseModel {
    pub fn new(length: f64, height: f64, h: f64, mat: Material) -> Self {
        let nx = (length / h).round() as usize;
        let ny = (height / h).round() as usize;
        let (px, py) = (2 * nx + 1, 2 * ny + 1);
        let nvel = 2 * px * py;
        let npres = (nx + 1) * (ny + 1);
        let nwall = px;
        let zeros = |n: usize, m: usize| vec![vec![0.0; m]; n];
        let mut mass = zeros(nvel, nvel);
        let mut visc = zeros(nvel, nvel);
        let mut grad = zeros(nvel, npres);
        let basis = p2_basis();
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let qid = |ii: usize, jj: usize| jj * px + ii;
        for j in 0..ny {
            for i in 0..nx {
                // lower-left to upper-right diagonal
                for tri in [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]] {
                    let xy: Vec<[f64; 2]> = tri.iter().map(|&(a, b)| [a as f64 * h, b as f64 * h]).collect();
                    let area2 = (xy[1][0] - xy[0][0]) * (xy[2][1] - xy[0][1]) - (xy[2][0] - xy[0][0]) * (xy[1][1] - xy[0][1]);
                    assert!(area2 > 0.0);
                    let area = area2 / 2.0;
                    // grad lambda_k = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / 2A
                    let gl: Vec<[f64; 2]> = (0..3)
                        .map(|k| {
                            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                            [(xy[a][1] - xy[b][1]) / area2, (xy[b][0] - xy[a][0]) / area2]
                        })
                        .collect();
                    let doubled: Vec<(usize, usize)> = tri.iter().map(|&(a, b)| (2 * a, 2 * b)).collect();
                    let mut nodes = Vec::new();
                    for &(a, b) in &doubled {
                        nodes.push(qid(a, b));
                    }
                    for (p, q) in [(0, 1), (1, 2), (2, 0)] {
                        nodes.push(qid((doubled[p].0 + doubled[q].0) / 2, (doubled[p].1 + doubled[q].1) / 2));
                    }
                    let pres: Vec<usize> = tri.iter().map(|&(a, b)| vid(a, b)).collect();
                    let grads: Vec<[Poly; 2]> = basis
                        .iter()
                        .map(|phi| {
                            let mut g = [Poly::default(), Poly::default()];
                            for k in 0..3 {
                                let dk = phi.d(k);
                                g[0] = g[0].add(&dk, gl[k][0]);
                                g[1] = g[1].add(&dk, gl[k][1]);
                            }
                            g
                        })
                        .collect();
                    for a in 0..6 {
                        for b in 0..6 {
                            let m = mat.rho_f * basis[a].mul(&basis[b]).integrate_triangle(area);
                            let gg = grads[a][0].mul(&grads[b][0]).add(&grads[a][1].mul(&grads[b][1]), 1.0).integrate_triangle(area);
                            for c in 0..2 {
                                mass[2 * nodes[a] + c][2 * nodes[b] + c] += m;
                                for e in 0..2 {
                                    // 2 mu eps(phi_b e_e) : eps(phi_a e_c) = mu (delta_ce grad.grad + d_c phi_b d_e phi_a)
                                    let cross = grads[b][c].mul(&grads[a][e]).integrate_triangle(area);
                                    let v = mat.mu * (if c == e { gg } else { 0.0 } + cross);
                                    visc[2 * nodes[a] + c][2 * nodes[b] + e] += v;
                                }
                            }
                        }
                        for (k, &pk) in pres.iter().enumerate() {
                            for c in 0..2 {
                                grad[2 * nodes[a] + c][pk] -= Poly::lambda(k).mul(&grads[a][c]).integrate_triangle(area);
                            }
                        }
                    }
                }
            }
        }

        // one-dimensional quadratic basis on a segment: end, middle, end
        let l0 = Poly::lambda(0);
        let l1 = Poly::lambda(1);
        let s_basis = [
            l0.mul(&l0).mul(&Poly::constant(2.0)).add(&l0, -1.0),
            l0.mul(&l1).mul(&Poly::constant(4.0)),
            l1.mul(&l1).mul(&Poly::constant(2.0)).add(&l1, -1.0),
        ];
        let mut wall_mass = zeros(nwall, nwall);
        let mut wall_stiff = zeros(nwall, nwall);
        let mut inlet = vec![0.0; nvel];
        for seg in 0..nx {
            let ids = [2 * seg, 2 * seg + 1, 2 * seg + 2];
            // d/dx = (d/dlambda1 - d/dlambda0) / h
            let ds: Vec<Poly> = s_basis.iter().map(|p| p.d(1).add(&p.d(0), -1.0).mul(&Poly::constant(1.0 / h))).collect();
            for a in 0..3 {
                for b in 0..3 {
                    wall_mass[ids[a]][ids[b]] += mat.wall_inertia * s_basis[a].mul(&s_basis[b]).integrate_segment(h);
                    wall_stiff[ids[a]][ids[b]] += mat.c1 * ds[a].mul(&ds[b]).integrate_segment(h)
                        + mat.c0 * s_basis[a].mul(&s_basis[b]).integrate_segment(h);
                }
            }
        }
        for seg in 0..ny {
            // inlet x = 0, outward normal -e_x, traction -P n = P e_x
            let ids = [qid(0, 2 * seg), qid(0, 2 * seg + 1), qid(0, 2 * seg + 2)];
            for a in 0..3 {
                inlet[2 * ids[a]] += s_basis[a].integrate_segment(h);
            }
        }

        let mut dirichlet = vec![false; nvel];
        for ii in 0..px {
            dirichlet[2 * qid(ii, 0)] = true;
            dirichlet[2 * qid(ii, 0) + 1] = true;
            dirichlet[2 * qid(ii, py - 1)] = true;
        }
        dirichlet[2 * qid(0, py - 1) + 1] = true;
        dirichlet[2 * qid(px - 1, py - 1) + 1] = true;

        DenseModel { nx, ny, h, mat, nvel, npres, nwall, mass, visc, grad, wall_mass, wall_stiff, inlet, dirichlet }
    }

    /// Velocity unknown carrying the wall velocity of wall node `i`.
    pub fn wall_dof(&self, i: usize) -> usize {
        2 * ((2 * self.ny) * (2 * self.nx + 1) + i) + 1
    }

    /// Velocity unknown of the quadratic node at `(x, y)`.
    pub fn vel_dof(&self, x: f64, y: f64, c: usize) -> usize {
        let ii = (2.0 * x / self.h).round() as usize;
        let jj = (2.0 * y / self.h).round() as usize;
        2 * (jj * (2 * self.nx + 1) + ii) + c
    }

    pub fn pres_dof(&self, x: f64, y: f64) -> usize {
        let i = (x / self.h).round() as usize;
        let j = (y / self.h).round() as usize;
        j * (self.nx + 1) + i
    }

    fn wall_interior(&self, i: usize) -> bool {
        i > 0 && i + 1 < self.nwall
    }

    /// Solves the saddle system with `rho_f/dt M + A + wall_mass_coef Mw + wall_stiff_coef K` on the wall rows.
    fn solve_fluid(&self, dt: f64, wall_mass_coef: f64, wall_stiff_coef: f64, rhs_vel: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.nvel + self.npres;
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for r in 0..self.nvel {
            for c in 0..self.nvel {
                a[r][c] = self.mass[r][c] / dt + self.visc[r][c];
            }
            for k in 0..self.npres {
                a[r][self.nvel + k] = self.grad[r][k];
                a[self.nvel + k][r] = self.grad[r][k];
            }
            b[r] = rhs_vel[r];
        }
        for i in 0..self.nwall {
            for j in 0..self.nwall {
                let (r, c) = (self.wall_dof(i), self.wall_dof(j));
                a[r][c] += wall_mass_coef * self.wall_mass[i][j] + wall_stiff_coef * self.wall_stiff[i][j];
            }
        }
        for r in 0..self.nvel {
            if self.dirichlet[r] {
                a[r].iter_mut().for_each(|v| *v = 0.0);
                for row in a.iter_mut() {
                    row[r] = 0.0;
                }
                a[r][r] = 1.0;
                b[r] = 0.0;
            }
        }
        let x = gauss(a, b);
        (x[..self.nvel].to_vec(), x[self.nvel..].to_vec())
    }

    fn wall_apply(&self, m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `[wall_inertia/dt M + dt K] w = wall_inertia/dt M base - K d - coef T` on interior wall nodes.
    fn wall_solve(&self, dt: f64, base: &[f64], d: &[f64], coef: f64, t: &[f64]) -> Vec<f64> {
        let mb = self.wall_apply(&self.wall_mass, base);
        let kd = self.wall_apply(&self.wall_stiff, d);
        let idx: Vec<usize> = (0..self.nwall).filter(|&i| self.wall_interior(i)).collect();
        let a: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.wall_mass[i][j] / dt + dt * self.wall_stiff[i][j]).collect())
            .collect();
        let b: Vec<f64> = idx.iter().map(|&i| mb[i] / dt - kd[i] - coef * t[i]).collect();
        let x = gauss(a, b);
        let mut w = vec![0.0; self.nwall];
        for (k, &i) in idx.iter().enumerate() {
            w[i] = x[k];
        }
        w
    }

    fn fluid_rhs(&self, dt: f64, u: &[f64], t_new: f64) -> Vec<f64> {
        let mu = self.wall_apply(&self.mass, u);
        let p = self.mat.inlet(t_new);
        (0..self.nvel).map(|r| mu[r] / dt + p * self.inlet[r]).collect()
    }

    fn trace(&self, u: &[f64]) -> Vec<f64> {
        (0..self.nwall).map(|i| u[self.wall_dof(i)]).collect()
    }

    fn mask_wall(&self, v: &mut [f64]) {
        for (i, x) in v.iter_mut().enumerate() {
            if !self.wall_interior(i) {
                *x = 0.0;
            }
        }
    }

    /// Divergence residual `||B u||_2`.
    pub fn divergence(&self, u: &[f64]) -> f64 {
        (0..self.npres).map(|k| (0..self.nvel).map(|r| self.grad[r][k] * u[r]).sum::<f64>().powi(2)).sum::<f64>().sqrt()
    }
}

/// State in nodal numbering. `u_tilde` holds the intermediate wall velocity
/// (multirate) or the Neumann-step wall velocity (Robin-Neumann).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub d: Vec<f64>,
    pub u_s: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub traction: Vec<f64>,
    pub step: usize,
}

impl DenseState {
    pub fn zero(m: &DenseModel) -> Self {
        DenseState {
            u: vec![0.0; m.nvel],
            p: vec![0.0; m.npres],
            d: vec![0.0; m.nwall],
            u_s: vec![0.0; m.nwall],
            u_tilde: vec![0.0; m.nwall],
            traction: vec![0.0; m.nwall],
            step: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DenseScheme {
    Implicit { dt: f64 },
    Multirate { beta: f64, dt_s: f64, ratio: usize },
    RobinNeumann { dt: f64 },
}

impl DenseModel {
    pub fn step(&self, s: &mut DenseState, scheme: DenseScheme) {
        match scheme {
            DenseScheme::Implicit { dt } => {
                let t_new = (s.step + 1) as f64 * dt;
                let mut rhs = self.fluid_rhs(dt, &s.u, t_new);
                let mu = self.wall_apply(&self.wall_mass, &s.u_s);
                let kd = self.wall_apply(&self.wall_stiff, &s.d);
                for i in 0..self.nwall {
                    rhs[self.wall_dof(i)] += mu[i] / dt - kd[i];
                }
                let (u, p) = self.solve_fluid(dt, 1.0 / dt, dt, &rhs);
                let us = self.trace(&u);
                for i in 0..self.nwall {
                    s.d[i] += dt * us[i];
                }
                let dv: Vec<f64> = us.iter().zip(&s.u_s).map(|(a, b)| a - b).collect();
                let md = self.wall_apply(&self.wall_mass, &dv);
                let kd = self.wall_apply(&self.wall_stiff, &s.d);
                s.traction = (0..self.nwall).map(|i| -(md[i] / dt + kd[i])).collect();
                self.mask_wall(&mut s.traction);
                s.u = u;
                s.p = p;
                s.u_s = us;
                s.step += 1;
            }
            DenseScheme::Multirate { beta, dt_s, ratio } => {
                let dt_f = dt_s * ratio as f64;
                let t_new = (s.step + 1) as f64 * dt_f;
                let mut base = s.u_s.clone();
                for _ in 0..ratio {
                    let w = self.wall_solve(dt_s, &base, &s.d, beta, &s.traction);
                    for i in 0..self.nwall {
                        s.d[i] += dt_s * w[i];
                    }
                    base = w;
                }
                s.u_tilde = base;
                self.fluid_robin(s, dt_f, beta, t_new);
                s.step += 1;
            }
            DenseScheme::RobinNeumann { dt } => {
                let t_new = (s.step + 1) as f64 * dt;
                self.fluid_robin(s, dt, 1.0, t_new);
                let w = self.wall_solve(dt, &s.u_s, &s.d, 1.0, &s.traction);
                for i in 0..self.nwall {
                    s.d[i] += dt * w[i];
                }
                s.u_tilde = w;
                s.step += 1;
            }
        }
    }

    /// Fluid solve with Robin data `u_tilde` and traction `beta T`, then the traction update.
    fn fluid_robin(&self, s: &mut DenseState, dt: f64, beta: f64, t_new: f64) {
        let mut rhs = self.fluid_rhs(dt, &s.u, t_new);
        let mw = self.wall_apply(&self.wall_mass, &s.u_tilde);
        for i in 0..self.nwall {
            if self.wall_interior(i) {
                rhs[self.wall_dof(i)] += mw[i] / dt + beta * s.traction[i];
            }
        }
        let (u, p) = self.solve_fluid(dt, 1.0 / dt, 0.0, &rhs);
        let us = self.trace(&u);
        let dv: Vec<f64> = us.iter().zip(&s.u_tilde).map(|(a, b)| a - b).collect();
        let md = self.wall_apply(&self.wall_mass, &dv);
        let mut t: Vec<f64> = (0..self.nwall).map(|i| beta * s.traction[i] - md[i] / dt).collect();
        self.mask_wall(&mut t);
        s.traction = t;
        s.u = u;
        s.p = p;
        s.u_s = us;
    }
}

/// Gaussian elimination with partial pivoting.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        assert!(a[piv][k].abs() > 1e-300, "singular dense system at column {k}");
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Sanity checks of the oracle's own integration rules.
pub fn oracle_self_check() {
    // integral of lambda_0^2 over the unit right triangle: 2 * 0.5 * 2 / 4! = 1/12
    let p = Poly::lambda(0).mul(&Poly::lambda(0));
    assert!((p.integrate_triangle(0.5) - 1.0 / 12.0).abs() < 1e-15);
    // P2 basis is a partition of unity
    let sum = p2_basis().iter().fold(Poly::default(), |a, b| a.add(b, 1.0));
    assert!((sum.integrate_triangle(0.5) - 0.5).abs() < 1e-15);
    let m = DenseModel::new(1.0, 0.5, 0.25, Material::benchmark());
    // total fluid mass = rho_f * area * 2 components
    let total: f64 = m.mass.iter().flatten().sum();
    assert!((total - 2.0 * 0.5).abs() < 1e-13);
    let wall: f64 = m.wall_mass.iter().flatten().sum();
    assert!((wall - 0.11).abs() < 1e-14);
    // inlet load integrates to the inlet height
    let inlet: f64 = m.inlet.iter().sum();
    assert!((inlet - 0.5).abs() < 1e-14);
}
