//! One-step operators of the four schemes over factored constant matrices.

use super::{FsiState, SchemeConfig, SchemeKind, Snapshot};
use crate::benchmark::Scenario;
use crate::error::{FsiError, Result};
use crate::fem::{interpolate_velocity, FormSet, FsiDofMap};
use crate::mesh::{ChannelMesh, InterfaceMesh};
use crate::scalar::{axpy, Scalar};
use crate::skyline::{LdltFactor, SkylineMatrix};

/// Mesh, spaces and assembled forms of one scenario.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub mesh: ChannelMesh<T>,
    pub iface: InterfaceMesh<T>,
    pub dofs: FsiDofMap,
    pub forms: FormSet<T>,
}

impl<T: Scalar> Discretization<T> {
    pub fn new(scenario: &Scenario<T>) -> Result<Self> {
        scenario.validate()?;
        let mesh = ChannelMesh::build(scenario.length, scenario.height, scenario.h)?;
        Self::from_mesh(mesh, scenario)
    }

    pub fn from_mesh(mesh: ChannelMesh<T>, scenario: &Scenario<T>) -> Result<Self> {
        let iface = InterfaceMesh::extract(&mesh);
        let dofs = FsiDofMap::build(&mesh, &iface)?;
        let forms = FormSet::assemble(&mesh, &iface, &dofs, &scenario.params);
        Ok(Discretization { mesh, iface, dofs, forms })
    }

    /// Initial state from the scenario's initial fields.
    pub fn init_state(&self, scenario: &Scenario<T>) -> Result<FsiState<T>> {
        let d = &self.dofs;
        let mut s = FsiState::zeros(d.num_vel(), d.num_pres(), d.num_struct());
        if let Some(f) = &scenario.initial.velocity {
            let nodal = interpolate_velocity(&self.mesh, d, |x, y| f(x, y));
            let scale = nodal.iter().fold(T::one(), |m, v| m.max(v.abs()));
            s.u_f = d.velocity_from_nodal(&nodal, T::lit(1e-12) * scale)?;
            s.u_s = d.interface_trace(&s.u_f);
            s.u_tilde = s.u_s.clone();
            let au = self.forms.viscous.mul_vec(&s.u_f);
            s.traction = d.interface_trace(&au);
        }
        if let Some(g) = &scenario.initial.displacement {
            let h2 = self.mesh.h / T::lit(2.0);
            s.d = d.struct_nodal.iter().map(|&i| g(T::from_usize_(i) * h2)).collect();
        }
        Ok(s)
    }

    /// Nodal snapshot of a state.
    pub fn snapshot(&self, s: &FsiState<T>) -> Snapshot<T> {
        Snapshot {
            time: s.time,
            velocity: self.dofs.velocity_to_nodal(&s.u_f),
            pressure: s.p_f.clone(),
            displacement: self.dofs.wall_to_nodal(&s.d),
        }
    }
}

/// Velocity-pressure saddle matrix in system numbering:
/// `rho_f/dt M_f + A + a M_w + b K_s` (last two on the interface unknowns) with the divergence blocks.
pub fn coupled_system<T: Scalar>(dofs: &FsiDofMap, forms: &FormSet<T>, dt: T, wall_mass_coef: T, wall_stiff_coef: T) -> SkylineMatrix<T> {
    let inv_dt = T::one() / dt;
    let sv = &dofs.sys_vel;
    let sp = &dofs.sys_pres;
    let iv = &dofs.iface_vel;
    SkylineMatrix::assemble(dofs.num_system(), |e| {
        for (r, c, v) in forms.fluid_mass.iter() {
            if sv[r] >= sv[c] {
                e(sv[r], sv[c], inv_dt * v);
            }
        }
        for (r, c, v) in forms.viscous.iter() {
            if sv[r] >= sv[c] {
                e(sv[r], sv[c], v);
            }
        }
        if wall_mass_coef != T::zero() {
            for (r, c, v) in forms.wall_mass.iter() {
                let (a, b) = (sv[iv[r]], sv[iv[c]]);
                if a >= b {
                    e(a, b, wall_mass_coef * v);
                }
            }
        }
        if wall_stiff_coef != T::zero() {
            for (r, c, v) in forms.wall_stiffness.iter() {
                let (a, b) = (sv[iv[r]], sv[iv[c]]);
                if a >= b {
                    e(a, b, wall_stiff_coef * v);
                }
            }
        }
        for (p, u, v) in forms.divergence.iter() {
            let (a, b) = (sp[p], sv[u]);
            e(a.max(b), a.min(b), v);
        }
    })
}

/// Factored operators of one scheme configuration, applied to [`FsiState`]s.
#[derive(Debug)]
pub struct Stepper<'a, T> {
    disc: &'a Discretization<T>,
    scenario: &'a Scenario<T>,
    cfg: SchemeConfig<T>,
    /// `(rho_s eps / dt_s) M^ + dt_s K_s`.
    wall: Option<LdltFactor<T>>,
    /// Fluid saddle system with the Robin mass term.
    fluid: Option<LdltFactor<T>>,
    /// Monolithic system.
    monolithic: Option<LdltFactor<T>>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    /// Validates the configuration and factors every matrix the scheme needs.
    pub fn new(disc: &'a Discretization<T>, scenario: &'a Scenario<T>, cfg: SchemeConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let forms = &disc.forms;
        let dofs = &disc.dofs;
        let (dt_s, dt_f) = (cfg.dt_s, cfg.dt_f());
        let mut st = Stepper { disc, scenario, cfg, wall: None, fluid: None, monolithic: None };
        match cfg.kind {
            SchemeKind::Implicit => {
                st.monolithic = Some(coupled_system(dofs, forms, dt_f, T::one() / dt_f, dt_f).factor()?);
            }
            _ => {
                let inv = T::one() / dt_s;
                let ns = dofs.num_struct();
                let wall = SkylineMatrix::assemble(ns, |e| {
                    for (r, c, v) in forms.wall_mass.iter() {
                        if r >= c {
                            e(r, c, inv * v);
                        }
                    }
                    for (r, c, v) in forms.wall_stiffness.iter() {
                        if r >= c {
                            e(r, c, dt_s * v);
                        }
                    }
                });
                st.wall = Some(wall.factor()?);
                st.fluid = Some(coupled_system(dofs, forms, dt_f, T::one() / dt_f, T::zero()).factor()?);
            }
        }
        Ok(st)
    }

    pub fn config(&self) -> &SchemeConfig<T> {
        &self.cfg
    }

    pub fn discretization(&self) -> &Discretization<T> {
        self.disc
    }

    /// Sum of envelope sizes of the factored matrices.
    pub fn factor_storage(&self) -> usize {
        [&self.wall, &self.fluid, &self.monolithic].iter().filter_map(|f| f.as_ref()).map(|f| f.envelope_size()).sum()
    }

    /// Advances one coarse step with the configured scheme.
    pub fn advance(&self, s: &mut FsiState<T>) {
        match self.cfg.kind {
            SchemeKind::Implicit => self.implicit_step(s),
            SchemeKind::Beta | SchemeKind::MultirateBeta => self.multirate_advance(s),
            SchemeKind::RobinNeumann => self.rn_step(s),
        }
    }

    fn t_next(&self, s: &FsiState<T>) -> T {
        T::from_usize_(s.step + 1) * self.cfg.dt_f()
    }

    /// Wall solve `[(rho_s eps/dt_s) M^ + dt_s K_s] w = (rho_s eps/dt_s) M^ base - K_s d - coef T`.
    fn wall_solve(&self, base: &[T], d: &[T], coef: T, traction: &[T]) -> Vec<T> {
        let forms = &self.disc.forms;
        let inv = T::one() / self.cfg.dt_s;
        let mut rhs = vec![T::zero(); base.len()];
        forms.wall_mass.mul_vec_add(inv, base, &mut rhs);
        forms.wall_stiffness.mul_vec_add(-T::one(), d, &mut rhs);
        axpy(-coef, traction, &mut rhs);
        self.wall.as_ref().expect("wall factor").solve_in_place(&mut rhs);
        rhs
    }

    /// One wall substep of size `dt_s` driven by `-beta T^{m_k}`.
    ///
    /// The old velocity is the fluid trace `u_s` at the first substep of a coarse
    /// step and the previous intermediate velocity afterwards.
    pub fn structure_substep(&self, s: &mut FsiState<T>) {
        let base = if s.substep == s.step * self.cfg.ratio { &s.u_s } else { &s.u_tilde };
        let w = self.wall_solve(base, &s.d, self.cfg.effective_beta(), &s.traction);
        axpy(self.cfg.dt_s, &w, &mut s.d);
        s.u_tilde = w;
        s.substep += 1;
    }

    fn solve_saddle(&self, factor: &LdltFactor<T>, rhs_vel: &[T], s: &mut FsiState<T>) {
        let dofs = &self.disc.dofs;
        let mut x = vec![T::zero(); dofs.num_system()];
        for (k, &v) in rhs_vel.iter().enumerate() {
            x[dofs.sys_vel[k]] = v;
        }
        factor.solve_in_place(&mut x);
        for (k, u) in s.u_f.iter_mut().enumerate() {
            *u = x[dofs.sys_vel[k]];
        }
        for (k, p) in s.p_f.iter_mut().enumerate() {
            *p = x[dofs.sys_pres[k]];
        }
    }

    fn fluid_rhs(&self, s: &FsiState<T>, dt: T, t_new: T) -> Vec<T> {
        let forms = &self.disc.forms;
        let mut rhs = vec![T::zero(); s.u_f.len()];
        forms.fluid_mass.mul_vec_add(T::one() / dt, &s.u_f, &mut rhs);
        axpy(self.scenario.inlet_pressure(t_new), &forms.inlet_load, &mut rhs);
        rhs
    }

    /// Fluid step of size `dt_f` with Robin data `u~_s` and traction `beta T`, then the traction update.
    pub fn fluid_step(&self, s: &mut FsiState<T>, t_new: T) {
        let forms = &self.disc.forms;
        let dofs = &self.disc.dofs;
        let dt_f = self.cfg.dt_f();
        let beta = self.cfg.effective_beta();
        let mut rhs = self.fluid_rhs(s, dt_f, t_new);
        let robin = forms.wall_mass.mul_vec(&s.u_tilde);
        let inv = T::one() / dt_f;
        for (i, &k) in dofs.iface_vel.iter().enumerate() {
            rhs[k] += inv * robin[i] + beta * s.traction[i];
        }
        self.solve_saddle(self.fluid.as_ref().expect("fluid factor"), &rhs, s);
        s.u_s = dofs.interface_trace(&s.u_f);
        self.traction_update(s);
    }

    /// `T <- beta T - (rho_s eps / dt_f) M^ (u_s - u~_s)`.
    pub fn traction_update(&self, s: &mut FsiState<T>) {
        let beta = self.cfg.effective_beta();
        let jump: Vec<T> = s.u_s.iter().zip(&s.u_tilde).map(|(a, b)| *a - *b).collect();
        let mj = self.disc.forms.wall_mass.mul_vec(&jump);
        let inv = T::one() / self.cfg.dt_f();
        for (t, m) in s.traction.iter_mut().zip(mj) {
            *t = beta * *t - inv * m;
        }
    }

    /// `r` wall substeps followed by one fluid step. With `r = 1` this is the beta scheme.
    pub fn multirate_advance(&self, s: &mut FsiState<T>) {
        for _ in 0..self.cfg.ratio {
            self.structure_substep(s);
        }
        let t_new = self.t_next(s);
        self.fluid_step(s, t_new);
        s.step += 1;
        s.time = t_new;
    }

    /// Backward Euler on the monolithic problem.
    pub fn implicit_step(&self, s: &mut FsiState<T>) {
        let forms = &self.disc.forms;
        let dofs = &self.disc.dofs;
        let dt = self.cfg.dt_f();
        let inv = T::one() / dt;
        let t_new = self.t_next(s);
        let mut rhs = self.fluid_rhs(s, dt, t_new);
        let mu = forms.wall_mass.mul_vec(&s.u_s);
        let kd = forms.wall_stiffness.mul_vec(&s.d);
        for (i, &k) in dofs.iface_vel.iter().enumerate() {
            rhs[k] += inv * mu[i] - kd[i];
        }
        let u_old = std::mem::take(&mut s.u_s);
        self.solve_saddle(self.monolithic.as_ref().expect("monolithic factor"), &rhs, s);
        s.u_s = dofs.interface_trace(&s.u_f);
        axpy(dt, &s.u_s, &mut s.d);
        // traction implied by the wall equation
        let jump: Vec<T> = s.u_s.iter().zip(&u_old).map(|(a, b)| *a - *b).collect();
        let mut t = forms.wall_mass.mul_vec(&jump);
        for v in t.iter_mut() {
            *v = -inv * *v;
        }
        forms.wall_stiffness.mul_vec_add(-T::one(), &s.d, &mut t);
        s.traction = t;
        s.u_tilde = s.u_s.clone();
        s.substep += 1;
        s.step += 1;
        s.time = t_new;
    }

    /// Robin–Neumann round: fluid step with Robin data from the previous wall
    /// velocity, traction update, then a Neumann wall step driven by `-T^{n+1}`
    /// starting from the fresh fluid trace. This is the beta = 1 sequence with
    /// the two solves swapped.
    pub fn rn_step(&self, s: &mut FsiState<T>) {
        let t_new = self.t_next(s);
        self.fluid_step(s, t_new);
        let w = self.wall_solve(&s.u_s, &s.d, T::one(), &s.traction);
        axpy(self.cfg.dt_s, &w, &mut s.d);
        s.u_tilde = w;
        s.substep += 1;
        s.step += 1;
        s.time = t_new;
    }

    /// Checks a state for blow-up.
    pub fn check(&self, s: &FsiState<T>) -> Result<()> {
        let reason = if !s.is_finite() {
            Some("non-finite value in the state".to_string())
        } else {
            let m = crate::scalar::norm_inf(&s.u_f);
            (m > T::lit(1e12)).then(|| format!("max |u_f| = {:e} exceeds 1e12", m.to_f64_()))
        };
        match reason {
            Some(reason) => Err(FsiError::BlowUp { step: s.step, time: s.time.to_f64_(), reason }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::pressure_wave_scenario;
    use crate::scalar::norm_inf;

    fn mini() -> (Scenario<f64>, Discretization<f64>) {
        let mut sc = pressure_wave_scenario(0.25);
        sc.length = 1.0;
        let disc = Discretization::new(&sc).unwrap();
        (sc, disc)
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let (sc, disc) = mini();
        let sc = sc.unforced();
        for cfg in [
            SchemeConfig::implicit(1e-4, 1e-3),
            SchemeConfig::beta(1.0, 1e-4, 1e-3),
            SchemeConfig::multirate(0.5, 1e-5, 2, 1e-3),
            SchemeConfig::robin_neumann(1e-4, 1e-3),
        ] {
            let st = Stepper::new(&disc, &sc, cfg).unwrap();
            let mut s = disc.init_state(&sc).unwrap();
            for _ in 0..3 {
                st.advance(&mut s);
            }
            assert_eq!(norm_inf(&s.u_f), 0.0);
            assert_eq!(norm_inf(&s.d), 0.0);
            assert_eq!(norm_inf(&s.traction), 0.0);
        }
    }

    #[test]
    fn interface_trace_matches_after_each_step() {
        let (sc, disc) = mini();
        for cfg in [SchemeConfig::implicit(1e-4, 1e-3), SchemeConfig::multirate(1.0, 1e-5, 3, 1.2e-3)] {
            let st = Stepper::new(&disc, &sc, cfg).unwrap();
            let mut s = disc.init_state(&sc).unwrap();
            for _ in 0..5 {
                st.advance(&mut s);
                assert_eq!(s.u_s, disc.dofs.interface_trace(&s.u_f));
                let div = disc.forms.divergence.mul_vec(&s.u_f);
                assert!(norm_inf(&div) <= 1e-10 * norm_inf(&s.u_f).max(1.0));
            }
            assert!(norm_inf(&s.d) > 0.0);
        }
    }

    #[test]
    fn unit_beta_keeps_traction_when_velocities_agree() {
        let (sc, disc) = mini();
        let st = Stepper::new(&disc, &sc, SchemeConfig::beta(1.0, 1e-4, 1e-3)).unwrap();
        let mut s = disc.init_state(&sc).unwrap();
        s.traction = (0..s.traction.len()).map(|k| k as f64 + 0.5).collect();
        s.u_s = vec![0.25; s.u_s.len()];
        s.u_tilde = s.u_s.clone();
        let before = s.traction.clone();
        st.traction_update(&mut s);
        assert_eq!(s.traction, before);
    }

    #[test]
    fn zero_beta_traction_prefactor() {
        let (sc, disc) = mini();
        let st = Stepper::new(&disc, &sc, SchemeConfig::beta(0.0, 1e-4, 1e-3)).unwrap();
        let mut s = disc.init_state(&sc).unwrap();
        s.traction = vec![7.0; s.traction.len()];
        s.u_s = vec![1.0; s.u_s.len()];
        st.traction_update(&mut s);
        let expect = disc.forms.iface_mass.mul_vec(&vec![1.0; s.u_s.len()]);
        for (t, m) in s.traction.iter().zip(expect) {
            assert!((t - (-1100.0 * m)).abs() < 1e-9 * m.abs() * 1100.0);
        }
    }

    #[test]
    fn stiffness_free_wall_step_reduces_to_mass_solve() {
        let (mut sc, _) = mini();
        sc.params.c0 = 0.0;
        sc.params.c1 = 0.0;
        let disc = Discretization::new(&sc).unwrap();
        let st = Stepper::new(&disc, &sc, SchemeConfig::beta(1.0, 1e-4, 1e-3)).unwrap();
        let mut s = disc.init_state(&sc).unwrap();
        let n = s.u_s.len();
        s.u_s = (0..n).map(|k| (k as f64).sin()).collect();
        s.traction = (0..n).map(|k| 1.0 + k as f64).collect();
        st.structure_substep(&mut s);
        // u~ = u - (beta dt / (rho_s eps)) M^-1 T  <=>  M^ (u - u~) = (dt / (rho_s eps)) T
        let diff: Vec<f64> = s.u_s.iter().zip(&s.u_tilde).map(|(a, b)| a - b).collect();
        let md = disc.forms.iface_mass.mul_vec(&diff);
        let c = 1e-4 / 0.11;
        for (a, t) in md.iter().zip(&s.traction) {
            assert!((a - c * t).abs() < 1e-12 * (c * t).abs().max(1e-300));
        }
    }

    #[test]
    fn rejects_dirichlet_violating_initial_velocity() {
        let (mut sc, disc) = mini();
        sc.initial.velocity = Some(std::sync::Arc::new(|_, _| [1.0, 0.0]));
        assert!(disc.init_state(&sc).is_err());
        sc.initial.velocity = Some(std::sync::Arc::new(|_, y: f64| [y * (0.5 - y), 0.0]));
        let s = disc.init_state(&sc).unwrap();
        assert!(norm_inf(&s.u_f) > 0.0);
        sc.initial.velocity = None;
        sc.initial.displacement = Some(std::sync::Arc::new(|x: f64| x * (1.0 - x)));
        let s = disc.init_state(&sc).unwrap();
        for (k, &i) in disc.dofs.struct_nodal.iter().enumerate() {
            let x = i as f64 * 0.125;
            assert_eq!(s.d[k], x * (1.0 - x));
        }
    }

    #[test]
    fn implicit_runs_are_deterministic() {
        let (sc, disc) = mini();
        let run = || {
            let st = Stepper::new(&disc, &sc, SchemeConfig::implicit(1e-4, 1e-3)).unwrap();
            let mut s = disc.init_state(&sc).unwrap();
            for _ in 0..4 {
                st.advance(&mut s);
            }
            s
        };
        assert_eq!(run(), run());
    }
}
