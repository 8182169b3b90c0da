//! Steps the library and the dense oracle side by side on the mini channel.

#![allow(dead_code)]

use super::dense::{DenseModel, DenseScheme, DenseState, Material};
use mrfsi::benchmark::pressure_wave_scenario;
use mrfsi::schemes::{FsiState, SchemeKind, Stepper};
use mrfsi::{Config as SchemeConfig, Discretization};
use mrfsi::Scenario;

/// Mini channel `L = 1`, `R = 0.5`, `h = 0.25` with the benchmark material and pulse.
pub fn mini_scenario() -> Scenario {
    let mut sc = pressure_wave_scenario(0.25);
    sc.length = 1.0;
    sc
}

/// Worst relative mismatch of each field over a trajectory.
#[derive(Debug, Clone, Default)]
pub struct Mismatch {
    pub steps: usize,
    /// `(name, max |lib - oracle|, max |oracle|)` per field.
    pub fields: Vec<(&'static str, f64, f64)>,
    /// Largest `||B u|| / max(1, ||u||)` seen in the library run.
    pub max_divergence: f64,
}

impl Mismatch {
    /// Mismatch relative to the field's scale over the whole trajectory.
    pub fn worst_relative(&self) -> f64 {
        self.fields.iter().map(|(_, e, s)| if *s > 0.0 { e / s } else { *e }).fold(0.0, f64::max)
    }

    pub fn describe(&self) -> String {
        self.fields.iter().map(|(n, e, s)| format!("{n} {:.1e}", if *s > 0.0 { e / s } else { *e })).collect::<Vec<_>>().join(", ")
    }

    fn update(&mut self, name: &'static str, lib: &[f64], oracle: &[f64]) {
        assert_eq!(lib.len(), oracle.len(), "{name}: length mismatch");
        let err = lib.iter().zip(oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = oracle.iter().map(|v| v.abs()).fold(0.0, f64::max);
        match self.fields.iter_mut().find(|f| f.0 == name) {
            Some(f) => {
                f.1 = f.1.max(err);
                f.2 = f.2.max(scale);
            }
            None => self.fields.push((name, err, scale)),
        }
    }
}

pub fn dense_scheme(cfg: &SchemeConfig) -> DenseScheme {
    match cfg.kind {
        SchemeKind::Implicit => DenseScheme::Implicit { dt: cfg.dt_s },
        SchemeKind::RobinNeumann => DenseScheme::RobinNeumann { dt: cfg.dt_s },
        SchemeKind::Beta | SchemeKind::MultirateBeta => DenseScheme::Multirate { beta: cfg.beta, dt_s: cfg.dt_s, ratio: cfg.ratio },
    }
}

/// Library state rearranged into the oracle's nodal numbering.
fn to_dense(disc: &Discretization, model: &DenseModel, s: &FsiState<f64>) -> DenseState {
    let snap = disc.snapshot(s);
    let mut u = vec![0.0; model.nvel];
    for q in 0..disc.dofs.num_p2_nodes() {
        let [x, y] = disc.dofs.p2_coords(&disc.mesh, q);
        for c in 0..2 {
            u[model.vel_dof(x, y, c)] = snap.velocity[2 * q + c];
        }
    }
    let mut p = vec![0.0; model.npres];
    for (v, xy) in disc.mesh.nodes.iter().enumerate() {
        p[model.pres_dof(xy[0], xy[1])] = snap.pressure[v];
    }
    DenseState {
        u,
        p,
        d: snap.displacement,
        u_s: disc.dofs.wall_to_nodal(&s.u_s),
        u_tilde: disc.dofs.wall_to_nodal(&s.u_tilde),
        traction: disc.dofs.wall_to_nodal(&s.traction),
        step: s.step,
    }
}

/// Runs `steps` coarse steps of `cfg` in both implementations from the zero state,
/// comparing every field after every step.
pub fn compare_with_oracle(cfg: SchemeConfig, steps: usize) -> Mismatch {
    let sc = mini_scenario();
    let disc = Discretization::new(&sc).expect("mini discretization");
    let stepper = Stepper::new(&disc, &sc, cfg).expect("stepper");
    let model = DenseModel::new(1.0, 0.5, 0.25, Material::benchmark());
    let scheme = dense_scheme(&cfg);
    let mut lib = disc.init_state(&sc).expect("initial state");
    let mut ora = DenseState::zero(&model);
    let mut m = Mismatch::default();
    for _ in 0..steps {
        stepper.advance(&mut lib);
        model.step(&mut ora, scheme);
        let got = to_dense(&disc, &model, &lib);
        m.update("u_f", &got.u, &ora.u);
        m.update("p_f", &got.p, &ora.p);
        m.update("d", &got.d, &ora.d);
        m.update("u_s", &got.u_s, &ora.u_s);
        if cfg.kind != SchemeKind::Implicit {
            m.update("u_tilde", &got.u_tilde, &ora.u_tilde);
        }
        m.update("T", &got.traction, &ora.traction);
        let bu = disc.forms.divergence.mul_vec(&lib.u_f);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        m.max_divergence = m.max_divergence.max(norm(&bu) / norm(&lib.u_f).max(1.0));
        m.steps += 1;
    }
    m
}

/// Runs two configurations through the library and reports whether every state is bitwise equal.
pub fn bitwise_equal_runs(a: SchemeConfig, b: SchemeConfig, steps: usize) -> bool {
    let sc = mini_scenario();
    let disc = Discretization::new(&sc).expect("mini discretization");
    let sa = Stepper::new(&disc, &sc, a).expect("stepper");
    let sb = Stepper::new(&disc, &sc, b).expect("stepper");
    let mut x = disc.init_state(&sc).expect("state");
    let mut y = x.clone();
    for _ in 0..steps {
        sa.advance(&mut x);
        sb.advance(&mut y);
        if x != y {
            return false;
        }
    }
    x.d.iter().any(|&v| v != 0.0)
}

/// Largest mismatch, relative to `max |T|`, between the library traction and the
/// fluid momentum residual `rho_f/dt M (u_new - u_old) + A u_new - B^T p_new - P l`
/// tested with the interface functions, computed from the dense matrices.
pub fn traction_residual_mismatch(cfg: SchemeConfig, steps: usize) -> f64 {
    let sc = mini_scenario();
    let disc = Discretization::new(&sc).expect("mini discretization");
    let stepper = Stepper::new(&disc, &sc, cfg).expect("stepper");
    let model = DenseModel::new(1.0, 0.5, 0.25, Material::benchmark());
    let dt = cfg.dt_f();
    let mut lib = disc.init_state(&sc).expect("initial state");
    let mut old = to_dense(&disc, &model, &lib);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        stepper.advance(&mut lib);
        let new = to_dense(&disc, &model, &lib);
        let t_new = lib.step as f64 * dt;
        for i in 1..model.nwall - 1 {
            let r = model.wall_dof(i);
            let inertia: f64 = (0..model.nvel).map(|c| model.mass[r][c] * (new.u[c] - old.u[c])).sum::<f64>() / dt;
            let visc: f64 = (0..model.nvel).map(|c| model.visc[r][c] * new.u[c]).sum();
            let pres: f64 = (0..model.npres).map(|k| model.grad[r][k] * new.p[k]).sum();
            let residual = inertia + visc + pres - model.mat.inlet(t_new) * model.inlet[r];
            err = err.max((residual - new.traction[i]).abs());
            scale = scale.max(new.traction[i].abs());
        }
        old = new;
    }
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}
