//! The subcommands. Each returns `Ok` on success; the caller maps errors to exit codes.

use std::fmt::Write as _;
use std::path::Path;

use mrfsi::analysis::{
    convergence_study, profile_difference, refinement_schedule, timing_report, ErrorReport, ReferenceGrid, StudyConfig,
};
use mrfsi::benchmark::{generate_reference_for, ReferenceSolution};
use mrfsi::fem::FsiDofMap;
use mrfsi::mesh::{ChannelMesh, InterfaceMesh};
use mrfsi::schemes::{RunOptions, SchemeConfig, SchemeKind, Simulation, SimulationResult};
use mrfsi::{FsiError, Result};

use crate::config::{RunConfig, Variant};
use crate::output::{energy_csv, num, opt_num, profile_csv, time_tag, write_text, Csv};

/// Unknown counts of a mesh, for plans.
fn sizes(cfg: &RunConfig, h: f64) -> Result<String> {
    let mesh = ChannelMesh::<f64>::build(cfg.length, cfg.height, h)?;
    let dofs = FsiDofMap::build(&mesh, &InterfaceMesh::extract(&mesh))?;
    Ok(format!(
        "{} x {} cells, {} velocity + {} pressure + {} wall unknowns",
        mesh.nx,
        mesh.ny,
        dofs.num_vel(),
        dofs.num_pres(),
        dofs.num_struct()
    ))
}

fn describe(c: &SchemeConfig<f64>) -> String {
    let steps = c.num_steps().map(|n| n.to_string()).unwrap_or_else(|_| "?".into());
    format!("{} beta={} dt_s={} r={} dt_f={} steps={}", c.kind, c.beta, c.dt_s, c.ratio, c.dt_f(), steps)
}

/// Writes the displacement profile and pressure snapshot of every stored output time.
fn write_snapshots(dir: &Path, prefix: &str, sim: &Simulation<f64>, res: &SimulationResult<f64>) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for snap in &res.snapshots {
        let tag = time_tag(snap.time_label(&sim.scenario.output_times));
        let name = format!("{prefix}displacement_{tag}.csv");
        profile_csv(sim.scenario.length, &snap.displacement).write(&dir.join(&name))?;
        written.push(name);
        let vtk = format!("{prefix}pressure_{tag}.vtk");
        sim.disc.mesh.write_vtk(&dir.join(&vtk), &[("pressure", &snap.pressure)])?;
        written.push(vtk);
    }
    Ok(written)
}

/// Output time a snapshot was stored for (the snapshot time itself carries rounding).
trait TimeLabel {
    fn time_label(&self, output_times: &[f64]) -> f64;
}

impl TimeLabel for mrfsi::schemes::Snapshot<f64> {
    fn time_label(&self, output_times: &[f64]) -> f64 {
        output_times
            .iter()
            .copied()
            .min_by(|a, b| (a - self.time).abs().total_cmp(&(b - self.time).abs()))
            .unwrap_or(self.time)
    }
}

pub fn cmd_run(cfg: &RunConfig, dry_run: bool) -> Result<()> {
    cfg.validate()?;
    let scheme = cfg.scheme_config()?;
    if dry_run {
        println!("run: {}", describe(&scheme));
        println!("mesh h={}: {}", cfg.h, sizes(cfg, cfg.h)?);
        println!("outputs in {}", cfg.out.display());
        return Ok(());
    }
    let sc = cfg.scenario()?;
    let sim = Simulation::new(&sc, scheme)?;
    let res = match sim.run(&RunOptions::default()) {
        Ok(r) => r,
        Err(e @ FsiError::BlowUp { .. }) => {
            write_text(&cfg.out.join("summary.txt"), &format!("{}\nstatus: {e}\n", describe(&scheme)))?;
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    let files = write_snapshots(&cfg.out, "", &sim, &res)?;
    energy_csv(&res.records).write(&cfg.out.join("energy.csv"))?;
    let mut s = String::new();
    let _ = writeln!(s, "{}", describe(&scheme));
    let _ = writeln!(s, "h = {}", cfg.h);
    let _ = writeln!(s, "status: completed");
    let _ = writeln!(s, "max |d| = {}", num(res.max_abs_displacement()));
    let _ = writeln!(s, "max divergence ratio = {}", num(res.max_divergence()));
    if let Some(e) = res.records.last().and_then(|r| r.energy) {
        let _ = writeln!(s, "final energy = {}", num(e.total));
    }
    let _ = writeln!(s, "files: energy.csv {}", files.join(" "));
    write_text(&cfg.out.join("summary.txt"), &s)?;
    print!("{s}");
    eprintln!(
        "assembly {:.3}s, factorization {:.3}s, marching {:.3}s",
        res.timings.assembly.as_secs_f64(),
        res.timings.factorization.as_secs_f64(),
        res.timings.marching.as_secs_f64()
    );
    Ok(())
}

/// Loads the reference, generating it first when allowed.
fn obtain_reference(cfg: &RunConfig, generate: bool) -> Result<ReferenceSolution> {
    let path = cfg.reference_path();
    if path.exists() {
        let r = ReferenceSolution::load(&path)?;
        if r.matches(cfg.reference_h, cfg.reference_dt, cfg.t_end) {
            return Ok(r);
        }
        if !generate {
            return Err(FsiError::Config(format!(
                "reference {} was computed with h={}, dt={}, T={} but h={}, dt={}, T={} is configured; pass --generate-reference to recompute",
                path.display(),
                r.h_ref,
                r.dt_ref,
                r.t_end,
                cfg.reference_h,
                cfg.reference_dt,
                cfg.t_end
            )));
        }
    } else if !generate {
        return Err(FsiError::Config(format!(
            "reference file {} not found; pass --generate-reference to compute it",
            path.display()
        )));
    }
    let mut sc = cfg.scenario_at(cfg.reference_h)?;
    sc.output_times = vec![cfg.t_end];
    eprintln!("generating reference h={} dt={} T={} ...", cfg.reference_h, cfg.reference_dt, cfg.t_end);
    let run = generate_reference_for(&sc, cfg.reference_dt, cfg.t_end)?;
    eprintln!("reference done in {:.1}s", run.elapsed.as_secs_f64());
    if run.over_budget {
        eprintln!("warning: reference generation exceeded its time budget");
    }
    run.reference.save(&path)?;
    Ok(run.reference)
}

pub fn convergence_csv(report: &ErrorReport) -> Csv {
    let mut csv = Csv::new(&[
        "level", "h", "dt_s", "err_uf", "err_pf", "err_d", "factor_uf", "factor_pf", "factor_d", "order_fit",
    ]);
    let factors = report.factors();
    // slowest field's least-squares order over all successful levels
    let order = report.orders().map(|o| o.iter().copied().fold(f64::INFINITY, f64::min));
    for (i, row) in report.rows.iter().enumerate() {
        let e = row.errors;
        let f = if i == 0 { None } else { factors[i - 1] };
        csv.row([
            row.level.to_string(),
            num(row.h),
            num(row.dt_s),
            opt_num(e.map(|e| e[0])),
            opt_num(e.map(|e| e[1])),
            opt_num(e.map(|e| e[2])),
            opt_num(f.map(|f| f[0])),
            opt_num(f.map(|f| f[1])),
            opt_num(f.map(|f| f[2])),
            opt_num(order),
        ]);
    }
    csv
}

pub fn cmd_converge(cfg: &RunConfig, generate_reference: bool, dry_run: bool) -> Result<()> {
    cfg.validate()?;
    if cfg.levels == 0 {
        return Err(FsiError::Config("levels must be at least 1".into()));
    }
    let levels: Vec<usize> = (0..cfg.levels).collect();
    if dry_run {
        println!("reference: {} (h={}, dt={})", cfg.reference_path().display(), cfg.reference_h, cfg.reference_dt);
        for &l in &levels {
            let (h, dt_s) = refinement_schedule(l);
            let c = SchemeConfig::new(cfg.scheme, cfg.beta, dt_s, cfg.ratio, cfg.t_end);
            c.validate()?;
            println!("level {l}: h={h} {} | {}", describe(&c), sizes(cfg, h)?);
        }
        return Ok(());
    }
    let reference = obtain_reference(cfg, generate_reference)?;
    let grid = ReferenceGrid::new(&reference)?;
    let study = StudyConfig { kind: cfg.scheme, beta: cfg.beta, ratio: cfg.ratio, t_eval: cfg.t_end };
    let base = cfg.clone();
    let report = convergence_study(&levels, &study, &grid, |h| {
        base.scenario_at(h).expect("configuration validated before the study")
    })?;
    convergence_csv(&report).write(&cfg.out.join("convergence_table.csv"))?;
    let mut s = String::new();
    let _ = writeln!(s, "convergence: {} beta={} r={} t={}", cfg.scheme, cfg.beta, cfg.ratio, cfg.t_end);
    for row in &report.rows {
        match (row.errors, &row.failure) {
            (Some(e), _) => {
                let _ = writeln!(s, "level {} h={}: u_f {} p_f {} d {}", row.level, row.h, num(e[0]), num(e[1]), num(e[2]));
            }
            (None, f) => {
                let _ = writeln!(s, "level {} h={}: FAILED {}", row.level, row.h, f.as_deref().unwrap_or(""));
            }
        }
    }
    if let Some(o) = report.orders() {
        let _ = writeln!(s, "least-squares order: u_f {:.3} p_f {:.3} d {:.3}", o[0], o[1], o[2]);
    }
    write_text(&cfg.out.join("convergence_summary.txt"), &s)?;
    print!("{s}");
    if report.rows.iter().any(|r| r.errors.is_none()) {
        let f = report.rows.iter().find_map(|r| r.failure.clone()).unwrap_or_default();
        return Err(FsiError::BlowUp { step: 0, time: f64::NAN, reason: format!("a level failed: {f}") });
    }
    Ok(())
}

pub fn cmd_compare(cfg: &RunConfig, dry_run: bool) -> Result<()> {
    cfg.validate()?;
    if cfg.variants.is_empty() {
        return Err(FsiError::Config("variants must not be empty".into()));
    }
    let configs: Vec<(Variant, SchemeConfig<f64>)> =
        cfg.variants.iter().map(|&v| Ok((v, cfg.variant_config(v)?))).collect::<Result<_>>()?;
    if dry_run {
        for (_, c) in &configs {
            println!("variant: {}", describe(c));
        }
        println!("mesh h={}: {}", cfg.h, sizes(cfg, cfg.h)?);
        return Ok(());
    }
    let sc = cfg.scenario()?;
    let base = Simulation::new(&sc, configs[0].1)?;
    let opts = RunOptions { profile_stride: 0, energy: false, divergence: true };
    let mut finals: Vec<(String, Option<Vec<f64>>)> = Vec::new();
    let mut failure = None;
    let mut s = String::new();
    for (v, c) in &configs {
        let label = v.label();
        let sim = base.with_config(*c)?;
        match sim.run(&opts) {
            Ok(res) => {
                write_snapshots(&cfg.out, &format!("{label}_"), &sim, &res)?;
                let profile = sim.disc.dofs.wall_to_nodal(&res.final_state.d);
                profile_csv(sc.length, &profile).write(&cfg.out.join(format!("{label}_final.csv")))?;
                let _ = writeln!(s, "{label}: completed, max |d| = {}", num(res.max_abs_displacement()));
                finals.push((label, Some(profile)));
            }
            Err(e @ FsiError::BlowUp { .. }) => {
                let _ = writeln!(s, "{label}: {e}");
                finals.push((label, None));
                failure = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    let mut csv = Csv::new(&["variant_a", "variant_b", "time", "l2", "linf"]);
    for i in 0..finals.len() {
        for j in i + 1..finals.len() {
            let (a, b) = (&finals[i], &finals[j]);
            let d = match (&a.1, &b.1) {
                (Some(pa), Some(pb)) => Some(profile_difference(&base.disc.iface, pb, pa)),
                _ => None,
            };
            csv.row([a.0.clone(), b.0.clone(), num(cfg.t_end), opt_num(d.map(|d| d.l2)), opt_num(d.map(|d| d.linf))]);
        }
    }
    csv.write(&cfg.out.join("pairwise_differences.csv"))?;
    write_text(&cfg.out.join("compare_summary.txt"), &s)?;
    print!("{s}");
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

pub fn cmd_stability(cfg: &RunConfig, dry_run: bool) -> Result<()> {
    cfg.validate()?;
    let scheme = cfg.scheme_config()?;
    if dry_run {
        println!("stability: {} | energy checked from t={} with tolerance {}", describe(&scheme), cfg.check_from, cfg.energy_tol);
        println!("mesh h={}: {}", cfg.h, sizes(cfg, cfg.h)?);
        return Ok(());
    }
    let mut sc = cfg.scenario()?;
    sc.output_times.clear();
    let res = Simulation::new(&sc, scheme)?.run(&RunOptions::default())?;
    energy_csv(&res.records).write(&cfg.out.join("energy.csv"))?;
    let check = res.energy_trace().check_non_increasing(cfg.energy_tol, cfg.check_from);
    let verdict = if check.passed() { "PASS" } else { "FAIL" };
    let mut s = String::new();
    let _ = writeln!(s, "stability: {}", describe(&scheme));
    let _ = writeln!(s, "steps checked from t={}: {}", cfg.check_from, check.steps_checked);
    let _ = writeln!(s, "worst relative growth: {}", num(check.worst_growth));
    if let Some(k) = check.first_violation {
        let _ = writeln!(s, "first violation at step {k}");
    }
    let _ = writeln!(s, "verdict: {verdict}");
    write_text(&cfg.out.join("stability_summary.txt"), &s)?;
    print!("{s}");
    Ok(())
}

pub fn bench_configs(cfg: &RunConfig) -> Result<Vec<SchemeConfig<f64>>> {
    let mut v = vec![SchemeConfig::implicit(cfg.dt_s, cfg.t_end)];
    for &r in &cfg.bench_ratios {
        v.push(SchemeConfig::new(SchemeKind::MultirateBeta, cfg.beta, cfg.dt_s, r, cfg.t_end));
    }
    for c in &v {
        c.validate()?;
    }
    Ok(v)
}

pub fn cmd_bench(cfg: &RunConfig, dry_run: bool) -> Result<()> {
    let configs = bench_configs(cfg)?;
    for &h in &cfg.bench_h {
        cfg.scenario_at(h)?;
        ChannelMesh::<f64>::build(cfg.length, cfg.height, h)?;
    }
    if dry_run {
        for &h in &cfg.bench_h {
            println!("h={h}: {}", sizes(cfg, h)?);
            for c in &configs {
                println!("  {}", describe(c));
            }
        }
        return Ok(());
    }
    let mut table = Csv::new(&["h", "scheme", "ratio", "assembly_s", "factorization_s", "marching_s", "total_s"]);
    let mut ratios = Csv::new(&["h", "implicit_over_r1", "implicit_over_r10", "r1_over_r10"]);
    for &h in &cfg.bench_h {
        let mut sc = cfg.scenario_at(h)?;
        sc.output_times.clear();
        let t = timing_report(&sc, &configs)?;
        for row in &t.rows {
            let tm = row.timings;
            table.row([
                num(h),
                row.kind.name().to_string(),
                row.ratio.to_string(),
                num(tm.assembly.as_secs_f64()),
                num(tm.factorization.as_secs_f64()),
                num(tm.marching.as_secs_f64()),
                num(row.seconds()),
            ]);
            println!("h={h} {:<22} {:>10.3}s", row.label(), row.seconds());
        }
        let r = t.ratios;
        ratios.row([num(h), opt_num(r.implicit_over_r1), opt_num(r.implicit_over_r10), opt_num(r.r1_over_r10)]);
        // rewrite after every mesh so partial results survive an interrupted sweep
        table.write(&cfg.out.join("timing_table.csv"))?;
        ratios.write(&cfg.out.join("timing_ratios.csv"))?;
    }
    Ok(())
}
