//! `mrfsi`: runs, convergence study, scheme comparison, energy check and timings.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical blow-up.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mrfsi::FsiError;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "mrfsi", version, about = "Stokes flow in a channel with a thin elastic wall")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One simulation: displacement profiles, pressure snapshots, energy trace.
    Run(Common),
    /// Error table over the refinement schedule against a fine implicit reference.
    Converge(Common),
    /// Several scheme variants on one mesh with pairwise profile differences.
    Compare(Common),
    /// Energy trace and its monotonicity verdict after the pulse.
    Stability(Common),
    /// Wall-clock table of implicit and multirate runs over several meshes.
    Bench(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "dt-s")]
    dt_s: Option<f64>,
    #[arg(long)]
    ratio: Option<usize>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference solution file (default `<out>/reference.bin`).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Compute the reference if it is missing or stale.
    #[arg(long)]
    generate_reference: bool,
    /// Print the plan without solving.
    #[arg(long)]
    dry_run: bool,
    /// Any config key, e.g. `--set variants=implicit,multirate_beta:10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    /// Defaults, then the config file, then `--set`, then the named flags.
    fn resolve(&self) -> mrfsi::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(p) = &self.config {
            c.merge_file(p)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| FsiError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            c.set(k, v)?;
        }
        let flags: [(&str, Option<String>); 8] = [
            ("scheme", self.scheme.clone()),
            ("beta", self.beta.map(|v| v.to_string())),
            ("h", self.h.map(|v| v.to_string())),
            ("dt_s", self.dt_s.map(|v| v.to_string())),
            ("ratio", self.ratio.map(|v| v.to_string())),
            ("t_end", self.t_end.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("reference", self.reference.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        Ok(c)
    }
}

/// Prints (dry run) or stores the resolved configuration before dispatching.
fn prepare(c: &Common) -> mrfsi::Result<RunConfig> {
    let cfg = c.resolve()?;
    if c.dry_run {
        print!("{}", cfg.render());
    } else {
        std::fs::create_dir_all(&cfg.out)?;
        std::fs::write(cfg.out.join("config.txt"), cfg.render())?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> mrfsi::Result<()> {
    match &cli.command {
        Command::Run(c) => commands::cmd_run(&prepare(c)?, c.dry_run),
        Command::Converge(c) => commands::cmd_converge(&prepare(c)?, c.generate_reference, c.dry_run),
        Command::Compare(c) => commands::cmd_compare(&prepare(c)?, c.dry_run),
        Command::Stability(c) => commands::cmd_stability(&prepare(c)?, c.dry_run),
        Command::Bench(c) => commands::cmd_bench(&prepare(c)?, c.dry_run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                FsiError::BlowUp { .. } => 2,
                _ => 1,
            })
        }
    }
}
