//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mrfsi::benchmark::{self, pressure_wave_scenario, Scenario};
use mrfsi::params::PhysicalParams;
use mrfsi::schemes::{SchemeConfig, SchemeKind};
use mrfsi::{FsiError, Result};

/// One scheme variant of a comparison: a kind and a rate ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub kind: SchemeKind,
    pub ratio: usize,
}

impl Variant {
    pub fn label(&self) -> String {
        match self.kind {
            SchemeKind::MultirateBeta => format!("multirate_beta_r{}", self.ratio),
            k => k.name().to_string(),
        }
    }
}

impl FromStr for Variant {
    type Err = FsiError;

    /// `kind` or `kind:r`, e.g. `robin_neumann` or `multirate_beta:10`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, ratio) = match s.split_once(':') {
            Some((k, r)) => (k, parse_value::<usize>("variants", r)?),
            None => (s, 1),
        };
        Ok(Variant { kind: kind.trim().parse()?, ratio })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub beta: f64,
    pub h: f64,
    pub dt_s: f64,
    pub ratio: usize,
    pub t_end: f64,
    pub length: f64,
    pub height: f64,
    pub rho_f: f64,
    pub rho_s: f64,
    pub mu: f64,
    pub thickness: f64,
    pub young: f64,
    pub poisson: f64,
    pub p_max: f64,
    pub pulse_duration: f64,
    pub output_times: Vec<f64>,
    pub out: PathBuf,
    /// Reference file; `<out>/reference.bin` when unset.
    pub reference: Option<PathBuf>,
    pub reference_h: f64,
    pub reference_dt: f64,
    /// Schedule levels `0..levels` of the convergence study.
    pub levels: usize,
    pub variants: Vec<Variant>,
    pub bench_h: Vec<f64>,
    pub bench_ratios: Vec<usize>,
    /// Start of the energy monotonicity check.
    pub check_from: f64,
    pub energy_tol: f64,
}

/// Every accepted key, in the order `render` writes them.
pub const KEYS: [&str; 27] = [
    "scheme",
    "beta",
    "h",
    "dt_s",
    "ratio",
    "t_end",
    "length",
    "height",
    "rho_f",
    "rho_s",
    "mu",
    "thickness",
    "young",
    "poisson",
    "p_max",
    "pulse_duration",
    "output_times",
    "out",
    "reference",
    "reference_h",
    "reference_dt",
    "levels",
    "variants",
    "bench_h",
    "bench_ratios",
    "check_from",
    "energy_tol",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: SchemeKind::Beta,
            beta: 1.0,
            h: 0.1,
            dt_s: 1e-4,
            ratio: 1,
            t_end: 0.015,
            length: benchmark::LENGTH,
            height: benchmark::HEIGHT,
            rho_f: benchmark::RHO_F,
            rho_s: benchmark::RHO_S,
            mu: benchmark::MU,
            thickness: benchmark::THICKNESS,
            young: benchmark::YOUNG,
            poisson: benchmark::POISSON,
            p_max: benchmark::P_MAX,
            pulse_duration: benchmark::T_STAR,
            output_times: benchmark::OUTPUT_TIMES.to_vec(),
            out: PathBuf::from("out"),
            reference: None,
            reference_h: 0.0125,
            reference_dt: 2e-6,
            levels: 3,
            variants: vec![
                Variant { kind: SchemeKind::Implicit, ratio: 1 },
                Variant { kind: SchemeKind::Beta, ratio: 1 },
                Variant { kind: SchemeKind::RobinNeumann, ratio: 1 },
            ],
            bench_h: vec![0.1, 0.05, 0.025, 0.0125, 0.00625],
            bench_ratios: vec![1, 10],
            check_from: benchmark::T_STAR,
            energy_tol: 1e-8,
        }
    }
}

fn parse_value<V: FromStr>(key: &str, raw: &str) -> Result<V> {
    raw.trim()
        .parse()
        .map_err(|_| FsiError::Config(format!("cannot parse value '{}' for key '{key}'", raw.trim())))
}

fn parse_list<V: FromStr>(key: &str, raw: &str) -> Result<Vec<V>> {
    raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_value(key, s)).collect()
}

fn join<V: ToString>(items: &[V]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key. Dashes in the key are read as underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        match k {
            "scheme" => self.scheme = value.trim().parse()?,
            "beta" => self.beta = parse_value(k, value)?,
            "h" => self.h = parse_value(k, value)?,
            "dt_s" => self.dt_s = parse_value(k, value)?,
            "ratio" => self.ratio = parse_value(k, value)?,
            "t_end" => self.t_end = parse_value(k, value)?,
            "length" => self.length = parse_value(k, value)?,
            "height" => self.height = parse_value(k, value)?,
            "rho_f" => self.rho_f = parse_value(k, value)?,
            "rho_s" => self.rho_s = parse_value(k, value)?,
            "mu" => self.mu = parse_value(k, value)?,
            "thickness" => self.thickness = parse_value(k, value)?,
            "young" => self.young = parse_value(k, value)?,
            "poisson" => self.poisson = parse_value(k, value)?,
            "p_max" => self.p_max = parse_value(k, value)?,
            "pulse_duration" => self.pulse_duration = parse_value(k, value)?,
            "output_times" => self.output_times = parse_list(k, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "reference" => {
                let v = value.trim();
                self.reference = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "reference_h" => self.reference_h = parse_value(k, value)?,
            "reference_dt" => self.reference_dt = parse_value(k, value)?,
            "levels" => self.levels = parse_value(k, value)?,
            "variants" => self.variants = parse_list(k, value)?,
            "bench_h" => self.bench_h = parse_list(k, value)?,
            "bench_ratios" => self.bench_ratios = parse_list(k, value)?,
            "check_from" => self.check_from = parse_value(k, value)?,
            "energy_tol" => self.energy_tol = parse_value(k, value)?,
            _ => return Err(FsiError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a config text on top of `self`. Blank lines and `#` comments are skipped.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| FsiError::Config(format!("line {}: expected key = value, got '{line}'", n + 1)))?;
            self.set(k, v).map_err(|e| match e {
                FsiError::Config(m) => FsiError::Config(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.merge_text(text)?;
        Ok(c)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FsiError::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.merge_text(&text)
    }

    /// The configuration as config-file text; `parse(render())` reproduces it.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let v = match key {
                "scheme" => self.scheme.name().to_string(),
                "beta" => self.beta.to_string(),
                "h" => self.h.to_string(),
                "dt_s" => self.dt_s.to_string(),
                "ratio" => self.ratio.to_string(),
                "t_end" => self.t_end.to_string(),
                "length" => self.length.to_string(),
                "height" => self.height.to_string(),
                "rho_f" => self.rho_f.to_string(),
                "rho_s" => self.rho_s.to_string(),
                "mu" => self.mu.to_string(),
                "thickness" => self.thickness.to_string(),
                "young" => self.young.to_string(),
                "poisson" => self.poisson.to_string(),
                "p_max" => self.p_max.to_string(),
                "pulse_duration" => self.pulse_duration.to_string(),
                "output_times" => join(&self.output_times),
                "out" => self.out.display().to_string(),
                "reference" => self.reference.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                "reference_h" => self.reference_h.to_string(),
                "reference_dt" => self.reference_dt.to_string(),
                "levels" => self.levels.to_string(),
                "variants" => self
                    .variants
                    .iter()
                    .map(|v| format!("{}:{}", v.kind.name(), v.ratio))
                    .collect::<Vec<_>>()
                    .join(","),
                "bench_h" => join(&self.bench_h),
                "bench_ratios" => join(&self.bench_ratios),
                "check_from" => self.check_from.to_string(),
                "energy_tol" => self.energy_tol.to_string(),
                _ => unreachable!("every key is rendered"),
            };
            let _ = writeln!(s, "{key} = {v}");
        }
        s
    }

    pub fn reference_path(&self) -> PathBuf {
        self.reference.clone().unwrap_or_else(|| self.out.join("reference.bin"))
    }

    pub fn params(&self) -> Result<PhysicalParams<f64>> {
        PhysicalParams::from_material(self.rho_f, self.rho_s, self.mu, self.thickness, self.young, self.poisson, self.height)
    }

    /// The benchmark scenario with this configuration's geometry, material and forcing at mesh size `h`.
    pub fn scenario_at(&self, h: f64) -> Result<Scenario<f64>> {
        let mut sc = pressure_wave_scenario(h);
        sc.length = self.length;
        sc.height = self.height;
        sc.params = self.params()?;
        sc.inlet.p_max = self.p_max;
        sc.inlet.duration = self.pulse_duration;
        sc.output_times = self.output_times.iter().copied().filter(|&t| t <= self.t_end * (1.0 + 1e-12)).collect();
        sc.validate()?;
        Ok(sc)
    }

    pub fn scenario(&self) -> Result<Scenario<f64>> {
        self.scenario_at(self.h)
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig<f64>> {
        self.variant_config(Variant { kind: self.scheme, ratio: self.ratio })
    }

    pub fn variant_config(&self, v: Variant) -> Result<SchemeConfig<f64>> {
        let cfg = SchemeConfig::new(v.kind, self.beta, self.dt_s, v.ratio, self.t_end);
        cfg.validate()?;
        cfg.num_steps()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(FsiError::Config(format!("h must be positive (got {})", self.h)));
        }
        mrfsi::mesh::ChannelMesh::<f64>::build(self.length, self.height, self.h)?;
        self.scenario()?;
        self.scheme_config()?;
        if self.output_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(FsiError::Config("output_times must be finite and non-negative".into()));
        }
        if !(self.energy_tol >= 0.0) {
            return Err(FsiError::Config(format!("energy_tol must be non-negative (got {})", self.energy_tol)));
        }
        Ok(())
    }
}
