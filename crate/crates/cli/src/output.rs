//! CSV and text emission. Numbers use Rust's shortest round-trip scientific form.

use std::fs;
use std::path::Path;

use mrfsi::analysis::EnergyRow;
use mrfsi::schemes::StepRecord;
use mrfsi::Result;

/// A number in scientific notation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Time tag for file names: `0.015` -> `t0.015`.
pub fn time_tag(t: f64) -> String {
    format!("t{t}")
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv { text: String::new() };
        c.row(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.text)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Interface profile with columns `x, d` at the quadratic wall nodes.
pub fn profile_csv(length: f64, profile: &[f64]) -> Csv {
    let mut csv = Csv::new(&["x", "d"]);
    let n = profile.len().saturating_sub(1).max(1);
    for (i, d) in profile.iter().enumerate() {
        csv.row([num(length * i as f64 / n as f64), num(*d)]);
    }
    csv
}

/// Per-step energy terms with the divergence ratio and the largest displacement.
pub fn energy_csv(records: &[StepRecord<f64>]) -> Csv {
    let mut csv = Csv::new(&[
        "step",
        "time",
        "kinetic_fluid",
        "kinetic_wall",
        "elastic",
        "traction",
        "total",
        "divergence",
        "max_abs_d",
    ]);
    for r in records {
        let e: Option<EnergyRow<f64>> = r.energy;
        csv.row([
            r.step.to_string(),
            num(r.time),
            opt_num(e.map(|e| e.kinetic_fluid)),
            opt_num(e.map(|e| e.kinetic_wall)),
            opt_num(e.map(|e| e.elastic)),
            opt_num(e.map(|e| e.traction)),
            opt_num(e.map(|e| e.total)),
            opt_num(r.divergence),
            num(r.max_abs_d),
        ]);
    }
    csv
}
