//! Fine-grid implicit reference runs and their binary container.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        8 bytes  "MRFSIREF"
//! version      u32      1
//! length       f64
//! height       f64
//! h_ref        f64
//! dt_ref       f64
//! t_end        f64
//! nx, ny       u64, u64
//! n_velocity   u64      2 (2nx+1)(2ny+1)
//! n_pressure   u64      (nx+1)(ny+1)
//! n_wall       u64      2nx+1
//! n_frames     u64
//! checksum     32 bytes SHA-256 of every header byte before it followed by the payload
//! payload      n_frames x [time f64, velocity, pressure, wall]
//! ```
//!
//! Field arrays use the nodal layouts of [`Snapshot`].

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use super::{pressure_wave_scenario, Scenario};
use crate::error::{FsiError, Result};
use crate::fem::FsiDofMap;
use crate::mesh::ChannelMesh;
use crate::schemes::{RunOptions, SchemeConfig, Simulation, Snapshot};

pub const REFERENCE_MAGIC: &[u8; 8] = b"MRFSIREF";
pub const REFERENCE_VERSION: u32 = 1;
/// Generation time above which a warning is printed.
pub const REFERENCE_BUDGET: Duration = Duration::from_secs(30 * 60);

/// Implicit-scheme fields on a fine grid at a few output times.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub length: f64,
    pub height: f64,
    pub h_ref: f64,
    pub dt_ref: f64,
    pub t_end: f64,
    pub nx: usize,
    pub ny: usize,
    pub frames: Vec<Snapshot<f64>>,
}

/// A generated reference and how long it took.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    pub reference: ReferenceSolution,
    pub elapsed: Duration,
    pub over_budget: bool,
}

impl ReferenceSolution {
    pub fn n_velocity(&self) -> usize {
        2 * (2 * self.nx + 1) * (2 * self.ny + 1)
    }

    pub fn n_pressure(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn n_wall(&self) -> usize {
        2 * self.nx + 1
    }

    pub fn mesh(&self) -> Result<ChannelMesh<f64>> {
        ChannelMesh::from_counts(self.length, self.height, self.nx, self.ny)
    }

    /// Spaces of the reference (the nodal layout does not depend on the wall coupling).
    pub fn dofs(&self) -> Result<FsiDofMap> {
        let mesh = self.mesh()?;
        FsiDofMap::build(&mesh, &crate::mesh::InterfaceMesh::extract(&mesh))
    }

    /// Frame whose time is within `1e-9` of `t`.
    pub fn frame_at(&self, t: f64) -> Option<&Snapshot<f64>> {
        self.frames.iter().find(|f| (f.time - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    fn header(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(100);
        b.extend_from_slice(REFERENCE_MAGIC);
        b.extend_from_slice(&REFERENCE_VERSION.to_le_bytes());
        for v in [self.length, self.height, self.h_ref, self.dt_ref, self.t_end] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        for v in [self.nx, self.ny, self.n_velocity(), self.n_pressure(), self.n_wall(), self.frames.len()] {
            b.extend_from_slice(&(v as u64).to_le_bytes());
        }
        b
    }

    fn payload(&self) -> Result<Vec<u8>> {
        let per_frame = 1 + self.n_velocity() + self.n_pressure() + self.n_wall();
        let mut b = Vec::with_capacity(8 * per_frame * self.frames.len());
        for f in &self.frames {
            if f.velocity.len() != self.n_velocity() || f.pressure.len() != self.n_pressure() || f.displacement.len() != self.n_wall() {
                return Err(FsiError::Format(format!("frame at t = {} has inconsistent array lengths", f.time)));
            }
            b.extend_from_slice(&f.time.to_le_bytes());
            for arr in [&f.velocity, &f.pressure, &f.displacement] {
                for v in arr.iter() {
                    b.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        Ok(b)
    }

    /// SHA-256 over header and payload.
    pub fn checksum(&self) -> Result<[u8; 32]> {
        let mut h = Sha256::new();
        h.update(self.header());
        h.update(self.payload()?);
        Ok(h.finalize().into())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = self.header();
        let payload = self.payload()?;
        let mut h = Sha256::new();
        h.update(&header);
        h.update(&payload);
        let sum: [u8; 32] = h.finalize().into();
        let mut out = header;
        out.extend_from_slice(&sum);
        out.extend_from_slice(&payload);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != REFERENCE_MAGIC {
            return Err(FsiError::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != REFERENCE_VERSION {
            return Err(FsiError::Format(format!("unsupported version {version}")));
        }
        let length = r.f64()?;
        let height = r.f64()?;
        let h_ref = r.f64()?;
        let dt_ref = r.f64()?;
        let t_end = r.f64()?;
        let nx = r.u64()?;
        let ny = r.u64()?;
        let (nv, np, nw, nf) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
        let header_len = r.pos;
        let stored: [u8; 32] = r.take(32)?.try_into().unwrap();
        let mut sol = ReferenceSolution { length, height, h_ref, dt_ref, t_end, nx, ny, frames: Vec::new() };
        if (nv, np, nw) != (sol.n_velocity(), sol.n_pressure(), sol.n_wall()) {
            return Err(FsiError::Format("array sizes do not match the mesh counts".into()));
        }
        let expect = 8 * nf * (1 + nv + np + nw);
        if bytes.len() - r.pos != expect {
            return Err(FsiError::Format(format!("payload has {} bytes, expected {expect}", bytes.len() - r.pos)));
        }
        let mut h = Sha256::new();
        h.update(&bytes[..header_len]);
        h.update(&bytes[r.pos..]);
        let sum: [u8; 32] = h.finalize().into();
        if sum != stored {
            return Err(FsiError::Format("checksum mismatch".into()));
        }
        for _ in 0..nf {
            let time = r.f64()?;
            let velocity = r.f64s(nv)?;
            let pressure = r.f64s(np)?;
            let displacement = r.f64s(nw)?;
            sol.frames.push(Snapshot { time, velocity, pressure, displacement });
        }
        Ok(sol)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        // write then rename so an interrupted save never leaves a truncated file
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// True if this reference was produced with the given resolution and end time.
    pub fn matches(&self, h_ref: f64, dt_ref: f64, t_end: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
        close(self.h_ref, h_ref) && close(self.dt_ref, dt_ref) && close(self.t_end, t_end)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(FsiError::Format("file truncated".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| FsiError::Format(format!("count {v} too large")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        Ok(self.take(8 * n)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Implicit run of the benchmark at `(h_ref, dt_ref)` up to `t_end`.
pub fn generate_reference(h_ref: f64, dt_ref: f64, t_end: f64) -> Result<ReferenceRun> {
    generate_reference_for(&pressure_wave_scenario(h_ref), dt_ref, t_end)
}

/// Implicit run of any scenario; frames at its output times up to `t_end`, plus `t_end` itself.
pub fn generate_reference_for(scenario: &Scenario<f64>, dt_ref: f64, t_end: f64) -> Result<ReferenceRun> {
    let start = Instant::now();
    let mut sc = scenario.clone();
    sc.output_times.retain(|&t| t <= t_end * (1.0 + 1e-12));
    if !sc.output_times.iter().any(|&t| (t - t_end).abs() <= 1e-9 * t_end.max(1.0)) {
        sc.output_times.push(t_end);
    }
    let cfg = SchemeConfig::implicit(dt_ref, t_end);
    let sim = Simulation::new(&sc, cfg)?;
    let opts = RunOptions { profile_stride: 0, energy: false, divergence: false };
    let res = sim.run(&opts)?;
    let frames = res.snapshots;
    let reference = ReferenceSolution {
        length: sc.length,
        height: sc.height,
        h_ref: sc.h,
        dt_ref,
        t_end,
        nx: sim.disc.mesh.nx,
        ny: sim.disc.mesh.ny,
        frames,
    };
    let elapsed = start.elapsed();
    let over_budget = elapsed > REFERENCE_BUDGET;
    if over_budget {
        eprintln!("warning: reference generation took {:.0} s (budget {} s)", elapsed.as_secs_f64(), REFERENCE_BUDGET.as_secs());
    }
    Ok(ReferenceRun { reference, elapsed, over_budget })
}

/// Loads `path` if it holds a reference with the requested resolution, otherwise generates and saves one.
pub fn load_or_generate(path: &Path, h_ref: f64, dt_ref: f64, t_end: f64) -> Result<ReferenceSolution> {
    if path.exists() {
        match ReferenceSolution::load(path) {
            Ok(r) if r.matches(h_ref, dt_ref, t_end) => return Ok(r),
            Ok(_) => eprintln!("note: {} has a different resolution; regenerating", path.display()),
            Err(e) => eprintln!("note: {} unusable ({e}); regenerating", path.display()),
        }
    }
    let run = generate_reference(h_ref, dt_ref, t_end)?;
    run.reference.save(path)?;
    Ok(run.reference)
}
