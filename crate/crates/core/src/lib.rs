//! Stokes flow in a channel coupled to a thin elastic wall, discretized with
//! Taylor–Hood elements and marched with implicit, beta, Robin–Neumann and
//! multirate beta schemes.
//!
//! The numerical core is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`, with `*32`
//! variants for single precision.
//!
//! ```
//! use mrfsi::{benchmark, schemes::SchemeConfig};
//!
//! let mut scenario = benchmark::pressure_wave_scenario(0.25);
//! scenario.length = 1.0;
//! let cfg = SchemeConfig::multirate(1.0, 1e-5, 10, 1e-3);
//! let result = mrfsi::schemes::run_simulation(&scenario, cfg).unwrap();
//! assert_eq!(result.records.len(), 11);
//! ```

pub mod analysis;
pub mod benchmark;
pub mod error;
pub mod fem;
pub mod mesh;
pub mod params;
pub mod scalar;
pub mod schemes;
pub mod skyline;
pub mod sparse;

pub use error::{FsiError, Result};
pub use scalar::Scalar;

pub type Mesh = mesh::ChannelMesh<f64>;
pub type Interface = mesh::InterfaceMesh<f64>;
pub type Params = params::PhysicalParams<f64>;
pub type Forms = fem::FormSet<f64>;
pub type Scenario = benchmark::Scenario<f64>;
pub type Config = schemes::SchemeConfig<f64>;
pub type State = schemes::FsiState<f64>;
pub type Snapshot = schemes::Snapshot<f64>;
pub type Discretization = schemes::Discretization<f64>;
pub type Simulation = schemes::Simulation<f64>;
pub type SimulationResult = schemes::SimulationResult<f64>;

pub type Mesh32 = mesh::ChannelMesh<f32>;
pub type Scenario32 = benchmark::Scenario<f32>;
pub type Config32 = schemes::SchemeConfig<f32>;
pub type State32 = schemes::FsiState<f32>;
pub type Simulation32 = schemes::Simulation<f32>;
