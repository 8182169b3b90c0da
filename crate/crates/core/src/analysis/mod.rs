//! Error norms against references, convergence tables, the energy monitor and timing.

mod convergence;
mod energy;
mod error;
mod timing;

pub use convergence::{convergence_study, least_squares_slope, refinement_schedule, ErrorReport, ErrorRow, StudyConfig};
pub use energy::{discrete_energy, EnergyMonitor, EnergyRow, EnergyTrace, MonotonicityCheck};
pub use error::{profile_difference, relative_error, ErrorValue, Field, FieldSource, ProfileDifference, ReferenceGrid};
pub use timing::{stability_sweep, timing_report, SweepReport, SweepRow, TimingRatios, TimingRow, TimingTable};
