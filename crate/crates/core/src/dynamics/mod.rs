//! Time-domain machinery: Bessel Green-function kernels, transient variance
//! under a pulsed drive, and the discretized Maxwell–Bloch oracle.

mod grid;
mod kernels;
mod pulse;
mod transient;

pub use grid::{
    light_kernel_error, refinement_study, simulate_area, simulate_grid, GridRun, GridSpec, KernelTable,
    RefinementLevel, RefinementStudy, DESK_SCALE_LIMIT, MAX_COUPLING_PER_CELL, MAX_DECAY_PER_STEP,
};
pub use kernels::{collective_initial_kernel, collective_light_kernel};
pub use pulse::PulseArea;
pub use transient::{transient_trace, transient_variance};
