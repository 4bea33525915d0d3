//! Exact dynamics and phase-synchronization diagnostics for a classically
//! driven two-level system coupled to a Lorentzian bosonic environment at
//! zero temperature.
//!
//! The crate provides:
//!
//! * the dressed-state model parameters and the complex memory-kernel rate
//!   ([`params`]),
//! * the survival amplitude q(t) via a closed form, a Volterra quadrature
//!   and an exact ODE reduction ([`amplitude`]), plus an independent
//!   memory-mode oracle ([`pseudomode`]),
//! * the exact single-qubit channel built from q(t) and its complete
//!   positivity check ([`channel`]),
//! * the Husimi Q-function and the synchronization measure S(phi)
//!   ([`husimi`]),
//! * data-parallel phase-diagram sweeps with boundary extraction
//!   ([`sweep`]), and CSV/PGM/PPM emission ([`output`]).
//!
//! The `parallel` feature (on by default) backs the sweep engine and grid
//! evaluation with rayon; without it the same API runs sequentially.

pub mod amplitude;
pub mod channel;
pub mod error;
pub mod husimi;
pub mod output;
pub mod parallel;
pub mod params;
pub mod pseudomode;
pub mod sweep;

pub use amplitude::{
    closed_form_series, q_closed_form, q_ode, q_volterra, q_volterra_naive, AmplitudeSeries,
    SolverTag,
};
pub use channel::{choi_check, evolve, trajectory, ChannelAt, DensityMatrix};
pub use error::{Error, Result};
pub use husimi::{husimi_q, max_s, s_measure, QGrid, SyncValue};
pub use params::{
    effective_detuning, kernel_rate, DriveParams, KernelRate, SimConfig, SpectrumParams,
};
pub use pseudomode::{pseudomode_params, pseudomode_trajectory, PseudomodeParams, PseudomodeState};
pub use sweep::{
    extract_boundary, run_sweep, run_sweep_sequential, tongue_center, Axis, CouplingSweepMode,
    Observable, SweepGrid, SweepParam, SweepSpec,
};
