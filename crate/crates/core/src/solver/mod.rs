//! Lanczos ground states, dense spectra, Krylov time evolution and the
//! adiabatic pulse sweep.

mod adiabatic;
mod dense;
mod krylov;
mod lanczos;

pub use adiabatic::{adiabatic_sweep, sweep_model, PulseShape, PulseSpec, SweepOptions, SweepReport, TrajectoryRow};
pub use dense::{dense_eigen, dense_spectrum, DenseEigen, DENSE_MAX_DIM};
pub use krylov::{
    evolve, evolve_with, expm_multiply, Constant, KrylovOptions, LinearFamily, OperatorFamily, TimeGrid, Trajectory,
};
pub use lanczos::{ground_state, lowest_states, GroundState, LanczosOptions};
