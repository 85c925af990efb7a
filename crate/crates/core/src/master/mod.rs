//! Driven-dissipative master equation in the limit of infinite blockade.
//!
//! States with two excitations closer than `R_b` are removed from the
//! Hilbert space; the effective Hamiltonian and the collective jump
//! operators are projected onto what remains.

pub mod basis;
pub mod evolve;
pub mod liouvillian;
pub mod observables;
pub mod steady;

pub use basis::BlockadeBasis;
pub use evolve::{evolve, steady_state_by_evolution, EvolveOptions};
pub use liouvillian::{lowering_operator, Csr, MasterSystem};
pub use observables::{strong_drive_observables, strong_drive_sweep, Optics, StrongDrivePoint};
pub use steady::{direct, steady_state, DensityMatrixState, SteadyMethod, SteadyOptions};
