//! Dispersive cavity-QED model of n identical two-level atoms sharing one
//! far-detuned cavity mode.
//!
//! The crate builds the interaction-picture and effective Hamiltonians,
//! propagates states exactly (eigendecomposition) or with a time-stepped
//! unitary integrator, and provides closed-form W- and GHZ-class
//! evolutions, single-atom measurement, Wootters concurrence and the
//! numerical studies built on them (collision probabilities, timing errors,
//! validity of the effective model).

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod hilbert;
mod linalg;
pub mod models;

pub use dynamics::{
    analytic_ghz4_evolution, analytic_w_evolution, distillation_probability, evolve,
    evolve_timedep, ghz4_reference_state, measure_atom, Ghz4Frequency, MeasurementRecord,
    Propagator,
};
pub use entanglement::{concurrence, fidelity_to, make_target, TargetLabel, TargetState};
pub use error::{Error, Result};
pub use hilbert::{
    basis_state, inner_product, BasisDescriptor, DensityMatrix, Operator, StateVector,
};
pub use models::{
    effective_hamiltonian, full_hamiltonian_at, static_frame_hamiltonian,
    vacuum_sector_hamiltonian, ModelParams,
};
pub use num_complex::Complex64;
