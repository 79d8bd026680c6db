//! Fixtures shared by the benchmarks.

use cqed_core::models::vacuum_sector_for;
use cqed_core::{
    basis_state, BasisDescriptor, DensityMatrix, ModelParams, Propagator, StateVector,
};

/// Vacuum-sector propagator for `n` atoms at `λ = 1`.
pub fn vacuum_propagator(n: usize) -> Propagator {
    Propagator::new(vacuum_sector_for(n, 1.0).expect("valid n")).expect("hermitian")
}

/// `|0…01⟩` on `n` atoms.
pub fn single_excitation(n: usize) -> StateVector {
    let label = format!("{}1", "0".repeat(n - 1));
    basis_state(BasisDescriptor::atoms(n).expect("valid n"), &label, None).expect("valid label")
}

/// Reduced pair state of the `n`-atom W state.
pub fn w_pair(n: usize) -> DensityMatrix {
    let w = cqed_core::make_target(cqed_core::TargetLabel::W, n).expect("n >= 2");
    w.state().partial_trace(&[0, 1]).expect("two atoms kept")
}

/// Cavity model with `g = 1` at detuning ratio `ratio`.
pub fn cavity_params(n: usize, ratio: f64) -> ModelParams {
    ModelParams::new(n, 1.0, ratio).expect("valid params")
}
