//! Numerical studies: collision-probability curves, timing-error
//! fidelities, validity of the effective model, distillation scans.
//!
//! Every sweep evaluates grid points independently (in parallel) and
//! assembles the output in grid order, so results do not depend on
//! scheduling.

mod collision;
mod series;
mod timing;
mod validation;

pub use collision::{
    collision_probabilities_closed_form, collision_probabilities_mixture, distill_scan_series,
    figure1_series, fit_mixture_weights, CollisionChannel, CollisionMixture, CollisionModel,
    CollisionProbabilities, MixtureFit, PRINTED_COEFFICIENTS,
};
pub use series::{format_fixed, linspace, Column, SweepSeries};
pub use timing::{early_exit_state, timing_error_study, PhaseMode, TimingRecord};
pub use validation::{
    dispersive_validation_sweep, validation_point, ValidationPoint, MIN_DISPERSIVE_RATIO,
};
