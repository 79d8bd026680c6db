//! Fidelity loss when the excited atom of the three-atom W preparation is
//! not in the cavity for the whole interaction time.

use serde::Serialize;

use crate::dynamics::{analytic_w_evolution, Propagator};
use crate::error::{Error, Result};
use crate::hilbert::{BasisDescriptor, Operator, StateVector};
use crate::models::vacuum_sector_for;

/// How the two atoms left in the cavity after an early exit are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// Residual phase `e^{-i f λt₀}` on the transferred branch.
    #[default]
    Paper,
    /// Propagate the two remaining atoms under their own vacuum-sector
    /// Hamiltonian for `f t₀` (phase `e^{-2i f λt₀}` on the symmetric branch).
    Model,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimingRecord {
    pub lambda_t0: f64,
    pub fraction_late: f64,
    pub fraction_early: f64,
    pub phase_mode: PhaseMode,
    /// `|⟨W₃((1 − f) t₀)|W₃(t₀)⟩|²`: excited atom enters late.
    pub fidelity_late: f64,
    /// `|⟨W₃′|W₃(t₀)⟩|²`: excited atom leaves early.
    pub fidelity_early: f64,
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if !(f.is_finite() && (0.0..0.5).contains(&f)) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be in [0, 0.5), got {f}"
        )));
    }
    Ok(())
}

/// Three-atom state when the excited atom (atom 2) leaves a fraction
/// `fraction` of `t₀` before the two ground-state atoms do.
pub fn early_exit_state(lambda_t0: f64, fraction: f64, mode: PhaseMode) -> Result<StateVector> {
    check_fraction("fraction", fraction)?;
    let together = analytic_w_evolution(3, (1.0 - fraction) * lambda_t0)?;
    let residual = fraction * lambda_t0;
    match mode {
        PhaseMode::Paper => {
            let phase = num_complex::Complex64::from_polar(1.0, -residual);
            let mut amps = together.into_amplitudes();
            amps[0b010] *= phase;
            amps[0b100] *= phase;
            StateVector::new(BasisDescriptor::atoms(3)?, amps)
        }
        PhaseMode::Model => {
            let leftover = vacuum_sector_for(2, 1.0)?
                .tensor(&Operator::identity(BasisDescriptor::atoms(1)?))?;
            Propagator::new(leftover)?.evolve(&together, residual)
        }
    }
}

pub fn timing_error_study(
    lambda_t0: f64,
    fraction_late: f64,
    fraction_early: f64,
    phase_mode: PhaseMode,
) -> Result<TimingRecord> {
    if !lambda_t0.is_finite() {
        return Err(Error::InvalidParameter("lambda_t0 must be finite".into()));
    }
    check_fraction("fraction_late", fraction_late)?;
    check_fraction("fraction_early", fraction_early)?;
    let ideal = analytic_w_evolution(3, lambda_t0)?;
    let late = analytic_w_evolution(3, (1.0 - fraction_late) * lambda_t0)?;
    let early = early_exit_state(lambda_t0, fraction_early, phase_mode)?;
    Ok(TimingRecord {
        lambda_t0,
        fraction_late,
        fraction_early,
        phase_mode,
        fidelity_late: late.fidelity(&ideal)?,
        fidelity_early: early.fidelity(&ideal)?,
    })
}
