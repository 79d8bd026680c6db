//! Agreement between the full cavity model and the vacuum-sector effective
//! model as the detuning grows.
//!
//! Two comparisons are reported. `infidelity` starts the full model in the
//! bare state `|1 0…0⟩|0⟩` and compares against the effective evolution
//! embedded at zero photons. That discrepancy carries a fast beat at the
//! dressed splitting `≈ √(δ² + 2n g²)` whose phase at the final time decides
//! whether it is near zero or near its `O((g/δ)²)` maximum, so it is not
//! monotone in `δ/g` pointwise. `infidelity_dressed` applies the first-order
//! dressing `ψ ↦ ψ + (g/δ) Σ_j a† s_j⁻ ψ` to both the initial state and the
//! effective result, which removes the beat and leaves the accumulated
//! error of the effective Hamiltonian.

use rayon::prelude::*;
use serde::Serialize;

use super::series::SweepSeries;
use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, atom_lowering, basis_state, photon_number, StateVector};
use crate::models::{static_frame_hamiltonian, vacuum_sector_hamiltonian, ModelParams};

/// Rows with `δ/g` below this are flagged as outside the dispersive regime.
pub const MIN_DISPERSIVE_RATIO: f64 = 5.0;

const MIN_SAMPLES: usize = 200;
const MAX_SAMPLES: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidationPoint {
    pub ratio: f64,
    /// `1 − |⟨ψ_eff|ψ_full⟩|²` at the requested `λt`, bare initial state.
    pub infidelity: f64,
    /// Same comparison with both sides dressed to first order in `g/δ`.
    pub infidelity_dressed: f64,
    /// Largest `⟨a†a⟩` seen along the full-model (bare start) trajectory.
    pub photon_leakage: f64,
    pub flagged: bool,
}

/// `ψ + (g/δ) Σ_j a† s_j⁻ ψ`, renormalized.
fn dress(params: &ModelParams, psi: &StateVector) -> Result<StateVector> {
    let basis = params.cavity_basis();
    let a_dag = annihilation(basis)?.matrix().adjoint();
    let mut out = psi.amplitudes().clone();
    let eps = params.g() / params.delta();
    for j in 0..params.n() {
        let lowered = atom_lowering(basis, j)?.matrix() * psi.amplitudes();
        out += (&a_dag * lowered) * num_complex::Complex64::new(eps, 0.0);
    }
    StateVector::normalized(basis, out)
}

/// One sweep point with `g = 1`, `δ = ratio`, `t = λt / λ`, starting from
/// atom 0 excited and the cavity in vacuum.
pub fn validation_point(ratio: f64, lambda_t: f64, n: usize) -> Result<ValidationPoint> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ratio must be > 0, got {ratio}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "validation needs n >= 2, got {n}"
        )));
    }
    let params = ModelParams::new(n, 1.0, ratio)?;
    let t = lambda_t / params.lambda();

    let mut start = String::from("1");
    start.push_str(&"0".repeat(n - 1));
    let full = Propagator::new(static_frame_hamiltonian(&params)?)?;
    let effective = Propagator::new(vacuum_sector_hamiltonian(&params)?)?;
    let psi_full0 = basis_state(params.cavity_basis(), &start, Some(0))?;
    let psi_eff0 = basis_state(params.atom_basis(), &start, None)?;

    let psi_eff = effective
        .evolve(&psi_eff0, t)?
        .with_vacuum(params.fock_cutoff())?;
    let psi_full = full.evolve(&psi_full0, t)?;
    let infidelity = (1.0 - psi_eff.fidelity(&psi_full)?).max(0.0);

    let dressed_full = full.evolve(&dress(&params, &psi_full0)?, t)?;
    let infidelity_dressed = (1.0 - dress(&params, &psi_eff)?.fidelity(&dressed_full)?).max(0.0);

    // Photons oscillate at roughly δ; sample at about five points per radian.
    let samples = ((params.delta() * t / 0.2).ceil() as usize).clamp(MIN_SAMPLES, MAX_SAMPLES);
    let number = photon_number(params.cavity_basis());
    let mut photon_leakage = 0.0f64;
    for k in 1..=samples {
        let tk = t * k as f64 / samples as f64;
        let psi = full.evolve(&psi_full0, tk)?;
        photon_leakage = photon_leakage.max(psi.expectation(&number)?.re);
    }

    Ok(ValidationPoint {
        ratio,
        infidelity,
        infidelity_dressed,
        photon_leakage,
        flagged: ratio < MIN_DISPERSIVE_RATIO,
    })
}

/// Columns `infidelity`, `infidelity_dressed`, `photon_leakage`, `flagged`
/// (0/1) over `ratios`.
pub fn dispersive_validation_sweep(ratios: &[f64], lambda_t: f64, n: usize) -> Result<SweepSeries> {
    if ratios.is_empty() {
        return Err(Error::InvalidParameter("ratio list is empty".into()));
    }
    let points = ratios
        .par_iter()
        .map(|&r| validation_point(r, lambda_t, n))
        .collect::<Result<Vec<_>>>()?;
    let mut series = SweepSeries::new("ratio", ratios.to_vec())?;
    series.push_column("infidelity", points.iter().map(|p| p.infidelity).collect())?;
    series.push_column(
        "infidelity_dressed",
        points.iter().map(|p| p.infidelity_dressed).collect(),
    )?;
    series.push_column(
        "photon_leakage",
        points.iter().map(|p| p.photon_leakage).collect(),
    )?;
    series.push_column(
        "flagged",
        points
            .iter()
            .map(|p| f64::from(u8::from(p.flagged)))
            .collect(),
    )?;
    series.set_meta("n", n);
    series.set_meta("lambda_t", lambda_t);
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const RATIOS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

    #[test]
    fn bare_infidelity_stays_inside_second_order_envelope() {
        // Beat amplitude: the bare start overlaps the dressed states with
        // weight ~2n(g/δ)², so the discrepancy is bounded by a few times that.
        for &r in &RATIOS {
            let p = validation_point(r, PI / 4.0, 2).unwrap();
            assert!(p.infidelity <= 8.0 / (r * r), "{p:?}");
            assert!(!p.flagged);
        }
    }

    #[test]
    fn dressed_infidelity_at_least_halves_per_doubling() {
        let pts: Vec<_> = RATIOS
            .iter()
            .map(|&r| validation_point(r, PI / 4.0, 2).unwrap())
            .collect();
        for w in pts.windows(2) {
            assert!(
                w[1].infidelity_dressed <= 0.5 * w[0].infidelity_dressed
                    || w[1].infidelity_dressed < 1e-8,
                "{:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn leakage_positive_and_decreasing() {
        let s = dispersive_validation_sweep(&RATIOS, PI / 4.0, 2).unwrap();
        let leak = s.column("photon_leakage").unwrap();
        assert!(leak.iter().all(|&x| x > 0.0));
        assert!(leak.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn small_ratio_is_flagged() {
        let p = validation_point(3.0, 0.5, 2).unwrap();
        assert!(p.flagged);
        assert!(dispersive_validation_sweep(&[], 0.5, 2).is_err());
        assert!(validation_point(0.0, 0.5, 2).is_err());
        assert!(validation_point(10.0, 0.5, 1).is_err());
    }
}
