//! Named target states, fidelities and the Wootters concurrence.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{BasisDescriptor, DensityMatrix, StateVector};
use crate::linalg;

const CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetLabel {
    W,
    Ghz,
    /// `(|11⟩ + |00⟩)/√2`
    PhiPlus,
    /// `(|11⟩ − |00⟩)/√2`
    PhiMinus,
    /// `(|10⟩ + |01⟩)/√2`
    PsiPlus,
    /// `(|10⟩ − |01⟩)/√2`
    PsiMinus,
    Custom,
}

impl fmt::Display for TargetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::W => "W",
            Self::Ghz => "GHZ",
            Self::PhiPlus => "Phi+",
            Self::PhiMinus => "Phi-",
            Self::PsiPlus => "Psi+",
            Self::PsiMinus => "Psi-",
            Self::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetState {
    label: TargetLabel,
    state: StateVector,
}

impl TargetState {
    /// Wraps an arbitrary normalized state.
    pub fn custom(state: StateVector) -> Self {
        Self {
            label: TargetLabel::Custom,
            state,
        }
    }

    pub fn label(&self) -> TargetLabel {
        self.label
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Checks the amplitude pattern the label promises.
    pub fn is_consistent(&self) -> bool {
        let basis = self.state.basis();
        let n = basis.atom_count();
        let amps = self.state.amplitudes();
        let support = |pred: &dyn Fn(usize) -> bool, magnitude: f64| {
            amps.iter().enumerate().all(|(i, z)| {
                if pred(i) {
                    (z.norm() - magnitude).abs() < 1e-12
                } else {
                    z.norm() < 1e-12
                }
            })
        };
        if basis.has_cavity() {
            return self.label == TargetLabel::Custom;
        }
        let half = 0.5f64.sqrt();
        let all_ones = (1usize << n) - 1;
        match self.label {
            TargetLabel::W => support(&|i| i.count_ones() == 1, 1.0 / (n as f64).sqrt()),
            TargetLabel::Ghz => support(&|i| i == 0 || i == all_ones, half),
            TargetLabel::PhiPlus | TargetLabel::PhiMinus => {
                n == 2 && support(&|i| i == 0 || i == 3, half)
            }
            TargetLabel::PsiPlus | TargetLabel::PsiMinus => {
                n == 2 && support(&|i| i == 1 || i == 2, half)
            }
            TargetLabel::Custom => true,
        }
    }
}

/// Builds the named state on `n` atoms.
pub fn make_target(label: TargetLabel, n: usize) -> Result<TargetState> {
    let unsupported =
        || Error::InvalidParameter(format!("target {label} is not defined for n = {n}"));
    let basis = BasisDescriptor::atoms(n).map_err(|_| unsupported())?;
    let mut amps = DVector::zeros(basis.dim());
    let half = 0.5f64.sqrt();
    match label {
        TargetLabel::W => {
            if n < 2 {
                return Err(unsupported());
            }
            let a = 1.0 / (n as f64).sqrt();
            for k in 0..n {
                amps[1 << k] = Complex64::new(a, 0.0);
            }
        }
        TargetLabel::Ghz => {
            if n < 2 {
                return Err(unsupported());
            }
            amps[0] = Complex64::new(half, 0.0);
            amps[basis.dim() - 1] = Complex64::new(half, 0.0);
        }
        TargetLabel::PhiPlus
        | TargetLabel::PhiMinus
        | TargetLabel::PsiPlus
        | TargetLabel::PsiMinus => {
            if n != 2 {
                return Err(unsupported());
            }
            let sign = if matches!(label, TargetLabel::PhiPlus | TargetLabel::PsiPlus) {
                1.0
            } else {
                -1.0
            };
            let (first, second) = if matches!(label, TargetLabel::PhiPlus | TargetLabel::PhiMinus) {
                (0b11, 0b00)
            } else {
                (0b10, 0b01)
            };
            amps[first] = Complex64::new(half, 0.0);
            amps[second] = Complex64::new(sign * half, 0.0);
        }
        TargetLabel::Custom => return Err(unsupported()),
    }
    Ok(TargetState {
        label,
        state: StateVector::new(basis, amps)?,
    })
}

/// `|⟨target|ψ⟩|²`.
pub fn fidelity_to(psi: &StateVector, target: &TargetState) -> Result<f64> {
    target.state.fidelity(psi)
}

/// Fidelity to the closest state with equal-magnitude, arbitrary-phase
/// amplitudes on all weight-1 bitstrings: `(Σ_k |c_k|)² / n`.
///
/// Equals 1 exactly for W states up to local phases.
pub fn w_class_fidelity(psi: &StateVector) -> Result<f64> {
    let basis = psi.basis();
    if basis.has_cavity() {
        return Err(Error::InvalidParameter(
            "expected an atom-only state".into(),
        ));
    }
    let n = basis.atom_count();
    let sum: f64 = (0..n).map(|k| psi.amplitudes()[1 << k].norm()).sum();
    Ok(sum * sum / n as f64)
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// Uses the Hermitian form `R = √ρ ρ̃ √ρ` with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`;
/// the concurrence is `max(0, l₁ − l₂ − l₃ − l₄)` with `lᵢ` the square roots
/// of the eigenvalues of `R` in decreasing order.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    if m.nrows() != 4 || rho.basis().has_cavity() || rho.basis().atom_count() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: m.nrows(),
        });
    }
    // σy⊗σy in the |00⟩,|01⟩,|10⟩,|11⟩ basis is the anti-diagonal (-1, 1, 1, -1).
    let flip = DMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            Complex64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let tilde = &flip * m.conjugate() * &flip;
    let root = linalg::psd_sqrt(m);
    let r = &root * tilde * &root;
    // Symmetrize away rounding before the Hermitian solver.
    let r = (&r + r.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, _) = linalg::hermitian_eigen(&r);
    let mut l: Vec<f64> = values
        .iter()
        .map(|&v| if v < CLAMP { 0.0 } else { v.sqrt() })
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}
