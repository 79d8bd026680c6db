//! Hamiltonians for n two-level atoms coupled to one detuned cavity mode.
//!
//! All builders work directly on basis indices instead of multiplying ladder
//! matrices, so construction stays linear in the number of nonzeros.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{BasisDescriptor, Operator};

/// Physical constants of the model. `lambda = g² / delta` is always derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    n: usize,
    g: f64,
    delta: f64,
    fock_cutoff: usize,
}

impl ModelParams {
    /// Params with the default Fock cutoff `n + 2`.
    pub fn new(n: usize, g: f64, delta: f64) -> Result<Self> {
        Self::with_fock_cutoff(n, g, delta, n + 2)
    }

    pub fn with_fock_cutoff(n: usize, g: f64, delta: f64, fock_cutoff: usize) -> Result<Self> {
        if n == 0 || n > BasisDescriptor::MAX_ATOMS {
            return Err(Error::InvalidParameter(format!(
                "atom count must be in 1..={}, got {n}",
                BasisDescriptor::MAX_ATOMS
            )));
        }
        // g = 0 is accepted as the trivial decoupled limit.
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling g must be >= 0, got {g}"
            )));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "detuning must be > 0, got {delta}"
            )));
        }
        if fock_cutoff < 1 {
            return Err(Error::InvalidParameter("fock cutoff must be >= 1".into()));
        }
        Ok(Self {
            n,
            g,
            delta,
            fock_cutoff,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Effective exchange rate `g² / δ`.
    pub fn lambda(&self) -> f64 {
        self.g * self.g / self.delta
    }

    /// `δ / g`; the effective model needs this to be large.
    pub fn dispersive_ratio(&self) -> f64 {
        self.delta / self.g
    }

    /// Atoms ⊗ Fock(≤cutoff).
    pub fn cavity_basis(&self) -> BasisDescriptor {
        BasisDescriptor::with_cavity(self.n, self.fock_cutoff).expect("validated in constructor")
    }

    /// Atoms only.
    pub fn atom_basis(&self) -> BasisDescriptor {
        BasisDescriptor::atoms(self.n).expect("validated in constructor")
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Exchange coupling `g Σ_j (φ a† s_j⁻ + φ* a s_j⁺)` with `φ = phase`.
fn exchange_coupling(params: &ModelParams, phase: Complex64) -> DMatrix<Complex64> {
    let basis = params.cavity_basis();
    let cutoff = params.fock_cutoff;
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (bits, photons) = basis.decode(col);
        for atom in 0..params.n {
            let mask = basis.atom_mask(atom);
            if bits & mask != 0 && photons < cutoff {
                // a† s⁻: atom decays, photon created.
                let row = basis.encode(bits ^ mask, photons + 1).expect("in range");
                m[(row, col)] += phase * params.g * ((photons + 1) as f64).sqrt();
            } else if bits & mask == 0 && photons > 0 {
                // a s⁺: photon absorbed, atom excited.
                let row = basis.encode(bits | mask, photons - 1).expect("in range");
                m[(row, col)] += phase.conj() * params.g * (photons as f64).sqrt();
            }
        }
    }
    m
}

/// Interaction-picture Hamiltonian at time `t`:
/// `g Σ_j (e^{-iδt} a† s_j⁻ + e^{iδt} a s_j⁺)` on the truncated Fock space.
pub fn full_hamiltonian_at(params: &ModelParams, t: f64) -> Result<Operator> {
    let phase = Complex64::from_polar(1.0, -params.delta * t);
    Operator::hermitian(params.cavity_basis(), exchange_coupling(params, phase))
}

/// Time-independent equivalent of [`full_hamiltonian_at`]:
/// `-δ a†a + g Σ_j (a† s_j⁻ + a s_j⁺)`.
///
/// A state `ψ` evolved under this operator for time `t` corresponds to the
/// interaction-picture state `exp(-iδt a†a) ψ`.
pub fn static_frame_hamiltonian(params: &ModelParams) -> Result<Operator> {
    let basis = params.cavity_basis();
    let mut m = exchange_coupling(params, re(1.0));
    for i in 0..basis.dim() {
        let (_, photons) = basis.decode(i);
        m[(i, i)] -= re(params.delta * photons as f64);
    }
    Operator::hermitian(basis, m)
}

/// Dispersive effective Hamiltonian
/// `λ Σ_{i,j} (s_j⁺ s_i⁻ a a† − s_j⁻ s_i⁺ a† a)`, with the double sum
/// running over all ordered pairs including `i = j`.
///
/// `a a†` and `a† a` are diagonal in the Fock basis and are applied exactly
/// (`n + 1` and `n`), so the top Fock level is not distorted by truncation.
pub fn effective_hamiltonian(params: &ModelParams) -> Result<Operator> {
    let basis = params.cavity_basis();
    let lambda = params.lambda();
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (bits, photons) = basis.decode(col);
        let aa_dag = (photons + 1) as f64;
        let a_dag_a = photons as f64;
        for i in 0..params.n {
            let mi = basis.atom_mask(i);
            for j in 0..params.n {
                let mj = basis.atom_mask(j);
                // s_j⁺ s_i⁻ a a†
                if bits & mi != 0 {
                    let lowered = bits ^ mi;
                    if lowered & mj == 0 {
                        let row = basis.encode(lowered | mj, photons).expect("in range");
                        m[(row, col)] += re(lambda * aa_dag);
                    }
                }
                // − s_j⁻ s_i⁺ a† a
                if bits & mi == 0 {
                    let raised = bits | mi;
                    if raised & mj != 0 {
                        let row = basis.encode(raised ^ mj, photons).expect("in range");
                        m[(row, col)] -= re(lambda * a_dag_a);
                    }
                }
            }
        }
    }
    Operator::hermitian(basis, m)
}

/// Effective Hamiltonian with the cavity in vacuum, on atoms only:
/// `λ (Σ_j |1⟩_j⟨1| + Σ_{i≠j} s_j⁺ s_i⁻)`.
pub fn vacuum_sector_hamiltonian(params: &ModelParams) -> Result<Operator> {
    vacuum_sector_for(params.n, params.lambda())
}

/// [`vacuum_sector_hamiltonian`] for `n` atoms at rate `lambda`; lets
/// callers work in units where `λ = 1`.
pub fn vacuum_sector_for(n: usize, lambda: f64) -> Result<Operator> {
    let basis = BasisDescriptor::atoms(n)?;
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        m[(col, col)] = re(lambda * col.count_ones() as f64);
        for i in 0..n {
            let mi = basis.atom_mask(i);
            if col & mi == 0 {
                continue;
            }
            for j in 0..n {
                let mj = basis.atom_mask(j);
                if i != j && col & mj == 0 {
                    m[((col ^ mi) | mj, col)] += re(lambda);
                }
            }
        }
    }
    Operator::hermitian(basis, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        annihilation, atom_lowering, atom_projector, atom_raising, creation, excitation_number,
        photon_number,
    };
    use crate::linalg::hermitian_eigen;
    use approx::assert_abs_diff_eq;

    fn params(n: usize, g: f64, delta: f64, cutoff: usize) -> ModelParams {
        ModelParams::with_fock_cutoff(n, g, delta, cutoff).unwrap()
    }

    fn diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn params_validation_and_derived_fields() {
        assert!(ModelParams::new(0, 1.0, 10.0).is_err());
        assert!(ModelParams::new(2, -1.0, 10.0).is_err());
        assert!(ModelParams::new(2, f64::NAN, 10.0).is_err());
        assert!(ModelParams::new(2, 1.0, -1.0).is_err());
        assert!(ModelParams::with_fock_cutoff(2, 1.0, 10.0, 0).is_err());
        let p = ModelParams::new(3, 2.0, 20.0).unwrap();
        assert_eq!(p.fock_cutoff(), 5);
        assert_abs_diff_eq!(p.lambda(), 0.2);
        assert_abs_diff_eq!(p.dispersive_ratio(), 10.0);
    }

    #[test]
    fn single_atom_coupling_at_t0() {
        let p = params(1, 0.7, 5.0, 1);
        let h = full_hamiltonian_at(&p, 0.0).unwrap();
        let b = p.cavity_basis();
        let e0 = b.encode(1, 0).unwrap();
        let g1 = b.encode(0, 1).unwrap();
        assert_abs_diff_eq!(h.matrix()[(g1, e0)].re, 0.7);
        assert_abs_diff_eq!(h.matrix()[(e0, g1)].re, 0.7);
        let nonzero = h.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn full_hamiltonian_matches_ladder_products() {
        // Independent route: products of truncated ladder matrices.
        let p = params(2, 0.9, 4.0, 2);
        let b = p.cavity_basis();
        let a = annihilation(b).unwrap();
        let ad = creation(b).unwrap();
        for &t in &[0.0, 0.3, 1.7] {
            let phase = Complex64::from_polar(1.0, -p.delta() * t);
            let mut oracle = DMatrix::zeros(b.dim(), b.dim());
            for j in 0..2 {
                let sm = atom_lowering(b, j).unwrap();
                let sp = atom_raising(b, j).unwrap();
                oracle += ad.compose(&sm).unwrap().matrix() * (phase * p.g());
                oracle += a.compose(&sp).unwrap().matrix() * (phase.conj() * p.g());
            }
            let h = full_hamiltonian_at(&p, t).unwrap();
            assert!(diff(h.matrix(), &oracle) < 1e-14);
            assert!(h.hermitian_deviation() <= 1e-12);
        }
        // The sqrt(2) Fock factor: ⟨00, 2ph| H |10, 1ph⟩ = g·√2.
        let h = full_hamiltonian_at(&p, 0.0).unwrap();
        let row = b.encode(0b00, 2).unwrap();
        let col = b.encode(0b10, 1).unwrap();
        assert_abs_diff_eq!(
            h.matrix()[(row, col)].re,
            0.9 * 2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn static_frame_is_detuned_jaynes_cummings_for_one_atom() {
        let p = params(1, 0.5, 3.0, 2);
        let h = static_frame_hamiltonian(&p).unwrap();
        let b = p.cavity_basis();
        for photons in 0..=2 {
            let g_n = b.encode(0, photons).unwrap();
            assert_abs_diff_eq!(h.matrix()[(g_n, g_n)].re, -3.0 * photons as f64);
            if photons < 2 {
                let e_n = b.encode(1, photons).unwrap();
                let g_up = b.encode(0, photons + 1).unwrap();
                assert_abs_diff_eq!(
                    h.matrix()[(g_up, e_n)].re,
                    0.5 * ((photons + 1) as f64).sqrt()
                );
            }
        }
    }

    #[test]
    fn static_frame_conserves_excitations() {
        let p = params(3, 1.0, 10.0, 4);
        let h = static_frame_hamiltonian(&p).unwrap();
        let ne = excitation_number(p.cavity_basis());
        assert!(h.commutator_max(&ne).unwrap() <= 1e-12);
    }

    #[test]
    fn effective_single_atom_is_far_off_resonant_jc() {
        // λ(|1⟩⟨1| a a† − |0⟩⟨0| a† a), built from ladder products.
        let p = params(1, 1.0, 8.0, 3);
        let b = p.cavity_basis();
        let h = effective_hamiltonian(&p).unwrap();
        let a = annihilation(b).unwrap();
        let ad = creation(b).unwrap();
        let aad = a.compose(&ad).unwrap();
        let n = photon_number(b);
        let e = atom_projector(b, 0, 1).unwrap();
        let g = atom_projector(b, 0, 0).unwrap();
        let oracle = (e.compose(&aad).unwrap().matrix() - g.compose(&n).unwrap().matrix())
            * Complex64::new(p.lambda(), 0.0);
        // Truncated a a† is wrong only on the top Fock level; compare below it.
        let keep: Vec<usize> = (0..b.dim()).filter(|&i| b.decode(i).1 < 3).collect();
        let lhs = h.block(&keep);
        let rhs = DMatrix::from_fn(keep.len(), keep.len(), |r, c| oracle[(keep[r], keep[c])]);
        assert!(diff(&lhs, &rhs) < 1e-14);
        let top = b.encode(1, 3).unwrap();
        assert_abs_diff_eq!(h.matrix()[(top, top)].re, 4.0 * p.lambda(), epsilon = 1e-14);
    }

    #[test]
    fn effective_two_atom_matches_term_by_term() {
        let p = params(2, 1.0, 5.0, 2);
        let b = p.cavity_basis();
        let h = effective_hamiltonian(&p).unwrap();
        let lambda = p.lambda();
        let mut oracle = DMatrix::zeros(b.dim(), b.dim());
        for i in 0..b.dim() {
            let (bits, photons) = b.decode(i);
            for atom in 0..2 {
                oracle[(i, i)] += if b.atom_level(bits, atom) == 1 {
                    lambda * (photons + 1) as f64
                } else {
                    -lambda * photons as f64
                };
            }
        }
        let flip = atom_raising(b, 0)
            .unwrap()
            .compose(&atom_lowering(b, 1).unwrap())
            .unwrap();
        oracle += (flip.matrix() + flip.matrix().adjoint()) * Complex64::new(lambda, 0.0);
        assert!(diff(h.matrix(), &oracle) < 1e-14);
    }

    #[test]
    fn vacuum_block_of_effective_is_vacuum_sector() {
        let p = params(3, 1.0, 7.0, 2);
        let b = p.cavity_basis();
        let h = effective_hamiltonian(&p).unwrap();
        let vac: Vec<usize> = (0..8).map(|bits| b.encode(bits, 0).unwrap()).collect();
        let hv = vacuum_sector_hamiltonian(&p).unwrap();
        assert!(diff(&h.block(&vac), hv.matrix()) < 1e-14);
    }

    #[test]
    fn vacuum_sector_spectra() {
        // n = 3 one-excitation block is λ J: eigenvalues {0, 0, 3λ}.
        let hv = vacuum_sector_for(3, 1.0).unwrap();
        let block = hv.block(&[1, 2, 4]);
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(block[(r, c)].re, 1.0);
            }
        }
        let (vals, _) = hermitian_eigen(&block);
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 3.0, epsilon = 1e-12);

        let hv2 = vacuum_sector_for(2, 0.5).unwrap();
        let (vals, _) = hermitian_eigen(&hv2.block(&[1, 2]));
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        assert_eq!(hv.matrix()[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn four_atom_two_excitation_spectrum() {
        let hv = vacuum_sector_for(4, 1.0).unwrap();
        let two: Vec<usize> = (0..16usize).filter(|b| b.count_ones() == 2).collect();
        let (vals, _) = hermitian_eigen(&hv.block(&two));
        let expected = [0.0, 0.0, 2.0, 2.0, 2.0, 6.0];
        for (v, e) in vals.iter().zip(expected) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
    }
}
