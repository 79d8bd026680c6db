//! State and operator representation for an atoms ⊗ cavity Hilbert space.
//!
//! Basis ordering: atom 0 is the most significant bit of the atomic
//! bitstring and the photon number varies fastest, so the index of
//! `(bits, photons)` is `bits * (cutoff + 1) + photons`. Bitstrings are
//! written left to right starting with atom 0, e.g. `"001"` has only the
//! last atom excited. Atom-only spaces drop the photon factor.
//!
//! Atom indices are zero-based everywhere in the API. In partial traces the
//! cavity, when present, is subsystem number `atom_count`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

pub const NORM_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
const DENSITY_TOLERANCE: f64 = 1e-10;

/// Shape of a composite space: `atom_count` qubits, optionally followed by a
/// cavity mode truncated at `fock_cutoff` photons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisDescriptor {
    atom_count: usize,
    fock_cutoff: Option<usize>,
}

impl BasisDescriptor {
    /// Largest atom count accepted; keeps every dense matrix small.
    pub const MAX_ATOMS: usize = 12;

    pub fn atoms(atom_count: usize) -> Result<Self> {
        Self::build(atom_count, None)
    }

    pub fn with_cavity(atom_count: usize, fock_cutoff: usize) -> Result<Self> {
        Self::build(atom_count, Some(fock_cutoff))
    }

    fn build(atom_count: usize, fock_cutoff: Option<usize>) -> Result<Self> {
        if atom_count == 0 || atom_count > Self::MAX_ATOMS {
            return Err(Error::InvalidParameter(format!(
                "atom count must be in 1..={}, got {atom_count}",
                Self::MAX_ATOMS
            )));
        }
        Ok(Self {
            atom_count,
            fock_cutoff,
        })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn fock_cutoff(&self) -> Option<usize> {
        self.fock_cutoff
    }

    pub fn has_cavity(&self) -> bool {
        self.fock_cutoff.is_some()
    }

    /// Number of photon levels, 1 for atom-only spaces.
    pub fn photon_levels(&self) -> usize {
        self.fock_cutoff.map_or(1, |c| c + 1)
    }

    pub fn dim(&self) -> usize {
        (1usize << self.atom_count) * self.photon_levels()
    }

    /// Atoms plus the cavity, if any.
    pub fn subsystem_count(&self) -> usize {
        self.atom_count + usize::from(self.has_cavity())
    }

    /// The same atoms without the cavity.
    pub fn atoms_only(&self) -> Self {
        Self {
            atom_count: self.atom_count,
            fock_cutoff: None,
        }
    }

    /// Index of the basis ket with atomic pattern `bits` (atom 0 = MSB) and
    /// `photons` photons.
    pub fn encode(&self, bits: usize, photons: usize) -> Result<usize> {
        if bits >> self.atom_count != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "bit pattern {bits:#b} does not fit {} atoms",
                self.atom_count
            )));
        }
        if photons >= self.photon_levels() {
            return Err(Error::IndexOutOfRange(format!(
                "photon number {photons} exceeds cutoff {:?}",
                self.fock_cutoff
            )));
        }
        Ok(bits * self.photon_levels() + photons)
    }

    /// Inverse of [`encode`](Self::encode): `(bits, photons)`.
    pub fn decode(&self, index: usize) -> (usize, usize) {
        let levels = self.photon_levels();
        (index / levels, index % levels)
    }

    /// State (0 or 1) of `atom` in the pattern `bits`.
    pub fn atom_level(&self, bits: usize, atom: usize) -> u8 {
        ((bits >> (self.atom_count - 1 - atom)) & 1) as u8
    }

    /// Bit mask selecting `atom` inside a bit pattern.
    pub fn atom_mask(&self, atom: usize) -> usize {
        1 << (self.atom_count - 1 - atom)
    }

    /// Parses `"0101"` style labels into a bit pattern.
    pub fn parse_bits(&self, label: &str) -> Result<usize> {
        if label.len() != self.atom_count {
            return Err(Error::IndexOutOfRange(format!(
                "bitstring {label:?} has length {}, expected {}",
                label.len(),
                self.atom_count
            )));
        }
        label.chars().try_fold(0usize, |acc, ch| match ch {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            other => Err(Error::IndexOutOfRange(format!(
                "bitstring {label:?} contains {other:?}"
            ))),
        })
    }

    /// Renders a bit pattern as a label, atom 0 first.
    pub fn bits_label(&self, bits: usize) -> String {
        (0..self.atom_count)
            .map(|a| {
                if self.atom_level(bits, a) == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Dimension of each subsystem, in order.
    fn subsystem_dims(&self) -> Vec<usize> {
        let mut dims = vec![2; self.atom_count];
        if let Some(c) = self.fock_cutoff {
            dims.push(c + 1);
        }
        dims
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::BasisMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BasisDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fock_cutoff {
            Some(c) => write!(f, "{} atoms ⊗ Fock(≤{c})", self.atom_count),
            None => write!(f, "{} atoms", self.atom_count),
        }
    }
}

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: BasisDescriptor,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`; fails unless they are normalized to 1e-10.
    pub fn new(basis: BasisDescriptor, amplitudes: DVector<Complex64>) -> Result<Self> {
        let state = Self::new_unchecked(basis, amplitudes)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(state)
    }

    /// Wraps and rescales `amplitudes` to unit norm.
    pub fn normalized(basis: BasisDescriptor, amplitudes: DVector<Complex64>) -> Result<Self> {
        let state = Self::new_unchecked(basis, amplitudes)?;
        state.renormalized()
    }

    pub(crate) fn new_unchecked(
        basis: BasisDescriptor,
        amplitudes: DVector<Complex64>,
    ) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> BasisDescriptor {
        self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    /// Amplitude of the ket labelled by `bits` with `photons` photons
    /// (`None` for atom-only spaces or the vacuum).
    pub fn amplitude_of(&self, bits: &str, photons: Option<usize>) -> Result<Complex64> {
        let pattern = self.basis.parse_bits(bits)?;
        Ok(self.amplitudes[self.basis.encode(pattern, photons.unwrap_or(0))?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Explicit renormalization; nothing else in the crate rescales states.
    pub fn renormalized(&self) -> Result<Self> {
        let norm = self.amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            basis: self.basis,
            amplitudes: self.amplitudes.unscale(norm),
        })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner_product(self, other)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            basis: self.basis,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Reduced state on the subsystems listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let plan = TracePlan::new(self.basis, keep)?;
        let mut reduced = DMatrix::zeros(plan.reduced.dim(), plan.reduced.dim());
        for (i, (ki, ti)) in plan.split.iter().enumerate() {
            let ai = self.amplitudes[i];
            if ai == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, (kj, tj)) in plan.split.iter().enumerate() {
                if ti == tj {
                    reduced[(*ki, *kj)] += ai * self.amplitudes[j].conj();
                }
            }
        }
        Ok(DensityMatrix {
            basis: plan.reduced,
            matrix: reduced,
        })
    }

    /// `self ⊗ other`. The left factor must be atom-only so the cavity stays
    /// last in the ordering.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let basis = tensor_basis(&self.basis, &other.basis)?;
        Ok(StateVector {
            basis,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// Embeds an atom-only state into atoms ⊗ Fock(≤cutoff) with the cavity
    /// in vacuum.
    pub fn with_vacuum(&self, fock_cutoff: usize) -> Result<StateVector> {
        if self.basis.has_cavity() {
            return Err(Error::InvalidParameter(
                "state already includes a cavity".into(),
            ));
        }
        let basis = BasisDescriptor::with_cavity(self.basis.atom_count, fock_cutoff)?;
        let mut amplitudes = DVector::zeros(basis.dim());
        for (bits, amp) in self.amplitudes.iter().enumerate() {
            amplitudes[basis.encode(bits, 0)?] = *amp;
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        self.basis.ensure_same(&op.basis)?;
        Ok(self.amplitudes.dotc(&(&op.matrix * &self.amplitudes)))
    }
}

/// Computational basis ket `|bits⟩ ⊗ |photons⟩`.
///
/// `photons` must be `None` for atom-only spaces; for spaces with a cavity
/// `None` means vacuum.
pub fn basis_state(
    basis: BasisDescriptor,
    bits: &str,
    photons: Option<usize>,
) -> Result<StateVector> {
    if photons.is_some() && !basis.has_cavity() {
        return Err(Error::IndexOutOfRange(
            "photon number given for a space without a cavity".into(),
        ));
    }
    let pattern = basis.parse_bits(bits)?;
    let index = basis.encode(pattern, photons.unwrap_or(0))?;
    let mut amplitudes = DVector::zeros(basis.dim());
    amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(StateVector { basis, amplitudes })
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.basis.ensure_same(&b.basis)?;
    Ok(a.amplitudes.dotc(&b.amplitudes))
}

fn tensor_basis(left: &BasisDescriptor, right: &BasisDescriptor) -> Result<BasisDescriptor> {
    if left.has_cavity() {
        return Err(Error::InvalidParameter(
            "left tensor factor must not contain a cavity".into(),
        ));
    }
    BasisDescriptor::build(left.atom_count + right.atom_count, right.fock_cutoff)
}

/// Dense operator on a [`BasisDescriptor`] space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    basis: BasisDescriptor,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

impl Operator {
    /// General (not necessarily Hermitian) operator.
    pub fn new(basis: BasisDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&basis, &matrix)?;
        Ok(Self {
            basis,
            matrix,
            hermitian: false,
        })
    }

    /// Operator flagged Hermitian; rejects matrices with `|M - M†| > 1e-12`.
    pub fn hermitian(basis: BasisDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&basis, &matrix)?;
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self {
            basis,
            matrix,
            hermitian: true,
        })
    }

    pub fn identity(basis: BasisDescriptor) -> Self {
        Self {
            basis,
            matrix: DMatrix::identity(basis.dim(), basis.dim()),
            hermitian: true,
        }
    }

    pub fn basis(&self) -> BasisDescriptor {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.matrix)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// `self ⊗ other`; `self` must be atom-only.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let basis = tensor_basis(&self.basis, &other.basis)?;
        Ok(Operator {
            basis,
            matrix: linalg::kron(&self.matrix, &other.matrix),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// Largest entry of `[self, other]`.
    pub fn commutator_max(&self, other: &Operator) -> Result<f64> {
        self.basis.ensure_same(&other.basis)?;
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(linalg::max_abs(&c))
    }

    /// Sub-matrix on the listed basis indices.
    pub fn block(&self, indices: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        })
    }

    /// Product `self · other`, Hermitian flag dropped.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.basis.ensure_same(&other.basis)?;
        Ok(Operator {
            basis: self.basis,
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
        })
    }
}

fn check_square(basis: &BasisDescriptor, matrix: &DMatrix<Complex64>) -> Result<()> {
    if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: matrix.nrows().max(matrix.ncols()),
        });
    }
    Ok(())
}

fn diagonal_operator(basis: BasisDescriptor, f: impl Fn(usize, usize) -> f64) -> Operator {
    let diag = DVector::from_iterator(
        basis.dim(),
        (0..basis.dim()).map(|i| {
            let (bits, photons) = basis.decode(i);
            Complex64::new(f(bits, photons), 0.0)
        }),
    );
    Operator {
        basis,
        matrix: DMatrix::from_diagonal(&diag),
        hermitian: true,
    }
}

/// `s⁺ = |1⟩⟨0|` on `atom`.
pub fn atom_raising(basis: BasisDescriptor, atom: usize) -> Result<Operator> {
    atom_flip(basis, atom, 0)
}

/// `s⁻ = |0⟩⟨1|` on `atom`.
pub fn atom_lowering(basis: BasisDescriptor, atom: usize) -> Result<Operator> {
    atom_flip(basis, atom, 1)
}

fn atom_flip(basis: BasisDescriptor, atom: usize, from_level: u8) -> Result<Operator> {
    check_atom(&basis, atom)?;
    let mask = basis.atom_mask(atom);
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (bits, photons) = basis.decode(col);
        if basis.atom_level(bits, atom) == from_level {
            let row = basis.encode(bits ^ mask, photons)?;
            m[(row, col)] = Complex64::new(1.0, 0.0);
        }
    }
    Operator::new(basis, m)
}

/// `|level⟩⟨level|` on `atom`.
pub fn atom_projector(basis: BasisDescriptor, atom: usize, level: u8) -> Result<Operator> {
    check_atom(&basis, atom)?;
    Ok(diagonal_operator(basis, |bits, _| {
        f64::from(u8::from(basis.atom_level(bits, atom) == level))
    }))
}

/// Truncated cavity annihilation operator `a`.
pub fn annihilation(basis: BasisDescriptor) -> Result<Operator> {
    if !basis.has_cavity() {
        return Err(Error::InvalidParameter("space has no cavity".into()));
    }
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for col in 0..basis.dim() {
        let (bits, photons) = basis.decode(col);
        if photons > 0 {
            m[(basis.encode(bits, photons - 1)?, col)] =
                Complex64::new((photons as f64).sqrt(), 0.0);
        }
    }
    Operator::new(basis, m)
}

/// Truncated cavity creation operator `a†`.
pub fn creation(basis: BasisDescriptor) -> Result<Operator> {
    let a = annihilation(basis)?;
    Operator::new(basis, a.matrix.adjoint())
}

/// `a†a`; zero on atom-only spaces.
pub fn photon_number(basis: BasisDescriptor) -> Operator {
    diagonal_operator(basis, |_, photons| photons as f64)
}

/// Number of excited atoms.
pub fn atomic_excitation_number(basis: BasisDescriptor) -> Operator {
    diagonal_operator(basis, |bits, _| bits.count_ones() as f64)
}

/// Excited atoms plus photons; conserved by every Hamiltonian in the crate.
pub fn excitation_number(basis: BasisDescriptor) -> Operator {
    diagonal_operator(basis, |bits, photons| {
        (bits.count_ones() as usize + photons) as f64
    })
}

pub(crate) fn check_atom(basis: &BasisDescriptor, atom: usize) -> Result<()> {
    if atom >= basis.atom_count {
        return Err(Error::IndexOutOfRange(format!(
            "atom {atom} outside 0..{}",
            basis.atom_count
        )));
    }
    Ok(())
}

/// Mixed state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: BasisDescriptor,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10).
    pub fn new(basis: BasisDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&basis, &matrix)?;
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOLERANCE || trace.im.abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let rho = Self { basis, matrix };
        let smallest = rho.eigenvalues()[0];
        if smallest < -DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn basis(&self) -> BasisDescriptor {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    /// Diagonal entry for `bits` (and `photons`), i.e. a readout probability.
    pub fn population(&self, bits: &str, photons: Option<usize>) -> Result<f64> {
        let pattern = self.basis.parse_bits(bits)?;
        let i = self.basis.encode(pattern, photons.unwrap_or(0))?;
        Ok(self.matrix[(i, i)].re)
    }

    /// Reduced state on the subsystems listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let plan = TracePlan::new(self.basis, keep)?;
        let mut reduced = DMatrix::zeros(plan.reduced.dim(), plan.reduced.dim());
        for (i, (ki, ti)) in plan.split.iter().enumerate() {
            for (j, (kj, tj)) in plan.split.iter().enumerate() {
                if ti == tj {
                    reduced[(*ki, *kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            basis: plan.reduced,
            matrix: reduced,
        })
    }
}

/// Index bookkeeping for a partial trace: each full index maps to
/// `(kept index, traced index)`.
struct TracePlan {
    reduced: BasisDescriptor,
    split: Vec<(usize, usize)>,
}

impl TracePlan {
    fn new(basis: BasisDescriptor, keep: &[usize]) -> Result<Self> {
        let total = basis.subsystem_count();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::InvalidSubsystems(format!(
                "duplicate subsystem in {keep:?}"
            )));
        }
        if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= total) {
            return Err(Error::InvalidSubsystems(format!(
                "subsystem {bad} outside 0..{total}"
            )));
        }
        if keep_sorted.is_empty() || keep_sorted.len() == total {
            return Err(Error::InvalidSubsystems(format!(
                "keep must be a nonempty proper subset of 0..{total}, got {keep:?}"
            )));
        }
        let kept_atoms = keep_sorted
            .iter()
            .filter(|&&k| k < basis.atom_count)
            .count();
        let keeps_cavity = basis.has_cavity() && keep_sorted.contains(&basis.atom_count);
        if kept_atoms == 0 {
            return Err(Error::InvalidSubsystems(
                "reduced state must retain at least one atom".into(),
            ));
        }
        let reduced = BasisDescriptor::build(
            kept_atoms,
            if keeps_cavity {
                basis.fock_cutoff
            } else {
                None
            },
        )?;

        let dims = basis.subsystem_dims();
        let split = (0..basis.dim())
            .map(|index| {
                // Mixed-radix digits, most significant subsystem first.
                let mut digits = vec![0usize; dims.len()];
                let mut rest = index;
                for (d, &size) in dims.iter().enumerate().rev() {
                    digits[d] = rest % size;
                    rest /= size;
                }
                let (mut kept, mut traced) = (0usize, 0usize);
                for (d, &size) in dims.iter().enumerate() {
                    if keep_sorted.binary_search(&d).is_ok() {
                        kept = kept * size + digits[d];
                    } else {
                        traced = traced * size + digits[d];
                    }
                }
                (kept, traced)
            })
            .collect();
        Ok(Self { reduced, split })
    }
}
