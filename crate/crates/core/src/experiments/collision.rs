//! Detection statistics for the two-pulse experiment when a pulse may carry
//! an extra, undetected atom.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::series::SweepSeries;
use crate::dynamics::{distillation_probability, measure_atom, Propagator};
use crate::error::{Error, Result};
use crate::hilbert::{basis_state, BasisDescriptor, DensityMatrix};
use crate::models::vacuum_sector_for;

/// Joint readout probabilities of the two detected atoms; `eg` is
/// "first-pulse atom excited, second-pulse atom ground".
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CollisionProbabilities {
    pub ee: f64,
    pub gg: f64,
    pub eg: f64,
    pub ge: f64,
}

impl CollisionProbabilities {
    pub fn sum(&self) -> f64 {
        self.ee + self.gg + self.eg + self.ge
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.ee - other.ee,
            self.gg - other.gg,
            self.eg - other.eg,
            self.ge - other.ge,
        ]
        .iter()
        .fold(0.0, |acc, d| acc.max(d.abs()))
    }

    fn scaled(&self, w: f64) -> Self {
        Self {
            ee: self.ee * w,
            gg: self.gg * w,
            eg: self.eg * w,
            ge: self.ge * w,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            ee: self.ee + o.ee,
            gg: self.gg + o.gg,
            eg: self.eg + o.eg,
            ge: self.ge + o.ge,
        }
    }
}

/// Reference fit of the detection curves as coefficients of
/// `(1, cos 2λt, cos 3λt)`, ordered `ee, gg, eg, ge`.
pub const PRINTED_COEFFICIENTS: [[f64; 3]; 4] = [
    [0.028, 0.0, -0.028],
    [0.028, 0.0, -0.028],
    [0.514, 0.375, 0.111],
    [0.430, -0.375, -0.055],
];

/// Reference closed form:
/// `P_ee = P_gg = 0.028(1 − cos 3λt)`,
/// `P_eg = 0.514 + 0.375 cos 2λt + 0.111 cos 3λt`,
/// `P_ge = 0.430 − 0.375 cos 2λt − 0.055 cos 3λt`.
pub fn collision_probabilities_closed_form(lambda_t: f64) -> CollisionProbabilities {
    let basis = [1.0, (2.0 * lambda_t).cos(), (3.0 * lambda_t).cos()];
    let eval = |row: &[f64; 3]| row.iter().zip(basis).map(|(c, b)| c * b).sum::<f64>();
    CollisionProbabilities {
        ee: eval(&PRINTED_COEFFICIENTS[0]),
        gg: eval(&PRINTED_COEFFICIENTS[1]),
        eg: eval(&PRINTED_COEFFICIENTS[2]),
        ge: eval(&PRINTED_COEFFICIENTS[3]),
    }
}

/// Which atoms actually passed through the cavity together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionChannel {
    /// One excited atom in pulse 1, one ground atom in pulse 2.
    OneAtomEach,
    /// Two excited atoms in pulse 1 (one undetected), one ground atom in pulse 2.
    ExtraAtomFirst,
    /// One excited atom in pulse 1, two ground atoms in pulse 2 (one undetected).
    ExtraAtomSecond,
}

/// Channel weights of the collision mixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollisionMixture {
    pub w_two_atom: f64,
    pub w_extra_first: f64,
    pub w_extra_second: f64,
}

impl Default for CollisionMixture {
    /// `(0.75, 0.125, 0.125)`, the weights recovered by [`fit_mixture_weights`].
    fn default() -> Self {
        Self {
            w_two_atom: 0.75,
            w_extra_first: 0.125,
            w_extra_second: 0.125,
        }
    }
}

impl CollisionMixture {
    pub fn new(w_two_atom: f64, w_extra_first: f64, w_extra_second: f64) -> Result<Self> {
        let w = [w_two_atom, w_extra_first, w_extra_second];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be non-negative, got {w:?}"
            )));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(Self {
            w_two_atom,
            w_extra_first,
            w_extra_second,
        })
    }
}

/// First-principles collision model: vacuum-sector propagation of each
/// channel, partial trace over the undetected atom, joint readout.
///
/// Times are dimensionless (`λ = 1`).
#[derive(Clone, Debug)]
pub struct CollisionModel {
    mixture: CollisionMixture,
    two_atoms: Propagator,
    three_atoms: Propagator,
}

impl CollisionModel {
    pub fn new(mixture: CollisionMixture) -> Result<Self> {
        Ok(Self {
            mixture,
            two_atoms: Propagator::new(vacuum_sector_for(2, 1.0)?)?,
            three_atoms: Propagator::new(vacuum_sector_for(3, 1.0)?)?,
        })
    }

    pub fn mixture(&self) -> CollisionMixture {
        self.mixture
    }

    /// Readout statistics of one channel at `λt`.
    pub fn channel(
        &self,
        channel: CollisionChannel,
        lambda_t: f64,
    ) -> Result<CollisionProbabilities> {
        match channel {
            CollisionChannel::OneAtomEach => {
                let psi0 = basis_state(self.two_atoms.basis(), "10", None)?;
                readout(&self.two_atoms.evolve(&psi0, lambda_t)?.to_density())
            }
            // Atom order: pulse-1 atoms, then pulse-2 atoms. The two
            // same-pulse atoms are interchangeable, so average over which
            // of them escapes detection.
            CollisionChannel::ExtraAtomFirst => {
                let psi0 = basis_state(self.three_atoms.basis(), "110", None)?;
                let rho = self.three_atoms.evolve(&psi0, lambda_t)?.to_density();
                symmetric_readout(&rho, [[1, 2], [0, 2]])
            }
            CollisionChannel::ExtraAtomSecond => {
                let psi0 = basis_state(self.three_atoms.basis(), "100", None)?;
                let rho = self.three_atoms.evolve(&psi0, lambda_t)?.to_density();
                symmetric_readout(&rho, [[0, 1], [0, 2]])
            }
        }
    }

    /// Mixture-weighted readout statistics at `λt`.
    pub fn probabilities(&self, lambda_t: f64) -> Result<CollisionProbabilities> {
        let m = self.mixture;
        let parts = [
            (CollisionChannel::OneAtomEach, m.w_two_atom),
            (CollisionChannel::ExtraAtomFirst, m.w_extra_first),
            (CollisionChannel::ExtraAtomSecond, m.w_extra_second),
        ];
        parts
            .iter()
            .try_fold(CollisionProbabilities::default(), |acc, &(ch, w)| {
                Ok(acc.add(&self.channel(ch, lambda_t)?.scaled(w)))
            })
    }
}

fn readout(rho: &DensityMatrix) -> Result<CollisionProbabilities> {
    Ok(CollisionProbabilities {
        ee: rho.population("11", None)?,
        gg: rho.population("00", None)?,
        eg: rho.population("10", None)?,
        ge: rho.population("01", None)?,
    })
}

fn symmetric_readout(
    rho: &DensityMatrix,
    keeps: [[usize; 2]; 2],
) -> Result<CollisionProbabilities> {
    let a = readout(&rho.partial_trace(&keeps[0])?)?;
    let b = readout(&rho.partial_trace(&keeps[1])?)?;
    Ok(a.add(&b).scaled(0.5))
}

/// Mixture-model probabilities at a single `λt`.
pub fn collision_probabilities_mixture(
    mix: &CollisionMixture,
    lambda_t: f64,
) -> Result<CollisionProbabilities> {
    CollisionMixture::new(mix.w_two_atom, mix.w_extra_first, mix.w_extra_second)?;
    CollisionModel::new(*mix)?.probabilities(lambda_t)
}

/// Result of matching the mixture model to [`PRINTED_COEFFICIENTS`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureFit {
    /// Unconstrained least-squares weights.
    pub raw: [f64; 3],
    /// `raw` rescaled to sum to one.
    pub mixture: CollisionMixture,
    /// Root-mean-square coefficient residual of the unconstrained fit.
    pub rms_residual: f64,
}

/// Recovers channel weights by least squares on Fourier coefficients.
///
/// Each channel is simulated on a grid over one period and projected onto
/// `(1, cos 2λt, cos 3λt)`; the resulting 12×3 design matrix is then fitted
/// to the reference coefficients.
pub fn fit_mixture_weights() -> Result<MixtureFit> {
    let model = CollisionModel::new(CollisionMixture::default())?;
    let grid: Vec<f64> = (0..96).map(|k| 2.0 * PI * k as f64 / 96.0).collect();
    let basis = DMatrix::from_fn(grid.len(), 3, |r, c| match c {
        0 => 1.0,
        1 => (2.0 * grid[r]).cos(),
        _ => (3.0 * grid[r]).cos(),
    });
    let projector = basis.clone().svd(true, true);

    let channels = [
        CollisionChannel::OneAtomEach,
        CollisionChannel::ExtraAtomFirst,
        CollisionChannel::ExtraAtomSecond,
    ];
    let mut design = DMatrix::<f64>::zeros(12, 3);
    for (col, &ch) in channels.iter().enumerate() {
        let samples = grid
            .iter()
            .map(|&x| model.channel(ch, x))
            .collect::<Result<Vec<_>>>()?;
        let outcomes: [fn(&CollisionProbabilities) -> f64; 4] =
            [|p| p.ee, |p| p.gg, |p| p.eg, |p| p.ge];
        for (o, pick) in outcomes.iter().enumerate() {
            let y = DVector::from_iterator(grid.len(), samples.iter().map(pick));
            let coeffs = projector
                .solve(&y, 1e-12)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for k in 0..3 {
                design[(3 * o + k, col)] = coeffs[k];
            }
        }
    }
    let target = DVector::from_iterator(12, PRINTED_COEFFICIENTS.iter().flatten().copied());
    let w = design
        .clone()
        .svd(true, true)
        .solve(&target, 1e-12)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let residual = &design * &w - &target;
    let total: f64 = w.iter().sum();
    Ok(MixtureFit {
        raw: [w[0], w[1], w[2]],
        mixture: CollisionMixture {
            w_two_atom: w[0] / total,
            w_extra_first: w[1] / total,
            w_extra_second: w[2] / total,
        },
        rms_residual: (residual.norm_squared() / 12.0).sqrt(),
    })
}

/// Closed-form detection curves over `grid`, optionally alongside the
/// mixture model (columns prefixed `mix_`).
pub fn figure1_series(grid: &[f64], mixture: Option<&CollisionMixture>) -> Result<SweepSeries> {
    let mut series = SweepSeries::new("lambda_t", grid.to_vec())?;
    let closed: Vec<CollisionProbabilities> = grid
        .iter()
        .map(|&x| collision_probabilities_closed_form(x))
        .collect();
    push_probabilities(&mut series, "", &closed)?;
    if let Some(mix) = mixture {
        let model = CollisionModel::new(CollisionMixture::new(
            mix.w_two_atom,
            mix.w_extra_first,
            mix.w_extra_second,
        )?)?;
        let mixed = grid
            .par_iter()
            .map(|&x| model.probabilities(x))
            .collect::<Result<Vec<_>>>()?;
        push_probabilities(&mut series, "mix_", &mixed)?;
        series.set_meta("w_two_atom", mix.w_two_atom);
        series.set_meta("w_extra_first", mix.w_extra_first);
        series.set_meta("w_extra_second", mix.w_extra_second);
    }
    Ok(series)
}

fn push_probabilities(
    series: &mut SweepSeries,
    prefix: &str,
    rows: &[CollisionProbabilities],
) -> Result<()> {
    series.push_column(format!("{prefix}P_eg"), rows.iter().map(|p| p.eg).collect())?;
    series.push_column(format!("{prefix}P_ge"), rows.iter().map(|p| p.ge).collect())?;
    series.push_column(format!("{prefix}P_ee"), rows.iter().map(|p| p.ee).collect())?;
    series.push_column(format!("{prefix}P_gg"), rows.iter().map(|p| p.gg).collect())?;
    Ok(())
}

/// Distillation probability of `W_n(t)` over `grid`: the closed form and
/// the value measured on the numerically propagated state.
pub fn distill_scan_series(n: usize, grid: &[f64]) -> Result<SweepSeries> {
    let closed = grid
        .iter()
        .map(|&x| distillation_probability(n, x))
        .collect::<Result<Vec<_>>>()?;
    let prop = Propagator::new(vacuum_sector_for(n, 1.0)?)?;
    let mut start = "0".repeat(n - 1);
    start.push('1');
    let psi0 = basis_state(BasisDescriptor::atoms(n)?, &start, None)?;
    let measured = grid
        .par_iter()
        .map(|&x| {
            let psi = prop.evolve(&psi0, x)?;
            match measure_atom(&psi, n - 1, 0) {
                Ok(rec) => Ok(rec.probability),
                Err(Error::ZeroProbability { .. }) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut series = SweepSeries::new("lambda_t", grid.to_vec())?;
    series.push_column("probability", closed)?;
    series.push_column("probability_measured", measured)?;
    series.set_meta("n", n);
    Ok(series)
}
