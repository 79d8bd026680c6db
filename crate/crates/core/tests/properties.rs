use std::f64::consts::PI;

use cqed_core::dynamics::measure_atom;
use cqed_core::experiments::{
    collision_probabilities_closed_form, collision_probabilities_mixture, CollisionMixture,
};
use cqed_core::hilbert::{atomic_excitation_number, excitation_number};
use cqed_core::models::vacuum_sector_for;
use cqed_core::{
    analytic_w_evolution, basis_state, concurrence, effective_hamiltonian, full_hamiltonian_at,
    make_target, static_frame_hamiltonian, vacuum_sector_hamiltonian, BasisDescriptor, Complex64,
    DensityMatrix, ModelParams, Propagator, StateVector, TargetLabel,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter("non-zero", |v| {
        v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
    })
}

fn state(basis: BasisDescriptor, raw: &[(f64, f64)]) -> StateVector {
    let v = DVector::from_iterator(
        raw.len(),
        raw.iter().map(|&(re, im)| Complex64::new(re, im)),
    );
    StateVector::normalized(basis, v).unwrap()
}

fn su2(alpha: f64, beta: f64, theta: f64) -> DMatrix<Complex64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(c, alpha),
            Complex64::from_polar(s, beta),
            -Complex64::from_polar(s, -beta),
            Complex64::from_polar(c, -alpha),
        ],
    )
}

fn mixed_two_qubit(raw: &[(f64, f64)], weights: &[f64]) -> DensityMatrix {
    let basis = BasisDescriptor::atoms(2).unwrap();
    let total: f64 = weights.iter().sum();
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for (k, w) in weights.iter().enumerate() {
        let psi = state(basis, &raw[4 * k..4 * k + 4]);
        m += psi.to_density().matrix() * Complex64::new(w / total, 0.0);
    }
    DensityMatrix::new(basis, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_trace_preserves_trace_and_positivity(
        raw in amplitudes(8 * 3),
        keep_mask in 1usize..15,
    ) {
        let basis = BasisDescriptor::with_cavity(3, 2).unwrap();
        let psi = state(basis, &raw);
        let keep: Vec<usize> = (0..4).filter(|k| keep_mask >> k & 1 == 1).collect();
        prop_assume!(keep.iter().any(|&k| k < 3));
        let rho = psi.partial_trace(&keep).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.eigenvalues().iter().all(|&e| e > -1e-10));
        let again = DensityMatrix::new(rho.basis(), rho.matrix().clone());
        prop_assert!(again.is_ok());
    }

    #[test]
    fn embedding_round_trip(raw_a in amplitudes(4), raw_b in amplitudes(2)) {
        let a = state(BasisDescriptor::atoms(2).unwrap(), &raw_a);
        let b = state(BasisDescriptor::atoms(1).unwrap(), &raw_b);
        let joint = a.tensor(&b).unwrap();
        let back = joint.partial_trace(&[0, 1]).unwrap();
        prop_assert!((back.matrix() - a.to_density().matrix()).camax() < 1e-10);

        let embedded = a.with_vacuum(3).unwrap();
        let back = embedded.partial_trace(&[0, 1]).unwrap();
        prop_assert!((back.matrix() - a.to_density().matrix()).camax() < 1e-10);
    }

    #[test]
    fn unitarity_of_evolution(raw in amplitudes(8), t in -20.0f64..20.0, lambda in 0.1f64..3.0) {
        let prop = Propagator::new(vacuum_sector_for(3, lambda).unwrap()).unwrap();
        let psi = state(BasisDescriptor::atoms(3).unwrap(), &raw);
        let out = prop.evolve(&psi, t).unwrap();
        prop_assert!((out.norm_sqr().sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn excitation_number_conserved(raw in amplitudes(16), t in 0.0f64..10.0) {
        let prop = Propagator::new(vacuum_sector_for(4, 1.0).unwrap()).unwrap();
        let basis = BasisDescriptor::atoms(4).unwrap();
        let psi = state(basis, &raw);
        let ne = atomic_excitation_number(basis);
        let before = psi.expectation(&ne).unwrap().re;
        let after = prop.evolve(&psi, t).unwrap().expectation(&ne).unwrap().re;
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn evolution_composes(raw in amplitudes(8), t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let prop = Propagator::new(vacuum_sector_for(3, 0.7).unwrap()).unwrap();
        let psi = state(BasisDescriptor::atoms(3).unwrap(), &raw);
        let stepwise = prop.evolve(&prop.evolve(&psi, t1).unwrap(), t2).unwrap();
        let direct = prop.evolve(&psi, t1 + t2).unwrap();
        prop_assert!((stepwise.amplitudes() - direct.amplitudes()).camax() < 1e-9);
    }

    #[test]
    fn mixture_symmetric_channels_give_equal_ee_gg(w in 0.0f64..1.0, lt in 0.0f64..(2.0 * PI)) {
        let side = (1.0 - w) / 2.0;
        let mix = CollisionMixture::new(w, side, side).unwrap();
        let p = collision_probabilities_mixture(&mix, lt).unwrap();
        prop_assert!((p.ee - p.gg).abs() < 1e-9);
        prop_assert!((p.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_periodic_and_normalized(lt in -10.0f64..10.0) {
        let a = collision_probabilities_closed_form(lt);
        let b = collision_probabilities_closed_form(lt + 2.0 * PI);
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        prop_assert!((a.sum() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn builders_are_hermitian(
        n in 1usize..=4,
        g in 0.0f64..3.0,
        delta in 0.1f64..50.0,
        t in -5.0f64..5.0,
    ) {
        let p = ModelParams::new(n, g, delta).unwrap();
        for op in [
            full_hamiltonian_at(&p, t).unwrap(),
            static_frame_hamiltonian(&p).unwrap(),
            effective_hamiltonian(&p).unwrap(),
            vacuum_sector_hamiltonian(&p).unwrap(),
        ] {
            prop_assert!(op.hermitian_deviation() <= 1e-12);
        }
        let h = vacuum_sector_hamiltonian(&p).unwrap();
        let ne = atomic_excitation_number(p.atom_basis());
        prop_assert!(h.commutator_max(&ne).unwrap() <= 1e-12);
        let hs = static_frame_hamiltonian(&p).unwrap();
        let total = excitation_number(p.cavity_basis());
        prop_assert!(hs.commutator_max(&total).unwrap() <= 1e-12);
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(
        raw in amplitudes(12),
        weights in prop::collection::vec(0.05f64..1.0, 3),
        angles in prop::collection::vec(-PI..PI, 6),
    ) {
        let rho = mixed_two_qubit(&raw, &weights);
        let u = su2(angles[0], angles[1], angles[2]).kronecker(&su2(angles[3], angles[4], angles[5]));
        let rotated = &u * rho.matrix() * u.adjoint();
        let rho2 = DensityMatrix::new(rho.basis(), rotated).unwrap();
        let (c1, c2) = (concurrence(&rho).unwrap(), concurrence(&rho2).unwrap());
        prop_assert!((c1 - c2).abs() < 1e-8, "{} vs {}", c1, c2);
        prop_assert!((0.0..=1.0).contains(&c1));
    }

    #[test]
    fn product_states_have_zero_concurrence(a in amplitudes(2), b in amplitudes(2)) {
        let one = BasisDescriptor::atoms(1).unwrap();
        let psi = state(one, &a).tensor(&state(one, &b)).unwrap();
        prop_assert!(concurrence(&psi.to_density()).unwrap() < 1e-10);
    }
}

#[test]
fn oracle_equivalence_for_w_evolution() {
    for n in 2..=6 {
        let prop = Propagator::new(vacuum_sector_for(n, 1.0).unwrap()).unwrap();
        let start = format!("{}1", "0".repeat(n - 1));
        let psi0 = basis_state(BasisDescriptor::atoms(n).unwrap(), &start, None).unwrap();
        for k in 0..20 {
            let lt = 2.0 * PI * k as f64 / 19.0;
            let numeric = prop.evolve(&psi0, lt).unwrap();
            let analytic = analytic_w_evolution(n, lt).unwrap();
            let f = numeric.fidelity(&analytic).unwrap();
            assert!(f >= 1.0 - 1e-9, "n={n} lt={lt} fidelity {f}");
        }
    }
}

#[test]
fn distilled_pairs_have_concurrence_two_over_n_minus_one() {
    for n in 3..=6 {
        let psi = analytic_w_evolution(n, PI / n as f64).unwrap();
        let post = measure_atom(&psi, n - 1, 0).unwrap().post_state;
        let target = make_target(TargetLabel::W, n - 1).unwrap();
        assert!(post.fidelity(target.state()).unwrap() > 1.0 - 1e-9);
        let m = n - 1;
        for i in 0..m {
            for j in i + 1..m {
                let rho = if m == 2 {
                    post.to_density()
                } else {
                    post.partial_trace(&[i, j]).unwrap()
                };
                let c = concurrence(&rho).unwrap();
                assert!(
                    (c - 2.0 / m as f64).abs() < 1e-8,
                    "n={n} pair ({i},{j}) C={c}"
                );
            }
        }
    }
}
