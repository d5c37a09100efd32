//! Randomized invariants.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use metroscope::circuits::{apply_circuit, sample_circuit, Circuit, GateSet, StartState};
use metroscope::dicke::{dicke_embed, dicke_project, sym_power_lift, DickeBasis};
use metroscope::fisher::{
    asymmetry_bounds, lambda_of_spectrum, qfi, qfi_density, qfi_pure, Spectrum, QFI_PAIR_THRESHOLD,
};
use metroscope::hamiltonian::{angular_momentum, collective_sym, Axis, LocalHamiltonian};
use metroscope::interferometer::MachZehnder;
use metroscope::linalg::{expm_hermitian, max_abs_diff, outer, unitarity_defect, HermitianEigen};
use metroscope::loss::partial_trace_dicke;
use metroscope::sampling::{haar_unitary, haar_vector, mc_estimate, EnsembleSpec, McConfig};
use metroscope::state::{QuantumState, SymmetricState};
use metroscope::{CMat, CVec};
use proptest::prelude::*;

fn random_local(d: usize, seed: u64) -> LocalHamiltonian {
    let mut r = rng(seed);
    let g = CMat::from_fn(d, d, |_, _| metroscope::sampling::complex_normal(&mut r));
    LocalHamiltonian::new((&g + g.adjoint()) * c(0.5, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lift_is_a_unitary_homomorphism(seed in any::<u64>(), n in 1usize..40) {
        let mut r = rng(seed);
        let v = haar_unitary(2, &mut r);
        let w = haar_unitary(2, &mut r);
        let lv = sym_power_lift(&v, n).unwrap();
        let lw = sym_power_lift(&w, n).unwrap();
        let lvw = sym_power_lift(&(&v * &w), n).unwrap();
        prop_assert!(unitarity_defect(&lv) < 1e-10);
        prop_assert!(max_abs_diff(&(&lv * &lw), &lvw) < 1e-10);
        prop_assert!(max_abs_diff(&sym_power_lift(&v.adjoint(), n).unwrap(), &lv.adjoint()) < 1e-10);
    }

    #[test]
    fn lift_of_rotation_is_collective_rotation(theta in -PI..PI, n in 1usize..60) {
        let jx = angular_momentum(Axis::X, n);
        let single = expm_hermitian(&(metroscope::hamiltonian::pauli(Axis::X) * c(0.5, 0.0)), theta);
        let lift = sym_power_lift(&single, n).unwrap();
        prop_assert!(max_abs_diff(&lift, &expm_hermitian(jx.matrix(), theta)) < 1e-9);
    }

    #[test]
    fn embed_project_round_trip(seed in any::<u64>(), n in 1usize..6, d in 2usize..4) {
        let basis = Arc::new(DickeBasis::new(n, d).unwrap());
        let s = SymmetricState::pure(basis.clone(), haar_vector(basis.dim(), &mut rng(seed))).unwrap();
        let full = dicke_embed(&s).unwrap();
        let back = dicke_project(&full).unwrap();
        prop_assert!(max_abs_diff(&back.density(), &s.density()) < 1e-12);
    }

    #[test]
    fn collective_spectrum_is_sums_of_local_levels(seed in any::<u64>(), n in 1usize..7, d in 2usize..4) {
        let h = random_local(d, seed);
        let big = collective_sym(&h, n).unwrap();
        let basis = DickeBasis::new(n, d).unwrap();
        let mut want: Vec<f64> = basis
            .occupations()
            .iter()
            .map(|k| k.iter().zip(h.eigenvalues()).map(|(&ki, &l)| ki as f64 * l).sum())
            .collect();
        want.sort_by(f64::total_cmp);
        let got = HermitianEigen::new(big.matrix()).values;
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn qfi_invariants(seed in any::<u64>(), n in 1usize..12, t in -3.0f64..3.0, shift in -5.0f64..5.0) {
        let h = collective_sym(&random_local(2, seed), n).unwrap();
        let psi = haar_vector(n + 1, &mut rng(seed ^ 1));
        let f = qfi_pure(&psi, h.matrix());
        // Shifting the generator and evolving under it leave the QFI alone.
        let shifted = h.matrix() + CMat::identity(n + 1, n + 1) * c(shift, 0.0);
        prop_assert!((qfi_pure(&psi, &shifted) - f).abs() < 1e-9 * (1.0 + f));
        let evolved = expm_hermitian(h.matrix(), t) * &psi;
        prop_assert!((qfi_pure(&evolved, h.matrix()) - f).abs() < 1e-9 * (1.0 + f));
        // Pure density matrices agree with the variance formula.
        prop_assert!((qfi_density(&outer(&psi), h.matrix(), QFI_PAIR_THRESHOLD) - f).abs() < 1e-8 * (1.0 + f));
        let spread = HermitianEigen::new(h.matrix()).values;
        let range = spread[spread.len() - 1] - spread[0];
        prop_assert!(f <= range * range + 1e-9);
    }

    #[test]
    fn qfi_is_convex_over_mixtures(seed in any::<u64>(), n in 1usize..10, w in 0.0f64..1.0) {
        let h = angular_momentum(Axis::Z, n);
        let a = haar_vector(n + 1, &mut rng(seed));
        let b = haar_vector(n + 1, &mut rng(seed.wrapping_add(1)));
        let rho = outer(&a) * c(w, 0.0) + outer(&b) * c(1.0 - w, 0.0);
        let mixed = qfi_density(&rho, h.matrix(), QFI_PAIR_THRESHOLD);
        let bound = w * qfi_pure(&a, h.matrix()) + (1.0 - w) * qfi_pure(&b, h.matrix());
        prop_assert!(mixed <= bound + 1e-9);
    }

    #[test]
    fn asymmetry_and_fisher_chain(seed in any::<u64>(), n in 1usize..10, rank in 1usize..4, phi in 0.0f64..6.28) {
        let dim = n + 1;
        let rho = random_density(dim, rank.min(dim), seed);
        let s = SymmetricState::density(DickeBasis::two_mode(n), rho.clone()).unwrap();
        let h = angular_momentum(Axis::Z, n);
        let (tr2, hs2) = asymmetry_bounds(&rho, h.matrix());
        let f = qfi(&s, &h).unwrap();
        let fi = MachZehnder::new(n).fi(&s, phi).unwrap();
        prop_assert!(hs2 <= tr2 + 1e-9);
        prop_assert!(tr2 <= f + 1e-9);
        prop_assert!(f <= 4.0 * h.norm().powi(2) + 1e-9);
        prop_assert!(fi <= f + 1e-9);
    }

    #[test]
    fn lambda_is_a_mixedness_factor(raw in proptest::collection::vec(0.0f64..1.0, 2..12)) {
        prop_assume!(raw.iter().sum::<f64>() > 1e-3);
        let total: f64 = raw.iter().sum();
        let spectrum = Spectrum::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let lv = lambda_of_spectrum(&spectrum, raw.len()).unwrap();
        prop_assert!(lv.lambda >= -1e-12 && lv.lambda <= 1.0 + 1e-12);
        prop_assert!(lv.lower_bound <= lv.lambda + 1e-12);
    }

    #[test]
    fn partial_trace_is_a_channel(seed in any::<u64>(), n in 1usize..25, k in 0usize..25) {
        prop_assume!(k <= n);
        let s = SymmetricState::pure(DickeBasis::two_mode(n), haar_vector(n + 1, &mut rng(seed))).unwrap();
        let out = partial_trace_dicke(&s, k).unwrap();
        let rho = out.density();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(HermitianEigen::new(&rho).values[0] > -1e-12);
        // Tracing in two steps equals tracing at once.
        if k >= 1 {
            let stepwise = partial_trace_dicke(&partial_trace_dicke(&s, 1).unwrap(), k - 1).unwrap();
            prop_assert!(max_abs_diff(&stepwise.density(), &rho) < 1e-12);
        }
    }

    #[test]
    fn circuits_undo(seed in any::<u64>(), n in 1usize..30, depth in 0usize..30) {
        let gates = GateSet::new(n);
        let circuit = sample_circuit(n, depth, &mut rng(seed));
        let start = StartState::Balanced.state(n);
        let forward = apply_circuit(&start, &circuit, &gates).unwrap();
        let back = apply_circuit(&forward, &circuit.inverse(), &gates).unwrap();
        prop_assert!(max_abs_diff(&back.density(), &start.density()) < 1e-10);
        let id = apply_circuit(&start, &Circuit::identity(n), &gates).unwrap();
        prop_assert_eq!(id.density(), start.density());
    }

    #[test]
    fn mz_probabilities_agree_between_routes(seed in any::<u64>(), n in 1usize..20, phi in 0.0f64..6.28) {
        let mz = MachZehnder::new(n);
        let s = SymmetricState::pure(DickeBasis::two_mode(n), haar_vector(n + 1, &mut rng(seed))).unwrap();
        let a = mz.probabilities(&s, phi).unwrap();
        let b = mz.probabilities_via_jy(&s, phi).unwrap();
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn monte_carlo_is_worker_count_independent() {
    let spec = EnsembleSpec::haar_sym_pure(6, 2).unwrap();
    let h = collective_sym(&LocalHamiltonian::half_sigma_z(), 6).unwrap();
    let run = |w| {
        mc_estimate(|s| qfi(s, &h), &spec, &McConfig::new(300, 42).workers(w).keep_values(true)).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(0));
    let other = mc_estimate(|s| qfi(s, &h), &spec, &McConfig::new(300, 43)).unwrap();
    assert_ne!(one.mean, other.mean);
}

#[test]
fn prefix_of_a_longer_run_is_reproduced() {
    let spec = EnsembleSpec::haar_sym_pure(4, 2).unwrap();
    let f = |s: &metroscope::state::AnyState| Ok(s.density()[(0, 0)].re);
    let short = mc_estimate(f, &spec, &McConfig::new(10, 5).keep_values(true)).unwrap();
    let long = mc_estimate(f, &spec, &McConfig::new(20, 5).keep_values(true)).unwrap();
    assert_eq!(short.sample_values.unwrap()[..], long.sample_values.unwrap()[..10]);
}

#[test]
fn haar_vectors_have_uniform_second_moment() {
    // E|⟨0|ψ⟩|² = 1/D and E|⟨0|ψ⟩|⁴ = 2/(D(D+1)) for uniform unit vectors.
    let dim = 5;
    let mut r = rng(77);
    let (mut m2, mut m4) = (0.0, 0.0);
    let trials = 40_000;
    for _ in 0..trials {
        let v: CVec = haar_vector(dim, &mut r);
        let p = v[0].norm_sqr();
        m2 += p;
        m4 += p * p;
    }
    m2 /= trials as f64;
    m4 /= trials as f64;
    assert!((m2 - 0.2).abs() < 0.005);
    assert!((m4 - 2.0 / 30.0).abs() < 0.003);
}

#[test]
fn circuit_states_stay_symmetric_and_normalized() {
    let gates = GateSet::new(8);
    let circuit = sample_circuit(8, 50, &mut rng(1));
    let s = apply_circuit(&StartState::Polarized.state(8), &circuit, &gates).unwrap();
    assert!((s.density().trace().re - 1.0).abs() < 1e-12);
    assert_eq!(s.dim(), 9);
}
