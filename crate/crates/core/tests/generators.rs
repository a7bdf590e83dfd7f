//! Generator properties beyond the per-module unit tests: coverage of the
//! single-and-two-value forms, product structure of Pauli states, and
//! round trips over randomized parameters.

use proptest::prelude::*;
use qtest_core::benchsuite::input_state_amplitudes;
use qtest_core::rng::SplitRng;
use qtest_core::simcore::StateVector;
use qtest_core::stateprep::{
    gen_pauli, gen_two_value, sample_spec, scaq_check, InputKind, InputSpec,
};

#[test]
fn stv_forms_are_exactly_covered() {
    // |x>, (|x>+|y>)/sqrt2, and (|x>+i|y>)/sqrt2 over the CI/RTI samplers
    // plus the explicit pi/2 phase.
    let mut rng = SplitRng::seed_from(5);
    let n = 3usize;
    for _ in 0..40 {
        match sample_spec(InputKind::Ci, n, &mut rng) {
            InputSpec::KetX { x, .. } => assert!(x < 8),
            other => panic!("CI sampled {other:?}"),
        }
        match sample_spec(InputKind::Rti, n, &mut rng) {
            InputSpec::TwoValue { x, y, theta, .. } => {
                assert_ne!(x, y);
                assert_eq!(theta, 0.0);
            }
            other => panic!("RTI sampled {other:?}"),
        }
    }
    // The third form: explicit relative phase i.
    let input = gen_two_value(n, 1, 6, core::f64::consts::FRAC_PI_2).unwrap();
    let s = input.to_state().unwrap();
    let a = s.amplitude(1);
    let b = s.amplitude(6);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    assert!((a.re - r).abs() < 1e-12 && a.im.abs() < 1e-12);
    assert!(b.re.abs() < 1e-12 && (b.im - r).abs() < 1e-12);
}

#[test]
fn pauli_states_are_product_states() {
    // Every pairwise joint distribution factors into its marginals.
    let mut rng = SplitRng::seed_from(9);
    for _ in 0..30 {
        let n = 2 + rng.below(3) as usize;
        let indices: Vec<u8> = (0..n).map(|_| rng.below(6) as u8 + 1).collect();
        let state = gen_pauli(&indices).unwrap().to_state().unwrap();
        for a in 0..n {
            for b in (a + 1)..n {
                let joint = state.exact_distribution(&[a, b]).unwrap();
                let ma = state.exact_distribution(&[a]).unwrap();
                let mb = state.exact_distribution(&[b]).unwrap();
                for (idx, &p) in joint.iter().enumerate() {
                    let want = ma[idx >> 1] * mb[idx & 1];
                    assert!(
                        (p - want).abs() < 1e-10,
                        "{indices:?} qubits ({a},{b}): joint {p} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn csi_singletons_satisfy_scaq_and_samplers_cover() {
    let mut rng = SplitRng::seed_from(4);
    for _ in 0..20 {
        let n = 1 + rng.below(5) as usize;
        let spec = sample_spec(InputKind::Csi, n, &mut rng);
        let state = spec.materialize(&mut rng).unwrap().to_state().unwrap();
        let (pass, uncovered) = scaq_check(&[state]).unwrap();
        assert!(pass, "{spec:?} uncovered {uncovered:?}");
    }
}

proptest! {
    #[test]
    fn prepared_states_match_closed_forms(
        n in 1usize..=5,
        seed in 0u64..5000,
        theta in prop_oneof![Just(0.0f64), Just(core::f64::consts::FRAC_PI_2), Just(core::f64::consts::PI)],
    ) {
        let mut rng = SplitRng::seed_from(seed);
        let dim = 1u64 << n;
        let x = rng.below(dim);
        let mut y = rng.below(dim);
        if y == x {
            y = (y + 1) % dim;
        }
        for spec in [
            InputSpec::KetX { n, x },
            InputSpec::CompSup { n, x, theta },
            InputSpec::TwoValue { n, x, y, theta },
        ] {
            let want = input_state_amplitudes(&spec).unwrap();
            let got = spec.materialize(&mut rng).unwrap().to_state().unwrap();
            for (a, b) in got.amplitudes().iter().zip(&want) {
                prop_assert!((a - b).norm() < 1e-10, "{spec:?}");
            }
        }
    }

    #[test]
    fn unprepare_returns_to_all_zero(n in 1usize..=5, seed in 0u64..5000) {
        let mut rng = SplitRng::seed_from(seed);
        let kind = [InputKind::Ci, InputKind::Rti, InputKind::Csi, InputKind::Pauli]
            [rng.below(4) as usize];
        let input = qtest_core::stateprep::sample_input(kind, n, &mut rng).unwrap();
        let targets: Vec<usize> = (0..n).collect();
        let mut s = StateVector::new(n).unwrap();
        input.prepare(&mut s, &targets).unwrap();
        input.unprepare(&mut s, &targets).unwrap();
        let bits = s.measure(&targets, &mut rng).unwrap();
        prop_assert!(bits.iter().all(|&b| b == 0), "{}", input.description());
    }
}
