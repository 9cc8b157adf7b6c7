use num_complex::Complex64 as C;
use proptest::prelude::*;

use teleport_core::bases::{bell_basis, ghz3_basis, ghz4_basis};
use teleport_core::gates::{cnot, pauli_x, pauli_z};
use teleport_core::protocols::{self, ProtocolId};
use teleport_core::teleport::{unitary_u, unitary_v};
use teleport_core::{InputQubit, RunOptions, RunParams, StateVector};

fn amp() -> impl Strategy<Value = C> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C::new(re, im))
}

fn state(qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(amp(), 1 << qubits)
        .prop_filter("non-null", |v| {
            v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(move |v| StateVector::make(qubits, v).unwrap().0)
}

fn input() -> impl Strategy<Value = InputQubit> {
    (amp(), amp())
        .prop_filter("non-null", |(a, b)| a.norm_sqr() + b.norm_sqr() > 1e-3)
        .prop_map(|(a, b)| InputQubit::normalized(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unitaries_preserve_norm(s in state(3), n in 0.0..=1.0f64, pick in 0usize..5, t in 0usize..3) {
        let pair = [t, (t + 1) % 3];
        let out = match pick {
            0 => s.apply_unitary(&unitary_u(n), &pair),
            1 => s.apply_unitary(&unitary_v(n), &pair),
            2 => s.apply_unitary(&cnot(), &pair),
            3 => s.apply_unitary(&pauli_x(), &[t]),
            _ => s.apply_unitary(&pauli_z(), &[t]),
        }
        .unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_is_associative(a in state(1), b in state(2), c in state(1)) {
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert!(left.max_abs_diff(&right) < 1e-15);
    }

    #[test]
    fn bases_are_complete(m in 0.01..=1.0f64) {
        for basis in [bell_basis(m), ghz3_basis(m), ghz4_basis(m)] {
            let basis = basis.unwrap();
            prop_assert!(basis.completeness_deviation() < 1e-12);
            prop_assert!(basis.gram_deviation() < 1e-12);
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one(s in state(4), m in 0.05..=1.0f64) {
        let basis = bell_basis(m).unwrap();
        let total: f64 = s.project(&basis, &[1, 3]).unwrap().iter().map(|p| p.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent(s in state(3), m in 0.05..=1.0f64) {
        let basis = bell_basis(m).unwrap();
        for (k, p) in s.project(&basis, &[0, 1]).unwrap().into_iter().enumerate() {
            let Some(rest) = p.post_state else { continue };
            let again = basis.elements()[k].state.tensor(&rest);
            for (j, q) in again.project(&basis, &[0, 1]).unwrap().iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((q.probability - want).abs() < 1e-12, "{} -> {}", p.label, q.label);
            }
        }
    }

    #[test]
    fn success_rates_do_not_depend_on_the_input(a in input(), b in input(), n in 0.0..=1.0f64) {
        let opts = RunOptions { keep_branches: false, ..RunOptions::default() };
        for id in [ProtocolId::Group1, ProtocolId::Group2, ProtocolId::ParGhz3, ProtocolId::GhzChanGhz4Mn] {
            let ra = protocols::run(id, &RunParams::new(a, n, None).unwrap(), &opts).unwrap();
            let rb = protocols::run(id, &RunParams::new(b, n, None).unwrap(), &opts).unwrap();
            prop_assert!((ra.corrected_success - rb.corrected_success).abs() < 1e-12, "{}", id);
            prop_assert!((ra.direct_success - rb.direct_success).abs() < 1e-12, "{}", id);
        }
    }
}
