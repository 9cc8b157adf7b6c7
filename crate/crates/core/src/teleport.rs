//! Single-step teleportation over `(|00⟩ + n|11⟩)/√(1+n²)`, the Pauli
//! corrections Bob applies after each generalized Bell outcome, the ancilla
//! interaction that cleans a distorted qubit, and the exhaustive two-step
//! outcome table.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::analytics;
use crate::bases::{self, BasisParam, Label};
use crate::engine::{self, Plan};
use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::matrix::Matrix;
use crate::statevec::{InputQubit, StateVector, TOL};

/// Channel parameter `n ∈ [0, 1]`; `n = 0` carries no entanglement.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct ChannelParam(f64);

impl ChannelParam {
    pub fn new(n: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&n) {
            return Err(Error::OutOfRange {
                name: "n",
                value: n,
            });
        }
        Ok(ChannelParam(n))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_unentangled(self) -> bool {
        self.0 == 0.0
    }

    /// `N = 1/√(1+n²)`.
    pub fn normalizer(self) -> f64 {
        1.0 / (1.0 + self.0 * self.0).sqrt()
    }

    /// The same value read as a measurement parameter (matching condition).
    pub fn as_basis_param(self) -> BasisParam {
        BasisParam::new(self.0).expect("same range")
    }
}

/// `(|00⟩ + n|11⟩)/√(1+n²)`.
pub fn channel_state(n: ChannelParam) -> StateVector {
    let norm = n.normalizer();
    let z = Complex64::new(0.0, 0.0);
    StateVector::normalized_raw(
        2,
        vec![
            Complex64::new(norm, 0.0),
            z,
            z,
            Complex64::new(n.value() * norm, 0.0),
        ],
    )
    .expect("nonzero")
}

/// Which distortion an ancilla interaction removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pattern {
    /// `α|0⟩ + n β|1⟩`, cleaned by `U_n`.
    A,
    /// `n α|0⟩ + β|1⟩`, cleaned by `V_n`.
    B,
}

/// Interaction `U_n` between a data qubit (first) and an ancilla (second).
pub fn unitary_u(n: f64) -> Matrix {
    let s = (1.0 - n * n).max(0.0).sqrt();
    Matrix::from_real(
        4,
        &[
            n, s, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0, //
            s, -n, 0.0, 0.0,
        ],
    )
}

/// Interaction `V_n`, the counterpart of [`unitary_u`] for pattern B.
pub fn unitary_v(n: f64) -> Matrix {
    let s = (1.0 - n * n).max(0.0).sqrt();
    Matrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, s, n, 0.0, //
            0.0, -n, s, 0.0,
        ],
    )
}

impl Pattern {
    pub fn interaction(self, n: f64) -> Matrix {
        match self {
            Pattern::A => unitary_u(n),
            Pattern::B => unitary_v(n),
        }
    }
}

/// Bob's Pauli correction after a generalized Bell outcome, in application
/// order: `1`, `σz`, `σx`, `σzσx` (σx first).
pub fn bell_correction(label: &str) -> &'static [Pauli] {
    match label {
        "Phi+" => &[],
        "Phi-" => &[Pauli::Z],
        "Psi+" => &[Pauli::X],
        "Psi-" => &[Pauli::X, Pauli::Z],
        other => panic!("`{other}` is not a generalized Bell label"),
    }
}

/// An operation applied while a branch was being resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correction {
    Pauli {
        qubit: usize,
        gate: Pauli,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// `U_n` or `V_n` on the data qubit and a fresh ancilla.
    Interaction {
        pattern: Pattern,
        n: f64,
    },
    MeasureAncilla,
    /// A qubit left in a known computational state was discarded.
    Release {
        qubit: usize,
        bit: u8,
    },
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correction::Pauli { qubit, gate } => write!(f, "{gate}@{qubit}"),
            Correction::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            Correction::Interaction {
                pattern: Pattern::A,
                n,
            } => write!(f, "U_n({n})"),
            Correction::Interaction {
                pattern: Pattern::B,
                n,
            } => write!(f, "V_n({n})"),
            Correction::MeasureAncilla => write!(f, "measure_aux"),
            Correction::Release { qubit, bit } => write!(f, "release({qubit}={bit})"),
        }
    }
}

impl Serialize for Correction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One leaf of a protocol's outcome tree.
#[derive(Clone, Debug, Serialize)]
pub struct OutcomeBranch {
    pub labels: Vec<Label>,
    pub probability: f64,
    /// Bob's final state; `None` for branches of (numerically) zero weight.
    #[serde(serialize_with = "serialize_state")]
    pub post_state: Option<StateVector>,
    pub corrections_applied: Vec<Correction>,
    pub success: bool,
}

impl OutcomeBranch {
    /// Successful without an ancilla interaction.
    pub fn is_direct_success(&self) -> bool {
        self.success
            && !self
                .corrections_applied
                .contains(&Correction::MeasureAncilla)
    }

    /// Number of teleportation or joint measurements recorded (ancilla
    /// outcomes excluded).
    pub fn measurement_depth(&self) -> usize {
        self.labels.iter().filter(|l| !l.starts_with("aux")).count()
    }

    pub fn label_string(&self) -> String {
        self.labels.join(" ")
    }
}

fn serialize_state<S: Serializer>(
    state: &Option<StateVector>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match state {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.amplitudes().iter().map(|a| [a.re, a.im])),
    }
}

/// Teleports `input` once with measurement `B_m` over channel `n`, Pauli
/// corrected per outcome. Exactly four branches, in basis order.
pub fn single_teleport(
    input: &InputQubit,
    m: BasisParam,
    n: ChannelParam,
) -> Result<Vec<OutcomeBranch>> {
    let state = input.to_state().tensor(&channel_state(n));
    let basis = bases::bell_basis(m.value())?;
    let projections = state.project(&basis, &[0, 1])?;
    let expected = analytics::single_step_probabilities(input, m.value(), n.value());
    let plan = Plan::relay("single_teleport", &[(m, n)], false, false);
    let branches = engine::enumerate(&plan, input, u128::MAX)?;

    // Both routes must agree: direct projection of the composite state, and
    // the closed-form η expressions.
    debug_assert_eq!(branches.len(), 4);
    for ((b, p), e) in branches.iter().zip(&projections).zip(expected) {
        debug_assert_eq!(b.labels[0], p.label);
        debug_assert!((b.probability - p.probability).abs() < 1e-12);
        debug_assert!((b.probability - e).abs() < 1e-12);
    }
    Ok(branches)
}

/// Cleans a distorted single-qubit state with an ancilla.
///
/// Appends `|0⟩_aux`, applies `U_{n_eff}` (pattern A) or `V_{n_eff}` (pattern
/// B) and measures the ancilla. Returns `aux0` (clean state, success) and
/// `aux1` (failure). When `expected` is given the state's shape is checked
/// against it first.
pub fn ancilla_correct(
    state: &StateVector,
    pattern: Pattern,
    n_eff: ChannelParam,
    expected: Option<&InputQubit>,
) -> Result<Vec<OutcomeBranch>> {
    if state.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.dim(),
        });
    }
    let n = n_eff.value();
    if let Some(q) = expected {
        let (a, b) = match pattern {
            Pattern::A => (q.alpha(), q.beta() * n),
            Pattern::B => (q.alpha() * n, q.beta()),
        };
        let shape = StateVector::normalized_raw(1, vec![a, b]);
        let fidelity = match &shape {
            Some(s) => s.fidelity(state)?,
            None => 0.0,
        };
        if (fidelity - 1.0).abs() > TOL.structure {
            return Err(Error::UncorrectableShape);
        }
    }
    let with_aux = state.tensor(&StateVector::basis_state(1, 0)?);
    let interacted = with_aux.apply_unitary(&pattern.interaction(n), &[0, 1])?;
    let outcomes = interacted.project(&bases::computational(1), &[1])?;
    let applied = vec![
        Correction::Interaction { pattern, n },
        Correction::MeasureAncilla,
    ];
    Ok(outcomes
        .into_iter()
        .map(|o| {
            let success = o.label == "0"
                && match (&o.post_state, expected) {
                    (Some(s), Some(q)) => {
                        (s.fidelity(&q.to_state()).unwrap_or(0.0) - 1.0).abs() < TOL.equality
                    }
                    (Some(_), None) => true,
                    (None, _) => false,
                };
            OutcomeBranch {
                labels: vec![Label::Owned(format!("aux{}", o.label))],
                probability: o.probability,
                post_state: o.post_state,
                corrections_applied: applied.clone(),
                success,
            }
        })
        .collect())
}

/// Two successive teleportations: `(m_a, n_a)` then `(m_b, n_b)`, all sixteen
/// outcome pairs in row order `Φ+Φ+, Φ+Φ-, …, Ψ-Ψ-`.
pub fn two_step_table(
    input: &InputQubit,
    m_a: BasisParam,
    n_a: ChannelParam,
    m_b: BasisParam,
    n_b: ChannelParam,
) -> Result<Vec<OutcomeBranch>> {
    let plan = Plan::relay("two_step", &[(m_a, n_a), (m_b, n_b)], false, false);
    let branches = engine::enumerate(&plan, input, u128::MAX)?;
    debug_assert_eq!(branches.len(), 16);
    let xi = analytics::two_step_probabilities(
        input,
        m_a.value(),
        n_a.value(),
        m_b.value(),
        n_b.value(),
    );
    for (b, x) in branches.iter().zip(xi) {
        debug_assert!((b.probability - x).abs() < 1e-12, "{:?}", b.labels);
    }
    Ok(branches)
}

/// Coefficients `(c0, c1)` of Bob's unnormalized state `c0 α|0⟩ + c1 β|1⟩`
/// after one corrected step with outcome `label`.
pub fn step_distortion(label: &str, m: f64, n: f64) -> (f64, f64) {
    match label {
        "Phi+" => (1.0, m * n),
        "Phi-" => (m, n),
        "Psi+" => (n, m),
        "Psi-" => (m * n, 1.0),
        other => panic!("`{other}` is not a generalized Bell label"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input() -> InputQubit {
        InputQubit::real(0.6, 0.8).unwrap()
    }

    fn cp(n: f64) -> ChannelParam {
        ChannelParam::new(n).unwrap()
    }

    fn bp(m: f64) -> BasisParam {
        BasisParam::new(m).unwrap()
    }

    #[test]
    fn channel_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = channel_state(cp(1.0));
        assert!((s.amplitude(0).re - h).abs() < 1e-15 && (s.amplitude(3).re - h).abs() < 1e-15);
        assert_eq!(
            channel_state(cp(0.0)),
            StateVector::basis_state(2, 0).unwrap()
        );
        let s = channel_state(cp(0.5));
        assert!((s.amplitude(0).re - 0.894427190999916).abs() < 1e-12);
        assert!((s.amplitude(3).re - 0.447213595499958).abs() < 1e-12);
        assert!(ChannelParam::new(1.5).is_err());
    }

    #[test]
    fn interactions_are_unitary() {
        for k in 0..=20 {
            let n = k as f64 / 20.0;
            assert!(unitary_u(n).unitarity_deviation() < 1e-12);
            assert!(unitary_v(n).unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn u_n_produces_clean_component() {
        // direct 4×4 matrix-vector product oracle
        let (n, a, b) = (
            0.5,
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        );
        let norm = (a * a + n * n * b * b).sqrt();
        let v = [a / norm, 0.0, n * b / norm, 0.0];
        let u = [
            [n, (1.0 - n * n).sqrt(), 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [(1.0 - n * n).sqrt(), -n, 0.0, 0.0],
        ];
        let oracle: Vec<f64> = u
            .iter()
            .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum())
            .collect();
        let state = StateVector::from_real(2, &v).unwrap();
        let out = state.apply_unitary(&unitary_u(n), &[0, 1]).unwrap();
        for (o, e) in out.amplitudes().iter().zip(&oracle) {
            assert!((o.re - e).abs() < 1e-15);
        }
        // |·0⟩ part is n(α|0⟩+β|1⟩)/norm
        assert!((oracle[0] - n * a / norm).abs() < 1e-15);
        assert!((oracle[2] - n * b / norm).abs() < 1e-15);
    }

    #[test]
    fn single_teleport_ideal_channel() {
        let q = input();
        for branch in single_teleport(&q, bp(1.0), cp(1.0)).unwrap() {
            assert!((branch.probability - 0.25).abs() < 1e-15);
            assert!(branch.success);
            let f = branch.post_state.unwrap().fidelity(&q.to_state()).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_teleport_standard_bell_over_partial_channel() {
        let (a, b, n): (f64, f64, f64) = (0.6, 0.8, 0.5);
        let branches = single_teleport(&input(), bp(1.0), cp(n)).unwrap();
        let p_phi = (a * a + n * n * b * b) / (2.0 * (1.0 + n * n));
        let target = StateVector::from_real(1, &[a, n * b]).unwrap();
        for br in &branches[..2] {
            assert!((br.probability - p_phi).abs() < 1e-15);
            assert!(!br.success);
            let f = br.post_state.as_ref().unwrap().fidelity(&target).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_teleport_matching_condition() {
        for n in [0.2, 0.5, 0.9] {
            let branches = single_teleport(&input(), bp(n), cp(n)).unwrap();
            let labels: Vec<_> = branches
                .iter()
                .filter(|b| b.success)
                .map(|b| b.labels[0].clone())
                .collect();
            assert_eq!(labels, ["Phi-", "Psi+"]);
            let p: f64 = branches
                .iter()
                .filter(|b| b.success)
                .map(|b| b.probability)
                .sum();
            let expected = 2.0 * n * n / (1.0 + n * n).powi(2);
            assert!((p - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn post_states_follow_corrected_kets() {
        // |varphi_k⟩ ∝ (c0 α, c1 β) with the per-outcome factors
        let q = input();
        for (m, n) in [(0.3, 0.7), (1.0, 0.4), (0.6, 0.6)] {
            for br in single_teleport(&q, bp(m), cp(n)).unwrap() {
                let (c0, c1) = step_distortion(&br.labels[0], m, n);
                let target = StateVector::from_real(1, &[c0 * 0.6, c1 * 0.8]).unwrap();
                let f = br.post_state.unwrap().fidelity(&target).unwrap();
                assert!((f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ancilla_correct_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = InputQubit::real(h, h).unwrap();

        let clean = q.to_state();
        let out = ancilla_correct(&clean, Pattern::A, cp(1.0), Some(&q)).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-15 && out[0].success);

        let zero = StateVector::basis_state(1, 0).unwrap();
        let out = ancilla_correct(&zero, Pattern::A, cp(0.0), None).unwrap();
        assert_eq!(out[0].probability, 0.0);
        assert!(!out[0].success && !out[1].success);

        let n = 0.5;
        let distorted = StateVector::from_real(1, &[h, n * h]).unwrap();
        let out = ancilla_correct(&distorted, Pattern::A, cp(n), Some(&q)).unwrap();
        assert!((out[0].probability - 0.4).abs() < 1e-12);
        assert!(out[0].success && !out[1].success);
        let distorted_b = StateVector::from_real(1, &[n * h, h]).unwrap();
        let out = ancilla_correct(&distorted_b, Pattern::B, cp(n), Some(&q)).unwrap();
        assert!((out[0].probability - 0.4).abs() < 1e-12);
    }

    #[test]
    fn ancilla_correct_rejects_wrong_shape() {
        let q = input();
        let distorted = StateVector::from_real(1, &[0.6, 0.4]).unwrap();
        assert_eq!(
            ancilla_correct(&distorted, Pattern::B, cp(0.5), Some(&q)).unwrap_err(),
            Error::UncorrectableShape
        );
        assert!(ancilla_correct(&distorted, Pattern::A, cp(0.5), Some(&q)).is_ok());
    }

    #[test]
    fn failed_ancilla_outcome_carries_no_input_information() {
        let n = 0.5;
        for (a, b) in [(0.6, 0.8), (0.8, 0.6), (1.0, 0.0)] {
            let q = InputQubit::real(a, b).unwrap();
            let s = StateVector::from_real(1, &[a, n * b]).unwrap();
            let out = ancilla_correct(&s, Pattern::A, cp(n), Some(&q)).unwrap();
            let failed = out[1].post_state.as_ref().unwrap();
            let one = StateVector::basis_state(1, 1).unwrap();
            assert!((failed.fidelity(&one).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_step_ideal_and_group3() {
        let q = input();
        let all = two_step_table(&q, bp(1.0), cp(1.0), bp(1.0), cp(1.0)).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all
            .iter()
            .all(|b| b.success && (b.probability - 1.0 / 16.0).abs() < 1e-15));

        let n = 0.6;
        let t = two_step_table(&q, bp(1.0), cp(n), bp(1.0), cp(n)).unwrap();
        let succ: Vec<_> = t.iter().filter(|b| b.success).collect();
        assert_eq!(succ.len(), 8);
        for b in &succ {
            let first_phi = b.labels[0].starts_with("Phi");
            let second_phi = b.labels[1].starts_with("Phi");
            assert_ne!(first_phi, second_phi);
        }
        let p: f64 = succ.iter().map(|b| b.probability).sum();
        assert!((p - 2.0 * n * n / (1.0 + n * n).powi(2)).abs() < 1e-12);
    }
}
