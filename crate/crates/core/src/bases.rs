//! Parameterized measurement bases: generalized Bell `B_m`, three-qubit
//! `GHZ_m` and the sixteen-element four-qubit `GHZ_m` family.
//!
//! Signs are taken literally from the defining kets; elements are never
//! re-phased. Every `+` element has the shape `M(|x⟩ + m|x̄⟩)` and every `-`
//! element `M(m|x⟩ - |x̄⟩)`, with `x̄` the bitwise complement of `x` and
//! `M = 1/√(1+m²)`.

use std::borrow::Cow;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::statevec::{StateVector, TOL};

/// Outcome label, e.g. `"Phi+"`, `"GHZ-"`, `"F+"` or a bitstring.
pub type Label = Cow<'static, str>;

/// Measurement parameter `m ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct BasisParam(f64);

impl BasisParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::OutOfRange {
                name: "m",
                value: m,
            });
        }
        Ok(BasisParam(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `M = 1/√(1+m²)`.
    pub fn normalizer(self) -> f64 {
        1.0 / (1.0 + self.0 * self.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    BellM,
    Ghz3M,
    Ghz4M,
    Computational,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::BellM => "bell_m",
            BasisKind::Ghz3M => "ghz3_m",
            BasisKind::Ghz4M => "ghz4_m",
            BasisKind::Computational => "computational",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub label: Label,
    pub state: StateVector,
}

/// An orthonormal measurement basis with labelled elements.
#[derive(Clone, Debug)]
pub struct BasisSet {
    kind: BasisKind,
    param: Option<BasisParam>,
    num_qubits: usize,
    elements: Vec<BasisElement>,
}

impl BasisSet {
    /// Validates orthonormality and completeness before accepting `elements`.
    pub fn new(
        kind: BasisKind,
        param: Option<BasisParam>,
        elements: Vec<BasisElement>,
    ) -> Result<Self> {
        let num_qubits = elements
            .first()
            .map(|e| e.state.num_qubits())
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        if elements.len() != 1usize << num_qubits
            || elements.iter().any(|e| e.state.num_qubits() != num_qubits)
        {
            return Err(Error::DimensionMismatch {
                expected: 1usize << num_qubits,
                found: elements.len(),
            });
        }
        let basis = BasisSet {
            kind,
            param,
            num_qubits,
            elements,
        };
        let dev = basis.gram_deviation();
        if dev > TOL.structure {
            return Err(Error::InvalidArgument(format!(
                "basis is not orthonormal (Gram deviation {dev:e})"
            )));
        }
        Ok(basis)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn param(&self) -> Option<BasisParam> {
        self.param
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_ref())
    }

    pub fn element(&self, label: &str) -> Option<&StateVector> {
        self.elements
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.state)
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let g = crate::statevec::inner(a.state.amplitudes(), b.state.amplitudes());
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        dev
    }

    /// Largest entrywise deviation of `Σ_k |e_k⟩⟨e_k|` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let s: Complex64 = self
                    .elements
                    .iter()
                    .map(|e| e.state.amplitude(r) * e.state.amplitude(c).conj())
                    .sum();
                let target = if r == c { 1.0 } else { 0.0 };
                dev = dev.max((s - Complex64::new(target, 0.0)).norm());
            }
        }
        dev
    }
}

/// `M(|x⟩ + m|x̄⟩)` for `sign = +`, `M(m|x⟩ - |x̄⟩)` for `sign = -`.
fn ghz_like(num_qubits: usize, x: usize, m: f64, plus: bool) -> StateVector {
    let dim = 1usize << num_qubits;
    let xbar = !x & (dim - 1);
    let norm = 1.0 / (1.0 + m * m).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    if plus {
        amps[x] = Complex64::new(norm, 0.0);
        amps[xbar] = Complex64::new(m * norm, 0.0);
    } else {
        amps[x] = Complex64::new(m * norm, 0.0);
        amps[xbar] = Complex64::new(-norm, 0.0);
    }
    StateVector::normalized_raw(num_qubits, amps).expect("nonzero by construction")
}

fn family(
    kind: BasisKind,
    num_qubits: usize,
    m: BasisParam,
    seeds: &[(&'static str, &'static str, usize)],
) -> BasisSet {
    let mut elements = Vec::with_capacity(2 * seeds.len());
    for &(plus, minus, x) in seeds {
        elements.push(BasisElement {
            label: Cow::Borrowed(plus),
            state: ghz_like(num_qubits, x, m.value(), true),
        });
        elements.push(BasisElement {
            label: Cow::Borrowed(minus),
            state: ghz_like(num_qubits, x, m.value(), false),
        });
    }
    BasisSet::new(kind, Some(m), elements).expect("parameterized families are orthonormal")
}

/// Generalized Bell basis `{Φ+_m, Φ-_m, Ψ+_m, Ψ-_m}`, `0 ≤ m ≤ 1`.
pub fn bell_basis(m: f64) -> Result<BasisSet> {
    let m = BasisParam::new(m)?;
    Ok(family(
        BasisKind::BellM,
        2,
        m,
        &[("Phi+", "Phi-", 0b00), ("Psi+", "Psi-", 0b01)],
    ))
}

/// Three-qubit `GHZ_m` basis: `GHZ±, G±, H±, Z±`, `0 < m ≤ 1`.
pub fn ghz3_basis(m: f64) -> Result<BasisSet> {
    let m = BasisParam::new(m)?;
    if m.value() == 0.0 {
        return Err(Error::DegenerateBasis("ghz3_m"));
    }
    Ok(ghz3_family(m))
}

/// Four-qubit `GHZ_m` basis: `A±, B±, C±, D±, E±, F±, J±, K±`, `0 < m ≤ 1`.
pub fn ghz4_basis(m: f64) -> Result<BasisSet> {
    let m = BasisParam::new(m)?;
    if m.value() == 0.0 {
        return Err(Error::DegenerateBasis("ghz4_m"));
    }
    Ok(ghz4_family(m))
}

pub(crate) fn ghz3_family(m: BasisParam) -> BasisSet {
    family(
        BasisKind::Ghz3M,
        3,
        m,
        &[
            ("GHZ+", "GHZ-", 0b000),
            ("G+", "G-", 0b010),
            ("H+", "H-", 0b100),
            ("Z+", "Z-", 0b110),
        ],
    )
}

pub(crate) fn ghz4_family(m: BasisParam) -> BasisSet {
    family(
        BasisKind::Ghz4M,
        4,
        m,
        &[
            ("A+", "A-", 0b0000),
            ("B+", "B-", 0b1110),
            ("C+", "C-", 0b0010),
            ("D+", "D-", 0b1100),
            ("E+", "E-", 0b0100),
            ("F+", "F-", 0b1010),
            ("J+", "J-", 0b0110),
            ("K+", "K-", 0b1000),
        ],
    )
}

/// Computational basis on `k` qubits, labelled by bitstrings.
pub fn computational(k: usize) -> BasisSet {
    let elements = (0..1usize << k)
        .map(|i| BasisElement {
            label: Cow::Owned(format!("{i:0k$b}")),
            state: StateVector::basis_state(k, i).expect("index in range"),
        })
        .collect();
    BasisSet::new(BasisKind::Computational, None, elements).expect("computational basis")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{pauli_x, pauli_z};
    use crate::matrix::Matrix;

    fn amps(s: &StateVector) -> Vec<f64> {
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn bell_at_one_is_standard() {
        let b = bell_basis(1.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            b.labels().collect::<Vec<_>>(),
            ["Phi+", "Phi-", "Psi+", "Psi-"]
        );
        let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() < 1e-15);
        assert!(close(&amps(b.element("Phi+").unwrap()), &[h, 0.0, 0.0, h]));
        assert!(close(&amps(b.element("Phi-").unwrap()), &[h, 0.0, 0.0, -h]));
        assert!(close(&amps(b.element("Psi+").unwrap()), &[0.0, h, h, 0.0]));
        assert!(close(&amps(b.element("Psi-").unwrap()), &[0.0, h, -h, 0.0]));
    }

    #[test]
    fn bell_at_zero_keeps_signs() {
        let b = bell_basis(0.0).unwrap();
        assert_eq!(amps(b.element("Phi+").unwrap()), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(amps(b.element("Phi-").unwrap()), [0.0, 0.0, 0.0, -1.0]);
        assert_eq!(amps(b.element("Psi+").unwrap()), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(amps(b.element("Psi-").unwrap()), [0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn bell_half_plug_in() {
        let b = bell_basis(0.5).unwrap();
        let s = 1.25f64.sqrt();
        let phi_plus = amps(b.element("Phi+").unwrap());
        assert!((phi_plus[0] - 1.0 / s).abs() < 1e-15);
        assert!((phi_plus[3] - 0.5 / s).abs() < 1e-15);
        let psi_minus = amps(b.element("Psi-").unwrap());
        assert!((psi_minus[1] - 0.5 / s).abs() < 1e-15);
        assert!((psi_minus[2] + 1.0 / s).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_and_degenerate() {
        assert!(matches!(bell_basis(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(bell_basis(-0.1), Err(Error::OutOfRange { .. })));
        assert!(matches!(ghz3_basis(0.0), Err(Error::DegenerateBasis(_))));
        assert!(matches!(ghz4_basis(0.0), Err(Error::DegenerateBasis(_))));
        assert!(ghz3_basis(1.0).is_ok());
    }

    #[test]
    fn ghz_elements() {
        let g = ghz3_basis(0.7).unwrap();
        assert_eq!(g.len(), 8);
        let ip = g
            .element("GHZ+")
            .unwrap()
            .inner(g.element("GHZ-").unwrap())
            .unwrap();
        assert!(ip.norm() < 1e-15);
        assert!(g.gram_deviation() < 1e-12);

        let g4 = ghz4_basis(0.3).unwrap();
        assert_eq!(g4.len(), 16);
        assert!(g4.gram_deviation() < 1e-12);
        let f = amps(g4.element("F+").unwrap());
        let norm = 1.0 / 1.09f64.sqrt();
        assert!((f[0b1010] - norm).abs() < 1e-15);
        assert!((f[0b0101] - 0.3 * norm).abs() < 1e-15);

        let a = amps(ghz4_basis(1.0).unwrap().element("A+").unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0] - h).abs() < 1e-15 && (a[15] - h).abs() < 1e-15);
    }

    #[test]
    fn completeness_of_every_family() {
        for m in [0.05, 0.3, 0.5, 0.77, 1.0] {
            for b in [
                bell_basis(m).unwrap(),
                ghz3_basis(m).unwrap(),
                ghz4_basis(m).unwrap(),
            ] {
                assert!(b.completeness_deviation() < 1e-10, "{} m={m}", b.kind());
            }
        }
        assert!(computational(3).completeness_deviation() == 0.0);
    }

    /// Every four-qubit element is a Pauli string applied to `A+_m`, up to a
    /// global sign.
    #[test]
    fn ghz4_elements_are_pauli_images_of_a_plus() {
        let identity = Matrix::identity(2);
        let xz = pauli_x().mul(&pauli_z());
        let singles = [identity, pauli_x(), pauli_z(), xz];
        for m in [0.3, 0.8] {
            let basis = ghz4_basis(m).unwrap();
            let seed = basis.element("A+").unwrap().clone();
            for e in basis.elements() {
                let found = (0..256).any(|code: usize| {
                    let mut s = seed.clone();
                    for q in 0..4 {
                        let p = &singles[(code >> (2 * q)) & 3];
                        s = s.apply_unitary(p, &[q]).unwrap();
                    }
                    (s.fidelity(&e.state).unwrap() - 1.0).abs() < 1e-12
                });
                assert!(found, "no Pauli string reaches {} at m={m}", e.label);
            }
        }
    }
}
