//! Dense complex statevectors over small qubit registers.
//!
//! Qubit 0 is the most significant bit of the amplitude index. Every
//! operation is a pure function of its inputs; the low-level kernels at the
//! bottom of this module work on raw amplitude slices and are shared with the
//! branch engine, which evolves unnormalized amplitudes.

use std::fmt;

use num_complex::Complex64;

use crate::bases::{BasisSet, Label};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A single complex amplitude.
pub type Amplitude = Complex64;

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Equalities between computed quantities (norms, probabilities, fidelities).
    pub equality: f64,
    /// Structural checks: unitarity of matrices, orthonormality of bases.
    pub structure: f64,
    /// Conditional probabilities below this value produce a null post-state.
    pub null_probability: f64,
}

pub const TOL: Tolerances = Tolerances {
    equality: 1e-12,
    structure: 1e-10,
    null_probability: 1e-14,
};

/// Normalized pure state of `num_qubits` qubits.
///
/// A zero-qubit state (a single unit amplitude) is what remains after every
/// qubit of a register has been measured.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Builds a normalized state and rotates the first nonzero amplitude to be
    /// real and nonnegative.
    pub fn new(num_qubits: usize, amplitudes: Vec<Amplitude>) -> Result<Self> {
        Self::make(num_qubits, amplitudes).map(|(s, _)| s)
    }

    /// Like [`StateVector::new`], also returning the factor `1/‖v‖` that was
    /// applied.
    pub fn make(num_qubits: usize, amplitudes: Vec<Amplitude>) -> Result<(Self, f64)> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "a state needs at least one qubit".into(),
            ));
        }
        check_len(num_qubits, amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 {
            return Err(Error::NullState);
        }
        let factor = 1.0 / norm;
        let phase = amplitudes
            .iter()
            .find(|a| a.norm() > 0.0)
            .map(|a| a.conj() / a.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        let amps = amplitudes.into_iter().map(|a| a * factor * phase).collect();
        Ok((StateVector { num_qubits, amps }, factor))
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(num_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            num_qubits,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Normalizes without touching the global phase. Returns `None` for a
    /// (numerically) zero vector.
    pub(crate) fn normalized_raw(num_qubits: usize, mut amps: Vec<Amplitude>) -> Option<Self> {
        debug_assert_eq!(amps.len(), 1usize << num_qubits);
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        Some(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Kronecker product; `self`'s qubits come first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps: kron(&self.amps, &other.amps),
        }
    }

    /// Applies `u` to `targets` (first target is the most significant bit of
    /// `u`'s index), identity elsewhere.
    pub fn apply_unitary(&self, u: &Matrix, targets: &[usize]) -> Result<StateVector> {
        check_targets(self.num_qubits, targets)?;
        if u.dim() != 1usize << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << targets.len(),
                found: u.dim(),
            });
        }
        let dev = u.unitarity_deviation();
        if dev > TOL.structure {
            return Err(Error::NotUnitary(dev));
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps: apply_matrix(&self.amps, self.num_qubits, u, targets),
        })
    }

    /// Projective measurement of `targets` in `basis`.
    ///
    /// Returns one entry per basis element, in the basis order. The post-state
    /// lives on the unmeasured qubits (in their original order) and is `None`
    /// when the outcome probability is below [`Tolerances::null_probability`].
    pub fn project(&self, basis: &BasisSet, targets: &[usize]) -> Result<Vec<Projection>> {
        check_targets(self.num_qubits, targets)?;
        if basis.num_qubits() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << targets.len(),
                found: basis.dim(),
            });
        }
        let rest = self.num_qubits - targets.len();
        Ok(basis
            .elements()
            .iter()
            .map(|e| {
                let residual = contract(&self.amps, self.num_qubits, e.state.amplitudes(), targets);
                let probability = norm_sqr(&residual);
                let post_state = if probability < TOL.null_probability {
                    None
                } else {
                    StateVector::normalized_raw(rest, residual)
                };
                Projection {
                    label: e.label.clone(),
                    probability,
                    post_state,
                }
            })
            .collect())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{:0w$b}⟩",
                a.re,
                a.im,
                i,
                w = self.num_qubits
            )?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// One outcome of [`StateVector::project`].
#[derive(Clone, Debug)]
pub struct Projection {
    pub label: Label,
    pub probability: f64,
    pub post_state: Option<StateVector>,
}

/// Single qubit `α|0⟩ + β|1⟩` to be teleported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputQubit {
    alpha: Amplitude,
    beta: Amplitude,
}

impl InputQubit {
    /// Requires `|α|² + |β|² = 1` within the equality tolerance.
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > TOL.equality {
            return Err(Error::InvalidArgument(format!(
                "input qubit is not normalized: |α|²+|β|² = {norm}"
            )));
        }
        Ok(InputQubit { alpha, beta })
    }

    /// Scales `(α, β)` to unit norm.
    pub fn normalized(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NullState);
        }
        Ok(InputQubit {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    pub fn alpha(&self) -> Amplitude {
        self.alpha
    }

    pub fn beta(&self) -> Amplitude {
        self.beta
    }

    /// The qubit as a one-qubit state, amplitudes taken literally.
    pub fn to_state(&self) -> StateVector {
        StateVector {
            num_qubits: 1,
            amps: vec![self.alpha, self.beta],
        }
    }
}

impl Default for InputQubit {
    /// `0.6|0⟩ + 0.8|1⟩`: generic, real and asymmetric.
    fn default() -> Self {
        InputQubit {
            alpha: Complex64::new(0.6, 0.0),
            beta: Complex64::new(0.8, 0.0),
        }
    }
}

fn check_len(num_qubits: usize, len: usize) -> Result<()> {
    if num_qubits >= usize::BITS as usize || len != 1usize << num_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1usize.checked_shl(num_qubits as u32).unwrap_or(0),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("empty target list".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::InvalidArgument(format!(
                "target qubit {t} out of range for {num_qubits} qubits"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("target qubit {t} repeated")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Kernels on raw amplitude slices.

pub(crate) fn norm_sqr(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn inner(a: &[Amplitude], b: &[Amplitude]) -> Amplitude {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn kron(a: &[Amplitude], b: &[Amplitude]) -> Vec<Amplitude> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Bit mask of qubit `q` in an `n`-qubit index.
#[inline]
fn mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Offsets of the `2^k` sub-indices spanned by `targets`, in the order of the
/// sub-index (first target most significant).
fn offsets(n: usize, targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|s| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| s & (1 << (k - 1 - j)) != 0)
                .map(|(_, &t)| mask(n, t))
                .sum()
        })
        .collect()
}

/// Indices of the full register whose target bits are all zero, in ascending
/// order. Their order matches the residual register's index order.
fn bases_of_rest(n: usize, targets: &[usize]) -> impl Iterator<Item = usize> {
    let tmask: usize = targets.iter().map(|&t| mask(n, t)).sum();
    (0..1usize << n).filter(move |i| i & tmask == 0)
}

pub(crate) fn apply_matrix(
    amps: &[Amplitude],
    n: usize,
    u: &Matrix,
    targets: &[usize],
) -> Vec<Amplitude> {
    let offs = offsets(n, targets);
    let d = offs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut local = vec![Complex64::new(0.0, 0.0); d];
    for base in bases_of_rest(n, targets) {
        for (s, &o) in offs.iter().enumerate() {
            local[s] = amps[base + o];
        }
        for (r, &o) in offs.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, l) in local.iter().enumerate() {
                acc += u.get(r, c) * l;
            }
            out[base + o] = acc;
        }
    }
    out
}

/// `(⟨e|_targets ⊗ 1) |amps⟩`: the unnormalized residual on the remaining
/// qubits.
pub(crate) fn contract(
    amps: &[Amplitude],
    n: usize,
    element: &[Amplitude],
    targets: &[usize],
) -> Vec<Amplitude> {
    let offs = offsets(n, targets);
    bases_of_rest(n, targets)
        .map(|base| {
            offs.iter()
                .zip(element)
                .map(|(&o, e)| e.conj() * amps[base + o])
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases;
    use crate::gates;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn make_state_basis_and_bell() {
        let s = StateVector::from_real(1, &[1.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);

        let (bell, factor) = StateVector::make(2, vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((factor - h).abs() < 1e-15);
        assert!((bell.amplitude(0).re - h).abs() < 1e-15);
        assert!((bell.amplitude(3).re - h).abs() < 1e-15);
    }

    #[test]
    fn make_state_rejects_null_and_bad_length() {
        assert!(matches!(
            StateVector::from_real(1, &[0.0, 0.0]),
            Err(Error::NullState)
        ));
        assert!(matches!(
            StateVector::from_real(2, &[1.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn make_state_fixes_global_phase() {
        let s = StateVector::new(1, vec![Complex64::new(0.0, -1.0), c(1.0)]).unwrap();
        let a0 = s.amplitude(0);
        assert!(a0.im.abs() < 1e-15 && a0.re > 0.0);
        assert!((s.amplitude(1) - Complex64::new(0.0, 1.0) / 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn tensor_orders_left_qubits_first() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(zero.tensor(&one), StateVector::basis_state(2, 1).unwrap());
    }

    #[test]
    fn tensor_input_with_partial_channel_matches_expansion() {
        let (alpha, beta, n) = (0.6, 0.8, 0.5);
        let input = InputQubit::real(alpha, beta).unwrap().to_state();
        let chan = StateVector::from_real(2, &[1.0, 0.0, 0.0, n]).unwrap();
        let s = input.tensor(&chan);
        let norm = (1.0f64 + n * n).sqrt();
        // brute-force expansion of (α|0⟩+β|1⟩)(|00⟩+n|11⟩)/√(1+n²)
        let mut expected = [0.0; 8];
        for (i, x) in [alpha, beta].iter().enumerate() {
            for (j, y) in [1.0, 0.0, 0.0, n].iter().enumerate() {
                expected[i * 4 + j] = x * y / norm;
            }
        }
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn pauli_x_and_cnot() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let flipped = zero.apply_unitary(&gates::pauli_x(), &[0]).unwrap();
        assert_eq!(flipped, StateVector::basis_state(1, 1).unwrap());

        let (a, b) = (0.6, 0.8);
        let s = StateVector::from_real(2, &[a, 0.0, b, 0.0]).unwrap();
        let out = s.apply_unitary(&gates::cnot(), &[0, 1]).unwrap();
        let expected = StateVector::from_real(2, &[a, 0.0, 0.0, b]).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-15);

        // reversed target order makes qubit 1 the control
        let out = s.apply_unitary(&gates::cnot(), &[1, 0]).unwrap();
        assert!(out.max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn apply_unitary_rejects_bad_input() {
        let s = StateVector::basis_state(2, 0).unwrap();
        let bad = Matrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            s.apply_unitary(&bad, &[0]),
            Err(Error::NotUnitary(_))
        ));
        assert!(s.apply_unitary(&gates::pauli_x(), &[2]).is_err());
        assert!(s.apply_unitary(&gates::cnot(), &[1, 1]).is_err());
        assert!(s.apply_unitary(&gates::cnot(), &[0]).is_err());
    }

    #[test]
    fn computational_measurement_of_zero() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let out = zero.project(&bases::computational(1), &[0]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label, "0");
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(out[0].post_state.as_ref().unwrap().num_qubits(), 0);
        assert_eq!(out[1].probability, 0.0);
        assert!(out[1].post_state.is_none());
    }

    #[test]
    fn project_dimension_mismatch() {
        let s = StateVector::basis_state(3, 0).unwrap();
        let b = bases::bell_basis(1.0).unwrap();
        assert!(matches!(
            s.project(&b, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(zero.fidelity(&zero).unwrap(), 1.0);
        assert_eq!(zero.fidelity(&one).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(1, &[h, h]).unwrap();
        let minus = StateVector::from_real(1, &[h, -h]).unwrap();
        assert!(plus.fidelity(&minus).unwrap() < 1e-15);
        assert!(zero
            .fidelity(&StateVector::basis_state(2, 0).unwrap())
            .is_err());
    }

    #[test]
    fn input_qubit_normalization() {
        assert!(InputQubit::real(0.6, 0.8).is_ok());
        assert!(InputQubit::real(0.6, 0.7).is_err());
        let q = InputQubit::normalized(c(3.0), c(4.0)).unwrap();
        assert!((q.alpha().re - 0.6).abs() < 1e-15);
        assert!(InputQubit::normalized(c(0.0), c(0.0)).is_err());
    }
}
