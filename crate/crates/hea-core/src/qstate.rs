//! Dense statevector and density-matrix kernel: state preparation, gate
//! application, partial traces and expectation values.
//!
//! Qubit ordering is little-endian throughout: qubit 0 is the least
//! significant bit of the amplitude index, so for example the state |01>
//! (qubit 1 in 0, qubit 0 in 1) lives at amplitude index 1.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, C_ONE, C_ZERO};
use crate::pauli::{Observable, PauliString};
use crate::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Total-qubit ceiling for dense amplitude vectors.
pub const MAX_QUBITS: usize = 24;
/// Dense-matrix ceiling for reduced density matrices.
pub const MAX_REDUCED_QUBITS: usize = 12;

/// A strictly increasing, duplicate-free set of qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitSet {
    indices: Vec<usize>,
}

impl QubitSet {
    /// Sorts the input; duplicate indices are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate qubit index in set"));
        }
        Ok(QubitSet { indices })
    }

    pub fn single(q: usize) -> Self {
        QubitSet { indices: vec![q] }
    }

    /// The contiguous block {from, ..., to} (inclusive).
    pub fn contiguous(from: usize, to: usize) -> Self {
        QubitSet { indices: (from..=to).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    pub fn validate_for(&self, num_qubits: usize) -> Result<()> {
        match self.max() {
            Some(m) if m >= num_qubits => Err(Error::QubitOutOfRange { index: m, num_qubits }),
            _ => Ok(()),
        }
    }

    /// All qubits of an n-qubit register not in this set.
    pub fn complement(&self, num_qubits: usize) -> QubitSet {
        QubitSet { indices: (0..num_qubits).filter(|q| !self.contains(*q)).collect() }
    }

    pub fn union(&self, other: &QubitSet) -> QubitSet {
        let mut v = self.indices.clone();
        v.extend_from_slice(&other.indices);
        v.sort_unstable();
        v.dedup();
        QubitSet { indices: v }
    }

    pub fn intersects(&self, other: &QubitSet) -> bool {
        self.indices.iter().any(|q| other.contains(*q))
    }
}

/// Distribute the bits of `value` over the given bit positions
/// (bit j of `value` goes to global bit `positions[j]`).
#[inline]
pub(crate) fn scatter_bits(value: usize, positions: &[usize]) -> usize {
    let mut out = 0usize;
    for (j, &p) in positions.iter().enumerate() {
        out |= ((value >> j) & 1) << p;
    }
    out
}

/// An n-qubit pure state: 2^n unit-norm complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Input-state families shared by the preparation entry point and the
/// estimator/experiment configs.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StateKind {
    Zero,
    Basis(String),
    ProductRandom,
    Haar,
}

/// Deterministic state preparation: identical (kind, n, seed) triples yield
/// identical states.
pub fn prepare_state(kind: &StateKind, num_qubits: usize, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    prepare_state_with_rng(kind, num_qubits, &mut rng)
}

/// Preparation from a caller-owned stream (deterministic kinds leave the
/// stream untouched).
pub(crate) fn prepare_state_with_rng(
    kind: &StateKind,
    num_qubits: usize,
    rng: &mut ChaCha8Rng,
) -> Result<StateVector> {
    match kind {
        StateKind::Zero => StateVector::zero(num_qubits),
        StateKind::Basis(bits) => StateVector::basis(num_qubits, bits),
        StateKind::ProductRandom => {
            check_register(num_qubits)?;
            Ok(StateVector::random_product_with(num_qubits, rng))
        }
        StateKind::Haar => {
            check_register(num_qubits)?;
            Ok(StateVector::haar_with(num_qubits, rng))
        }
    }
}

impl StateVector {
    /// Wrap raw amplitudes, checking the length and unit norm.
    pub fn new(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_register(num_qubits)?;
        let dim = 1usize << num_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument("amplitudes are not unit norm"));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_register(num_qubits)?;
        let mut amps = vec![C_ZERO; 1 << num_qubits];
        amps[0] = C_ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Computational basis state from a bitstring; character i sets qubit i.
    pub fn basis(num_qubits: usize, bits: &str) -> Result<Self> {
        check_register(num_qubits)?;
        if bits.len() != num_qubits {
            return Err(Error::DimensionMismatch { expected: num_qubits, got: bits.len() });
        }
        let mut index = 0usize;
        for (q, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << q,
                _ => return Err(Error::InvalidArgument("bitstring must contain only 0 and 1")),
            }
        }
        let mut amps = vec![C_ZERO; 1 << num_qubits];
        amps[index] = C_ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Independent Haar-random single-qubit states on every qubit.
    pub fn random_product(num_qubits: usize, seed: u64) -> Result<Self> {
        check_register(num_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_product_with(num_qubits, &mut rng))
    }

    pub(crate) fn random_product_with(num_qubits: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut amps = vec![C_ONE];
        for _ in 0..num_qubits {
            let q = normalized_gaussian_vector(2, rng);
            let mut next = vec![C_ZERO; amps.len() * 2];
            for (hi, &qa) in q.iter().enumerate() {
                for (lo, &a) in amps.iter().enumerate() {
                    next[hi * amps.len() + lo] = qa * a;
                }
            }
            amps = next;
        }
        StateVector { num_qubits, amps }
    }

    /// Global Haar-random state: a normalized vector of iid standard complex
    /// Gaussians.
    pub fn haar(num_qubits: usize, seed: u64) -> Result<Self> {
        check_register(num_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::haar_with(num_qubits, &mut rng))
    }

    pub(crate) fn haar_with(num_qubits: usize, rng: &mut ChaCha8Rng) -> Self {
        let amps = normalized_gaussian_vector(1 << num_qubits, rng);
        StateVector { num_qubits, amps }
    }

    pub(crate) fn from_amps_unchecked(num_qubits: usize, amps: Vec<Complex64>) -> Self {
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::EmptyRegister);
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::BudgetExceeded("dense states limited to 24 qubits"));
    }
    Ok(())
}

pub(crate) fn normalized_gaussian_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

/// Apply a 2^k x 2^k unitary to the target qubits (target 0 is the least
/// significant bit of the gate's index space). Returns a new state.
pub fn apply_unitary(
    state: &StateVector,
    gate: &CMatrix,
    targets: &QubitSet,
) -> Result<StateVector> {
    targets.validate_for(state.num_qubits())?;
    if targets.is_empty() {
        return Err(Error::InvalidArgument("gate needs at least one target"));
    }
    let k = targets.len();
    let side = 1usize << k;
    if gate.rows() != side || gate.cols() != side {
        return Err(Error::DimensionMismatch { expected: side, got: gate.rows() });
    }
    let dev = gate.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let mut out = state.clone();
    apply_gate_in_place(out.amps_mut(), gate, targets.indices());
    Ok(out)
}

/// Shared gate kernel; `targets` must be sorted and in range, `gate` must be
/// 2^k-dimensional.
pub(crate) fn apply_gate_in_place(amps: &mut [Complex64], gate: &CMatrix, targets: &[usize]) {
    match targets {
        [t] => apply_1q(amps, gate, *t),
        [a, b] => apply_2q(amps, gate, *a, *b),
        _ => apply_kq(amps, gate, targets),
    }
}

fn apply_1q(amps: &mut [Complex64], gate: &CMatrix, target: usize) {
    let mask = 1usize << target;
    let (u00, u01) = (gate.at(0, 0), gate.at(0, 1));
    let (u10, u11) = (gate.at(1, 0), gate.at(1, 1));
    let mut base = 0usize;
    while base < amps.len() {
        for i in base..base + mask {
            let a0 = amps[i];
            let a1 = amps[i | mask];
            amps[i] = u00 * a0 + u01 * a1;
            amps[i | mask] = u10 * a0 + u11 * a1;
        }
        base += mask << 1;
    }
}

fn apply_2q(amps: &mut [Complex64], gate: &CMatrix, t0: usize, t1: usize) {
    debug_assert!(t0 < t1);
    let m0 = 1usize << t0;
    let m1 = 1usize << t1;
    let mut u = [[C_ZERO; 4]; 4];
    for (r, row) in u.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = gate.at(r, c);
        }
    }
    let dim = amps.len();
    let mut outer = 0usize;
    while outer < dim {
        let mut mid = outer;
        while mid < outer + m1 {
            for base in mid..mid + m0 {
                let idx = [base, base | m0, base | m1, base | m0 | m1];
                let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
                for (g, &i) in idx.iter().enumerate() {
                    amps[i] = u[g][0] * a[0] + u[g][1] * a[1] + u[g][2] * a[2] + u[g][3] * a[3];
                }
            }
            mid += m0 << 1;
        }
        outer += m1 << 1;
    }
}

fn apply_kq(amps: &mut [Complex64], gate: &CMatrix, targets: &[usize]) {
    let n_total = amps.len().trailing_zeros() as usize;
    let k = targets.len();
    let side = 1usize << k;
    let env_positions: Vec<usize> = (0..n_total).filter(|q| !targets.contains(q)).collect();
    let env_count = 1usize << env_positions.len();
    let local_offsets: Vec<usize> = (0..side).map(|l| scatter_bits(l, targets)).collect();
    let mut scratch_in = vec![C_ZERO; side];
    for env in 0..env_count {
        let base = scatter_bits(env, &env_positions);
        for (l, off) in local_offsets.iter().enumerate() {
            scratch_in[l] = amps[base | off];
        }
        for (r, off) in local_offsets.iter().enumerate() {
            let mut acc = C_ZERO;
            for (c, &inp) in scratch_in.iter().enumerate() {
                acc += gate.at(r, c) * inp;
            }
            amps[base | off] = acc;
        }
    }
}

/// Reduced density matrix of a pure state on some subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Wrap a matrix, checking shape, Hermiticity and unit trace.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || !mat.rows().is_power_of_two() {
            return Err(Error::InvalidArgument("density matrix side must be a power of two"));
        }
        let num_qubits = mat.rows().trailing_zeros() as usize;
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidArgument("density matrix trace must be 1"));
        }
        Ok(DensityMatrix { num_qubits, mat })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Tr[rho^2], computed entrywise.
    pub fn purity(&self) -> f64 {
        self.mat.frobenius_sq()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        crate::linalg::hermitian_eigenvalues(&self.mat)
    }
}

/// psi_Lambda = Tr_{complement}[|psi><psi|].
pub fn reduced_density(state: &StateVector, lambda: &QubitSet) -> Result<DensityMatrix> {
    lambda.validate_for(state.num_qubits())?;
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("subsystem must be non-empty"));
    }
    if lambda.len() > MAX_REDUCED_QUBITS {
        return Err(Error::BudgetExceeded("reduced density matrices limited to 12 qubits"));
    }
    let n = state.num_qubits();
    let k = lambda.len();
    let side = 1usize << k;
    let env_positions: Vec<usize> = lambda.complement(n).indices().to_vec();
    let env_count = 1usize << env_positions.len();
    let local_offsets: Vec<usize> = (0..side).map(|l| scatter_bits(l, lambda.indices())).collect();

    let mut mat = CMatrix::zeros(side, side);
    let amps = state.amps();
    for env in 0..env_count {
        let base = scatter_bits(env, &env_positions);
        for c in 0..side {
            let ac = amps[base | local_offsets[c]].conj();
            if ac == C_ZERO {
                continue;
            }
            for r in 0..side {
                *mat.at_mut(r, c) += amps[base | local_offsets[r]] * ac;
            }
        }
    }
    DensityMatrix::new(mat)
}

/// <psi| P |psi> for a single Pauli string (real up to rounding).
pub fn pauli_expectation(state: &StateVector, string: &PauliString) -> Result<f64> {
    if string.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            got: string.num_qubits(),
        });
    }
    if string.is_identity() {
        // exactly 1 for unit-norm states; the summed form would only add
        // rounding noise
        return Ok(1.0);
    }
    let action = string.action_masks();
    let amps = state.amps();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &a) in amps.iter().enumerate() {
        if a == C_ZERO {
            continue;
        }
        acc += amps[j ^ action.flip].conj() * action.phase(j) * a;
    }
    debug_assert!(acc.im.abs() < 1e-10, "imaginary residue {:e}", acc.im);
    Ok(acc.re)
}

/// Sum_i c_i <psi| P_i |psi>.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    if obs.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            got: obs.num_qubits(),
        });
    }
    let mut total = 0.0;
    for (c, s) in obs.terms() {
        total += c * pauli_expectation(state, s)?;
    }
    Ok(total)
}

/// P |psi> for a Pauli string (unitary, so the result stays normalized).
pub fn apply_pauli(state: &StateVector, string: &PauliString) -> Result<StateVector> {
    if string.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            got: string.num_qubits(),
        });
    }
    let action = string.action_masks();
    let amps = state.amps();
    let mut out = vec![C_ZERO; amps.len()];
    for (j, &a) in amps.iter().enumerate() {
        out[j ^ action.flip] = action.phase(j) * a;
    }
    Ok(StateVector::from_amps_unchecked(state.num_qubits(), out))
}

/// |psi>^(tensor k) on k*n qubits; copy c occupies qubits [c*n, (c+1)*n).
pub fn tensor_copies(state: &StateVector, copies: usize) -> Result<StateVector> {
    if copies == 0 {
        return Err(Error::InvalidArgument("need at least one copy"));
    }
    let n = state.num_qubits();
    let total = n.checked_mul(copies).ok_or(Error::BudgetExceeded("copy count overflow"))?;
    if total > MAX_QUBITS {
        return Err(Error::BudgetExceeded("dense states limited to 24 qubits"));
    }
    let mut amps = vec![C_ONE];
    for _ in 0..copies {
        let mut next = vec![C_ZERO; amps.len() * state.dim()];
        for (hi, &sa) in state.amps().iter().enumerate() {
            if sa == C_ZERO {
                continue;
            }
            for (lo, &a) in amps.iter().enumerate() {
                next[hi * amps.len() + lo] = sa * a;
            }
        }
        amps = next;
    }
    Ok(StateVector::from_amps_unchecked(total, amps))
}
