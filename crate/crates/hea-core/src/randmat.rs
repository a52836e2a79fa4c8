//! Haar-random unitaries, Gaussian-diagonal-ensemble Hamiltonians, spectral
//! form factors, time evolution through a cached eigenbasis, and the
//! closed-form ensemble averages they are checked against.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitian_eigen, qr_unitary_phase_fixed, CMatrix};
use crate::qstate::StateVector;
use crate::{Error, Result};

/// Dense-unitary budget: 4096^2 complex doubles is ~256 MB.
pub const MAX_HAAR_DIM: usize = 4096;
pub const MAX_DENSE_QUBITS: usize = 12;

/// Standard deviation of the ensemble's eigenvalue distribution.
pub const GDE_EIGENVALUE_STD: f64 = 0.5;

/// Exactly Haar-distributed unitary: QR decomposition of an iid complex
/// Gaussian (Ginibre) matrix with the R-diagonal phases normalized away.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(dim, &mut rng)
}

pub(crate) fn haar_unitary_with(dim: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("unitary dimension must be positive"));
    }
    if dim > MAX_HAAR_DIM {
        return Err(Error::BudgetExceeded("dense unitaries limited to dimension 4096"));
    }
    let ginibre = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Ok(qr_unitary_phase_fixed(ginibre))
}

/// A Hamiltonian held in spectral form: H = sum_k E_k |v_k><v_k| with the
/// eigenvector matrix kept dense. Time evolution and form factors read the
/// decomposition directly, so dense inputs are diagonalized exactly once.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    num_qubits: usize,
    eigenvalues: Vec<f64>,
    basis: CMatrix,
}

impl Hamiltonian {
    /// Draw from the Gaussian diagonal ensemble: 2^n iid Normal(0, 1/2)
    /// eigenvalues and a Haar-random eigenvector unitary.
    pub fn sample_gde(num_qubits: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample_gde_with(num_qubits, &mut rng)
    }

    /// Same draw from a caller-owned stream. Eigenvalues are consumed from
    /// the stream before the eigenvector matrix.
    pub fn sample_gde_with(num_qubits: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::BudgetExceeded("dense Hamiltonians limited to 12 qubits"));
        }
        let dim = 1usize << num_qubits;
        let eigenvalues: Vec<f64> = (0..dim)
            .map(|_| GDE_EIGENVALUE_STD * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let basis = haar_unitary_with(dim, rng)?;
        Ok(Hamiltonian { num_qubits, eigenvalues, basis })
    }

    /// Eigendecompose a dense Hermitian matrix once; evolution reuses it.
    pub fn from_dense(matrix: &CMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_power_of_two() {
            return Err(Error::InvalidArgument("Hamiltonian side must be a power of two"));
        }
        let num_qubits = matrix.rows().trailing_zeros() as usize;
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::BudgetExceeded("dense Hamiltonians limited to 12 qubits"));
        }
        let eig = hermitian_eigen(matrix)?;
        Ok(Hamiltonian { num_qubits, eigenvalues: eig.values, basis: eig.vectors })
    }

    /// Assemble from an explicit spectral decomposition.
    pub fn from_parts(num_qubits: usize, eigenvalues: Vec<f64>, basis: CMatrix) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if eigenvalues.len() != dim || basis.rows() != dim || basis.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: eigenvalues.len() });
        }
        let dev = basis.unitary_deviation();
        if dev > 1e-8 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Hamiltonian { num_qubits, eigenvalues, basis })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix (column k matches eigenvalue k).
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// exp(-iHt)|psi> through the eigenbasis.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: state.num_qubits(),
            });
        }
        Ok(self.evolve_in_eigenbasis(&self.to_eigenbasis(state), t))
    }

    /// Eigenbasis coefficients of a state; evolving the same state at many
    /// times can reuse them.
    pub fn to_eigenbasis(&self, state: &StateVector) -> Vec<Complex64> {
        self.basis.adjoint_matvec(state.amps())
    }

    /// exp(-iHt) applied to precomputed eigenbasis coefficients.
    pub fn evolve_in_eigenbasis(&self, coefficients: &[Complex64], t: f64) -> StateVector {
        let mut w = coefficients.to_vec();
        for (wk, &e) in w.iter_mut().zip(&self.eigenvalues) {
            let phi = -e * t;
            *wk *= Complex64::new(phi.cos(), phi.sin());
        }
        let amps = self.basis.matvec(&w);
        StateVector::from_amps_unchecked(self.num_qubits, amps)
    }

    /// Normalized 2k-point spectral form factor
    /// |Tr exp(-iHt)|^(2k) / 2^(2kn), for k in {1, 2}.
    pub fn spectral_form_factor(&self, t: f64, k: u32) -> Result<f64> {
        if !(k == 1 || k == 2) {
            return Err(Error::InvalidArgument("form factor supports k in {1, 2}"));
        }
        let z: Complex64 = self
            .eigenvalues
            .iter()
            .map(|&e| {
                let phi = -e * t;
                Complex64::new(phi.cos(), phi.sin())
            })
            .sum();
        let d = self.dim() as f64;
        let normalized = z.norm_sqr() / (d * d);
        Ok(match k {
            1 => normalized,
            _ => normalized * normalized,
        })
    }
}

/// Closed-form ensemble averages and thresholds (leading order; O(2^-n)
/// corrections are dropped and absorbed by the tolerances of the checks
/// that consume these values).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum Prediction {
    /// Mean normalized 2k-point form factor over the ensemble: e^(-k t^2 / 4).
    GdeSff { k: u32, t: f64 },
    /// Mean symmetry-aligned loss on the generic class: e^(-t^2 / 4).
    GdeLoss { t: f64 },
    /// Mean subsystem purity after evolving a factorized state:
    /// 1/d + e^(-t^2/2) (1 - 1/d).
    GdePurityMean { lambda_dim: usize, t: f64 },
    /// Second moment of that purity:
    /// (1 + 2 e^(-t^2/2) (d-1) + e^(-t^2) (d-1)^2) / d^2.
    GdePuritySecond { lambda_dim: usize, t: f64 },
    /// Markov bound on P(|loss| <= eps): max(0, 1 - e^(-t^2/4) / eps).
    GdeConcentrationProb { t: f64, epsilon: f64 },
    /// Trace-distance floor for short-time evolved factorized states:
    /// (e^(-t^2/8) / 2) * sqrt(1 - 2^-lambda).
    GdeTraceDistanceFloor { lambda_size: usize, t: f64 },
    /// Variant with the quartic root instead of the square root.
    GdeTraceDistanceFloorQuartic { lambda_size: usize, t: f64 },
}

pub fn analytic_prediction(p: Prediction) -> Result<f64> {
    let check_t = |t: f64| {
        if t < 0.0 {
            Err(Error::InvalidArgument("time must be non-negative"))
        } else {
            Ok(())
        }
    };
    match p {
        Prediction::GdeSff { k, t } => {
            check_t(t)?;
            if !(k == 1 || k == 2) {
                return Err(Error::InvalidArgument("form factor supports k in {1, 2}"));
            }
            Ok((-(k as f64) * t * t / 4.0).exp())
        }
        Prediction::GdeLoss { t } => {
            check_t(t)?;
            Ok((-t * t / 4.0).exp())
        }
        Prediction::GdePurityMean { lambda_dim, t } => {
            check_t(t)?;
            if lambda_dim < 2 {
                return Err(Error::InvalidArgument("subsystem dimension must be at least 2"));
            }
            let d = lambda_dim as f64;
            Ok(1.0 / d + (-t * t / 2.0).exp() * (1.0 - 1.0 / d))
        }
        Prediction::GdePuritySecond { lambda_dim, t } => {
            check_t(t)?;
            if lambda_dim < 2 {
                return Err(Error::InvalidArgument("subsystem dimension must be at least 2"));
            }
            let d = lambda_dim as f64;
            let c4 = (-t * t / 2.0).exp();
            let c8 = (-t * t).exp();
            Ok((1.0 + 2.0 * c4 * (d - 1.0) + c8 * (d - 1.0) * (d - 1.0)) / (d * d))
        }
        Prediction::GdeConcentrationProb { t, epsilon } => {
            check_t(t)?;
            if epsilon <= 0.0 {
                return Err(Error::InvalidArgument("epsilon must be positive"));
            }
            Ok((1.0 - (-t * t / 4.0).exp() / epsilon).max(0.0))
        }
        Prediction::GdeTraceDistanceFloor { lambda_size, t } => {
            check_t(t)?;
            if lambda_size == 0 {
                return Err(Error::InvalidArgument("subsystem must be non-empty"));
            }
            let frac = 1.0 - 0.5f64.powi(lambda_size as i32);
            Ok(0.5 * (-t * t / 8.0).exp() * frac.sqrt())
        }
        Prediction::GdeTraceDistanceFloorQuartic { lambda_size, t } => {
            check_t(t)?;
            if lambda_size == 0 {
                return Err(Error::InvalidArgument("subsystem must be non-empty"));
            }
            let frac = 1.0 - 0.5f64.powi(lambda_size as i32);
            Ok(0.5 * (-t * t / 8.0).exp() * frac.powf(0.25))
        }
    }
}
