//! Statevector kernels for studying the trainability of the shallow
//! one-dimensional hardware-efficient ansatz (HEA).
//!
//! The crate provides the pure, allocation-only computational layer:
//! dense statevectors and reduced density matrices ([`qstate`]), Pauli-string
//! observables and their cluster decomposition ([`pauli`]), the brick-layered
//! ansatz itself ([`hea`]), parameter-shift gradients and landscape-variance
//! estimators ([`gradients`]), entanglement/scrambling measures and the
//! concentration bound ([`scrambling`]), Haar sampling and Gaussian-diagonal
//! random Hamiltonians ([`randmat`]), and the two end-to-end experiments
//! ([`tasks`]).
//!
//! Everything is a pure function of its inputs and an explicit seed, so values
//! can be shared read-only across worker threads. IO, parallel drivers and the
//! CLI live in the companion `hea-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

use alloc::string::String;

pub mod gradients;
pub mod hea;
pub mod linalg;
pub mod pauli;
pub mod qstate;
pub mod randmat;
pub mod scrambling;
pub mod stats;
pub mod tasks;

pub use num_complex::Complex64;

/// Errors surfaced by the computational kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    EmptyRegister,
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operand is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("operand is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(&'static str),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;
