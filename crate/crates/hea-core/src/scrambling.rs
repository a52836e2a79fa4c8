//! Entanglement and information-scrambling measures on reduced states, the
//! light-cone concentration bound, and the area/volume-law probe.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hea::HeaCircuit;
use crate::pauli::Observable;
use crate::qstate::{reduced_density, QubitSet, StateVector};
use crate::randmat::Hamiltonian;
use crate::stats::{slope, RunningStats};
use crate::{Error, Result};

const EIGENVALUE_CLAMP_TOL: f64 = 1e-10;

/// All measures of one reduced state, computed from a single spectrum.
#[derive(Clone, Debug)]
pub struct ScramblingReport {
    pub lambda: QubitSet,
    /// von Neumann entropy in bits (base 2, so it compares to qubit counts).
    pub entropy_bits: f64,
    /// |Lambda| - S.
    pub entropy_deficit: f64,
    pub purity: f64,
    /// Trace distance to the maximally mixed state on Lambda.
    pub i_measure: f64,
}

fn clamped_spectrum(eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues
        .iter()
        .map(|&l| {
            debug_assert!(l >= -EIGENVALUE_CLAMP_TOL, "eigenvalue {l} below tolerance");
            l.clamp(0.0, 1.0)
        })
        .collect()
}

fn entropy_bits_of(spectrum: &[f64]) -> f64 {
    -spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

/// S(psi_Lambda) in bits.
pub fn entanglement_entropy(state: &StateVector, lambda: &QubitSet) -> Result<f64> {
    let rho = reduced_density(state, lambda)?;
    let spectrum = clamped_spectrum(&rho.eigenvalues()?);
    Ok(entropy_bits_of(&spectrum))
}

/// I_Lambda(psi) = || psi_Lambda - 1/2^|Lambda| ||_1 (sum of absolute
/// eigenvalues of the difference).
pub fn scrambling_measure(state: &StateVector, lambda: &QubitSet) -> Result<f64> {
    let rho = reduced_density(state, lambda)?;
    let d = rho.dim() as f64;
    Ok(rho.eigenvalues()?.iter().map(|&l| (l - 1.0 / d).abs()).sum())
}

/// Tr[psi_Lambda^2].
pub fn purity(state: &StateVector, lambda: &QubitSet) -> Result<f64> {
    Ok(reduced_density(state, lambda)?.purity())
}

/// One spectrum, every measure.
pub fn scrambling_report(state: &StateVector, lambda: &QubitSet) -> Result<ScramblingReport> {
    let rho = reduced_density(state, lambda)?;
    let eigenvalues = rho.eigenvalues()?;
    let spectrum = clamped_spectrum(&eigenvalues);
    let d = rho.dim() as f64;
    let entropy_bits = entropy_bits_of(&spectrum);
    let entropy_deficit = lambda.len() as f64 - entropy_bits;
    let i_measure: f64 = eigenvalues.iter().map(|&l| (l - 1.0 / d).abs()).sum();
    let purity: f64 = rho.purity();
    debug_assert!(
        i_measure <= (2.0 * core::f64::consts::LN_2 * entropy_deficit.max(0.0)).sqrt() + 1e-8,
        "trace distance exceeds the relative-entropy bound"
    );
    Ok(ScramblingReport { lambda: lambda.clone(), entropy_bits, entropy_deficit, purity, i_measure })
}

/// Concentration bound sum_i |c_i| I_{cone(P_i)}(psi), where the cone is the
/// geometric light-cone of each non-identity term. Valid for every theta
/// because the cone contains supp(U^dag P_i U).
pub fn concentration_bound(
    circuit: &HeaCircuit,
    state: &StateVector,
    obs: &Observable,
) -> Result<f64> {
    if obs.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            got: obs.num_qubits(),
        });
    }
    let mut bound = 0.0;
    for (c, s) in obs.terms() {
        if s.is_identity() {
            continue; // cancels against the trivial value
        }
        let cone = circuit.lightcone(s)?;
        bound += c.abs() * scrambling_measure(state, &cone)?;
    }
    Ok(bound)
}

/// State families whose scrambling behavior the probe compares.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "family"))]
pub enum StateFamily {
    Product,
    Haar,
    /// Random product state evolved for time t under a fresh ensemble draw.
    GdeEvolvedProduct { t: f64 },
}

impl StateFamily {
    pub fn time(&self) -> f64 {
        match self {
            StateFamily::GdeEvolvedProduct { t } => *t,
            _ => 0.0,
        }
    }

    /// Draw one state of the family (all randomness from `rng`).
    pub fn sample(&self, num_qubits: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
        match self {
            StateFamily::Product => Ok(StateVector::random_product_with(num_qubits, rng)),
            StateFamily::Haar => Ok(StateVector::haar_with(num_qubits, rng)),
            StateFamily::GdeEvolvedProduct { t } => {
                let h = Hamiltonian::sample_gde_with(num_qubits, rng)?;
                let psi = StateVector::random_product_with(num_qubits, rng);
                h.evolve(&psi, *t)
            }
        }
    }
}

/// One (n, |Lambda|) cell of the probe table.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LawProbeRow {
    pub n: usize,
    pub lambda_size: usize,
    pub t: f64,
    pub mean_entropy: f64,
    pub mean_i: f64,
    /// Standard error of the I_Lambda mean.
    pub std_error: f64,
}

impl LawProbeRow {
    pub fn mean_deficit(&self) -> f64 {
        self.lambda_size as f64 - self.mean_entropy
    }
}

/// Decay diagnostics: mean deficit and mean I_Lambda per (n, |Lambda|), plus
/// the fitted slope of log2(mean I) against n per subsystem size. The slope
/// supports area/volume-law classification but is reported, not judged.
#[derive(Clone, Debug)]
pub struct LawProbeReport {
    pub family: StateFamily,
    pub rows: Vec<LawProbeRow>,
    /// (lambda_size, slope of log2(mean I) vs n); present when the n grid
    /// has at least two points.
    pub slopes: Vec<(usize, f64)>,
}

/// Sample the family on every n of the grid and measure contiguous blocks
/// {0..size-1}. Per-sample randomness comes from dedicated streams of the
/// master seed, so results are independent of evaluation order.
pub fn law_probe(
    family: &StateFamily,
    n_list: &[usize],
    lambda_sizes: &[usize],
    samples: u64,
    seed: u64,
) -> Result<LawProbeReport> {
    if n_list.is_empty() || lambda_sizes.is_empty() {
        return Err(Error::InvalidArgument("probe needs at least one n and one subsystem size"));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("probe needs at least one sample"));
    }
    let mut rows = Vec::new();
    for (n_idx, &n) in n_list.iter().enumerate() {
        for &size in lambda_sizes {
            if size == 0 || size > n {
                return Err(Error::InvalidArgument("subsystem size must be in [1, n]"));
            }
        }
        let mut acc: Vec<(RunningStats, RunningStats)> =
            lambda_sizes.iter().map(|_| Default::default()).collect();
        for s in 0..samples {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((n_idx as u64) << 40) | s);
            let state = family.sample(n, &mut rng)?;
            for (cell, &size) in acc.iter_mut().zip(lambda_sizes) {
                let report = scrambling_report(&state, &QubitSet::contiguous(0, size - 1))?;
                cell.0.push(report.entropy_bits);
                cell.1.push(report.i_measure);
            }
        }
        for ((entropy, i_acc), &size) in acc.iter().zip(lambda_sizes) {
            rows.push(LawProbeRow {
                n,
                lambda_size: size,
                t: family.time(),
                mean_entropy: entropy.mean(),
                mean_i: i_acc.mean(),
                std_error: i_acc.std_error(),
            });
        }
    }
    let slopes = if n_list.len() >= 2 {
        lambda_sizes
            .iter()
            .map(|&size| {
                let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
                let ys: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.lambda_size == size)
                    .map(|r| r.mean_i.log2())
                    .collect();
                (size, slope(&xs, &ys))
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(LawProbeReport { family: *family, rows, slopes })
}
