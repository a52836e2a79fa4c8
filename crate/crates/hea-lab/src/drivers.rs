//! Parallel experiment drivers over the core kernels. Every driver maps a
//! per-sample function (randomness keyed by sample index) over the worker
//! pool and reduces in index order, so outputs are independent of the thread
//! count; the small ones exist mainly to give each CLI subcommand and
//! acceptance check a single entry point.

use hea_core::gradients::CircuitSpec;
use hea_core::pauli::{trivial_value, PauliLetter, PauliString};
use hea_core::qstate::QubitSet;
use hea_core::randmat::{analytic_prediction, haar_unitary, Hamiltonian, Prediction};
use hea_core::scrambling::{concentration_bound, scrambling_measure, StateFamily};
use hea_core::stats::RunningStats;
use hea_core::tasks::{
    build_dataset, build_setup, loss_s, numerics_hamiltonian, numerics_item, numerics_reduce,
    numerics_summary, train, NumericsConfig, NumericsOutput, ThetaInit, TrainConfig, TrainResult,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::parallel::{derive_seed, par_map_ordered};
use crate::LabError;


type Result<T> = std::result::Result<T, LabError>;

fn core_err(e: hea_core::Error) -> LabError {
    LabError::Runtime(e.to_string())
}

/// Empirical Haar matrix-element moments against the exact values
/// 1/d and 2/(d(d+1)).
#[derive(Clone, Debug, Serialize)]
pub struct HaarMomentResult {
    pub dim: usize,
    pub samples: u64,
    pub mean_abs_sq: f64,
    pub se_abs_sq: f64,
    pub expected_abs_sq: f64,
    pub mean_abs_fourth: f64,
    pub se_abs_fourth: f64,
    pub expected_abs_fourth: f64,
}

pub fn haar_moment_experiment(dim: usize, samples: u64, seed: u64) -> Result<HaarMomentResult> {
    let values = par_map_ordered(samples as usize, |i| {
        let u = haar_unitary(dim, derive_seed(seed, i as u64)).map_err(core_err)?;
        let p = u.at(0, 0).norm_sqr();
        Ok::<_, LabError>((p, p * p))
    })?;
    let mut sq = RunningStats::new();
    let mut fourth = RunningStats::new();
    for (p, p2) in values {
        sq.push(p);
        fourth.push(p2);
    }
    let d = dim as f64;
    Ok(HaarMomentResult {
        dim,
        samples: sq.count(),
        mean_abs_sq: sq.mean(),
        se_abs_sq: sq.std_error(),
        expected_abs_sq: 1.0 / d,
        mean_abs_fourth: fourth.mean(),
        se_abs_fourth: fourth.std_error(),
        expected_abs_fourth: 2.0 / (d * (d + 1.0)),
    })
}

/// Mean normalized spectral form factor per (k, t) with its ensemble
/// prediction.
#[derive(Clone, Debug, Serialize)]
pub struct SffRow {
    pub n: usize,
    pub k: u32,
    pub t: f64,
    pub mean_sff: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub samples: u64,
}

pub fn gde_sff_experiment(
    n: usize,
    ks: &[u32],
    ts: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<SffRow>> {
    if ks.is_empty() || ts.is_empty() {
        return Err(LabError::Config("need at least one k and one t".into()));
    }
    let per_draw = par_map_ordered(samples as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let h = Hamiltonian::sample_gde_with(n, &mut rng).map_err(core_err)?;
        let mut values = Vec::with_capacity(ks.len() * ts.len());
        for &k in ks {
            for &t in ts {
                values.push(h.spectral_form_factor(t, k).map_err(core_err)?);
            }
        }
        Ok::<_, LabError>(values)
    })?;
    let mut rows = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (ti, &t) in ts.iter().enumerate() {
            let mut acc = RunningStats::new();
            for draw in &per_draw {
                acc.push(draw[ki * ts.len() + ti]);
            }
            rows.push(SffRow {
                n,
                k,
                t,
                mean_sff: acc.mean(),
                std_error: acc.std_error(),
                analytic: analytic_prediction(Prediction::GdeSff { k, t }).map_err(core_err)?,
                samples: acc.count(),
            });
        }
    }
    Ok(rows)
}

/// Subsystem purity of evolved product states: first and second sample
/// moments against the ensemble formulas.
#[derive(Clone, Debug, Serialize)]
pub struct PurityRow {
    pub n: usize,
    pub lambda_size: usize,
    pub t: f64,
    pub mean_purity: f64,
    pub se_purity: f64,
    pub analytic_mean: f64,
    pub mean_purity_sq: f64,
    pub se_purity_sq: f64,
    pub analytic_second: f64,
    pub samples: u64,
}

pub fn gde_purity_experiment(
    n: usize,
    lambda_size: usize,
    ts: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<PurityRow>> {
    if ts.is_empty() {
        return Err(LabError::Config("need at least one t".into()));
    }
    if lambda_size == 0 || lambda_size >= n {
        return Err(LabError::Config("subsystem must be non-empty and proper".into()));
    }
    let lambda = QubitSet::contiguous(0, lambda_size - 1);
    let per_draw = par_map_ordered(samples as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let h = Hamiltonian::sample_gde_with(n, &mut rng).map_err(core_err)?;
        let psi0 = hea_core::qstate::prepare_state(
            &hea_core::qstate::StateKind::ProductRandom,
            n,
            derive_seed(seed, i as u64),
        )
        .map_err(core_err)?;
        let coeffs = h.to_eigenbasis(&psi0);
        ts.iter()
            .map(|&t| {
                let psi_t = h.evolve_in_eigenbasis(&coeffs, t);
                hea_core::scrambling::purity(&psi_t, &lambda).map_err(core_err)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let d_lambda = 1usize << lambda_size;
    let mut rows = Vec::new();
    for (ti, &t) in ts.iter().enumerate() {
        let mut first = RunningStats::new();
        let mut second = RunningStats::new();
        for draw in &per_draw {
            first.push(draw[ti]);
            second.push(draw[ti] * draw[ti]);
        }
        rows.push(PurityRow {
            n,
            lambda_size,
            t,
            mean_purity: first.mean(),
            se_purity: first.std_error(),
            analytic_mean: analytic_prediction(Prediction::GdePurityMean {
                lambda_dim: d_lambda,
                t,
            })
            .map_err(core_err)?,
            mean_purity_sq: second.mean(),
            se_purity_sq: second.std_error(),
            analytic_second: analytic_prediction(Prediction::GdePuritySecond {
                lambda_dim: d_lambda,
                t,
            })
            .map_err(core_err)?,
            samples: first.count(),
        });
    }
    Ok(rows)
}

/// Symmetry-aligned loss of the two classes across fresh ensemble draws.
#[derive(Clone, Debug, Serialize)]
pub struct GdeLossRow {
    pub t: f64,
    pub mean_generic: f64,
    pub std_error: f64,
    pub analytic: f64,
    /// Largest |L_s(H_S) - 1| seen across draws at this t.
    pub max_symmetric_deviation: f64,
    pub samples: u64,
}

pub fn gde_loss_experiment(
    n: usize,
    a_size: usize,
    ts: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<GdeLossRow>> {
    if a_size < 2 || a_size >= n {
        return Err(LabError::Config("symmetry block must satisfy 2 <= |A| < n".into()));
    }
    let circuit = CircuitSpec::open_half(n, 0).build().map_err(core_err)?;
    let theta = vec![0.0; circuit.num_params()];
    let per_draw = par_map_ordered(samples as usize, |i| {
        let a = QubitSet::contiguous(0, a_size - 1);
        let setup = build_setup(n, a, derive_seed(seed, i as u64)).map_err(core_err)?;
        let obs = setup.symmetry_observable();
        ts.iter()
            .enumerate()
            .map(|(ti, &t)| {
                let ds = build_dataset(&setup, t, 2, derive_seed(seed, (i as u64) << 8 | ti as u64))
                    .map_err(core_err)?;
                let symmetric = loss_s(&circuit, &theta, &ds.entries[0], &obs).map_err(core_err)?;
                let generic = loss_s(&circuit, &theta, &ds.entries[1], &obs).map_err(core_err)?;
                Ok::<_, LabError>((symmetric, generic))
            })
            .collect::<Result<Vec<(f64, f64)>>>()
    })?;
    let mut rows = Vec::new();
    for (ti, &t) in ts.iter().enumerate() {
        let mut acc = RunningStats::new();
        let mut max_dev = 0.0_f64;
        for draw in &per_draw {
            let (symmetric, generic) = draw[ti];
            acc.push(generic);
            max_dev = max_dev.max((symmetric - 1.0).abs());
        }
        rows.push(GdeLossRow {
            t,
            mean_generic: acc.mean(),
            std_error: acc.std_error(),
            analytic: analytic_prediction(Prediction::GdeLoss { t }).map_err(core_err)?,
            max_symmetric_deviation: max_dev,
            samples: acc.count(),
        });
    }
    Ok(rows)
}

/// Configuration of the light-cone concentration-bound sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationConfig {
    pub n_choices: Vec<usize>,
    pub depth_choices: Vec<usize>,
    pub instances: usize,
    pub evolve_t: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationInstance {
    pub index: usize,
    pub n: usize,
    pub depth: usize,
    pub family: &'static str,
    pub observable: String,
    pub f_value: f64,
    pub f_trv: f64,
    pub bound: f64,
    /// bound + slack - |f - f_trv|; negative would be a violation.
    pub margin: f64,
}

pub const CONCENTRATION_SLACK: f64 = 1e-9;

/// Random (input family, circuit, observable, angles) instances; each checks
/// |f - f_trv| against the light-cone bound.
pub fn concentration_sweep(config: &ConcentrationConfig) -> Result<Vec<ConcentrationInstance>> {
    if config.n_choices.is_empty() || config.depth_choices.is_empty() || config.instances == 0 {
        return Err(LabError::Config("concentration sweep needs sizes, depths, samples".into()));
    }
    par_map_ordered(config.instances, |index| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64);
        let n = config.n_choices[rng.random_range(0..config.n_choices.len())];
        let depth = config.depth_choices[rng.random_range(0..config.depth_choices.len())];
        let family = match rng.random_range(0..3u8) {
            0 => StateFamily::Product,
            1 => StateFamily::Haar,
            _ => StateFamily::GdeEvolvedProduct { t: config.evolve_t },
        };
        let family_name = match family {
            StateFamily::Product => "product",
            StateFamily::Haar => "haar",
            StateFamily::GdeEvolvedProduct { .. } => "gde_evolved",
        };
        let state = family.sample(n, &mut rng).map_err(core_err)?;
        // a random 1-local or (possibly gapped) 2-local Pauli term
        let letters = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        let mut word = vec![PauliLetter::I; n];
        if rng.random::<bool>() {
            word[rng.random_range(0..n)] = letters[rng.random_range(0..3)];
        } else {
            let gap = 1 + rng.random_range(0..3usize);
            let start = rng.random_range(0..n - gap);
            word[start] = letters[rng.random_range(0..3)];
            word[start + gap] = letters[rng.random_range(0..3)];
        }
        let obs = hea_core::pauli::Observable::single(1.0, PauliString::new(word));
        let circuit = CircuitSpec::open_half(n, depth).build().map_err(core_err)?;
        let theta: Vec<f64> = (0..circuit.num_params())
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        let f = hea_core::gradients::loss_value(&circuit, &theta, &state, &obs).map_err(core_err)?;
        let f_trv = trivial_value(&obs);
        let bound = concentration_bound(&circuit, &state, &obs).map_err(core_err)?;
        Ok(ConcentrationInstance {
            index,
            n,
            depth,
            family: family_name,
            observable: obs.to_string(),
            f_value: f,
            f_trv,
            bound,
            margin: bound + CONCENTRATION_SLACK - (f - f_trv).abs(),
        })
    })
}

/// Fraction of evolved product states whose trace distance to the maximally
/// mixed state clears the closed-form floor.
#[derive(Clone, Debug, Serialize)]
pub struct FloorCheckResult {
    pub n: usize,
    pub lambda_size: usize,
    pub t: f64,
    pub threshold: f64,
    pub fraction_above: f64,
    pub mean_i: f64,
    pub samples: u64,
}

pub fn trace_distance_floor_experiment(
    n: usize,
    lambda_size: usize,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<FloorCheckResult> {
    let threshold =
        analytic_prediction(Prediction::GdeTraceDistanceFloor { lambda_size, t }).map_err(core_err)?;
    let lambda = QubitSet::contiguous(0, lambda_size - 1);
    let family = StateFamily::GdeEvolvedProduct { t };
    let values = par_map_ordered(samples as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let state = family.sample(n, &mut rng).map_err(core_err)?;
        scrambling_measure(&state, &lambda).map_err(core_err)
    })?;
    let mut acc = RunningStats::new();
    let mut above = 0u64;
    for v in values {
        acc.push(v);
        if v >= threshold {
            above += 1;
        }
    }
    Ok(FloorCheckResult {
        n,
        lambda_size,
        t,
        threshold,
        fraction_above: above as f64 / acc.count() as f64,
        mean_i: acc.mean(),
        samples: acc.count(),
    })
}

/// Per-sample trace distances for a state family (used by the volume-law
/// desk checks, which need the raw draws rather than the probe means).
pub fn scrambling_samples(
    family: &StateFamily,
    n: usize,
    lambda_size: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let lambda = QubitSet::contiguous(0, lambda_size - 1);
    par_map_ordered(samples as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let state = family.sample(n, &mut rng).map_err(core_err)?;
        scrambling_measure(&state, &lambda).map_err(core_err)
    })
}

/// Parallel twin of the sequential core driver: identical records, work
/// split per (n, initial state).
pub fn numerics_experiment(config: &NumericsConfig) -> Result<NumericsOutput> {
    config.validate().map_err(core_err)?;
    let mut records = Vec::new();
    for (n_index, &n) in config.n_list.iter().enumerate() {
        let hamiltonian = numerics_hamiltonian(n).map_err(core_err)?;
        let circuit = hea_core::hea::build_hea(n, config.depth, config.boundary, config.convention)
            .map_err(core_err)?;
        let items = par_map_ordered(config.num_states, |s| {
            numerics_item(config, &hamiltonian, &circuit, n_index, s).map_err(core_err)
        })?;
        records.extend(numerics_reduce(config, n, &items));
    }
    let summary = numerics_summary(config, &records);
    Ok(NumericsOutput { records, summary })
}

/// Everything the discrimination subcommand reports.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminateResult {
    pub n: usize,
    pub a_size: usize,
    pub t: f64,
    pub dataset_size: usize,
    pub depth: usize,
    pub iterations: usize,
    pub step_size: f64,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub train_accuracy: f64,
    #[serde(skip)]
    pub training: TrainResult,
}

#[allow(clippy::too_many_arguments)]
pub fn discriminate_experiment(
    n: usize,
    a_size: usize,
    t: f64,
    dataset_size: usize,
    depth: usize,
    iterations: usize,
    step_size: f64,
    seed: u64,
) -> Result<DiscriminateResult> {
    if a_size < 2 || a_size >= n {
        return Err(LabError::Config("symmetry block must satisfy 2 <= |A| < n".into()));
    }
    let a = QubitSet::contiguous(0, a_size - 1);
    let setup = build_setup(n, a, derive_seed(seed, 1)).map_err(core_err)?;
    let dataset = build_dataset(&setup, t, dataset_size, derive_seed(seed, 2)).map_err(core_err)?;
    let circuit = CircuitSpec::open_half(n, depth).build().map_err(core_err)?;
    let obs = setup.symmetry_observable();
    let training = train(
        &circuit,
        &dataset,
        &obs,
        &TrainConfig {
            step_size,
            iterations,
            seed: derive_seed(seed, 3),
            init: ThetaInit::UniformRandom,
        },
    )
    .map_err(core_err)?;
    Ok(DiscriminateResult {
        n,
        a_size,
        t,
        dataset_size,
        depth,
        iterations,
        step_size,
        initial_loss: training.loss_trajectory[0],
        final_loss: *training.loss_trajectory.last().expect("non-empty trajectory"),
        train_accuracy: training.train_accuracy,
        training,
    })
}

/// Moving average used by the training-trajectory smoothness check.
pub fn smoothed(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1 && window <= values.len());
    values
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect()
}

/// Haar states at n = 12 keep I below 2^(|Lambda| - n/3); the slope of
/// log2(mean I) against n identifies the 2^(-n/2) decay.
pub fn haar_scrambling_probe(
    n_list: &[usize],
    lambda_sizes: &[usize],
    samples: u64,
    seed: u64,
) -> Result<hea_core::scrambling::LawProbeReport> {
    hea_core::scrambling::law_probe(&StateFamily::Haar, n_list, lambda_sizes, samples, seed)
        .map_err(core_err)
}

/// JSON dump of a circuit's flattened gate list (kinds, targets, parameter
/// indices), used as a test fixture of the layout.
pub fn circuit_layout_json(circuit: &hea_core::hea::HeaCircuit) -> Result<String> {
    serde_json::to_string_pretty(circuit.gates())
        .map_err(|e| LabError::Runtime(format!("layout serialization: {e}")))
}

/// Probe-report rows in their CSV shape.
pub const LAW_PROBE_COLUMNS: [&str; 6] =
    ["n", "lambda_size", "t", "mean_entropy", "mean_I", "std_error"];

pub fn law_probe_csv_rows(report: &hea_core::scrambling::LawProbeReport) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.lambda_size.to_string(),
                format!("{}", r.t),
                format!("{}", r.mean_entropy),
                format!("{}", r.mean_i),
                format!("{}", r.std_error),
            ]
        })
        .collect()
}
