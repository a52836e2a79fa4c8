//! Loss evaluation, exact parameter-shift gradients with a finite-difference
//! companion, Monte-Carlo landscape-variance estimators, and the closed-form
//! gradient-variance lower bound for centered two-qubit observables.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hea::{apply_two_design, AngleConvention, Boundary, HeaCircuit, TwoDesignDraw};
use crate::pauli::{eta, parse_observable, Observable};
use crate::qstate::{expectation, reduced_density, QubitSet, StateKind, StateVector};
use crate::stats::RunningStats;
use crate::{Error, Result};

/// Per-parameter gradient values plus their infinity norm.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientReport {
    pub values: Vec<f64>,
    pub inf_norm: f64,
}

impl GradientReport {
    fn from_values(values: Vec<f64>) -> Self {
        let inf_norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        GradientReport { values, inf_norm }
    }
}

/// f(theta) = Tr[U(theta) |psi><psi| U^dag(theta) O].
pub fn loss_value(
    circuit: &HeaCircuit,
    theta: &[f64],
    state: &StateVector,
    obs: &Observable,
) -> Result<f64> {
    expectation(&circuit.apply(theta, state)?, obs)
}

fn shift_rule(convention: AngleConvention) -> (f64, f64) {
    // (shift, prefactor): d f = prefactor * (f(theta + shift) - f(theta - shift))
    match convention {
        AngleConvention::Half => (core::f64::consts::FRAC_PI_2, 0.5),
        AngleConvention::Full => (core::f64::consts::FRAC_PI_4, 1.0),
    }
}

/// Exact derivative with respect to one parameter via the shift rule.
pub fn parameter_shift_component(
    circuit: &HeaCircuit,
    theta: &[f64],
    state: &StateVector,
    obs: &Observable,
    nu: usize,
) -> Result<f64> {
    if nu >= circuit.num_params() {
        return Err(Error::InvalidArgument("parameter index out of range"));
    }
    let (shift, factor) = shift_rule(circuit.convention());
    let mut shifted = theta.to_vec();
    shifted[nu] = theta[nu] + shift;
    let plus = loss_value(circuit, &shifted, state, obs)?;
    shifted[nu] = theta[nu] - shift;
    let minus = loss_value(circuit, &shifted, state, obs)?;
    Ok(factor * (plus - minus))
}

/// Full gradient via the shift rule (exact, two evaluations per parameter).
pub fn parameter_shift_grad(
    circuit: &HeaCircuit,
    theta: &[f64],
    state: &StateVector,
    obs: &Observable,
) -> Result<GradientReport> {
    let values = (0..circuit.num_params())
        .map(|nu| parameter_shift_component(circuit, theta, state, obs, nu))
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientReport::from_values(values))
}

/// Central finite differences, the independent oracle for the shift rule.
pub fn finite_diff_grad(
    circuit: &HeaCircuit,
    theta: &[f64],
    state: &StateVector,
    obs: &Observable,
    h: f64,
) -> Result<GradientReport> {
    if h <= 0.0 {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let mut shifted = theta.to_vec();
    let values = (0..circuit.num_params())
        .map(|nu| {
            shifted[nu] = theta[nu] + h;
            let plus = loss_value(circuit, &shifted, state, obs)?;
            shifted[nu] = theta[nu] - h;
            let minus = loss_value(circuit, &shifted, state, obs)?;
            shifted[nu] = theta[nu];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientReport::from_values(values))
}

/// How circuit randomness is drawn by the variance estimators: uniform
/// per-parameter angles on [0, 2pi), or brick replacement by Haar 4x4
/// unitaries (2-design mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThetaMode {
    Uniform,
    TwoDesign,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum EstimatorKind {
    LossValue,
    GradientComponent { nu: usize },
    /// f(theta + shift e_nu) - f(theta) with theta drawn at random.
    LossDifference { nu: usize, shift: f64 },
}

/// Declarative circuit description, serializable for CLI configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CircuitSpec {
    pub num_qubits: usize,
    pub depth: usize,
    pub boundary: Boundary,
    pub convention: AngleConvention,
}

impl CircuitSpec {
    pub fn open_half(num_qubits: usize, depth: usize) -> Self {
        CircuitSpec { num_qubits, depth, boundary: Boundary::Open, convention: AngleConvention::Half }
    }

    pub fn build(&self) -> Result<HeaCircuit> {
        crate::hea::build_hea(self.num_qubits, self.depth, self.boundary, self.convention)
    }
}

/// Declarative sampler: input family, circuit randomness, observable text
/// and the estimator to accumulate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerSpec {
    pub circuit: CircuitSpec,
    pub input: StateKind,
    pub theta: ThetaMode,
    pub observable: String,
    pub estimator: EstimatorKind,
}

/// Monte-Carlo summary of one estimator.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceReport {
    pub estimator_kind: EstimatorKind,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error_of_mean: f64,
}

/// Evaluate the sampler for one sample index. Each index owns a dedicated
/// ChaCha stream of the master seed, so results do not depend on evaluation
/// order or worker count.
pub fn sample_estimator(spec: &SamplerSpec, circuit: &HeaCircuit, seed: u64, index: u64) -> Result<f64> {
    let obs = parse_observable(&spec.observable, spec.circuit.num_qubits)?;
    sample_estimator_parsed(spec, circuit, &obs, seed, index)
}

fn sample_estimator_parsed(
    spec: &SamplerSpec,
    circuit: &HeaCircuit,
    obs: &Observable,
    seed: u64,
    index: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let state = crate::qstate::prepare_state_with_rng(&spec.input, spec.circuit.num_qubits, &mut rng)?;
    let tau = core::f64::consts::TAU;
    let (shift, factor) = shift_rule(circuit.convention());
    match spec.theta {
        ThetaMode::Uniform => {
            let theta: Vec<f64> =
                (0..circuit.num_params()).map(|_| rng.random::<f64>() * tau).collect();
            match spec.estimator {
                EstimatorKind::LossValue => loss_value(circuit, &theta, &state, obs),
                EstimatorKind::GradientComponent { nu } => {
                    parameter_shift_component(circuit, &theta, &state, obs, nu)
                }
                EstimatorKind::LossDifference { nu, shift: l } => {
                    if nu >= circuit.num_params() {
                        return Err(Error::InvalidArgument("parameter index out of range"));
                    }
                    let base = loss_value(circuit, &theta, &state, obs)?;
                    let mut moved = theta.clone();
                    moved[nu] += l;
                    Ok(loss_value(circuit, &moved, &state, obs)? - base)
                }
            }
        }
        ThetaMode::TwoDesign => {
            let split = match spec.estimator {
                EstimatorKind::LossValue => None,
                EstimatorKind::GradientComponent { nu }
                | EstimatorKind::LossDifference { nu, .. } => {
                    if nu >= circuit.num_params() {
                        return Err(Error::InvalidArgument("parameter index out of range"));
                    }
                    Some(nu)
                }
            };
            let draw = TwoDesignDraw::sample(circuit, &mut rng, split)?;
            match spec.estimator {
                EstimatorKind::LossValue => {
                    expectation(&apply_two_design(circuit, &draw, &state, None)?, obs)
                }
                EstimatorKind::GradientComponent { nu } => {
                    let base = rng.random::<f64>() * tau;
                    let plus = expectation(
                        &apply_two_design(circuit, &draw, &state, Some((nu, base + shift)))?,
                        obs,
                    )?;
                    let minus = expectation(
                        &apply_two_design(circuit, &draw, &state, Some((nu, base - shift)))?,
                        obs,
                    )?;
                    Ok(factor * (plus - minus))
                }
                EstimatorKind::LossDifference { nu, shift: l } => {
                    let base = rng.random::<f64>() * tau;
                    let at = |v: f64| {
                        expectation(&apply_two_design(circuit, &draw, &state, Some((nu, v)))?, obs)
                    };
                    Ok(at(base + l)? - at(base)?)
                }
            }
        }
    }
}

/// Accumulated statistics of the estimator over `samples` draws.
pub fn variance_stats(spec: &SamplerSpec, samples: u64, seed: u64) -> Result<RunningStats> {
    if samples < 2 {
        return Err(Error::InvalidArgument("variance estimation needs at least 2 samples"));
    }
    let circuit = spec.circuit.build()?;
    let obs = parse_observable(&spec.observable, spec.circuit.num_qubits)?;
    let mut acc = RunningStats::new();
    for index in 0..samples {
        acc.push(sample_estimator_parsed(spec, &circuit, &obs, seed, index)?);
    }
    Ok(acc)
}

pub fn variance_report(spec: &SamplerSpec, samples: u64, seed: u64) -> Result<VarianceReport> {
    let acc = variance_stats(spec, samples, seed)?;
    Ok(VarianceReport {
        estimator_kind: spec.estimator,
        samples: acc.count(),
        mean: acc.mean(),
        variance: acc.variance(),
        std_error_of_mean: acc.std_error(),
    })
}

/// Which constant enters the (1/5 or 2/5)^(2D) prefactor of the
/// gradient-variance lower bound; the two appear in different places of the
/// source analysis and the smaller one is what acceptance checks use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GnVariant {
    Main,
    Appendix,
}

/// Lower bound on Var[d f / d theta_nu] for an observable supported on two
/// adjacent qubits straddling the chain center, differentiated at the last
/// gate acting before the measurement:
/// c^(2D) * (2/225) * eta(O) * sum_{k < k' in [n/2-D, n/2+D]} eta(psi_[k..k'])
/// with c = 2/5 (main) or 1/5 (appendix).
pub fn gn_lower_bound(
    state: &StateVector,
    obs: &Observable,
    depth: usize,
    variant: GnVariant,
) -> Result<f64> {
    let n = state.num_qubits();
    if obs.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, got: obs.num_qubits() });
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("the bound needs depth >= 1"));
    }
    let support = obs.support();
    let center = n / 2;
    let adjacent_at_center = support.len() == 2
        && support.indices()[1] == support.indices()[0] + 1
        && support.contains(center);
    if !adjacent_at_center {
        return Err(Error::InvalidArgument(
            "observable must act on two adjacent qubits including the center qubit",
        ));
    }
    if depth > center || center + depth >= n {
        return Err(Error::InvalidArgument(
            "light-cone window [n/2 - D, n/2 + D] must fit in the register",
        ));
    }
    let (_, block) = obs.block_on_support();
    let eta_obs = eta(&block)?;
    let lo = center - depth;
    let hi = center + depth;
    let mut sum = 0.0;
    for k in lo..=hi {
        for k2 in k + 1..=hi {
            let rho = reduced_density(state, &QubitSet::contiguous(k, k2))?;
            sum += eta(rho.mat())?;
        }
    }
    let base: f64 = match variant {
        GnVariant::Main => 2.0 / 5.0,
        GnVariant::Appendix => 1.0 / 5.0,
    };
    Ok(base.powi(2 * depth as i32) * (2.0 / 225.0) * eta_obs * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::prepare_state;
    use num_complex::Complex64;

    fn plus_state() -> StateVector {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(1, alloc::vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)]).unwrap()
    }

    fn uniform_theta(n_params: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n_params).map(|_| rng.random::<f64>() * core::f64::consts::TAU).collect()
    }

    #[test]
    fn loss_at_zero_angles() {
        let c = CircuitSpec::open_half(4, 2).build().unwrap();
        let f = loss_value(
            &c,
            &alloc::vec![0.0; c.num_params()],
            &StateVector::zero(4).unwrap(),
            &Observable::total_z(4),
        )
        .unwrap();
        assert!((f - 4.0).abs() < 1e-12);
    }

    #[test]
    fn loss_bounded_by_coefficient_l1() {
        let c = CircuitSpec::open_half(4, 2).build().unwrap();
        let obs = parse_observable("0.8*Z1*Z2 + -1.5*X0 + 0.3*Y3", 4).unwrap();
        let l1 = crate::pauli::coefficient_l1(&obs);
        for seed in 0..5 {
            let theta = uniform_theta(c.num_params(), seed);
            let state = StateVector::haar(4, 90 + seed).unwrap();
            let f = loss_value(&c, &theta, &state, &obs).unwrap();
            assert!(f.abs() <= l1 + 1e-12);
        }
    }

    #[test]
    fn cosine_instance_gradient() {
        // f(theta_z) = <+| Rz^dag X Rz |+> = cos(theta_z) in the half convention
        let c = CircuitSpec::open_half(1, 0).build().unwrap();
        let obs = parse_observable("1.0*X0", 1).unwrap();
        let state = plus_state();

        let mut theta = alloc::vec![0.0; 3];
        let g0 = parameter_shift_component(&c, &theta, &state, &obs, 2).unwrap();
        assert!(g0.abs() < 1e-12, "extremum of cosine, got {g0}");

        theta[2] = core::f64::consts::FRAC_PI_2;
        let g1 = parameter_shift_component(&c, &theta, &state, &obs, 2).unwrap();
        assert!((g1 + 1.0).abs() < 1e-12, "got {g1}");

        // finite differences agree
        let fd = finite_diff_grad(&c, &theta, &state, &obs, 1e-5).unwrap();
        assert!((fd.values[2] + 1.0).abs() < 1e-9);
        theta[2] = 0.0;
        let fd0 = finite_diff_grad(&c, &theta, &state, &obs, 1e-5).unwrap();
        assert!(fd0.values[2].abs() < 1e-9);
    }

    fn assert_psr_matches_fd(convention: AngleConvention, seed: u64) {
        let spec = CircuitSpec {
            num_qubits: 4,
            depth: 2,
            boundary: Boundary::Open,
            convention,
        };
        let c = spec.build().unwrap();
        let obs = parse_observable("1.0*Z1*Z2 + 0.5*X0 + -0.75*Y3", 4).unwrap();
        let state = StateVector::haar(4, seed).unwrap();
        let theta = uniform_theta(c.num_params(), seed ^ 0x5a5a);
        let psr = parameter_shift_grad(&c, &theta, &state, &obs).unwrap();
        let fd = finite_diff_grad(&c, &theta, &state, &obs, 1e-5).unwrap();
        for (nu, (a, b)) in psr.values.iter().zip(&fd.values).enumerate() {
            let err = (a - b).abs();
            let tol = 1e-6 * b.abs().max(1e-3);
            assert!(err <= tol.max(1e-9), "nu={nu}: psr {a} fd {b}");
        }
        assert!((psr.inf_norm - psr.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))).abs() == 0.0);
    }

    #[test]
    fn shift_rule_matches_finite_differences_half() {
        for seed in 0..4 {
            assert_psr_matches_fd(AngleConvention::Half, 300 + seed);
        }
    }

    #[test]
    fn shift_rule_matches_finite_differences_full() {
        for seed in 0..4 {
            assert_psr_matches_fd(AngleConvention::Full, 400 + seed);
        }
    }

    #[test]
    fn finite_diff_rejects_bad_step() {
        let c = CircuitSpec::open_half(2, 0).build().unwrap();
        let obs = parse_observable("1.0*Z0", 2).unwrap();
        let s = StateVector::zero(2).unwrap();
        assert!(finite_diff_grad(&c, &alloc::vec![0.0; 6], &s, &obs, 0.0).is_err());
    }

    #[test]
    fn loss_difference_midpoint_identity() {
        // f(theta + l e_nu) - f(theta) = 2 sin(l/2) d f(theta + l/2 e_nu)
        let c = CircuitSpec::open_half(4, 1).build().unwrap();
        let obs = parse_observable("1.0*Z1*Z2", 4).unwrap();
        let state = StateVector::random_product(4, 3).unwrap();
        let theta = uniform_theta(c.num_params(), 8);
        for (nu, l) in [(0usize, 0.7), (13, 2.2), (20, core::f64::consts::PI)] {
            let base = loss_value(&c, &theta, &state, &obs).unwrap();
            let mut moved = theta.clone();
            moved[nu] += l;
            let diff = loss_value(&c, &moved, &state, &obs).unwrap() - base;
            let mut mid = theta.clone();
            mid[nu] += l / 2.0;
            let grad = parameter_shift_component(&c, &mid, &state, &obs, nu).unwrap();
            assert!(
                (diff - 2.0 * (l / 2.0).sin() * grad).abs() < 1e-8,
                "nu={nu} l={l}: diff {diff} grad {grad}"
            );
        }
    }

    #[test]
    fn gradient_variance_equals_quarter_loss_difference_variance() {
        // shift-rule identity makes the two estimators equal in distribution;
        // with a shared stream the pi-difference at the midpoint is exactly
        // twice the gradient
        let spec = SamplerSpec {
            circuit: CircuitSpec::open_half(4, 1),
            input: StateKind::ProductRandom,
            theta: ThetaMode::Uniform,
            observable: String::from("1.0*Z1*Z2"),
            estimator: EstimatorKind::GradientComponent { nu: 14 },
        };
        let circuit = spec.circuit.build().unwrap();
        let obs = parse_observable(&spec.observable, 4).unwrap();
        // exact coupling: evaluate both from the same evaluation pair
        let mut grad_acc = RunningStats::new();
        let mut diff_acc = RunningStats::new();
        for index in 0..400u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            rng.set_stream(index);
            let state =
                crate::qstate::prepare_state_with_rng(&spec.input, 4, &mut rng).unwrap();
            let theta = uniform_theta(circuit.num_params(), 9000 + index);
            let base = loss_value(&circuit, &theta, &state, &obs).unwrap();
            let mut moved = theta.clone();
            moved[14] += core::f64::consts::PI;
            let diff = loss_value(&circuit, &moved, &state, &obs).unwrap() - base;
            let mut mid = theta.clone();
            mid[14] += core::f64::consts::FRAC_PI_2;
            let grad = parameter_shift_component(&circuit, &mid, &state, &obs, 14).unwrap();
            assert!((diff - 2.0 * grad).abs() < 1e-12);
            grad_acc.push(grad);
            diff_acc.push(diff);
        }
        assert!(
            (grad_acc.variance() - diff_acc.variance() / 4.0).abs() < 1e-12,
            "exact identity broken"
        );
        // and the independent estimator path agrees statistically
        let rg = variance_report(&spec, 400, 12).unwrap();
        let rd = variance_report(
            &SamplerSpec {
                estimator: EstimatorKind::LossDifference {
                    nu: 14,
                    shift: core::f64::consts::PI,
                },
                ..spec.clone()
            },
            400,
            12,
        )
        .unwrap();
        let tol = 2.0 * (variance_stats(&spec, 400, 12).unwrap().variance_std_error()
            + variance_stats(
                &SamplerSpec {
                    estimator: EstimatorKind::LossDifference {
                        nu: 14,
                        shift: core::f64::consts::PI,
                    },
                    ..spec.clone()
                },
                400,
                12,
            )
            .unwrap()
            .variance_std_error()
                / 4.0);
        assert!(
            (rg.variance - rd.variance / 4.0).abs() <= tol,
            "grad var {} vs ld var/4 {} (tol {tol})",
            rg.variance,
            rd.variance / 4.0
        );
    }

    #[test]
    fn identity_observable_has_zero_variance() {
        let spec = SamplerSpec {
            circuit: CircuitSpec::open_half(3, 1),
            input: StateKind::Haar,
            theta: ThetaMode::Uniform,
            observable: String::from("2.5"),
            estimator: EstimatorKind::LossValue,
        };
        let r = variance_report(&spec, 50, 5).unwrap();
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.mean, 2.5);
    }

    #[test]
    fn rejects_too_few_samples() {
        let spec = SamplerSpec {
            circuit: CircuitSpec::open_half(2, 0),
            input: StateKind::Zero,
            theta: ThetaMode::Uniform,
            observable: String::from("1.0*Z0"),
            estimator: EstimatorKind::LossValue,
        };
        assert!(variance_report(&spec, 1, 0).is_err());
    }

    #[test]
    fn two_design_traceless_mean_is_zero() {
        let spec = SamplerSpec {
            circuit: CircuitSpec::open_half(4, 1),
            input: StateKind::ProductRandom,
            theta: ThetaMode::TwoDesign,
            observable: String::from("1.0*Z2*Z3"),
            estimator: EstimatorKind::LossValue,
        };
        let r = variance_report(&spec, 600, 21).unwrap();
        assert!(
            r.mean.abs() <= 3.0 * r.std_error_of_mean,
            "mean {} se {}",
            r.mean,
            r.std_error_of_mean
        );
    }

    #[test]
    fn variance_report_is_deterministic() {
        let spec = SamplerSpec {
            circuit: CircuitSpec::open_half(4, 1),
            input: StateKind::Haar,
            theta: ThetaMode::TwoDesign,
            observable: String::from("1.0*Z2*Z3"),
            estimator: EstimatorKind::LossValue,
        };
        let a = variance_report(&spec, 64, 77).unwrap();
        let b = variance_report(&spec, 64, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gn_bound_spec_values() {
        // hand evaluation for n=8, D=1, |0...0>, O = Z4*Z5:
        // (2/5)^2 * (2/225) * 4 * [(1 - 1/4) + (1 - 1/8) + (1 - 1/4)]
        let state = StateVector::zero(8).unwrap();
        let obs = parse_observable("1.0*Z4*Z5", 8).unwrap();
        let main = gn_lower_bound(&state, &obs, 1, GnVariant::Main).unwrap();
        assert!((main - 1.3511111111e-2).abs() < 1e-8, "main {main}");
        let app = gn_lower_bound(&state, &obs, 1, GnVariant::Appendix).unwrap();
        assert!((app - 3.3777777778e-3).abs() < 1e-9, "appendix {app}");
    }

    #[test]
    fn gn_bound_degenerates_for_scrambled_inputs() {
        let obs = parse_observable("1.0*Z4*Z5", 8).unwrap();
        let product = gn_lower_bound(
            &StateVector::zero(8).unwrap(),
            &obs,
            1,
            GnVariant::Main,
        )
        .unwrap();
        let haar = gn_lower_bound(
            &StateVector::haar(8, 4).unwrap(),
            &obs,
            1,
            GnVariant::Main,
        )
        .unwrap();
        assert!(haar < 0.05 * product, "haar {haar} product {product}");
    }

    #[test]
    fn gn_bound_rejects_unsupported_positions() {
        let state = StateVector::zero(8).unwrap();
        // not at the center
        let obs = parse_observable("1.0*Z0*Z1", 8).unwrap();
        assert!(gn_lower_bound(&state, &obs, 1, GnVariant::Main).is_err());
        // not adjacent
        let obs = parse_observable("1.0*Z3*Z5", 8).unwrap();
        assert!(gn_lower_bound(&state, &obs, 1, GnVariant::Main).is_err());
        // depth zero
        let obs = parse_observable("1.0*Z4*Z5", 8).unwrap();
        assert!(gn_lower_bound(&state, &obs, 0, GnVariant::Main).is_err());
    }

    #[test]
    fn two_design_gradient_variance_clears_gn_bound_small() {
        // small-n rehearsal of the acceptance check: product input, n=4, D=1,
        // O on the center pair, 2-design bricks
        let obs_text = "1.0*Z2*Z3";
        let state = prepare_state(&StateKind::Zero, 4, 0).unwrap();
        let obs = parse_observable(obs_text, 4).unwrap();
        let bound = gn_lower_bound(&state, &obs, 1, GnVariant::Appendix).unwrap();
        let circuit = CircuitSpec::open_half(4, 1);
        let built = circuit.build().unwrap();
        // differentiate a parameter of the brick covering qubits (2,3)
        let brick = built
            .bricks()
            .iter()
            .find(|b| b.covers(2) && b.covers(3))
            .expect("layer 1 covers (2,3)");
        let spec = SamplerSpec {
            circuit,
            input: StateKind::Zero,
            theta: ThetaMode::TwoDesign,
            observable: String::from(obs_text),
            estimator: EstimatorKind::GradientComponent { nu: brick.param_start },
        };
        let r = variance_report(&spec, 800, 5).unwrap();
        assert!(
            r.variance >= bound,
            "variance {} must clear the bound {bound}",
            r.variance
        );
    }
}
