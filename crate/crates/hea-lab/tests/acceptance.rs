//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its headline numbers (visible with --nocapture).

use std::time::Instant;

use hea_core::gradients::{
    finite_diff_grad, gn_lower_bound, parameter_shift_grad, variance_report, CircuitSpec,
    EstimatorKind, GnVariant, SamplerSpec, ThetaMode,
};
use hea_core::hea::{build_hea, numeric_operator_support, AngleConvention, Boundary};
use hea_core::pauli::{parse_observable, Observable, PauliLetter, PauliString};
use hea_core::qstate::{prepare_state, StateKind, StateVector};
use hea_core::scrambling::{law_probe, StateFamily};
use hea_lab::drivers;
use hea_lab::DEFAULT_SEED;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn uniform_theta(count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..count).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()
}

#[test]
fn acceptance_01_parameter_shift_matches_finite_differences() {
    let started = Instant::now();
    let mut max_rel = 0.0_f64;
    for instance in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x01_0000 + instance);
        let n = rng.random_range(2..=6usize);
        let depth = rng.random_range(0..=3usize);
        let circuit = build_hea(n, depth, Boundary::Open, AngleConvention::Half).unwrap();
        let terms = (0..rng.random_range(1..=3usize))
            .map(|_| {
                let weight = 1 + rng.random_range(0..2usize);
                let start = rng.random_range(0..n - (weight - 1));
                let mut letters = vec![PauliLetter::I; n];
                for w in 0..weight {
                    letters[start + w] =
                        [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][rng.random_range(0..3)];
                }
                (rng.random::<f64>() * 4.0 - 2.0, PauliString::new(letters))
            })
            .collect();
        let obs = Observable::new(n, terms).unwrap();
        let state = if rng.random::<bool>() {
            StateVector::haar(n, 900 + instance).unwrap()
        } else {
            StateVector::random_product(n, 900 + instance).unwrap()
        };
        let theta = uniform_theta(circuit.num_params(), &mut rng);
        let psr = parameter_shift_grad(&circuit, &theta, &state, &obs).unwrap();
        let fd = finite_diff_grad(&circuit, &theta, &state, &obs, 1e-5).unwrap();
        for (nu, (a, b)) in psr.values.iter().zip(&fd.values).enumerate() {
            let err = (a - b).abs();
            let tol = (1e-6 * b.abs()).max(1e-9);
            assert!(
                err <= tol,
                "instance {instance} nu {nu}: psr {a} vs fd {b} (err {err:e})"
            );
            if b.abs() > 1e-6 {
                max_rel = max_rel.max(err / b.abs());
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 exceeded its 1-minute budget: {elapsed:?}");
    println!(
        "criterion 01 (gradient oracle, 50 instances): PASS (max rel err {max_rel:.2e}, {elapsed:.2?})"
    );
}

#[test]
fn acceptance_02_haar_matrix_element_moments() {
    let r = drivers::haar_moment_experiment(4, 100_000, 0x02_0000).unwrap();
    let dev_sq = (r.mean_abs_sq - 0.25).abs();
    assert!(
        dev_sq <= 3.0 * r.se_abs_sq,
        "second moment {} vs 0.25 (se {})",
        r.mean_abs_sq,
        r.se_abs_sq
    );
    let dev_4 = (r.mean_abs_fourth - 0.10).abs();
    assert!(
        dev_4 <= 3.0 * r.se_abs_fourth,
        "fourth moment {} vs 0.10 (se {})",
        r.mean_abs_fourth,
        r.se_abs_fourth
    );
    println!(
        "criterion 02 (Haar moments, 1e5 draws): PASS (|u00|^2 = {:.5} +- {:.1e}, |u00|^4 = {:.5} +- {:.1e})",
        r.mean_abs_sq, r.se_abs_sq, r.mean_abs_fourth, r.se_abs_fourth
    );
}

#[test]
fn acceptance_03_spectral_form_factor_means() {
    let rows =
        drivers::gde_sff_experiment(6, &[1, 2], &[0.0, 1.0, 2.0], 200, 0x03_0000).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let tol = (3.0 * row.std_error).max(0.05);
        let dev = (row.mean_sff - row.analytic).abs();
        assert!(
            dev <= tol,
            "k={} t={}: mean {} vs {} (tol {tol})",
            row.k,
            row.t,
            row.mean_sff,
            row.analytic
        );
    }
    println!("criterion 03 (form-factor ensemble means, n=6, 200 draws): PASS");
}

#[test]
fn acceptance_04_aligned_loss_means() {
    let rows = drivers::gde_loss_experiment(8, 2, &[0.0, 1.0, 2.0], 100, 0x04_0000).unwrap();
    for row in &rows {
        assert!(
            row.max_symmetric_deviation <= 1e-8,
            "t={}: symmetric class deviates by {:e}",
            row.t,
            row.max_symmetric_deviation
        );
        let tol = (3.0 * row.std_error).max(0.05);
        let dev = (row.mean_generic - row.analytic).abs();
        assert!(
            dev <= tol,
            "t={}: generic mean {} vs {} (tol {tol})",
            row.t,
            row.mean_generic,
            row.analytic
        );
    }
    println!("criterion 04 (class-loss means, n=8, 100 draws): PASS");
}

#[test]
fn acceptance_05_evolved_purity_moments() {
    let rows = drivers::gde_purity_experiment(8, 2, &[0.0, 1.0, 2.0], 100, 0x05_0000).unwrap();
    for row in &rows {
        let tol = (3.0 * row.se_purity).max(0.05);
        assert!(
            (row.mean_purity - row.analytic_mean).abs() <= tol,
            "t={}: purity {} vs {}",
            row.t,
            row.mean_purity,
            row.analytic_mean
        );
        let tol2 = (3.0 * row.se_purity_sq).max(0.05);
        assert!(
            (row.mean_purity_sq - row.analytic_second).abs() <= tol2,
            "t={}: second moment {} vs {}",
            row.t,
            row.mean_purity_sq,
            row.analytic_second
        );
    }
    println!("criterion 05 (purity mean and second moment, n=8, 100 draws): PASS");
}

#[test]
fn acceptance_06_concentration_bound_domination() {
    let config = drivers::ConcentrationConfig {
        n_choices: vec![6, 8, 10],
        depth_choices: vec![1, 2],
        instances: 500,
        evolve_t: 1.0,
        seed: 0x06_0000,
    };
    let rows = drivers::concentration_sweep(&config).unwrap();
    assert_eq!(rows.len(), 500);
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.margin < 0.0).count();
    assert_eq!(violations, 0, "bound violated on {violations} instances (min margin {min_margin:e})");
    println!(
        "criterion 06 (light-cone bound domination, 500 instances): PASS (min margin {min_margin:.3e})"
    );
}

#[test]
fn acceptance_07_lightcone_soundness() {
    for instance in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x07_0000 + instance);
        let n = [4usize, 6, 8][rng.random_range(0..3)];
        let depth = rng.random_range(1..=3usize);
        let circuit = build_hea(n, depth, Boundary::Open, AngleConvention::Half).unwrap();
        let palette = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        let mut letters = vec![PauliLetter::I; n];
        if rng.random::<bool>() {
            letters[rng.random_range(0..n)] = palette[rng.random_range(0..3)];
        } else {
            // 2-local, possibly with a gap between the two sites
            let gap = 1 + rng.random_range(0..3usize);
            let start = rng.random_range(0..n - gap);
            letters[start] = palette[rng.random_range(0..3)];
            letters[start + gap] = palette[rng.random_range(0..3)];
        }
        let string = PauliString::new(letters);
        let cone = circuit.lightcone(&string).unwrap();
        assert!(
            cone.len() <= 2 * depth * string.support().len(),
            "instance {instance}: cone larger than 2D |supp|"
        );
        let theta = uniform_theta(circuit.num_params(), &mut rng);
        let u = circuit.unitary_matrix(&theta).unwrap();
        let dense = Observable::single(1.0, string.clone()).to_dense().unwrap();
        let conjugated = u.adjoint().mul(&dense).mul(&u);
        let support = numeric_operator_support(&conjugated, n, 1e-9).unwrap();
        for &q in support.indices() {
            assert!(
                cone.contains(q),
                "instance {instance}: evolved support hits qubit {q} outside the cone"
            );
        }
    }
    println!("criterion 07 (light-cone soundness, 100 instances): PASS");
}

#[test]
fn acceptance_08_haar_state_scrambling() {
    // every draw at n = 12 sits below 2^(|Lambda| - n/3)
    for lambda_size in [1usize, 2] {
        let samples =
            drivers::scrambling_samples(&StateFamily::Haar, 12, lambda_size, 100, 0x08_0000)
                .unwrap();
        let bound = 2.0_f64.powf(lambda_size as f64 - 4.0);
        for (i, v) in samples.iter().enumerate() {
            assert!(*v <= bound, "sample {i} (|Lambda|={lambda_size}): {v} > {bound}");
        }
    }
    // decay exponent of the mean across n
    let report = law_probe(&StateFamily::Haar, &[8, 10, 12], &[1], 200, 0x08_0001).unwrap();
    let (_, slope) = report.slopes[0];
    assert!(
        (slope + 0.5).abs() <= 0.15,
        "fitted slope {slope} outside -0.5 +- 0.15"
    );
    println!("criterion 08 (Haar-state trace-distance decay): PASS (slope {slope:.3})");
}

#[test]
fn acceptance_09_short_time_trace_distance_floor() {
    let r = drivers::trace_distance_floor_experiment(10, 2, 1.0, 100, 0x09_0000).unwrap();
    assert!(
        r.fraction_above >= 0.9,
        "only {:.0}% of samples clear the floor {:.4}",
        100.0 * r.fraction_above,
        r.threshold
    );
    println!(
        "criterion 09 (evolved-state floor, n=10, 100 draws): PASS ({:.0}% >= {:.4}, mean I = {:.3})",
        100.0 * r.fraction_above,
        r.threshold,
        r.mean_i
    );
}

#[test]
fn acceptance_10_gradient_decay_reproduction() {
    let started = Instant::now();
    let config = hea_core::tasks::NumericsConfig {
        n_list: vec![4, 6, 8, 10],
        depth: 1,
        t_max: 4.0,
        t_steps: 20,
        num_states: 100,
        num_theta_draws: 2,
        seed: DEFAULT_SEED,
        boundary: Boundary::Open,
        convention: AngleConvention::Half,
    };
    let output = drivers::numerics_experiment(&config).unwrap();
    let s = &output.summary;
    assert!(
        s.t0_max_over_min < 2.0,
        "t=0 gradients vary by {:.2}x across n",
        s.t0_max_over_min
    );
    assert!(
        s.g_sat_strictly_decreasing,
        "saturation values not strictly decreasing: {:?}",
        s.per_n.iter().map(|p| p.g_sat).collect::<Vec<_>>()
    );
    assert!(
        s.corr_g_sat_vs_entropy_deficit >= 0.7,
        "correlation {:.3} below 0.7",
        s.corr_g_sat_vs_entropy_deficit
    );
    assert!(s.loglog_slope < 0.0, "log-log slope {:.3} not negative", s.loglog_slope);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 900,
        "criterion 10 exceeded its 15-minute budget: {elapsed:?}"
    );
    println!(
        "criterion 10 (gradient-decay reproduction): PASS (t0 ratio {:.2}, G_sat {:?}, corr {:.3}, slope {:.2}, {elapsed:.1?})",
        s.t0_max_over_min,
        s.per_n.iter().map(|p| (p.n, p.g_sat)).collect::<Vec<_>>(),
        s.corr_g_sat_vs_entropy_deficit,
        s.loglog_slope
    );
}

#[test]
fn acceptance_11_two_design_mean_vanishes() {
    let spec = SamplerSpec {
        circuit: CircuitSpec::open_half(8, 1),
        input: StateKind::ProductRandom,
        theta: ThetaMode::TwoDesign,
        observable: "1.0*Z4*Z5".into(),
        estimator: EstimatorKind::LossValue,
    };
    let r = variance_report(&spec, 2000, 0x0b_0000).unwrap();
    assert!(
        r.mean.abs() <= 3.0 * r.std_error_of_mean,
        "mean {} exceeds 3 SE {}",
        r.mean,
        r.std_error_of_mean
    );
    println!(
        "criterion 11 (traceless mean vanishes in 2-design mode): PASS (mean {:.2e} +- {:.2e})",
        r.mean, r.std_error_of_mean
    );
}

#[test]
fn acceptance_12_gradient_variance_lower_bound() {
    let state = prepare_state(&StateKind::ProductRandom, 8, 0x0c_0000).unwrap();
    let obs = parse_observable("1.0*Z4*Z5", 8).unwrap();
    let bound = gn_lower_bound(&state, &obs, 1, GnVariant::Appendix).unwrap();
    assert!(
        (bound - 3.3778e-3).abs() / 3.3778e-3 < 1e-4,
        "appendix bound {bound:e} drifted from its frozen value"
    );
    let circuit_spec = CircuitSpec::open_half(8, 1);
    let circuit = circuit_spec.build().unwrap();
    let brick = circuit
        .bricks()
        .iter()
        .find(|b| b.covers(4) && b.covers(5))
        .expect("layer 1 covers the center pair");
    let spec = SamplerSpec {
        circuit: circuit_spec,
        input: StateKind::ProductRandom,
        theta: ThetaMode::TwoDesign,
        observable: "1.0*Z4*Z5".into(),
        estimator: EstimatorKind::GradientComponent { nu: brick.param_start },
    };
    let r = variance_report(&spec, 2000, 0x0c_0001).unwrap();
    assert!(
        r.variance >= 3.3778e-3,
        "variance {:.4e} below the bound 3.3778e-3",
        r.variance
    );
    assert!(r.variance >= bound, "variance {:.4e} below the computed bound {bound:.4e}", r.variance);
    println!(
        "criterion 12 (gradient-variance lower bound): PASS (Var {:.3e} >= {:.4e})",
        r.variance, bound
    );
}

#[test]
fn acceptance_13_anticoncentration_contrast() {
    let base = SamplerSpec {
        circuit: CircuitSpec::open_half(10, 2),
        input: StateKind::ProductRandom,
        theta: ThetaMode::Uniform,
        observable: "1.0*Z4*Z5".into(),
        estimator: EstimatorKind::LossValue,
    };
    let product = variance_report(&base, 2000, DEFAULT_SEED).unwrap();
    let haar = variance_report(
        &SamplerSpec { input: StateKind::Haar, ..base.clone() },
        2000,
        DEFAULT_SEED,
    )
    .unwrap();
    assert!(
        product.variance >= 10.0 * haar.variance,
        "product variance {:.3e} not 10x the Haar variance {:.3e}",
        product.variance,
        haar.variance
    );
    println!(
        "criterion 13 (input-state anti-concentration contrast): PASS ({:.3e} vs {:.3e}, ratio {:.0})",
        product.variance,
        haar.variance,
        product.variance / haar.variance
    );
}

#[test]
fn acceptance_14_discrimination_training_smoke() {
    let result =
        drivers::discriminate_experiment(6, 2, 0.5, 8, 2, 200, 0.05, DEFAULT_SEED).unwrap();
    assert!(
        result.final_loss <= 0.5 * result.initial_loss,
        "final loss {} above half the initial {}",
        result.final_loss,
        result.initial_loss
    );
    let smooth = drivers::smoothed(&result.training.loss_trajectory, 10);
    for (i, pair) in smooth.windows(2).enumerate() {
        assert!(
            pair[1] <= pair[0] + 1e-9,
            "smoothed trajectory rises at step {i}: {} -> {}",
            pair[0],
            pair[1]
        );
    }
    println!(
        "criterion 14 (training smoke test): PASS (loss {:.4} -> {:.4}, accuracy {:.2})",
        result.initial_loss, result.final_loss, result.train_accuracy
    );
}

#[test]
fn acceptance_15_cli_determinism_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_hea-lab");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "numerics",
            vec![
                "numerics", "--n", "3,4", "--depth", "1", "--t-max", "2", "--t-steps", "4",
                "--samples", "4", "--theta-draws", "1",
            ],
        ),
        ("gde-sff", vec!["gde-sff", "--n", "4", "--k", "1,2", "--t", "0,1", "--samples", "16"]),
        (
            "gde-purity",
            vec!["gde-purity", "--n", "5", "--lambda-size", "2", "--t", "0,1", "--samples", "10"],
        ),
        (
            "discriminate",
            vec![
                "discriminate", "--n", "4", "--a-size", "2", "--t", "0.5", "--dataset-size", "4",
                "--depth", "1", "--iterations", "5", "--step", "0.05",
            ],
        ),
        (
            "concentration",
            vec!["concentration", "--n", "4,6", "--depth", "1,2", "--samples", "24"],
        ),
        ("haar-check", vec!["haar-check", "--dim", "4", "--samples", "500"]),
    ];
    let root = tempfile::tempdir().unwrap();
    for (name, args) in &cases {
        let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        for threads in ["1", "4"] {
            let out_dir = root.path().join(format!("{name}-{threads}"));
            let status = std::process::Command::new(bin)
                .args(args)
                .args(["--seed", "11", "--plot", "--out"])
                .arg(&out_dir)
                .env("HEA_LAB_THREADS", threads)
                .status()
                .expect("spawn CLI");
            assert!(status.success(), "{name} with {threads} threads failed");
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        std::fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort_by(|a, b| a.0.cmp(&b.0));
            assert!(files.len() >= 3, "{name}: expected csv + summary + svg");
            outputs.push(files);
        }
        let names: Vec<&String> = outputs[0].iter().map(|(n, _)| n).collect();
        assert_eq!(
            names,
            outputs[1].iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "{name}: file sets differ"
        );
        for ((fa, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
            assert_eq!(a, b, "{name}/{fa}: bytes differ across thread counts");
        }
    }
    println!("criterion 15 (byte-identical CLI reruns across thread counts): PASS");
}
