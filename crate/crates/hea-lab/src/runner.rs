//! Subcommand dispatch: resolve config (file + flags), run the mapped
//! driver, persist CSV + JSON summary (and optionally an SVG). Exit codes:
//! 0 success, 2 config error, 1 runtime error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_boundary, parse_convention, ConfigSource, OutputPaths};
use crate::csvio::{cell_f64, cell_u64, cell_usize, write_csv, write_summary, Provenance};
use crate::drivers;
use crate::plot::{emit_plot, PlotKind};
use crate::LabError;
use hea_core::tasks::NumericsConfig;

#[derive(Parser)]
#[command(name = "hea-lab", version, about = "Batch experiments on the shallow HEA kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gradient decay of the spin-chain evolution task across system sizes
    Numerics(NumericsArgs),
    /// Ensemble averages of the normalized spectral form factor
    GdeSff(SffArgs),
    /// Subsystem-purity moments of evolved product states
    GdePurity(PurityArgs),
    /// Train the Hamiltonian-discrimination classifier
    Discriminate(DiscriminateArgs),
    /// Light-cone concentration-bound sweep over random instances
    Concentration(ConcentrationArgs),
    /// Haar matrix-element moment check
    HaarCheck(HaarCheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// master seed (required here or in the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// also render an SVG plot of the CSV
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct NumericsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// system sizes, e.g. 4,6,8,10
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-steps")]
    t_steps: Option<usize>,
    /// number of random initial states
    #[arg(long)]
    samples: Option<usize>,
    /// angle draws per initial state
    #[arg(long = "theta-draws")]
    theta_draws: Option<usize>,
    /// open | periodic
    #[arg(long)]
    boundary: Option<String>,
    /// half | full
    #[arg(long)]
    convention: Option<String>,
}

#[derive(Args)]
struct SffArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    /// form-factor orders, e.g. 1,2
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// evolution times, e.g. 0,1,2
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct PurityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "lambda-size")]
    lambda_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct DiscriminateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "a-size")]
    a_size: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "dataset-size")]
    dataset_size: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    depth: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    /// evolution time of the ensemble-evolved input family
    #[arg(long = "evolve-t")]
    evolve_t: Option<f64>,
}

#[derive(Args)]
struct HaarCheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
}

pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Numerics(a) => numerics(a),
        Command::GdeSff(a) => gde_sff(a),
        Command::GdePurity(a) => gde_purity(a),
        Command::Discriminate(a) => discriminate(a),
        Command::Concentration(a) => concentration(a),
        Command::HaarCheck(a) => haar_check(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Resolved {
    seed: u64,
    out_dir: PathBuf,
    plot: bool,
}

fn resolve_common(src: &ConfigSource, common: &CommonArgs) -> Result<Resolved, LabError> {
    Ok(Resolved {
        seed: src.required(common.seed, "seed")?,
        out_dir: src.required(common.out.clone(), "out")?,
        plot: common.plot,
    })
}

fn maybe_plot(paths: &OutputPaths, kind: PlotKind, plot: bool) -> Result<(), LabError> {
    if plot {
        emit_plot(&paths.csv, kind, &paths.plot)?;
    }
    Ok(())
}

fn numerics(args: NumericsArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let boundary = parse_boundary(&src.optional(args.boundary, "boundary", "open".into())?)?;
    let convention = parse_convention(&src.optional(args.convention, "convention", "half".into())?)?;
    let config = NumericsConfig {
        n_list: src.required(args.n, "n")?,
        depth: src.optional(args.depth, "depth", 1)?,
        t_max: src.required(args.t_max, "t_max")?,
        t_steps: src.required(args.t_steps, "t_steps")?,
        num_states: src.required(args.samples, "samples")?,
        num_theta_draws: src.optional(args.theta_draws, "theta_draws", 2)?,
        seed: common.seed,
        boundary,
        convention,
    };
    config.validate().map_err(|e| LabError::Config(e.to_string()))?;
    let provenance = Provenance::new("numerics", &config, common.seed)?;
    let output = drivers::numerics_experiment(&config)?;
    let rows: Vec<Vec<String>> = output
        .records
        .iter()
        .map(|r| {
            vec![
                cell_usize(r.n),
                cell_f64(r.t),
                cell_f64(r.mean_grad_inf_norm),
                cell_f64(r.std_error),
                cell_f64(r.mean_entropy_2q),
                cell_u64(r.samples),
            ]
        })
        .collect();
    let paths = OutputPaths::new(&common.out_dir, "numerics");
    write_csv(
        &paths.csv,
        &provenance,
        &["n", "t", "mean_grad_inf_norm", "std_error", "mean_entropy_2q", "samples"],
        &rows,
    )?;
    write_summary(&paths.summary, &provenance, &output.summary)?;
    maybe_plot(&paths, PlotKind::Numerics, common.plot)
}

#[derive(Serialize)]
struct SffRunConfig {
    n: usize,
    k: Vec<u32>,
    t: Vec<f64>,
    samples: u64,
    seed: u64,
}

fn gde_sff(args: SffArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let config = SffRunConfig {
        n: src.required(args.n, "n")?,
        k: src.optional(args.k, "k", vec![1, 2])?,
        t: src.required(args.t, "t")?,
        samples: src.required(args.samples, "samples")?,
        seed: common.seed,
    };
    let provenance = Provenance::new("gde-sff", &config, common.seed)?;
    let rows = drivers::gde_sff_experiment(config.n, &config.k, &config.t, config.samples, config.seed)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cell_usize(r.n),
                cell_u64(r.k as u64),
                cell_f64(r.t),
                cell_f64(r.mean_sff),
                cell_f64(r.std_error),
                cell_f64(r.analytic),
                cell_u64(r.samples),
            ]
        })
        .collect();
    let paths = OutputPaths::new(&common.out_dir, "gde_sff");
    write_csv(
        &paths.csv,
        &provenance,
        &["n", "k", "t", "mean_sff", "std_error", "analytic", "samples"],
        &cells,
    )?;
    write_summary(&paths.summary, &provenance, &rows)?;
    maybe_plot(&paths, PlotKind::GdeSff, common.plot)
}

#[derive(Serialize)]
struct PurityRunConfig {
    n: usize,
    lambda_size: usize,
    t: Vec<f64>,
    samples: u64,
    seed: u64,
}

fn gde_purity(args: PurityArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let config = PurityRunConfig {
        n: src.required(args.n, "n")?,
        lambda_size: src.optional(args.lambda_size, "lambda_size", 2)?,
        t: src.required(args.t, "t")?,
        samples: src.required(args.samples, "samples")?,
        seed: common.seed,
    };
    let provenance = Provenance::new("gde-purity", &config, common.seed)?;
    let rows = drivers::gde_purity_experiment(
        config.n,
        config.lambda_size,
        &config.t,
        config.samples,
        config.seed,
    )?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cell_usize(r.n),
                cell_usize(r.lambda_size),
                cell_f64(r.t),
                cell_f64(r.mean_purity),
                cell_f64(r.se_purity),
                cell_f64(r.analytic_mean),
                cell_f64(r.mean_purity_sq),
                cell_f64(r.se_purity_sq),
                cell_f64(r.analytic_second),
                cell_u64(r.samples),
            ]
        })
        .collect();
    let paths = OutputPaths::new(&common.out_dir, "gde_purity");
    write_csv(
        &paths.csv,
        &provenance,
        &[
            "n",
            "lambda_size",
            "t",
            "mean_purity",
            "se_purity",
            "analytic_mean",
            "mean_purity_sq",
            "se_purity_sq",
            "analytic_second",
            "samples",
        ],
        &cells,
    )?;
    write_summary(&paths.summary, &provenance, &rows)?;
    maybe_plot(&paths, PlotKind::GdePurity, common.plot)
}

#[derive(Serialize)]
struct DiscriminateRunConfig {
    n: usize,
    a_size: usize,
    t: f64,
    dataset_size: usize,
    depth: usize,
    iterations: usize,
    step: f64,
    seed: u64,
}

#[derive(Serialize)]
struct DiscriminateSummary {
    initial_loss: f64,
    final_loss: f64,
    train_accuracy: f64,
    final_params: Vec<f64>,
}

fn discriminate(args: DiscriminateArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let config = DiscriminateRunConfig {
        n: src.required(args.n, "n")?,
        a_size: src.optional(args.a_size, "a_size", 2)?,
        t: src.required(args.t, "t")?,
        dataset_size: src.required(args.dataset_size, "dataset_size")?,
        depth: src.optional(args.depth, "depth", 2)?,
        iterations: src.required(args.iterations, "iterations")?,
        step: src.optional(args.step, "step", 0.05)?,
        seed: common.seed,
    };
    let provenance = Provenance::new("discriminate", &config, common.seed)?;
    let result = drivers::discriminate_experiment(
        config.n,
        config.a_size,
        config.t,
        config.dataset_size,
        config.depth,
        config.iterations,
        config.step,
        config.seed,
    )?;
    let cells: Vec<Vec<String>> = result
        .training
        .loss_trajectory
        .iter()
        .enumerate()
        .map(|(i, l)| vec![cell_usize(i), cell_f64(*l)])
        .collect();
    let paths = OutputPaths::new(&common.out_dir, "discriminate");
    write_csv(&paths.csv, &provenance, &["iteration", "loss"], &cells)?;
    write_summary(
        &paths.summary,
        &provenance,
        &DiscriminateSummary {
            initial_loss: result.initial_loss,
            final_loss: result.final_loss,
            train_accuracy: result.train_accuracy,
            final_params: result.training.final_params.clone(),
        },
    )?;
    maybe_plot(&paths, PlotKind::Discriminate, common.plot)
}

#[derive(Serialize)]
struct ConcentrationSummary {
    instances: usize,
    violations: usize,
    min_margin: f64,
}

fn concentration(args: ConcentrationArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let config = drivers::ConcentrationConfig {
        n_choices: src.required(args.n, "n")?,
        depth_choices: src.optional(args.depth, "depth", vec![1, 2])?,
        instances: src.required(args.samples, "samples")?,
        evolve_t: src.optional(args.evolve_t, "evolve_t", 1.0)?,
        seed: common.seed,
    };
    let provenance = Provenance::new("concentration", &config, common.seed)?;
    let rows = drivers::concentration_sweep(&config)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cell_usize(r.index),
                cell_usize(r.n),
                cell_usize(r.depth),
                r.family.to_string(),
                r.observable.clone(),
                cell_f64(r.f_value),
                cell_f64(r.f_trv),
                cell_f64(r.bound),
                cell_f64(r.margin),
            ]
        })
        .collect();
    let paths = OutputPaths::new(&common.out_dir, "concentration");
    write_csv(
        &paths.csv,
        &provenance,
        &["instance", "n", "depth", "family", "observable", "f_value", "f_trv", "bound", "margin"],
        &cells,
    )?;
    let summary = ConcentrationSummary {
        instances: rows.len(),
        violations: rows.iter().filter(|r| r.margin < 0.0).count(),
        min_margin: rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
    };
    write_summary(&paths.summary, &provenance, &summary)?;
    maybe_plot(&paths, PlotKind::Concentration, common.plot)
}

#[derive(Serialize)]
struct HaarRunConfig {
    dim: usize,
    samples: u64,
    seed: u64,
}

fn haar_check(args: HaarCheckArgs) -> Result<(), LabError> {
    let src = ConfigSource::load(args.common.config.as_deref())?;
    let common = resolve_common(&src, &args.common)?;
    let config = HaarRunConfig {
        dim: src.optional(args.dim, "dim", 4)?,
        samples: src.required(args.samples, "samples")?,
        seed: common.seed,
    };
    let provenance = Provenance::new("haar-check", &config, common.seed)?;
    let result = drivers::haar_moment_experiment(config.dim, config.samples, config.seed)?;
    let cells = vec![
        vec![
            cell_usize(result.dim),
            cell_u64(result.samples),
            "abs_sq".to_string(),
            cell_f64(result.mean_abs_sq),
            cell_f64(result.se_abs_sq),
            cell_f64(result.expected_abs_sq),
        ],
        vec![
            cell_usize(result.dim),
            cell_u64(result.samples),
            "abs_fourth".to_string(),
            cell_f64(result.mean_abs_fourth),
            cell_f64(result.se_abs_fourth),
            cell_f64(result.expected_abs_fourth),
        ],
    ];
    let paths = OutputPaths::new(&common.out_dir, "haar_check");
    write_csv(
        &paths.csv,
        &provenance,
        &["dim", "samples", "moment", "empirical", "std_error", "analytic"],
        &cells,
    )?;
    write_summary(&paths.summary, &provenance, &result)?;
    maybe_plot(&paths, PlotKind::HaarCheck, common.plot)
}
