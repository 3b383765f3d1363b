//! `frechet-bench`: seeded experiments for the Fréchet mean solvers,
//! Jacobians, pseudo-means and batch normalization.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperfrechet::bench::{self, BenchConfig, Format, GradCheckConfig, LrGrid};
use hyperfrechet::pseudo::TangentBase;
use hyperfrechet::solvers::SolverKind;
use hyperfrechet::{Model, Result, WeightedPointCloud};

#[derive(Parser, Debug)]
#[command(name = "frechet-bench", version, about = "Benchmarks for weighted Fréchet means in hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// poincare, hyperboloid or euclidean.
    #[arg(long, global = true)]
    model: Option<Model>,
    /// Curvature K < 0 (ignored for euclidean).
    #[arg(long, global = true, allow_hyphen_values = true)]
    curvature: Option<f64>,
    /// Intrinsic dimension n.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Points per cloud t.
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Distance to the reference mean that counts as converged.
    #[arg(long, global = true, default_value_t = 1e-12)]
    eps: f64,
    /// Comma-separated subset of ours,karcher,rgd,rgd_grid.
    #[arg(long, global = true, value_delimiter = ',')]
    solvers: Option<Vec<SolverKind>>,
    /// RGD grid search as start:stop:step.
    #[arg(long, global = true)]
    lr_grid: Option<String>,
    /// Standard deviation of the tangent Gaussian used for sampling.
    #[arg(long, global = true)]
    scale: Option<f64>,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample random clouds and write them in the point-cloud schema.
    GenPoints,
    /// Iterations to reach the reference mean, per solver.
    BenchForward,
    /// Analytic Jacobians against finite differences; fails above 1e-4.
    GradCheck {
        /// Perturb the analytic Jacobians to test the harness itself.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Variance excess of pseudo-means over the Fréchet mean.
    PseudoCompare {
        /// Tangent-aggregation base: origin or first_point.
        #[arg(long, default_value = "origin")]
        base: String,
    },
    /// Batch-norm Euclidean equivalence check and a hyperbolic run.
    RbnDemo,
}

fn config(cli: &Cli, dim: usize, points: usize, trials: usize, model: Model) -> Result<BenchConfig> {
    let model = cli.model.unwrap_or(model);
    let mut c = BenchConfig {
        model,
        curvature: cli.curvature.unwrap_or(-1.0),
        dim: cli.dim.unwrap_or(dim),
        points: cli.points.unwrap_or(points),
        trials: cli.trials.unwrap_or(trials),
        seed: cli.seed,
        epsilon_target: cli.eps,
        lr_grid: LrGrid::default_for(model),
        ..Default::default()
    };
    if let Some(s) = &cli.solvers {
        c.solvers = s.clone();
    }
    if let Some(g) = &cli.lr_grid {
        c.lr_grid = LrGrid::parse(g)?;
    }
    if let Some(s) = cli.scale {
        c.scale = s;
    }
    c.validate()?;
    Ok(c)
}

fn emit(cli: &Cli, text: String) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::GenPoints => {
            let c = config(cli, 16, 10, 1, Model::Poincare)?;
            let g = c.geometry()?;
            let clouds = (0..c.trials)
                .map(|t| bench::gen_points(g, c.dim, c.points, c.scale, &mut bench::trial_rng(c.seed, t as u64)))
                .collect::<Result<Vec<WeightedPointCloud>>>()?;
            let text = match cli.format {
                Format::Csv => bench::clouds_csv(&clouds),
                Format::Json if clouds.len() == 1 => clouds[0].to_json()?,
                Format::Json => serde_json::to_string_pretty(&clouds.iter().map(|c| c.to_file()).collect::<Vec<_>>())?,
            };
            emit(cli, text)?;
            Ok(true)
        }
        Command::BenchForward => {
            let c = config(cli, 16, 10, 10, Model::Poincare)?;
            let r = bench::bench_forward(&c)?;
            let text = match cli.format {
                Format::Csv => bench::forward_csv(&r),
                Format::Json => bench::json("bench-forward", &r)?,
            };
            emit(cli, text)?;
            Ok(true)
        }
        Command::GradCheck { corrupt } => {
            let mut gc = GradCheckConfig { seed: cli.seed, corrupt: *corrupt, ..Default::default() };
            if let Some(m) = cli.model {
                gc.models = vec![m];
            }
            if let Some(k) = cli.curvature {
                gc.curvatures = vec![k];
            }
            if let Some(n) = cli.dim {
                gc.dims = vec![n];
            }
            if let Some(t) = cli.points {
                gc.points = vec![t];
            }
            if let Some(s) = cli.scale {
                gc.scale = s;
            }
            let r = bench::grad_check(&gc)?;
            let text = match cli.format {
                Format::Csv => bench::gradcheck_csv(&r),
                Format::Json => bench::json("grad-check", &r)?,
            };
            emit(cli, text)?;
            Ok(r.passed)
        }
        Command::PseudoCompare { base } => {
            let base = match base.as_str() {
                "origin" => TangentBase::Origin,
                "first_point" | "first-point" => TangentBase::FirstPoint,
                other => return Err(hyperfrechet::Error::InvalidInput(format!("unknown base `{other}`"))),
            };
            let c = config(cli, 16, 10, 100, Model::Poincare)?;
            let r = bench::pseudo_compare(&c, base)?;
            let text = match cli.format {
                Format::Csv => bench::pseudo_csv(&r),
                Format::Json => bench::json("pseudo-compare", &r)?,
            };
            emit(cli, text)?;
            Ok(true)
        }
        Command::RbnDemo => {
            let c = config(cli, 4, 32, 5, Model::Poincare)?;
            let r = bench::rbn_demo(&c)?;
            let text = match cli.format {
                Format::Csv => bench::rbn_csv(&r),
                Format::Json => bench::json("rbn-demo", &r)?,
            };
            emit(cli, text)?;
            Ok(r.euclidean_passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
