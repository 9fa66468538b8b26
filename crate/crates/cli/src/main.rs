use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gpw_core::exec::Exec;
use gpw_core::invariant::{Grid, ALPHA_K_MAX};

mod commands;

use commands::Report;

/// Curvature, geodesics, models and invariants of generalized plane wave manifolds.
#[derive(Debug, Parser)]
#[command(name = "gpw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for the JSON and Markdown reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Run batches on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct InstanceArg {
    /// Instance JSON file. A missing file named after a preset
    /// (`H_10_1.json`, `S_14.json`, `N_10_exp.json`, ...) loads that preset.
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Chart, signature and the shape of f.
    Describe(InstanceArg),
    /// Covariant derivatives of the curvature tensor at sample points.
    Curvature {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Closed-form geodesic samples as CSV.
    Geodesic {
        #[command(flatten)]
        instance: InstanceArg,
        /// Number of samples on t in [0, 1].
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Scalar Weyl invariants at sample points.
    Weyl {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value_t = 8)]
        max_slots: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Certify a model of the given order at sample points.
    Certify {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Symmetric / curvature-homogeneous / homogeneous verdicts.
    Classify {
        #[command(flatten)]
        instance: InstanceArg,
        /// z0 grid as "lo:hi:n".
        #[arg(long, default_value = "-2:2:17")]
        grid: Grid,
    },
    /// Compare the alpha invariants of two points and build the isometry.
    Isometry {
        #[command(flatten)]
        instance: InstanceArg,
        /// Frame normalization order; defaults to the largest certified one.
        #[arg(long)]
        order: Option<usize>,
        /// Sample points for the pullback check.
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = ALPHA_K_MAX)]
        k_max: usize,
    },
    /// Run every verification suite (or the instance's selection).
    VerifyAll {
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        seed: cli.seed,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let (name, result) = match &cli.command {
        Command::Describe(a) => ("describe", commands::describe(&a.instance)),
        Command::Curvature { instance, order, points } => {
            ("curvature", commands::curvature(&ctx, &instance.instance, *order, *points))
        }
        Command::Geodesic { instance, points } => ("geodesic", commands::geodesic(&ctx, &instance.instance, *points)),
        Command::Weyl {
            instance,
            max_slots,
            points,
        } => ("weyl", commands::weyl(&ctx, &instance.instance, *max_slots, *points)),
        Command::Certify {
            instance,
            order,
            points,
        } => ("certify", commands::certify(&ctx, &instance.instance, *order, *points)),
        Command::Classify { instance, grid } => ("classify", commands::classify(&ctx, &instance.instance, grid)),
        Command::Isometry {
            instance,
            order,
            points,
            k_max,
        } => (
            "isometry",
            commands::isometry(&ctx, &instance.instance, *order, *points, *k_max),
        ),
        Command::VerifyAll { instance } => ("verify-all", commands::verify_all(&ctx, instance.as_deref())),
    };
    let report = result.unwrap_or_else(Report::from_error);
    match report.emit(name, cli.out.as_deref()) {
        Ok(()) => report.exit_code(),
        Err(e) => {
            eprintln!("gpw: cannot write reports: {e}");
            ExitCode::from(3)
        }
    }
}
