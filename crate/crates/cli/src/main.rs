use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use proxreg_cli::commands::{check, project, reproduce, solve, Ctx, Output};

#[derive(Parser, Debug)]
#[command(name = "proxreg", version, about = "Projections, cones and minimizing curves in prox-regular sets")]
struct Cli {
    /// Manifold name (euclidean, euclidean:dim=3, sphere2, hyperbolic2) or JSON file.
    #[arg(long, global = true)]
    manifold: Option<String>,
    /// Builtin set (e.g. sphere-cap:theta0=2.0944, comb:N=50) or JSON set file.
    #[arg(long, global = true)]
    set: Option<String>,
    /// Curve JSON file: {"times": [...], "points": [[...]], "breakpoints": [...]}.
    #[arg(long, global = true)]
    curve: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override for the command's main assertion.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sample, node or direction count override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write an SVG of length and residual traces (next to --out, or ./<scenario>.svg).
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Metric projection of a point onto --set.
    Project {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Grid search with this spacing (comb only); bare --grid uses 1e-3.
        #[arg(long, num_args = 0..=1, default_missing_value = "0.001")]
        grid: Option<f64>,
        #[arg(long)]
        m_start: Option<usize>,
    },
    /// Run a worked example end to end and assert its numbers.
    Reproduce {
        #[arg(value_parser = ["sphere", "hyperbolic", "comb"])]
        example: String,
    },
    /// Run a seeded invariant suite.
    Check {
        #[arg(value_parser = check::SUITES)]
        suite: String,
        /// Point near the boundary used to pick the base point.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Shorten --curve inside --set.
    Solve {
        /// Solver parameters JSON: {"max_iter": .., "tol_stat": .., "step0": ..}.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Write the final curve as JSON.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Output> {
    let ctx = Ctx {
        manifold: cli.manifold.clone(),
        set: cli.set.clone(),
        curve: cli.curve.clone(),
        seed: cli.seed,
        tol: cli.tol,
        n: cli.n,
    };
    match &cli.command {
        Command::Project { point, grid, m_start } => project::run(&ctx, point, *grid, *m_start),
        Command::Reproduce { example } => match example.as_str() {
            "sphere" => reproduce::sphere(&ctx),
            "hyperbolic" => reproduce::hyperbolic(&ctx),
            _ => reproduce::comb(&ctx),
        },
        Command::Check { suite, point } => check::run(&ctx, suite, point.as_deref()),
        Command::Solve { params, curve_out } => solve::run(&ctx, params.as_deref(), curve_out.as_deref()),
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<()> {
    let text = match cli.format {
        Format::Json => output.report.to_json()?,
        Format::Csv => output.report.to_csv()?,
    };
    match &cli.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if cli.plot {
        if let Some(svg) = &output.plot {
            let path = match &cli.out {
                Some(p) => p.with_extension("svg"),
                None => Path::new(&output.report.scenario).with_extension("svg"),
            };
            fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.report.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("proxreg: one or more assertions failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("proxreg: {e:#}");
            ExitCode::from(2)
        }
    }
}
