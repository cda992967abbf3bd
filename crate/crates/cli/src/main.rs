//! `rsobf`: scaling-law values, config-driven simulations and figure CSVs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rsobf::analytics::{scaling_law, LawParams, ScalingLaw};
use rsobf::harness::{
    default_seed, run_figure, write_curve_csv, FigureId, FigureJob, SimulationConfig,
};
use rsobf::Error;

const DEFAULT_SLOTS: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "rsobf",
    version,
    about = "Opportunistic scheduling with reconfigurable-surface beamforming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a large-K scaling law and print it with 7 decimals.
    Analytic(AnalyticArgs),
    /// Run the Monte-Carlo estimator on a TOML config and write a CSV row.
    Simulate(SimulateArgs),
    /// Reproduce a figure as one CSV per curve.
    Figure(FigureArgs),
}

#[derive(Args)]
struct AnalyticArgs {
    /// Law id, e.g. eq3, cor1, thm4.
    #[arg(long)]
    law: ScalingLaw,
    /// Number of users.
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 1.0)]
    rho_r: f64,
    #[arg(long, default_value_t = 1.0)]
    rho_b: f64,
    /// RS elements.
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    /// BS antennas.
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa_b: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_max: f64,
    /// OFDMA subcarriers.
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Trace of the inverse LoS correlation; defaults to M.
    #[arg(long)]
    trace_r_inv: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `slots` in the config.
    #[arg(long)]
    slots: Option<u64>,
    /// Overrides `seed` in the config and RSOBF_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2a, fig2b, fig2c, fig3, fig4, fig5 or fig6.
    id: FigureId,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    slots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated sweep grid replacing the figure default.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

/// Exit status of a failed command.
enum Failure {
    Usage(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidScenario(_)
            | Error::Config(_) => Failure::Usage(e),
            _ => Failure::Runtime(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analytic(a) => {
            let params = LawParams {
                rho_r: a.rho_r,
                rho_b: a.rho_b,
                elements: a.n,
                antennas: a.m,
                beta: a.beta,
                kappa: a.kappa,
                kappa_b: a.kappa_b,
                lambda_max: a.lambda_max,
                subcarriers: a.l,
                trace_r_inv: a.trace_r_inv,
            };
            println!("{:.7}", scaling_law(a.law, &params, a.k)?);
        }
        Command::Simulate(s) => {
            let config = SimulationConfig::load(&s.config).map_err(Failure::Usage)?;
            let seed = match s.seed.or(config.seed) {
                Some(seed) => seed,
                None => default_seed()?,
            };
            let slots = s.slots.or(config.slots).unwrap_or(DEFAULT_SLOTS);
            let curve = config.run(slots, seed)?;
            write_curve_csv(&s.out, &curve)?;
            let p = curve.points[0];
            println!(
                "K = {}: {:.7} ± {:.7} bits/s/Hz -> {}",
                p.x,
                p.value,
                p.stderr,
                s.out.display()
            );
        }
        Command::Figure(f) => {
            let mut job = FigureJob::new(f.id, f.out);
            job.seed = match f.seed {
                Some(seed) => seed,
                None => default_seed()?,
            };
            if let Some(slots) = f.slots {
                job.slots = slots;
            }
            if let Some(grid) = f.grid {
                job.grid = grid;
            }
            job.validate()?;
            for path in run_figure(&job)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
