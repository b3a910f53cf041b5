use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2flow::HamiltonianCoeffs;
use g2flow_cli::config::parse_monitors;
use g2flow_cli::phase::{bs, sweep_reduced, PhaseRequest};
use g2flow_cli::{ensemble, run, scale, selftest, CliError, CliResult, Prepared, RunConfig};

#[derive(Parser)]
#[command(name = "g2flow", version, about = "Hamiltonian flow of invariant metrics on 3-dimensional Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a JSON configuration and emit one CSV row per sample.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Comma-separated monitors, overriding the config (state,hamiltonian,constraint,torsion,adm).
        #[arg(long)]
        monitors: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Isotropic reduction: (a, b) trajectory with x = a², y = ab and the regime of S = bI.
    Bs {
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        a0: f64,
        #[arg(long, allow_negative_numbers = true)]
        b0: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Also integrate the embedded full flow and append deviation columns.
        #[arg(long)]
        compare_full: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Rescale the configured orbit and report its residual against the (−aH₁ + bH₂) flow.
    ScaleCheck {
        config: PathBuf,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Parallel sweep: a reduced (σ, a₀, b₀) grid, or a seeded ensemble around a configuration.
    Sweep {
        /// Ensemble mode: perturb this configuration instead of sweeping the reduced grid.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.25, 0.0, -0.25])]
        sigma: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1.0])]
        a0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.0, 0.0, 1.0])]
        b0: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Check the core invariants and print per-suite counts.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flip one sign of the Levi-Civita symbol before running (negative control).
        #[arg(long, hide = true)]
        corrupt_epsilon: bool,
    },
}

fn open(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn prepare(path: &Path, seed: Option<u64>) -> CliResult<Prepared> {
    let mut p = RunConfig::load(path)?.prepare()?;
    if let Some(seed) = seed {
        p.seed = seed;
    }
    Ok(p)
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { config, output, monitors, seed } => {
            let mut p = prepare(&config, seed)?;
            if let Some(list) = monitors {
                p.monitors = parse_monitors(&list).map_err(|m| CliError::argument("monitors", m))?;
            }
            match run::run(&p, &mut *open(output.out.as_deref())?)? {
                Some(stop) => Err(CliError::EarlyStop(stop.to_string())),
                None => Ok(()),
            }
        }
        Command::Bs { sigma, a0, b0, t_end, dt, compare_full, output } => {
            let req = PhaseRequest { sigma, a0, b0, t_end, dt };
            match bs(&req, compare_full, &mut *open(output.out.as_deref())?)? {
                Some(t) => Err(CliError::EarlyStop(format!("a left the domain a > 0 at t = {t}"))),
                None => Ok(()),
            }
        }
        Command::ScaleCheck { config, kappa, a, b, output } => {
            let p = prepare(&config, None)?;
            let report = scale::scale_check(&p, kappa, HamiltonianCoeffs::new(a, b))?;
            scale::write_report(&report, &mut *open(output.out.as_deref())?)
        }
        Command::Sweep { config, count, amplitude, sigma, a0, b0, t_end, dt, seed, output } => {
            let stopped = match config {
                Some(path) => {
                    let p = prepare(&path, seed)?;
                    ensemble::sweep_ensemble(&p, count, amplitude, &mut *open(output.out.as_deref())?)?
                }
                None => sweep_reduced(&sigma, &a0, &b0, t_end, dt, &mut *open(output.out.as_deref())?)?,
            };
            if stopped > 0 {
                Err(CliError::EarlyStop(format!("{stopped} trajectories stopped early")))
            } else {
                Ok(())
            }
        }
        Command::Selftest { seed, corrupt_epsilon } => {
            g2flow::mat3::set_epsilon_fault(corrupt_epsilon);
            selftest::selftest(seed, &mut io::stdout().lock())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("g2flow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
