use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "quantumness", version, about = "Majorization witnesses for uncertainty, coherence and nonlocality")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for resampling, random starts and simulated counts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the tolerance used for the verdicts of the subcommand.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropic lower bounds on a grid of qubit overlaps.
    Bounds {
        /// Entropy family; all three when omitted.
        #[arg(long, value_enum)]
        entropy: Option<EntropyArg>,
        #[command(flatten)]
        order: Order,
        /// Number of overlaps between 1/√2 and 1.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Measured entropy totals from the marginal fixture against ideal values.
    Entropy {
        #[arg(long, value_enum, default_value_t = EntropyArg::Shannon)]
        entropy: EntropyArg,
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        data: Data,
    },
    /// Coherence from the basis-scan fixture.
    Coherence {
        #[command(flatten)]
        data: Data,
    },
    /// CHSH statistics from the coincidence fixture.
    Chsh {
        #[command(flatten)]
        data: Data,
        /// Number of Poisson resamples.
        #[arg(long, default_value_t = quantumness::experiment::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Svetlichny values of GHZ, local and non-signaling correlations.
    Svetlichny {
        /// Number of random starts for the GHZ angle search.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Bell-state witness read as an uncertainty relation on |Φ(θ)>.
    Witness {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0])]
        theta: Vec<f64>,
    },
    /// Tomography of |Φ(θ)> from simulated Poisson counts.
    Tomography {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0])]
        theta: Vec<f64>,
        /// Mean count per projector.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct Order {
    /// Order of the Renyi or Tsallis entropy.
    #[arg(long, default_value_t = 2.0)]
    k: f64,
}

#[derive(Args, Debug)]
struct Data {
    /// Directory holding table1.csv to table4.csv.
    #[arg(long, default_value = "fixtures")]
    fixtures: PathBuf,
    /// Restrict to these angles in degrees.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EntropyArg {
    Shannon,
    Renyi,
    Tsallis,
}

fn run(cli: &Cli) -> quantumness::Result<Outcome> {
    let tol = cli.tolerance;
    match &cli.command {
        Command::Bounds { entropy, order, points } => {
            let kinds = match entropy {
                Some(e) => vec![commands::entropy_kind(*e, order.k)?],
                None => vec![
                    commands::entropy_kind(EntropyArg::Shannon, order.k)?,
                    commands::entropy_kind(EntropyArg::Renyi, order.k)?,
                    commands::entropy_kind(EntropyArg::Tsallis, order.k)?,
                ],
            };
            commands::bounds(&kinds, *points, tol)
        }
        Command::Entropy { entropy, order, data } => {
            commands::entropy(commands::entropy_kind(*entropy, order.k)?, &data.fixtures, &data.theta, tol)
        }
        Command::Coherence { data } => commands::coherence(&data.fixtures, &data.theta, tol),
        Command::Chsh { data, samples } => commands::chsh(&data.fixtures, &data.theta, *samples, cli.seed),
        Command::Svetlichny { samples } => commands::svetlichny(*samples, cli.seed, tol),
        Command::Witness { theta } => commands::witness(theta, tol),
        Command::Tomography { theta, samples } => commands::tomography(theta, *samples as f64, cli.seed, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&outcome.json).expect("serializable report");
        s.push('\n');
        s
    } else {
        outcome.csv
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        let report = serde_json::json!({ "failures": outcome.failures });
        eprintln!("{report}");
        ExitCode::FAILURE
    }
}
