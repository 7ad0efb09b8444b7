use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use poplearn_cli::{cmd_rpp, cmd_run, CliError, RppOptions, RunOptions};

#[derive(Parser)]
#[command(name = "poplearn", version, about = "Population learning in symmetric zero-sum games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a population from a JSON config and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Relative population performance between the checkpoints of two runs.
    Rpp {
        run_a: PathBuf,
        run_b: PathBuf,
        /// Episodes per member pair for sampled games.
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "rpp.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { config, seed, out, workers } => cmd_run(&config, &RunOptions { seed, out, workers }).map(|summary| {
            if let Some(last) = summary.metrics.last() {
                println!(
                    "epoch {}: effective size {}, exploitability {:.6}",
                    last.epoch, last.effective_size, last.exploitability
                );
            }
            println!("wrote {}", summary.out_dir.display());
        }),
        Command::Rpp { run_a, run_b, episodes, seed, out, workers } => {
            cmd_rpp(&run_a, &run_b, &RppOptions { episodes, seed, out, workers }).map(|(rpp, _)| println!("{}", poplearn::serialize::format_value(rpp)))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("poplearn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
