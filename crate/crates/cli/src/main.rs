use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ergoswitch_cli::config::RunConfig;
use ergoswitch_cli::runner::{run_to_files, RESIDUAL_GATE};
use ergoswitch_cli::verify::run_suite;
use ergoswitch_cli::CliError;

/// Ergotropy of quantum-switched channel pairs: sweeps, oracles, and
/// verification suites.
#[derive(Parser)]
#[command(name = "ergoswitch", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario configuration and write results.csv / results.json.
    Run {
        /// Path to a flat key-value configuration file.
        config: PathBuf,
        /// Output directory (overrides the `[output] dir` key).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the primary sweep point count.
        #[arg(long)]
        points: Option<usize>,
        /// Override the run seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite (cptp | switch | ergotropy | oracles | all).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("ERGOSWITCH_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            out,
            points,
            seed,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut run_config = RunConfig::parse(&text)?;
            if let Some(points) = points {
                match run_config.sweep.as_mut() {
                    Some(axis) => axis.count = points,
                    None => {
                        return Err(CliError::Key {
                            section: "sweep".into(),
                            key: "count".into(),
                            message: "--points given but the configuration has no sweep".into(),
                        })
                    }
                }
            }
            if let Some(seed) = seed {
                run_config.seed = seed;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&run_config.out_dir));
            let (csv_path, json_path, max_residual) = run_to_files(&run_config, &out_dir)?;
            println!("wrote {}", csv_path.display());
            println!("wrote {}", json_path.display());
            match max_residual {
                Some(residual) => {
                    println!("max_oracle_residual={residual:.3e}");
                    if residual > RESIDUAL_GATE {
                        return Err(CliError::OracleResidual { residual });
                    }
                }
                None => println!("max_oracle_residual=NaN"),
            }
            Ok(())
        }
        Command::Verify { suite, seed } => {
            let (report, ok) = run_suite(&suite, seed)?;
            print!("{report}");
            if ok {
                Ok(())
            } else {
                Err(CliError::Key {
                    section: "verify".into(),
                    key: "suite".into(),
                    message: "one or more checks failed".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::OracleResidual { residual }) => {
            eprintln!("error: oracle residual {residual:.3e} exceeds {RESIDUAL_GATE:.1e}");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
