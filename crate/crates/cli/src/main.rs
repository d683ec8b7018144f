use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fbl_cli::{report, run, RunOptions};

#[derive(Parser)]
#[command(name = "fbl", version, about = "Fractal Burgers experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run K members with seeds seed..seed+K into member_NNN subdirectories.
        #[arg(long, value_name = "K")]
        ensemble: Option<usize>,
    },
    /// Write summary.json and series/*.csv for a run directory.
    Report { run_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            ensemble,
        } => run(&config, &RunOptions { out, seed, ensemble }).map(|dir| println!("{}", dir.display())),
        Command::Report { run_dir } => {
            report(&run_dir).map(|s| println!("{}", serde_json::to_string_pretty(&s).unwrap_or_default()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fbl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
