use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dicke_lab::io::{error_record, run_from_path, Command, RunOptions};

#[derive(Parser)]
#[command(name = "dicke", version, about = "Dissipative multi-mode Dicke laser laboratory")]
struct Cli {
    /// One of: macro, scan, micro, entropy, oracle, compare.
    command: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .command
        .parse::<Command>()
        .and_then(|cmd| run_from_path(cmd, &cli.config, &RunOptions { seed: cli.seed, out: cli.out }));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_record(Some(&cli.command), &e));
            ExitCode::FAILURE
        }
    }
}
