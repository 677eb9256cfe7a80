use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ctrw_patterns::config::ExperimentConfig;
use ctrw_patterns::experiment::{self, is_config_error};
use ctrw_patterns::figures::{self, FigureOptions};
use ctrw_patterns::Error;

#[derive(Parser)]
#[command(name = "ctrw-patterns", version, about = "Reaction-diffusion patterns on networks with CTRW transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Regenerate the data tables for every figure.
    Figures {
        #[arg(long, default_value_t = 50, value_parser = parse_size)]
        size: usize,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
}

fn parse_size(s: &str) -> Result<usize, String> {
    match s {
        "50" => Ok(50),
        "500" => Ok(500),
        _ => Err(format!("size must be 50 or 500, got {s}")),
    }
}

fn exit_code(err: &Error) -> ExitCode {
    if is_config_error(err) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => experiment::run_file(&config).map(|summary| {
            for file in &summary.files {
                println!("{}", summary.output_dir.join(file).display());
            }
        }),
        Command::Validate { config } => ExperimentConfig::load(&config).map(|c| {
            println!("{}: ok ({})", config.display(), c.kind);
        }),
        Command::Figures { size, out } => {
            figures::reproduce(&FigureOptions { size, out_dir: out, ..Default::default() }).map(|report| {
                for line in report.lines() {
                    println!("{line}");
                }
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
