use std::path::PathBuf;
use std::process::ExitCode;

use amenable::experiment::{run, Command, RunOptions};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, ValueEnum)]
enum Sub {
    Density,
    Tile,
    Compare,
    Encode,
    Entropy,
    Render,
    Selftest,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Density => Command::Density,
            Sub::Tile => Command::Tile,
            Sub::Compare => Command::Compare,
            Sub::Encode => Command::Encode,
            Sub::Entropy => Command::Entropy,
            Sub::Render => Command::Render,
            Sub::Selftest => Command::Selftest,
        }
    }
}

/// Finite-window experiments on amenable groups.
///
/// Exit codes: 0 ok, 2 config, 3 margin, 4 hypothesis, 5 internal.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory for artifacts, manifest and timings.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run the invariant suite and fail on any violation.
    #[arg(long)]
    check: bool,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let opts = RunOptions { config: cli.config, out: cli.out, seed: cli.seed, check: cli.check, threads: cli.threads };
    match run(cli.command.into(), &opts) {
        Ok(summary) => {
            if opts.out.is_none() {
                for (name, body) in &summary.artifacts {
                    println!("== {name}");
                    print!("{body}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
