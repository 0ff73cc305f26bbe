use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hullsweep::sweep::Mode;
use hullsweep_cli::config::{self, Overrides};
use hullsweep_cli::{extreme, report, run, CliError, Status};

#[derive(Parser)]
#[command(name = "sweep", version, about = "Semi-submersible hull design sweep")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Grid overrides, e.g. `d=15..24:1 hhp=1,4.5,8`.
    #[arg(long, num_args = 1..)]
    designs: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the design grid and write the report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["freq", "time", "both"])]
        mode: Option<String>,
    },
    /// Parked-rotor extreme runs.
    Extreme {
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild ranked tables and summary from a run directory.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

fn prepare(c: &Common, mode: Option<&str>) -> Result<config::RunConfig, CliError> {
    let mut cfg = config::load(&c.config).map_err(CliError::Config)?;
    let o = Overrides {
        mode: mode.map(|m| m.parse::<Mode>()).transpose().map_err(|e| CliError::Config(e.into()))?,
        designs: c.designs.clone(),
        out: c.out.clone(),
        seed: c.seed,
    };
    cfg.apply(&o).map_err(CliError::Config)?;
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(CliError::Config(anyhow::anyhow!("--jobs must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(e.into()))?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, mode } => prepare(common, mode.as_deref()).and_then(|c| run::run(&c)),
        Command::Extreme { common } => prepare(common, None).and_then(|c| extreme::extreme(&c)),
        Command::Report { dir } => report::report(dir),
    };
    match result {
        Ok(s) => {
            if s == Status::Partial {
                eprintln!("finished with failures");
            }
            ExitCode::from(s.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
