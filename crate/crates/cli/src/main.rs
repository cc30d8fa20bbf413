use std::process::ExitCode;

use clap::Parser;
use collective_cli::args::{Cli, Command};
use collective_cli::{run_cluster, run_pipeline, run_rpr, run_synth, CliError, RunSummary};

fn run(cli: Cli) -> Result<RunSummary, CliError> {
    match cli.command {
        Command::Synth(a) => run_synth(&a.into()),
        Command::Analyze(a) => {
            let cfg = a.into_config().map_err(CliError::config)?;
            run_pipeline(&cfg)
        }
        Command::Cluster(a) => run_cluster(&a.into()),
        Command::Rpr(a) => run_rpr(&a.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            if let (Some(d), Some(s)) = (summary.delta, summary.delta_std) {
                println!("assets: {}  delta: {d:.6} ± {s:.6}", summary.n_assets);
            }
            if let Some(k) = summary.communities {
                println!("communities: {k}");
            }
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
