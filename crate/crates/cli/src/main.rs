use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use surfint_cli::config::Task;
use surfint_cli::{run_invocation, Invocation};

#[derive(Parser)]
#[command(name = "surfint", version, about = "Spectra of Laplacians with (α, β, γ) interface interactions")]
struct Args {
    /// interval, sphere, circle-fem, radial-oracle, m-infinity, compare, certify or sweep
    task: Task,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = run_invocation(&Invocation {
        task: args.task,
        config: args.config,
        out: args.out,
        verbose: args.verbose,
    });
    ExitCode::from(code as u8)
}
