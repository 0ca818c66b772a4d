use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadnn::cli::{cmd_audit, cmd_compare, cmd_run, RunManifest};

#[derive(Parser)]
#[command(name = "quadnn", version, about = "Quadrotor geometric adaptive control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write log.csv and metrics.txt.
    Run(RunArgs),
    /// Run a scenario under several controller variants.
    Compare(RunArgs),
    /// Check the Lyapunov gain conditions for an assumptions file.
    Audit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "variant", num_args = 1..)]
    variants: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl From<RunArgs> for RunManifest {
    fn from(a: RunArgs) -> Self {
        RunManifest { config: a.config, out: a.out, variants: a.variants, seed: a.seed }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match cli.command {
        Command::Run(a) => cmd_run(&a.into(), &mut out, &mut err),
        Command::Compare(a) => cmd_compare(&a.into(), &mut out, &mut err),
        Command::Audit { config, out: dir } => cmd_audit(&config, dir.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
