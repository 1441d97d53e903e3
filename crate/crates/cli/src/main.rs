use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use effham_cli::{run, Command, Overrides};

#[derive(Parser)]
#[command(
    name = "effham",
    version,
    about = "Effective-Hamiltonian search experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evolution method: exact, trotter or variational; overrides `evolution.method`.
    #[arg(long)]
    method: Option<String>,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Average fidelity over a (lambda, kappa) grid.
    Scan(Common),
    /// Accelerated search over the grid's candidates.
    Grover(Common),
    /// Variational trajectory with an optional Trotter reference.
    Variational(Common),
    /// Reference fixtures from dense diagonalization.
    Oracle(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Scan(c) => (Command::Scan, c),
        Sub::Grover(c) => (Command::Grover, c),
        Sub::Variational(c) => (Command::Variational, c),
        Sub::Oracle(c) => (Command::Oracle, c),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let over = Overrides {
        out: common.out,
        method: common.method,
    };
    match run(command, &common.config, &over) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", outcome.summary);
            println!(
                "wrote {} files to {}",
                outcome.files.len(),
                outcome.out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
