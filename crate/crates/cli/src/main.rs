use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use supertime_cli::{run, CliError, RunConfig, Suite};

#[derive(Parser, Debug)]
#[command(name = "supertime", version, about = "Runs the superspace verification suites")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Hamiltonian polynomial in q1..qn, p1..pn; overrides the config.
    #[arg(long, global = true)]
    hamiltonian: Option<String>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exact symbolic identities over a random family and the given H.
    Identities,
    /// Extended flow, Jacobi fields and conserved charges.
    Dynamics,
    /// Koopman-von Neumann waves on a phase-space grid.
    Kvn,
    /// Time-sliced path integrals and Dyson-Schwinger residuals.
    Pathint,
    /// Quantum, classical and ghost coherent states.
    Coherent,
    /// Every suite in turn.
    All,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(h) = &args.hamiltonian {
        cfg.system.hamiltonian = h.clone();
        // a new polynomial decides its own dof unless the config pinned it
        if args.config.is_none() {
            cfg.system.dof = None;
        }
    }
    if let Some(o) = &args.out {
        cfg.output.dir = o.clone();
    }
    if let Some(s) = args.seed {
        cfg.system.seed = s;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let suites: Vec<Suite> = match args.command {
        Command::Identities => vec![Suite::Identities],
        Command::Dynamics => vec![Suite::Dynamics],
        Command::Kvn => vec![Suite::Kvn],
        Command::Pathint => vec![Suite::Pathint],
        Command::Coherent => vec![Suite::Coherent],
        Command::All => Suite::ALL.to_vec(),
    };
    let result = load(&args).and_then(|cfg| Ok(cfg.prepare()?)).and_then(|prep| run(&prep, &suites));
    match result {
        Ok(report) => {
            if args.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
