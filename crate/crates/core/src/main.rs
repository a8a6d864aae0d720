use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fockalg::experiments::{self, Params, DEFAULT_SEED, EXPERIMENTS};
use fockalg::report::Report;

/// Run Fock-space experiments and write JSON reports.
#[derive(Parser)]
#[command(name = "fockalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment at its defaults, one report file per experiment.
    RunAll {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// List experiment names.
    List,
    #[command(external_subcommand)]
    Experiment(Vec<String>),
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct ExperimentArgs {
    name: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
}

impl From<ParamArgs> for Params {
    fn from(a: ParamArgs) -> Self {
        Params { n: a.n, level: a.level, terms: a.terms, kmax: a.kmax, tol: a.tol, seed: a.seed, grid: a.grid }
    }
}

fn summary(r: &Report) {
    eprintln!("{:<22} {}", r.name, r.verdict);
    for c in r.checks.iter().filter(|c| !c.passed) {
        eprintln!("  failed: {}", c.name);
    }
    for note in r.notes.iter().filter(|n| n.starts_with("error")) {
        eprintln!("  {note}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            EXPERIMENTS.iter().for_each(|name| println!("{name}"));
            return ExitCode::SUCCESS;
        }
        Command::RunAll { out, seed } => run_all(&out, seed),
        Command::Experiment(raw) => {
            let args = ExperimentArgs::try_parse_from(raw).unwrap_or_else(|e| e.exit());
            run_one(args)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_one(args: ExperimentArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let report = experiments::run(&args.name, &args.params.into())?;
    summary(&report);
    match args.out {
        Some(path) => fs::write(path, report.to_json() + "\n")?,
        None => println!("{}", report.to_json()),
    }
    Ok(report.passed())
}

fn run_all(out: &PathBuf, seed: u64) -> Result<bool, Box<dyn std::error::Error>> {
    fs::create_dir_all(out)?;
    let reports = experiments::run_all(seed);
    for r in &reports {
        summary(r);
        fs::write(out.join(format!("{}.json", r.name)), r.to_json() + "\n")?;
    }
    Ok(reports.iter().all(Report::passed))
}
