//! Command line front end for the coupled Quicksort experiments.
//!
//! Row data (enumerations, formulas, audit records) goes to `--out` when given
//! and to stdout otherwise, in which case the JSON summary moves to stderr.
//! Experiments without row data print only the summary, on stdout.
//! The exit code is 0 iff every check passed.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use quicksort_limit::experiments::{self, Experiment, ExperimentConfig, OutputFormat};

#[derive(Parser)]
#[command(name = "qslab", version, about = "Quicksort comparison counts coupled with their limit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distribution of K_n over all permutations (n <= 10).
    Enumerate(Common),
    /// Enumerated means against 2(n+1)H_n - 4n.
    MeanCheck(Common),
    /// Var(Y_n - Y) against the exact formula.
    VarianceProfile(Common),
    /// Scaled errors against the standard normal.
    Clt(Common),
    /// ||Y_n - Y||_3 against its asymptotic prediction.
    L3(Common),
    /// Decay of the perturbation term b^(n).
    BnDecay(Common),
    /// Convergence of the coefficients A_0, A_1.
    CoeffConvergence(Common),
    /// Population iteration of the fixed-point map against direct limit samples.
    FixedPoint(Common),
    /// Per-trial records of coupled outcomes and identity residuals.
    CouplingAudit(Common),
    /// Closed-form quantities as JSON.
    Formulas(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Truncation threshold; defaults per n to keep the truncation error at 5% of sigma(n).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Complete fringe slots from a shared pool of this many limit samples
    /// (faster, but correlates trials).
    #[arg(long)]
    tail_pool: Option<usize>,
}

fn config(experiment: Experiment, c: Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment, c.seed);
    if !c.n.is_empty() {
        cfg.n_values = c.n;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    cfg.delta = c.delta;
    cfg.workers = c.workers;
    cfg.output_path = c.out;
    cfg.tail_pool = c.tail_pool;
    cfg.format = match c.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Jsonl) => OutputFormat::Jsonl,
        None if experiment == Experiment::Enumerate => OutputFormat::Csv,
        None => OutputFormat::Jsonl,
    };
    cfg
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::Enumerate(c) => (Experiment::Enumerate, c),
        Command::MeanCheck(c) => (Experiment::MeanCheck, c),
        Command::VarianceProfile(c) => (Experiment::VarianceProfile, c),
        Command::Clt(c) => (Experiment::Clt, c),
        Command::L3(c) => (Experiment::L3, c),
        Command::BnDecay(c) => (Experiment::BnDecay, c),
        Command::CoeffConvergence(c) => (Experiment::CoeffConvergence, c),
        Command::FixedPoint(c) => (Experiment::FixedPoint, c),
        Command::CouplingAudit(c) => (Experiment::CouplingAudit, c),
        Command::Formulas(c) => (Experiment::Formulas, c),
    };
    let cfg = config(experiment, common);
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cfg: &ExperimentConfig) -> quicksort_limit::Result<bool> {
    let report = experiments::run(cfg)?;
    let summary = serde_json::to_string_pretty(&report)?;
    match &cfg.output_path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            experiments::write_rows(&report, cfg.format, &mut file)?;
            file.flush()?;
            println!("{summary}");
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            if !report.rows.is_empty() {
                experiments::write_rows(&report, cfg.format, &mut lock)?;
                eprintln!("{summary}");
            } else {
                writeln!(lock, "{summary}")?;
            }
        }
    }
    Ok(report.all_pass())
}
