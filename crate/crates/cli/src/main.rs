use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use murmur_core::validation::{run_check, Scale, CHECKS};
use murmur_lab::{
    emit_csv, run_experiment, with_pool, CliError, Experiment, ExperimentConfig, Overrides,
    THREADS_ENV,
};

#[derive(Parser)]
#[command(
    name = "murmur",
    version,
    about = "Murmuration sums for Dirichlet characters and their limits",
    after_help = after_help()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiments and the figure each one reproduces.
    List,
    /// Run acceptance checks 1-15 (alias: validate_all).
    #[command(alias = "validate_all")]
    Validate {
        /// Run the convergence checks at X/4.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    #[command(external_subcommand)]
    Run(Vec<String>),
}

#[derive(Parser)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
}

fn after_help() -> String {
    format!(
        "Experiments (run `murmur <experiment> --help` for flags):\n{}\n\
         Thread count: --threads, else the {THREADS_ENV} environment variable, else all cores.\n\
         Exit codes: 0 success, 1 validation or computation failure, 2 configuration error.",
        Experiment::listing()
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", Experiment::listing());
            ExitCode::SUCCESS
        }
        Command::Validate { quick, threads } => validate(quick, threads),
        Command::Run(args) => run(args),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("murmur: {e}");
    ExitCode::from(e.exit_code())
}

fn validate(quick: bool, threads: Option<usize>) -> ExitCode {
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let threads = match threads {
        Some(0) => return fail(&CliError::Config("--threads must be at least 1".into())),
        Some(t) => t,
        None => std::env::var(THREADS_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(0),
    };
    let outcome = with_pool(threads, || {
        let mut failed = 0usize;
        for &(id, _) in CHECKS.iter() {
            let r = run_check(id, scale);
            println!("{r}");
            failed += !r.passed as usize;
        }
        failed
    });
    match outcome {
        Ok(failed) => {
            println!(
                "acceptance: {} of {} checks passed",
                CHECKS.len() - failed,
                CHECKS.len()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn run(args: Vec<String>) -> ExitCode {
    let name = &args[0];
    let experiment = match Experiment::from_str(name) {
        Ok(e) => e,
        Err(e) => return fail(&e),
    };
    let cmd = RunArgs::command()
        .name(experiment.name())
        .bin_name(format!("murmur {}", experiment.name()))
        .about(format!("{}: {}", experiment.figure(), experiment.about()));
    let parsed = cmd
        .try_get_matches_from(&args)
        .and_then(|m| RunArgs::from_arg_matches(&m));
    let run_args = match parsed {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    let cfg = match ExperimentConfig::resolve(experiment, &run_args.overrides) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let start = Instant::now();
    let result = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit_csv(&result, cfg.out.as_deref()) {
        return fail(&e);
    }
    let threads = match cfg.threads {
        0 => rayon::current_num_threads(),
        t => t,
    };
    eprintln!(
        "murmur: {} rows in {:.2} s on {threads} threads",
        result.rows.len(),
        start.elapsed().as_secs_f64()
    );
    ExitCode::SUCCESS
}
