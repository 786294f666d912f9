use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qqlab::harness::{convergence_sweep, list_cases, run_suite, Config, Context, RunOptions};
use qqlab::Error;

#[derive(Parser)]
#[command(name = "qqlab", version, about = "Numerical checks of (q,q')-deformed quaternionic integral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and write report.csv and summary.json.
    Run {
        /// JSON config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Case ids to run instead of the config's list.
        #[arg(long = "case", num_args = 1..)]
        cases: Vec<String>,
        #[arg(long, default_value = "qqlab-report")]
        report_dir: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Write zero timings so reports compare byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Refine one case and fit the observed convergence order.
    Sweep {
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the case ids.
    ListCases,
}

fn load(path: &Option<PathBuf>) -> Result<Config, Error> {
    match path {
        Some(p) => Config::from_path(p),
        None => Ok(Config::default()),
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::UnknownCase(_) | Error::InvalidBox(_) | Error::InvalidQuadSpec(_) | Error::InvalidParameters { .. }
    )
}

fn fail(e: Error) -> ExitCode {
    eprintln!("qqlab: {e}");
    ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListCases => {
            print!("{}", list_cases());
            ExitCode::SUCCESS
        }
        Command::Run { config, cases, report_dir, threads, no_timing } => {
            let mut config = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if !cases.is_empty() {
                config.cases = Some(cases);
            }
            let report = match run_suite(&config, RunOptions { threads, no_timing }) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = report.write_to(&report_dir) {
                return fail(e);
            }
            for c in report.case_summaries() {
                println!(
                    "{:<24} {:>4} rows  {:>4} pass  {:>3} fail  {:>3} skipped  max rel {:.2e}  {:.2}s",
                    c.case_id, c.rows, c.pass, c.fail, c.skipped, c.max_rel_residual, c.seconds
                );
            }
            println!("report written to {}", report_dir.display());
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Sweep { case, levels, config, json } => {
            let table = load(&config).and_then(|c| Context::new(&c)).and_then(|ctx| convergence_sweep(&ctx, &case, levels));
            match table {
                Ok(t) if json => {
                    println!("{}", serde_json::to_string_pretty(&t).expect("table serializes"));
                    ExitCode::SUCCESS
                }
                Ok(t) => {
                    print!("{}", t.to_text());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
