mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tflocal::gabor::{frame_bounds, frame_operator};
use tflocal::scenario::{build_scenario, list_presets, load};
use tflocal::verify::{self, Level};
use tflocal::Error;

#[derive(Parser)]
#[command(name = "tflocal", version, about = "Finite time-frequency localization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scenario, run its analyses and write CSV reports.
    Run {
        /// Scenario JSON file or preset name.
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
    },
    /// Print the resolved scenario, frame bounds and operator provenance.
    Info {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the named presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

pub const EXIT_INVARIANT: u8 = 1;
pub const EXIT_SCHEMA: u8 = 2;
pub const EXIT_NOT_A_FRAME: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotAFrame { .. } => EXIT_NOT_A_FRAME,
        Error::SolverFailure { .. } => EXIT_SOLVER,
        _ => EXIT_SCHEMA,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("TFLOCAL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        // a second initialization only happens in tests; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn cmd_verify(level: LevelArg) -> ExitCode {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let report = verify::run_with(level, tflocal::gabor::stft, |s| {
        let status = if s.ok() { "ok" } else { "FAIL" };
        println!("{:<22} {:>4}/{:<4} {status}", s.name, s.passed, s.total());
    });
    let passed = report.suites.iter().filter(|s| s.ok()).count();
    println!("{passed}/{} suites passed", report.suites.len());
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some((suite, what)) => {
            eprintln!("first failure: {suite}: {what}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}

fn cmd_info(arg: &str, seed: Option<u64>) -> Result<(), Error> {
    let (mut spec, base) = load(arg)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    println!("{}", spec.to_json());
    let built = build_scenario(&spec, base.as_deref())?;
    let (lo, hi) = frame_bounds(&frame_operator(&built.phi1, &built.lattice)?)?;
    println!("frame bounds: A = {lo:.6e}, B = {hi:.6e}");
    println!("operator: provenance = {}, hermitian = {}, dim = {}",
        built.operator.provenance().as_str(),
        built.operator.is_hermitian(),
        built.operator.dim()
    );
    Ok(())
}

/// Dies quietly on a closed pipe (`tflocal info ... | head`) instead of panicking in `println!`.
#[cfg(unix)]
fn reset_sigpipe() {
    // SAFETY: restoring the default disposition before any threads are spawned.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    configure_threads();
    match cli.command {
        Command::Run { scenario, out, seed } => run::cmd_run(&scenario, &out, seed),
        Command::Verify { level } => cmd_verify(level),
        Command::Info { scenario, seed } => match cmd_info(&scenario, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
        },
        Command::Presets => {
            for p in list_presets() {
                println!("{:<20} {}", p.name, p.description);
            }
            ExitCode::SUCCESS
        }
    }
}
