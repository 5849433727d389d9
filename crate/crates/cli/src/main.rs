//! Config-driven command-line runner for certified asymptotic-regularity
//! experiments on the inexact generalized Halpern iteration
//! `x_{n+1} = δₙ f(xₙ) + αₙ xₙ + βₙ T xₙ + rₙ`.
//!
//! Subcommands:
//!
//! * `run` — compute a trace and write it as CSV;
//! * `rates` — tabulate the certified rates `Φ`, `Ψ`, `Φ*`, `Ψ*`, … as
//!   exact integers;
//! * `verify` — replay every certificate and invariant against a fresh
//!   trace; exit 0 iff everything passes;
//! * `examples` — print ready-to-use example configs.
//!
//! Exit codes: 0 pass, 1 verification violation, 2 input error, 3 runtime
//! abort.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "asymreg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override [run] trace_length
    #[arg(long)]
    steps: Option<u64>,
    /// Override [run] k_max
    #[arg(long)]
    kmax: Option<u64>,
    /// Override [run] tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override [run] seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the trace and write `n,step_residual,fix_residual,kp_n` CSV
    Run {
        #[command(flatten)]
        common: Common,
        /// Output CSV path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the certified rates at the given k values
    Rates {
        #[command(flatten)]
        common: Common,
        /// k values to tabulate (defaults to 0..=kmax when --kmax is given)
        k: Vec<u64>,
    },
    /// Replay certificates and invariants against a fresh trace
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Print ready-to-use example configs
    Examples,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load(common: &Common) -> Result<config::Experiment, Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", common.config.display())))?;
    let mut cfg = config::parse(&text).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    if let Some(steps) = common.steps {
        cfg.run.trace_length = steps;
    }
    if let Some(kmax) = common.kmax {
        cfg.run.k_max = kmax;
    }
    if let Some(tol) = common.tol {
        cfg.run.tolerance = tol;
    }
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    let name = common
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    config::build(&cfg, &name).map_err(|e| fail(EXIT_INPUT, e.to_string()))
}

fn cmd_run(common: &Common, out: Option<&PathBuf>) -> Result<(), Failure> {
    let out = out.ok_or_else(|| fail(EXIT_INPUT, "missing output path: pass --out FILE"))?;
    let exp = load(common)?;
    let trace = asymreg::run(
        &exp.scenario.instance,
        &exp.scenario.schedule,
        exp.scenario.trace_length,
    )
    .map_err(|e| fail(EXIT_RUNTIME, e.to_string()))?;
    output::write_atomic(out, &output::trace_csv(&trace))
        .map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", out.display())))?;
    println!("wrote {} rows to {}", trace.step_residuals.len(), out.display());
    Ok(())
}

fn cmd_rates(common: &Common, ks: &[u64]) -> Result<(), Failure> {
    let exp = load(common)?;
    let ks: Vec<u64> = if ks.is_empty() {
        match common.kmax {
            Some(kmax) => (0..=kmax).collect(),
            None => Vec::new(),
        }
    } else {
        ks.to_vec()
    };
    let rates: Vec<_> = exp
        .rate_labels
        .iter()
        .cloned()
        .zip(exp.scenario.certificates.iter().cloned())
        .collect();
    print!("{}", output::rate_table(&rates, &ks));
    Ok(())
}

fn cmd_verify(common: &Common) -> Result<(), Failure> {
    let exp = load(common)?;
    let report = asymreg::harness::run_scenario(&exp.scenario);
    for row in report.rows() {
        println!("{row}");
    }
    eprintln!("wall-clock: {:?}", report.wall_clock);
    if let Some(e) = &report.error {
        return Err(fail(EXIT_RUNTIME, e.clone()));
    }
    if !report.passed() {
        let classes: Vec<String> = report
            .failed_classes()
            .into_iter()
            .map(|c| c.to_string())
            .collect();
        return Err(fail(
            EXIT_VIOLATION,
            format!("verification failed: {}", classes.join(", ")),
        ));
    }
    Ok(())
}

const EXAMPLE_CONFIGS: &[(&str, &str)] = &[
    (
        "example3-linear",
        include_str!("../examples/example3-linear.toml"),
    ),
    (
        "example1-quadratic",
        include_str!("../examples/example1-quadratic.toml"),
    ),
    (
        "example2-inexact",
        include_str!("../examples/example2-inexact.toml"),
    ),
    (
        "stationary",
        include_str!("../examples/stationary.toml"),
    ),
];

fn cmd_examples() {
    for (name, text) in EXAMPLE_CONFIGS {
        println!("# --- {name} ---");
        println!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, out } => cmd_run(common, out.as_ref()),
        Command::Rates { common, k } => cmd_rates(common, k),
        Command::Verify { common } => cmd_verify(common),
        Command::Examples => {
            cmd_examples();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
