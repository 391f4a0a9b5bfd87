use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use frakgeo::{
    run_job, CheckRegistry, ConfigError, JobConfig, Overrides, Verdict, VerificationReport,
};
use frakgeo_core::frac::FractionalOrder;

const EXIT_CONFIG: u8 = 1;
const EXIT_FAILED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "frakgeo",
    version,
    about = "Verify the canonical geometry of a fractional Lagrangian"
)]
struct Cli {
    /// Print the registered checks and exit.
    #[arg(long)]
    list_checks: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks and print a summary.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Run only this order instead of the configured list.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run checks and write the JSON report.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let registry = CheckRegistry::default();
    if cli.list_checks {
        for check in registry.iter() {
            println!("{:<14} {}", check.name(), check.description());
        }
        return Ok(0);
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no command given; try --help");
    };
    let (config, overrides, output, print_summary) = match command {
        Command::Check {
            config,
            alpha,
            output,
            seed,
        } => {
            let alpha = alpha
                .map(FractionalOrder::new)
                .transpose()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            (config, Overrides { alpha, seed }, output, true)
        }
        Command::Report { config, output } => (config, Overrides::default(), Some(output), false),
    };
    let job = overrides.apply(JobConfig::from_path(&config)?.validate(&registry)?);
    let report = run_job(&job, &registry);
    if print_summary {
        print_records(&report);
    }
    if let Some(path) = output {
        write_report(&report, &path)?;
    }
    Ok(if report.has_failures() {
        EXIT_FAILED
    } else {
        0
    })
}

fn print_records(report: &VerificationReport) {
    for r in report.records() {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Warn => "WARN",
            Verdict::Fail => "FAIL",
        };
        let residual = r
            .max_residual
            .map_or("n/a".to_string(), |v| format!("{v:.3e}"));
        println!(
            "alpha={:<5} {:<30} {verdict:<4} {residual:>10} (tol {:.1e}) {}",
            r.alpha, r.name, r.tolerance, r.detail
        );
    }
    let s = &report.summary;
    println!("{} pass, {} warn, {} fail", s.pass, s.warn, s.fail);
}

fn write_report(report: &VerificationReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json() + "\n")
        .with_context(|| format!("writing {}", path.display()))
}
