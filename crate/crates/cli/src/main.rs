//! `thinc`: runs the slotted-disk and single-vortex benchmarks, convergence
//! studies and the built-in self-check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use thinc_scaling::benchmark::{convergence_table, run_case, BenchmarkCase, RunOptions, RunReport};
use thinc_scaling::config::{parse_config, RunConfig};
use thinc_scaling::output::{emit_convergence, emit_outputs, format_convergence_table};
use thinc_scaling::transport::SchemeParams;
use thinc_scaling::verify::{assess_convergence, assess_run, self_check, Check};

/// Caps the worker count; 0 runs everything on the calling thread.
const THREADS_VAR: &str = "THINC_THREADS";

#[derive(Parser)]
#[command(name = "thinc", version, about = "THINC-scaling interface capturing benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case on every grid size in the config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Exit non-zero unless every acceptance threshold for the run holds.
        #[arg(long)]
        assert_acceptance: bool,
    },
    /// Run a grid-size sweep and write the error table.
    Converge {
        #[arg(long)]
        config: PathBuf,
    },
    /// Quick self-check of the numerical kernels.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            assert_acceptance,
        } => run(&config, assert_acceptance),
        Command::Converge { config } => converge(&config),
        Command::Verify => verify(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn threads() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_VAR} must be a non-negative integer, got '{v}'")),
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Err(e) => bail!("{THREADS_VAR}: {e}"),
    }
}

fn load(path: &Path) -> Result<(RunConfig, BenchmarkCase, SchemeParams, RunOptions)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    let mut case = BenchmarkCase::by_name(&config.case)?;
    case.sizes = config.sizes.clone();
    let params = SchemeParams {
        beta0: config.beta0,
        cfl: config.cfl,
        quad: config.quadrature_rule(),
        threads: threads()?,
    };
    let opts = RunOptions {
        snapshot_times: config.snapshot_times.clone(),
        final_time: config.final_time,
    };
    Ok((config, case, params, opts))
}

fn summarize(r: &RunReport) {
    let clipped = r.mass_history.last().map_or(0.0, |m| m.clipped_mass);
    println!(
        "{} {}^2: {} steps to t = {}, L1 {:.3e}, mass drift {:.3e}, clipped {:.3e}, max overshoot {:.3e}, wall {:.2} s",
        r.case,
        r.n,
        r.steps,
        r.state.time,
        r.l1,
        r.max_relative_mass_drift(),
        clipped,
        r.max_overshoot,
        r.wall_time.as_secs_f64()
    );
}

fn report_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{c}");
    }
    checks.iter().all(|c| c.passed)
}

fn run(path: &Path, assert_acceptance: bool) -> Result<bool> {
    let (config, case, params, opts) = load(path)?;
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for &n in &config.sizes {
        let report = run_case(&case, n, &params, &opts)?;
        summarize(&report);
        let files = emit_outputs(&report, &config)?;
        println!("  wrote {} files to {}", files.len(), config.output_dir.display());
        checks.extend(assess_run(&case, &report));
        results.push((report.n, report.l1));
    }
    if !assert_acceptance {
        return Ok(true);
    }
    checks.extend(assess_convergence(&thinc_scaling::benchmark::convergence_rows(&results)));
    if checks.is_empty() {
        println!("no acceptance thresholds apply to this configuration");
    }
    Ok(report_checks(&checks))
}

fn converge(path: &Path) -> Result<bool> {
    let (config, case, params, opts) = load(path)?;
    let (rows, reports) = convergence_table(&case, &params, &opts)?;
    for r in &reports {
        summarize(r);
        emit_outputs(r, &config)?;
    }
    let table = emit_convergence(&case.name, &rows, &config)?;
    print!("{}", format_convergence_table("THINC/scaling", &rows));
    println!("table written to {}", table.display());
    Ok(true)
}

fn verify() -> Result<bool> {
    let start = std::time::Instant::now();
    let ok = report_checks(&self_check()?);
    println!("self-check finished in {:.2} s", start.elapsed().as_secs_f64());
    Ok(ok)
}
