//! Runs one benchmark case: `run_benchmark <case> <n> [rule]`.
//!
//! `rule` below 1 is an adaptive tolerance, otherwise a tensor order; the
//! default rule is used when it is absent. `CFL` and `FINAL_TIME` in the
//! environment override the step size and the end time.

use thinc_scaling::benchmark::{run_case, BenchmarkCase, RunOptions};
use thinc_scaling::quadrature::{QuadratureRule, VolumeRule};
use thinc_scaling::transport::SchemeParams;

fn main() -> thinc_scaling::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let case = BenchmarkCase::by_name(args.get(1).map(String::as_str).unwrap_or("rider_kothe"))?;
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(64);
    let quad = match args.get(3).and_then(|s| s.parse::<f64>().ok()) {
        None => QuadratureRule::default(),
        Some(t) if t < 1.0 => QuadratureRule::new(VolumeRule::Adaptive { tolerance: t }, 2),
        Some(k) => QuadratureRule::tensor(k as usize),
    };
    let cfl = std::env::var("CFL").ok().and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let params = SchemeParams { quad, cfl, ..SchemeParams::default() };
    let options = RunOptions {
        final_time: std::env::var("FINAL_TIME").ok().and_then(|s| s.parse().ok()),
        ..RunOptions::default()
    };
    let r = run_case(&case, n, &params, &options)?;
    println!(
        "{} n={} steps={} L1={:.4e} drift={:.3e} clipped={:.3e} overshoot={:.3e} time={:.1?}",
        r.case,
        n,
        r.steps,
        r.l1,
        r.max_relative_mass_drift(),
        r.mass_history.last().unwrap().clipped_mass,
        r.max_overshoot,
        r.wall_time
    );
    Ok(())
}
