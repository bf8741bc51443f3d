//! Plain-text result files: field dumps, polylines, mass histories and
//! convergence tables.
//!
//! Every writer is deterministic: numbers are printed with 17 significant
//! digits in a fixed layout and nothing depends on wall-clock time.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::benchmark::{ConvergenceRow, MassRecord, RunReport};
use crate::config::RunConfig;
use crate::contour::{extract_contour, extract_psi_segments, Polyline, DEFAULT_PSI_SAMPLES};
use crate::error::Result;
use crate::transport::SchemeState;

/// `<case>_<n>_<kind>.csv`
pub fn file_name(case: &str, n: usize, kind: &str) -> String {
    format!("{case}_{n}_{kind}.csv")
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Interior cells, row-major, as `i,j,x,y,vof,phi`.
pub fn write_fields(path: &Path, state: &SchemeState) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "i,j,x,y,vof,phi")?;
    for (i, j) in state.grid.interior_cells() {
        let c = state.grid.center_unchecked(i, j);
        writeln!(
            w,
            "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e}",
            c.x,
            c.y,
            state.vof.at(i, j),
            state.phi.at(i, j)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Polylines as `poly_id,x,y`, one point per row.
pub fn write_polylines(path: &Path, lines: &[Polyline]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "poly_id,x,y")?;
    for (id, line) in lines.iter().enumerate() {
        for p in line {
            writeln!(w, "{id},{:.16e},{:.16e}", p.x, p.y)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `step,time,total_mass,clipped_mass`, one row per completed step plus the
/// initial state.
pub fn write_mass_history(path: &Path, history: &[MassRecord]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "step,time,total_mass,clipped_mass")?;
    for r in history {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e}", r.step, r.time, r.total_mass, r.clipped_mass)?;
    }
    w.flush()?;
    Ok(())
}

/// Order printed to two decimals, truncated toward zero.
pub fn format_order(order: f64) -> String {
    let t = (order * 100.0).trunc() / 100.0;
    format!("{t:.2}")
}

/// Aligned table with one column per grid and an order column between
/// successive grids.
pub fn format_convergence_table(method: &str, rows: &[ConvergenceRow]) -> String {
    let mut header = vec!["Method".to_string()];
    let mut cells = vec![method.to_string()];
    for (k, r) in rows.iter().enumerate() {
        if k > 0 {
            header.push("Order".into());
            cells.push(r.order.map(format_order).unwrap_or_else(|| "-".into()));
        }
        header.push(format!("{}^2", r.n));
        cells.push(format!("{:.2e}", r.l1));
    }
    let widths: Vec<usize> = header.iter().zip(&cells).map(|(h, c)| h.len().max(c.len())).collect();
    let mut out = String::new();
    for row in [&header, &cells] {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

/// Writes the files selected in `config` for one run; returns their paths.
pub fn emit_outputs(report: &RunReport, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let (case, n) = (report.case.as_str(), report.n);
    let mut states: Vec<(String, &SchemeState)> = report
        .snapshots
        .iter()
        .map(|s| (format!("t{:.6}", s.time), &s.state))
        .collect();
    states.push(("final".into(), &report.state));

    for (tag, state) in states {
        if config.outputs.fields {
            let path = dir.join(file_name(case, n, &format!("fields_{tag}")));
            write_fields(&path, state)?;
            written.push(path);
        }
        if config.outputs.contours {
            let path = dir.join(file_name(case, n, &format!("contour_{tag}")));
            write_polylines(&path, &extract_contour(&state.vof, 0.5))?;
            written.push(path);
        }
        if config.outputs.psi {
            let path = dir.join(file_name(case, n, &format!("psi_{tag}")));
            let lines: Vec<Polyline> = extract_psi_segments(state, DEFAULT_PSI_SAMPLES)
                .into_iter()
                .map(|s| s.points)
                .collect();
            write_polylines(&path, &lines)?;
            written.push(path);
        }
    }
    if config.outputs.mass {
        let path = dir.join(file_name(case, n, "mass"));
        write_mass_history(&path, &report.mass_history)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `<case>_convergence.txt`.
pub fn emit_convergence(case: &str, rows: &[ConvergenceRow], config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join(format!("{case}_convergence.txt"));
    fs::write(&path, format_convergence_table("THINC/scaling", rows))?;
    Ok(path)
}
