//! Interface tagging and fast-sweeping reinitialization of the level set.
//!
//! Interface cells keep the level set values produced by the inverse THINC
//! scaling. Every other interior cell receives the distance to those frozen
//! values from Gauss–Seidel sweeps of the first-order Godunov upwind
//! discretization of `|grad phi| = 1`, in the four alternating orderings.

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid2D, CellField};
use crate::reconstruction::INTERFACE_EPS;

/// Sweep cycles stop once the largest update falls below this.
pub const SWEEP_TOLERANCE: f64 = 1e-12;
/// Hard cap on full four-ordering cycles.
pub const MAX_SWEEP_CYCLES: usize = 8;

/// One flag per interior cell, row-major over `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceMask {
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
}

impl InterfaceMask {
    pub fn empty(grid: &CartesianGrid2D) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            cells: vec![false; grid.interior_len()],
        }
    }

    pub fn from_fn(grid: &CartesianGrid2D, mut f: impl FnMut(isize, isize) -> bool) -> Self {
        let mut mask = Self::empty(grid);
        for (i, j) in grid.interior_cells() {
            mask.set(i, j, f(i, j));
        }
        mask
    }

    /// False for anything outside the interior.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
            return false;
        }
        self.cells[i as usize * self.ny + j as usize]
    }

    pub fn set(&mut self, i: isize, j: isize, v: bool) {
        assert!(i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny);
        self.cells[i as usize * self.ny + j as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// Flagged cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let ny = self.ny;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(k, _)| ((k / ny) as isize, (k % ny) as isize))
    }

    pub fn and(&self, other: &InterfaceMask) -> InterfaceMask {
        InterfaceMask {
            nx: self.nx,
            ny: self.ny,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| *a && *b).collect(),
        }
    }
}

/// Cells with `INTERFACE_EPS <= H̄ <= 1 - INTERFACE_EPS`.
pub fn tag_interface_cells(vof: &CellField) -> InterfaceMask {
    InterfaceMask::from_fn(vof.grid(), |i, j| {
        let h = vof.at(i, j);
        (INTERFACE_EPS..=1.0 - INTERFACE_EPS).contains(&h)
    })
}

/// Convergence record of one reinitialization.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    /// Largest update of each full cycle; the first is infinite whenever a
    /// cell is reached for the first time.
    pub cycle_changes: Vec<f64>,
}

impl SweepReport {
    pub fn cycles(&self) -> usize {
        self.cycle_changes.len()
    }
}

/// Reinitializes unmasked cells to signed distances, signs taken from the
/// incoming level set.
pub fn fast_sweep_reinit(phi: &CellField, mask: &InterfaceMask) -> Result<(CellField, SweepReport)> {
    sweep(phi, mask, |i, j| phi.at(i, j) >= 0.0)
}

/// As [`fast_sweep_reinit`], with the sign of each unmasked cell taken from
/// `H̄ - 1/2` (positive in fluid 1) and from the level set only where
/// `H̄ = 1/2` exactly.
pub fn fast_sweep_reinit_with_vof(
    phi: &CellField,
    mask: &InterfaceMask,
    vof: &CellField,
) -> Result<(CellField, SweepReport)> {
    if vof.grid() != phi.grid() {
        return Err(Error::GridMismatch);
    }
    sweep(phi, mask, |i, j| {
        let h = vof.at(i, j);
        if h == 0.5 {
            phi.at(i, j) >= 0.0
        } else {
            h > 0.5
        }
    })
}

fn sweep(
    phi: &CellField,
    mask: &InterfaceMask,
    positive: impl Fn(isize, isize) -> bool,
) -> Result<(CellField, SweepReport)> {
    if mask.is_empty() {
        return Err(Error::NoInterface);
    }
    let grid = phi.grid();
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let h = grid.dx;
    let idx = |i: isize, j: isize| (i * ny + j) as usize;

    let mut dist: Vec<f64> = grid
        .interior_cells()
        .map(|(i, j)| if mask.get(i, j) { phi.at(i, j).abs() } else { f64::INFINITY })
        .collect();

    let mut report = SweepReport::default();
    for _ in 0..MAX_SWEEP_CYCLES {
        let mut change = 0.0f64;
        for (rev_i, rev_j) in [(false, false), (true, false), (true, true), (false, true)] {
            for a in 0..nx {
                let i = if rev_i { nx - 1 - a } else { a };
                for b in 0..ny {
                    let j = if rev_j { ny - 1 - b } else { b };
                    if mask.get(i, j) {
                        continue;
                    }
                    let pick = |ii: isize, jj: isize| {
                        if ii < 0 || jj < 0 || ii >= nx || jj >= ny {
                            f64::INFINITY
                        } else {
                            dist[idx(ii, jj)]
                        }
                    };
                    let ax = pick(i - 1, j).min(pick(i + 1, j));
                    let ay = pick(i, j - 1).min(pick(i, j + 1));
                    let candidate = godunov_update(ax, ay, h);
                    let k = idx(i, j);
                    if candidate < dist[k] {
                        let old = dist[k];
                        dist[k] = candidate;
                        change = change.max(old - candidate);
                    }
                }
            }
        }
        report.cycle_changes.push(change);
        if change < SWEEP_TOLERANCE {
            break;
        }
    }

    let mut out = phi.clone();
    for (i, j) in grid.interior_cells() {
        if mask.get(i, j) {
            continue;
        }
        let d = dist[idx(i, j)];
        *out.at_mut(i, j) = if positive(i, j) { d } else { -d };
    }
    out.fill_ghosts();
    Ok((out, report))
}

/// Solution `u` of `(u - a)_+² + (u - b)_+² = h²`.
#[inline]
pub fn godunov_update(a: f64, b: f64, h: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if !lo.is_finite() {
        return f64::INFINITY;
    }
    if hi - lo >= h {
        lo + h
    } else {
        0.5 * (lo + hi + (2.0 * h * h - (hi - lo) * (hi - lo)).sqrt())
    }
}

/// Godunov upwind `|grad |phi||` at interior cell `(i, j)`, using interior
/// neighbors only.
pub fn godunov_gradient_magnitude(phi: &CellField, i: isize, j: isize) -> f64 {
    let grid = phi.grid();
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let h = grid.dx;
    let pick = |ii: isize, jj: isize| {
        if ii < 0 || jj < 0 || ii >= nx || jj >= ny {
            f64::INFINITY
        } else {
            phi.at(ii, jj).abs()
        }
    };
    let u = phi.at(i, j).abs();
    let a = pick(i - 1, j).min(pick(i + 1, j));
    let b = pick(i, j - 1).min(pick(i, j + 1));
    let dxp = (u - a).max(0.0);
    let dyp = (u - b).max(0.0);
    dxp.hypot(dyp) / h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagging_uses_closed_band() {
        let g = CartesianGrid2D::unit_square(4).unwrap();
        let values = [0.5, 0.0, 1.0, INTERFACE_EPS, 1.0 - INTERFACE_EPS, 0.5e-8];
        let vof = CellField::from_fn(&g, |i, j| values[((i * 4 + j) as usize) % values.len()]);
        let mask = tag_interface_cells(&vof);
        for (i, j) in g.interior_cells() {
            let h = vof.at(i, j);
            let want = h == 0.5 || h == INTERFACE_EPS || h == 1.0 - INTERFACE_EPS;
            assert_eq!(mask.get(i, j), want, "H = {h}");
        }
    }

    #[test]
    fn godunov_rule() {
        assert_eq!(godunov_update(1.0, 5.0, 1.0), 2.0);
        assert_eq!(godunov_update(0.0, 0.0, 1.0), 0.5 * 2f64.sqrt());
        assert_eq!(godunov_update(f64::INFINITY, 0.3, 0.1), 0.4);
        assert_eq!(godunov_update(f64::INFINITY, f64::INFINITY, 0.1), f64::INFINITY);
    }

    #[test]
    fn distance_from_single_point_along_axis() {
        let n = 21;
        let g = CartesianGrid2D::unit_square(n).unwrap();
        let c = (n / 2) as isize;
        let phi = CellField::from_fn(&g, |i, j| if (i, j) == (c, c) { 0.0 } else { 1.0 });
        let mask = InterfaceMask::from_fn(&g, |i, j| (i, j) == (c, c));
        let (out, _) = fast_sweep_reinit(&phi, &mask).unwrap();
        for k in 1..=c {
            let want = k as f64 * g.dx;
            assert!((out.at(c + k, c) - want).abs() < 1e-12);
            assert!((out.at(c, c - k) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_interface_gives_line_distance() {
        let n = 40;
        let g = CartesianGrid2D::unit_square(n).unwrap();
        let sd = |i: isize, j: isize| 0.5 - g.cell_center(i, j).unwrap().x;
        let mask = InterfaceMask::from_fn(&g, |i, j| sd(i, j).abs() < g.dx);
        let phi = CellField::from_fn(&g, |i, j| if mask.get(i, j) { sd(i, j) } else { sd(i, j).signum() * 10.0 });
        let (out, _) = fast_sweep_reinit(&phi, &mask).unwrap();
        for (i, j) in g.interior_cells() {
            assert!((out.at(i, j) - sd(i, j)).abs() <= g.dx, "cell ({i},{j})");
            if mask.get(i, j) {
                assert_eq!(out.at(i, j).to_bits(), phi.at(i, j).to_bits());
            }
        }
    }

    #[test]
    fn converged_field_is_a_fixed_point() {
        let g = CartesianGrid2D::unit_square(32).unwrap();
        let sd = |i: isize, j: isize| {
            let c = g.cell_center(i, j).unwrap();
            0.2 - (c.x - 0.5).hypot(c.y - 0.5)
        };
        let vof = CellField::from_fn(&g, |i, j| if sd(i, j).abs() < g.dx { 0.5 } else if sd(i, j) > 0.0 { 1.0 } else { 0.0 });
        let mask = tag_interface_cells(&vof);
        let phi = CellField::from_fn(&g, sd);
        let (once, first) = fast_sweep_reinit_with_vof(&phi, &mask, &vof).unwrap();
        assert!(first.cycle_changes.windows(2).all(|w| w[1] <= w[0]));
        let (twice, _) = fast_sweep_reinit_with_vof(&once, &mask, &vof).unwrap();
        let change = once.max_abs_diff(&twice).unwrap();
        assert!(change < SWEEP_TOLERANCE, "{change:e}");
    }

    #[test]
    fn empty_mask_is_an_error() {
        let g = CartesianGrid2D::unit_square(8).unwrap();
        let phi = CellField::new(&g, 1.0);
        assert!(matches!(
            fast_sweep_reinit(&phi, &InterfaceMask::empty(&g)),
            Err(Error::NoInterface)
        ));
    }
}
