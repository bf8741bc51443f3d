//! One time step of the scheme.
//!
//! The VOF field is advanced by an upwind finite-volume update of
//! `dH/dt + div(u H) = H div(u)` under three-stage TVD Runge–Kutta, with the
//! face integrals taken over the upwind cell's THINC function. The level set
//! is advanced once per step by a semi-Lagrangian update: each cell center is
//! traced back to its departure point and takes the inverse-THINC value of
//! the interface cell it lands in. Cells away from the interface are then
//! rebuilt by fast sweeping.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid2D, CellField, Point};
use crate::quadrature::QuadratureRule;
use crate::reconstruction::{reconstruct_cell, ThincReconstruction, INTERFACE_EPS};
use crate::reinit::{fast_sweep_reinit_with_vof, tag_interface_cells, InterfaceMask, SweepReport};

/// Analytic velocity field `(x, y, t) -> (u, v)`.
pub trait VelocityField: Sync {
    fn velocity(&self, p: Point, t: f64) -> (f64, f64);

    /// Upper bound on `|u|` over the domain and the whole run.
    fn max_speed(&self) -> f64;
}

/// Wraps a closure together with its speed bound.
pub struct FnVelocity<F> {
    f: F,
    max_speed: f64,
}

impl<F: Fn(Point, f64) -> (f64, f64) + Sync> FnVelocity<F> {
    pub fn new(max_speed: f64, f: F) -> Self {
        Self { f, max_speed }
    }
}

impl<F: Fn(Point, f64) -> (f64, f64) + Sync> VelocityField for FnVelocity<F> {
    fn velocity(&self, p: Point, t: f64) -> (f64, f64) {
        (self.f)(p, t)
    }

    fn max_speed(&self) -> f64 {
        self.max_speed
    }
}

/// Side of a cell through which a face is seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    East,
    West,
    North,
    South,
}

/// A face as seen from `cell`, with outward normal pointing through `side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub cell: (isize, isize),
    pub side: Side,
}

impl Face {
    /// The cell across the face.
    pub fn neighbor(&self) -> (isize, isize) {
        let (i, j) = self.cell;
        match self.side {
            Side::East => (i + 1, j),
            Side::West => (i - 1, j),
            Side::North => (i, j + 1),
            Side::South => (i, j - 1),
        }
    }
}

/// Upwind cell for normal velocity `un` (relative to the outward normal of
/// `face.cell`): the owning cell for outflow, the neighbor otherwise.
#[inline]
pub fn upwind_cell(face: Face, un: f64) -> (isize, isize) {
    if un > 0.0 {
        face.cell
    } else {
        face.neighbor()
    }
}

/// Scheme parameters.
#[derive(Clone, Debug)]
pub struct SchemeParams {
    /// Grid-normalized steepness; the physical steepness is `beta0 / dx`.
    pub beta0: f64,
    pub cfl: f64,
    pub quad: QuadratureRule,
    /// Worker threads for per-cell work; 0 or 1 runs sequentially.
    pub threads: usize,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            beta0: 6.0,
            cfl: 0.25,
            quad: QuadratureRule::default(),
            threads: 0,
        }
    }
}

/// Per-interior-cell reconstructions.
#[derive(Clone, Debug)]
pub struct Reconstructions {
    ny: usize,
    nx: usize,
    cells: Vec<Option<ThincReconstruction>>,
    /// Band cells whose fitted gradient vanished; they carry no reconstruction.
    pub degenerate: Vec<(isize, isize)>,
}

impl Reconstructions {
    /// `None` for non-interface and ghost cells.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> Option<&ThincReconstruction> {
        if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
            return None;
        }
        self.cells[i as usize * self.ny + j as usize].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ThincReconstruction> {
        self.cells.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mask(&self, grid: &CartesianGrid2D) -> InterfaceMask {
        InterfaceMask::from_fn(grid, |i, j| self.get(i, j).is_some())
    }
}

/// Steps 1 and 2 over every band cell of `vof`, fitting polynomials to `phi`.
pub fn build_reconstructions(
    phi: &CellField,
    vof: &CellField,
    beta: f64,
    quad: &QuadratureRule,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Reconstructions> {
    let grid = vof.grid();
    let ny = grid.ny;
    let one = |k: usize| -> Result<Option<ThincReconstruction>> {
        let (i, j) = ((k / ny) as isize, (k % ny) as isize);
        let h = vof.at(i, j);
        if !(INTERFACE_EPS..=1.0 - INTERFACE_EPS).contains(&h) {
            return Ok(None);
        }
        match reconstruct_cell(phi, h, (i, j), beta, quad) {
            Ok(r) => Ok(Some(r)),
            Err(Error::DegenerateGradient { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let cells: Vec<Option<ThincReconstruction>> = match pool {
        Some(pool) => pool.install(|| (0..grid.interior_len()).into_par_iter().map(one).collect::<Result<_>>())?,
        None => (0..grid.interior_len()).map(one).collect::<Result<_>>()?,
    };
    let degenerate = grid
        .interior_cells()
        .filter(|&(i, j)| {
            let h = vof.at(i, j);
            (INTERFACE_EPS..=1.0 - INTERFACE_EPS).contains(&h) && cells[grid.interior_index(i as usize, j as usize)].is_none()
        })
        .collect();
    Ok(Reconstructions {
        nx: grid.nx,
        ny,
        cells,
        degenerate,
    })
}

/// Forward-Euler finite-volume update of the VOF field over `dt` with the
/// velocity sampled at time `t`. Both surface terms use the same face rule,
/// so uniform fields are fixed points. Upwind cells without a reconstruction
/// contribute their cell average.
///
/// A face between two unreconstructed cells holding the same value adds
/// `v * g` to the flux and `g` to the divergence of both cells, which cancel
/// in the update; such faces are skipped.
pub fn vof_substep(
    vof: &CellField,
    recons: &Reconstructions,
    vel: &dyn VelocityField,
    t: f64,
    dt: f64,
    quad: &QuadratureRule,
) -> CellField {
    let grid = vof.grid();
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let n = grid.interior_len();
    let mut flux = vec![0.0; n];
    let mut div = vec![0.0; n];
    let face = quad.face();
    let idx = |i: isize, j: isize| (i * ny + j) as usize;
    let upwind_value = |cell: (isize, isize), p: Point| match recons.get(cell.0, cell.1) {
        Some(r) => r.thinc_eval(p),
        None => vof.at(cell.0, cell.1),
    };
    let inert = |a: (isize, isize), b: (isize, isize)| {
        vof.at(a.0, a.1) == vof.at(b.0, b.1) && recons.get(a.0, a.1).is_none() && recons.get(b.0, b.1).is_none()
    };

    // faces normal to x: between (i-1, j) and (i, j)
    for i in 0..=nx {
        let x = grid.x0 + i as f64 * grid.dx;
        for j in 0..ny {
            let yc = grid.y0 + (j as f64 + 0.5) * grid.dy;
            let half = 0.5 * grid.dy;
            let west = Face { cell: (i - 1, j), side: Side::East };
            if inert((i - 1, j), (i, j)) {
                continue;
            }
            let (mut f, mut g) = (0.0, 0.0);
            for (&s, &w) in face.nodes.iter().zip(&face.weights) {
                let p = Point::new(x, yc + half * s);
                let un = vel.velocity(p, t).0;
                let wl = w * half;
                f += wl * un * upwind_value(upwind_cell(west, un), p);
                g += wl * un;
            }
            if i > 0 {
                flux[idx(i - 1, j)] += f;
                div[idx(i - 1, j)] += g;
            }
            if i < nx {
                flux[idx(i, j)] -= f;
                div[idx(i, j)] -= g;
            }
        }
    }
    // faces normal to y: between (i, j-1) and (i, j)
    for i in 0..nx {
        let xc = grid.x0 + (i as f64 + 0.5) * grid.dx;
        for j in 0..=ny {
            let y = grid.y0 + j as f64 * grid.dy;
            let half = 0.5 * grid.dx;
            let south = Face { cell: (i, j - 1), side: Side::North };
            if inert((i, j - 1), (i, j)) {
                continue;
            }
            let (mut f, mut g) = (0.0, 0.0);
            for (&s, &w) in face.nodes.iter().zip(&face.weights) {
                let p = Point::new(xc + half * s, y);
                let un = vel.velocity(p, t).1;
                let wl = w * half;
                f += wl * un * upwind_value(upwind_cell(south, un), p);
                g += wl * un;
            }
            if j > 0 {
                flux[idx(i, j - 1)] += f;
                div[idx(i, j - 1)] += g;
            }
            if j < ny {
                flux[idx(i, j)] -= f;
                div[idx(i, j)] -= g;
            }
        }
    }

    let c = dt / grid.cell_area();
    let mut out = vof.clone();
    for (i, j) in grid.interior_cells() {
        let k = idx(i, j);
        let h = vof.at(i, j);
        *out.at_mut(i, j) = h - c * (flux[k] - h * div[k]);
    }
    out.fill_ghosts();
    out
}

/// Three-stage TVD Runge–Kutta advance of the VOF field. Reconstructions of
/// the first stage are `recons`; later stages are rebuilt from the stage
/// field with polynomials fitted to `phi`.
#[allow(clippy::too_many_arguments)]
pub fn rk3_advance_vof(
    vof: &CellField,
    phi: &CellField,
    recons: &Reconstructions,
    vel: &dyn VelocityField,
    t: f64,
    dt: f64,
    beta: f64,
    quad: &QuadratureRule,
    pool: Option<&rayon::ThreadPool>,
) -> Result<CellField> {
    let grid = vof.grid();
    // (1 - b) * old + b * new, written so that new == old is exact
    let combine = |old: &CellField, b: f64, new: &CellField| {
        CellField::from_fn(grid, |i, j| {
            let o = old.at(i, j);
            o + b * (new.at(i, j) - o)
        })
    };
    let stage1 = vof_substep(vof, recons, vel, t, dt, quad);

    let r1 = build_reconstructions(phi, &stage1, beta, quad, pool)?;
    let l1 = vof_substep(&stage1, &r1, vel, t + dt, dt, quad);
    let stage2 = combine(vof, 0.25, &l1);

    let r2 = build_reconstructions(phi, &stage2, beta, quad, pool)?;
    let l2 = vof_substep(&stage2, &r2, vel, t + 0.5 * dt, dt, quad);
    Ok(combine(vof, 2.0 / 3.0, &l2))
}

/// Foot of the characteristic through `xc` at `t_new`, traced back over
/// `dt` with one midpoint Runge–Kutta step.
pub fn departure_point(xc: Point, vel: &dyn VelocityField, t_new: f64, dt: f64) -> Point {
    let (u1, v1) = vel.velocity(xc, t_new);
    let mid = Point::new(xc.x - 0.5 * dt * u1, xc.y - 0.5 * dt * v1);
    let (u2, v2) = vel.velocity(mid, t_new - 0.5 * dt);
    Point::new(xc.x - dt * u2, xc.y - dt * v2)
}

/// Result of the semi-Lagrangian level set update.
#[derive(Clone, Debug)]
pub struct SemiLagrangianUpdate {
    pub phi: CellField,
    /// Cells whose departure point landed in an interface cell.
    pub traced: InterfaceMask,
    /// Departure points that left the extended domain and were clamped.
    pub clamped: usize,
}

/// Semi-Lagrangian update of the level set over the full step ending at
/// `t_new`. Cells whose departure cell has no reconstruction receive the
/// signed placeholder `±10·max(extent)`, to be rebuilt by reinitialization.
pub fn semi_lagrangian_phi_update(
    vof: &CellField,
    recons: &Reconstructions,
    vel: &dyn VelocityField,
    t_new: f64,
    dt: f64,
) -> Result<SemiLagrangianUpdate> {
    let grid = vof.grid();
    let far = 10.0 * (grid.x1 - grid.x0).max(grid.y1 - grid.y0);
    let (lo, hi) = grid.extended_bounds();
    let mut phi = CellField::new(grid, 0.0);
    let mut traced = InterfaceMask::empty(grid);
    let mut clamped = 0;
    for (i, j) in grid.interior_cells() {
        let xc = grid.center_unchecked(i, j);
        let mut xd = departure_point(xc, vel, t_new, dt);
        if !(xd.x >= lo.x && xd.x <= hi.x && xd.y >= lo.y && xd.y <= hi.y) {
            xd = Point::new(xd.x.clamp(lo.x, hi.x), xd.y.clamp(lo.y, hi.y));
            clamped += 1;
        }
        let (id, jd) = grid.locate_cell(xd)?;
        let value = match recons.get(id, jd) {
            Some(r) => {
                traced.set(i, j, true);
                r.inverse_thinc_eval(xd)
            }
            None if vof.at(id, jd) >= 0.5 => far,
            None => -far,
        };
        *phi.at_mut(i, j) = value;
    }
    phi.fill_ghosts();
    Ok(SemiLagrangianUpdate { phi, traced, clamped })
}

/// Diagnostics of one completed time step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// Mass removed (+) or added (-) by clipping to `[0, 1]`.
    pub clipped_mass: f64,
    /// Largest pre-clip excursion outside `[0, 1]`.
    pub overshoot: f64,
    pub departure_clamped: usize,
    pub sweep: SweepReport,
}

/// VOF and level set fields at one time level, with the reconstructions
/// built from them.
#[derive(Clone, Debug)]
pub struct SchemeState {
    pub grid: CartesianGrid2D,
    pub vof: CellField,
    pub phi: CellField,
    pub recons: Reconstructions,
    pub time: f64,
    pub beta0: f64,
    pub mask: InterfaceMask,
}

impl SchemeState {
    pub fn new(vof: CellField, phi: CellField, beta0: f64, quad: &QuadratureRule) -> Result<Self> {
        Self::with_pool(vof, phi, beta0, quad, None)
    }

    pub fn with_pool(
        mut vof: CellField,
        mut phi: CellField,
        beta0: f64,
        quad: &QuadratureRule,
        pool: Option<&rayon::ThreadPool>,
    ) -> Result<Self> {
        if vof.grid() != phi.grid() {
            return Err(Error::GridMismatch);
        }
        if !(beta0 > 0.0) {
            return Err(Error::Config(format!("beta0 must be positive, got {beta0}")));
        }
        vof.fill_ghosts();
        phi.fill_ghosts();
        let grid = vof.grid().clone();
        let recons = build_reconstructions(&phi, &vof, beta0 / grid.dx, quad, pool)?;
        let mask = recons.mask(&grid);
        Ok(Self {
            grid,
            vof,
            phi,
            recons,
            time: 0.0,
            beta0,
            mask,
        })
    }

    /// Physical steepness `beta0 / dx`.
    pub fn beta(&self) -> f64 {
        self.beta0 / self.grid.dx
    }

    /// Advances both fields by `dt`.
    pub fn step(
        &mut self,
        vel: &dyn VelocityField,
        dt: f64,
        quad: &QuadratureRule,
        pool: Option<&rayon::ThreadPool>,
    ) -> Result<StepReport> {
        let beta = self.beta();
        let t_new = self.time + dt;

        let sl = semi_lagrangian_phi_update(&self.vof, &self.recons, vel, t_new, dt)?;
        let advanced = rk3_advance_vof(&self.vof, &self.phi, &self.recons, vel, self.time, dt, beta, quad, pool)?;

        let area = self.grid.cell_area();
        let mut vof = advanced;
        let (mut clipped, mut overshoot) = (0.0, 0.0f64);
        for (i, j) in self.grid.interior_cells() {
            let h = vof.at(i, j);
            let c = h.clamp(0.0, 1.0);
            if c != h {
                clipped += (h - c) * area;
                overshoot = overshoot.max((h - c).abs());
                *vof.at_mut(i, j) = c;
            }
        }
        vof.fill_ghosts();

        // freeze only band cells that actually received a traced value
        let frozen = tag_interface_cells(&vof).and(&sl.traced);
        let (phi, sweep) = if frozen.is_empty() {
            (sl.phi, SweepReport::default())
        } else {
            fast_sweep_reinit_with_vof(&sl.phi, &frozen, &vof)?
        };

        let recons = build_reconstructions(&phi, &vof, beta, quad, pool)?;
        self.mask = recons.mask(&self.grid);
        self.recons = recons;
        self.vof = vof;
        self.phi = phi;
        self.time = t_new;
        Ok(StepReport {
            dt,
            clipped_mass: clipped,
            overshoot,
            departure_clamped: sl.clamped,
            sweep,
        })
    }
}

/// Total fluid-1 volume `sum H̄ |Ω|` over interior cells.
pub fn total_mass(vof: &CellField) -> f64 {
    vof.interior_values().sum::<f64>() * vof.grid().cell_area()
}
