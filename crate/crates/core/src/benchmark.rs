//! Benchmark problems: Zalesak's slotted disk in solid-body rotation and the
//! Rider–Kothe single vortex, together with their exact initial fields, the
//! L1 error norm and the convergence-study driver.
//!
//! Both problems return the interface to its initial position at the final
//! time, so the exact reference is the initial VOF field on the same grid.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid2D, CellField, Point, DEFAULT_GHOSTS};
use crate::transport::{SchemeParams, SchemeState, StepReport, VelocityField};

pub use crate::transport::total_mass;

/// Depth of the quadtree used for initial area fractions.
pub const QUADTREE_DEPTH: u32 = 8;

/// Solid-body rotation `(y - 0.5, 0.5 - x)`, one revolution per `2 pi`.
pub fn zalesak_velocity(p: Point, _t: f64) -> (f64, f64) {
    (p.y - 0.5, 0.5 - p.x)
}

/// Single-vortex field of stream function
/// `sin²(pi x) sin²(pi y) cos(pi t / period) / pi`, with `u = dΨ/dy` and
/// `v = -dΨ/dx`.
pub fn vortex_velocity(p: Point, t: f64, period: f64) -> (f64, f64) {
    let (sx, cx) = (PI * p.x).sin_cos();
    let (sy, cy) = (PI * p.y).sin_cos();
    let c = (PI * t / period).cos();
    (2.0 * sx * sx * sy * cy * c, -2.0 * sx * cx * sy * sy * c)
}

/// Analytic velocity field of a benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VelocityKind {
    /// Solid-body rotation about `(0.5, 0.5)`.
    Rotation,
    /// Reversing single vortex with the given period.
    Vortex { period: f64 },
}

/// A [`VelocityKind`] bound to the domain it runs on, for the speed bound.
#[derive(Clone, Copy, Debug)]
pub struct BenchmarkVelocity {
    pub kind: VelocityKind,
    max_speed: f64,
}

impl BenchmarkVelocity {
    pub fn new(kind: VelocityKind, lo: Point, hi: Point) -> Self {
        let max_speed = match kind {
            VelocityKind::Rotation => {
                let c = Point::new(0.5, 0.5);
                [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)]
                    .iter()
                    .map(|&q| q.distance(c))
                    .fold(0.0, f64::max)
            }
            // |u| = sin²(pi x)|sin(2 pi y)| <= 1 on the axes of the vortex, and
            // the combined magnitude never exceeds it
            VelocityKind::Vortex { .. } => 1.0,
        };
        Self { kind, max_speed }
    }
}

impl VelocityField for BenchmarkVelocity {
    fn velocity(&self, p: Point, t: f64) -> (f64, f64) {
        match self.kind {
            VelocityKind::Rotation => zalesak_velocity(p, t),
            VelocityKind::Vortex { period } => vortex_velocity(p, t, period),
        }
    }

    fn max_speed(&self) -> f64 {
        self.max_speed
    }
}

/// Fluid-1 region of a benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    Disk {
        center: Point,
        radius: f64,
    },
    /// Disk minus the rectangle `|x - cx| <= half_width, y <= top`.
    SlottedDisk {
        center: Point,
        radius: f64,
        half_width: f64,
        top: f64,
    },
}

impl Geometry {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Geometry::Disk { center, radius } => p.distance(center) < radius,
            Geometry::SlottedDisk {
                center,
                radius,
                half_width,
                top,
            } => p.distance(center) < radius && !((p.x - center.x).abs() <= half_width && p.y <= top),
        }
    }

    /// Exact signed distance to the boundary, positive inside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match *self {
            Geometry::Disk { center, radius } => radius - p.distance(center),
            Geometry::SlottedDisk {
                center,
                radius,
                half_width,
                top,
            } => {
                let d = slotted_disk_distance(p, center, radius, half_width, top);
                if self.contains(p) {
                    d
                } else {
                    -d
                }
            }
        }
    }

    fn bounding_box(&self) -> (Point, Point) {
        let (c, r) = match *self {
            Geometry::Disk { center, radius } | Geometry::SlottedDisk { center, radius, .. } => (center, radius),
        };
        (Point::new(c.x - r, c.y - r), Point::new(c.x + r, c.y + r))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Geometry::Disk { radius, .. } if !(radius > 0.0) => {
                Err(Error::Config(format!("disk radius must be positive, got {radius}")))
            }
            Geometry::SlottedDisk {
                radius,
                half_width,
                top,
                center,
            } => {
                if !(radius > 0.0 && half_width > 0.0 && half_width < radius) {
                    return Err(Error::Config("slot must be narrower than the disk".into()));
                }
                if !(top > center.y - radius && top < center.y + radius) {
                    return Err(Error::Config("slot top must lie inside the disk".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Unsigned distance to the boundary of the slotted disk: the circle minus
/// the removed lower arc, the two slot walls and the slot roof.
fn slotted_disk_distance(p: Point, c: Point, r: f64, w: f64, top: f64) -> f64 {
    let bottom = c.y - (r * r - w * w).sqrt();
    let left_foot = Point::new(c.x - w, bottom);
    let right_foot = Point::new(c.x + w, bottom);

    // the arc excludes the angular window of the slot mouth around -pi/2
    let alpha = (w / r).asin();
    let theta = (p.y - c.y).atan2(p.x - c.x);
    let in_mouth = (theta + 0.5 * PI).abs() <= alpha && p.distance(c) > 0.0;
    let arc = if in_mouth {
        p.distance(left_foot).min(p.distance(right_foot))
    } else {
        (p.distance(c) - r).abs()
    };

    let left = segment_distance(p, left_foot, Point::new(c.x - w, top));
    let right = segment_distance(p, right_foot, Point::new(c.x + w, top));
    let roof = segment_distance(p, Point::new(c.x - w, top), Point::new(c.x + w, top));
    arc.min(left).min(right).min(roof)
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let len2 = ex * ex + ey * ey;
    let t = (((p.x - a.x) * ex + (p.y - a.y) * ey) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * ex, a.y + t * ey))
}

/// A benchmark problem.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkCase {
    pub name: String,
    pub domain: (Point, Point),
    pub geometry: Geometry,
    pub velocity: VelocityKind,
    pub final_time: f64,
    pub sizes: Vec<usize>,
}

impl BenchmarkCase {
    /// Slotted disk of radius 0.15 at `(0.5, 0.75)` with slot
    /// `|x - 0.5| <= 0.025, y <= 0.85`, one revolution on the unit square.
    pub fn zalesak() -> Self {
        Self {
            name: "zalesak".into(),
            domain: (Point::new(0.0, 0.0), Point::new(1.0, 1.0)),
            geometry: Geometry::SlottedDisk {
                center: Point::new(0.5, 0.75),
                radius: 0.15,
                half_width: 0.025,
                top: 0.85,
            },
            velocity: VelocityKind::Rotation,
            final_time: 2.0 * PI,
            sizes: vec![100],
        }
    }

    /// Circle of radius 0.15 at `(0.5, 0.75)` stretched by the vortex and
    /// restored at `T = 8`.
    pub fn rider_kothe() -> Self {
        Self {
            name: "rider_kothe".into(),
            domain: (Point::new(0.0, 0.0), Point::new(1.0, 1.0)),
            geometry: Geometry::Disk {
                center: Point::new(0.5, 0.75),
                radius: 0.15,
            },
            velocity: VelocityKind::Vortex { period: 8.0 },
            final_time: 8.0,
            sizes: vec![64, 128, 256],
        }
    }

    /// Looks a case up by name; `vortex` is accepted for `rider_kothe`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "zalesak" => Ok(Self::zalesak()),
            "rider_kothe" | "vortex" => Ok(Self::rider_kothe()),
            other => Err(Error::Config(format!("unknown case '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(hi.x > lo.x && hi.y > lo.y) {
            return Err(Error::Config("empty domain".into()));
        }
        self.geometry.validate()?;
        let (blo, bhi) = self.geometry.bounding_box();
        if blo.x < lo.x || blo.y < lo.y || bhi.x > hi.x || bhi.y > hi.y {
            return Err(Error::Config("geometry does not fit inside the domain".into()));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(Error::Config(format!("final time must be non-negative, got {}", self.final_time)));
        }
        Ok(())
    }

    /// `n x n` grid over the case domain.
    pub fn grid(&self, n: usize) -> Result<CartesianGrid2D> {
        let (lo, hi) = self.domain;
        CartesianGrid2D::new(n, n, lo.x, lo.y, hi.x, hi.y, DEFAULT_GHOSTS)
    }

    pub fn velocity_field(&self) -> BenchmarkVelocity {
        BenchmarkVelocity::new(self.velocity, self.domain.0, self.domain.1)
    }
}

/// Exact initial fields: area fractions by quadtree subdivision and signed
/// distances at cell centers.
pub fn init_fields(case: &BenchmarkCase, grid: &CartesianGrid2D) -> Result<(CellField, CellField)> {
    case.validate()?;
    let geom = case.geometry;
    let area = grid.cell_area();
    let vof = CellField::from_fn(grid, |i, j| {
        let (lo, hi) = grid.cell_bounds(i, j);
        area_fraction(&geom, lo, hi, QUADTREE_DEPTH) / area
    });
    let phi = CellField::from_fn(grid, |i, j| geom.signed_distance(grid.center_unchecked(i, j)));
    Ok((vof, phi))
}

/// Area of `geom` inside the box, refining only boxes the boundary can cross.
fn area_fraction(geom: &Geometry, lo: Point, hi: Point, depth: u32) -> f64 {
    let c = Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let half_diag = 0.5 * (hi.x - lo.x).hypot(hi.y - lo.y);
    let sd = geom.signed_distance(c);
    if sd >= half_diag {
        return box_area;
    }
    if sd <= -half_diag {
        return 0.0;
    }
    if depth == 0 {
        return if geom.contains(c) { box_area } else { 0.0 };
    }
    [
        (lo, c),
        (Point::new(c.x, lo.y), Point::new(hi.x, c.y)),
        (Point::new(lo.x, c.y), Point::new(c.x, hi.y)),
        (c, hi),
    ]
    .iter()
    .map(|&(a, b)| area_fraction(geom, a, b, depth - 1))
    .sum()
}

/// `sum |H - H_exact| |cell|` over interior cells.
pub fn l1_error(vof: &CellField, exact: &CellField) -> Result<f64> {
    if vof.grid() != exact.grid() {
        return Err(Error::GridMismatch);
    }
    let diff: f64 = vof.interior_values().zip(exact.interior_values()).map(|(a, b)| (a - b).abs()).sum();
    Ok(diff * vof.grid().cell_area())
}

/// One line of the mass history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassRecord {
    pub step: usize,
    pub time: f64,
    pub total_mass: f64,
    /// Cumulative mass removed by clipping.
    pub clipped_mass: f64,
}

/// Fields captured at a requested output time.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub state: SchemeState,
}

/// Optional extras for [`run_case`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Times in `(0, T)` at which the state is captured; steps are shortened
    /// to land on them exactly.
    pub snapshot_times: Vec<f64>,
    /// Overrides the case's final time.
    pub final_time: Option<f64>,
}

/// Outcome of one benchmark run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub case: String,
    pub n: usize,
    pub initial: SchemeState,
    pub state: SchemeState,
    pub exact: CellField,
    pub l1: f64,
    pub mass_history: Vec<MassRecord>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// Largest pre-clip excursion outside `[0, 1]` over the run.
    pub max_overshoot: f64,
    pub departures_clamped: usize,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn initial_mass(&self) -> f64 {
        self.mass_history[0].total_mass
    }

    /// Largest `|m(t) - m(0)| / m(0)` over the history.
    pub fn max_relative_mass_drift(&self) -> f64 {
        let m0 = self.initial_mass();
        self.mass_history
            .iter()
            .map(|r| ((r.total_mass - m0) / m0).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds the worker pool for `threads` workers; `None` below two.
pub fn thread_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads < 2 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))
}

/// Runs `case` on an `n x n` grid to its final time.
pub fn run_case(case: &BenchmarkCase, n: usize, params: &SchemeParams, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let grid = case.grid(n)?;
    let (vof, phi) = init_fields(case, &grid)?;
    let exact = vof.clone();
    let pool = thread_pool(params.threads)?;
    let pool = pool.as_ref();
    let quad = &params.quad;
    if !(params.cfl > 0.0 && params.cfl < 1.0) {
        return Err(Error::Config(format!("CFL must lie in (0, 1), got {}", params.cfl)));
    }

    let mut state = SchemeState::with_pool(vof, phi, params.beta0, quad, pool)?;
    let initial = state.clone();
    let vel = case.velocity_field();
    let final_time = opts.final_time.unwrap_or(case.final_time);
    let dt_max = params.cfl * grid.dx.min(grid.dy) / vel.max_speed();

    let mut targets: Vec<(f64, bool)> = opts
        .snapshot_times
        .iter()
        .filter(|&&t| t > 0.0 && t < final_time)
        .map(|&t| (t, true))
        .collect();
    targets.sort_by(|a, b| a.0.total_cmp(&b.0));
    targets.dedup_by(|a, b| a.0 == b.0);
    targets.push((final_time, false));

    let mut mass_history = vec![MassRecord {
        step: 0,
        time: 0.0,
        total_mass: total_mass(&state.vof),
        clipped_mass: 0.0,
    }];
    let mut snapshots = Vec::new();
    let (mut steps, mut clipped, mut overshoot, mut clamped) = (0, 0.0, 0.0f64, 0);

    for &(target, is_snapshot) in &targets {
        while state.time < target {
            let remaining = target - state.time;
            // a step within rounding of the target lands on it exactly
            let landing = remaining <= dt_max * (1.0 + 1e-9);
            let dt = if landing { remaining } else { dt_max };
            let report: StepReport = state.step(&vel, dt, quad, pool).map_err(|e| Error::Step {
                step: steps + 1,
                time: state.time,
                source: Box::new(e),
            })?;
            if landing {
                state.time = target;
            }
            steps += 1;
            clipped += report.clipped_mass;
            overshoot = overshoot.max(report.overshoot);
            clamped += report.departure_clamped;
            mass_history.push(MassRecord {
                step: steps,
                time: state.time,
                total_mass: total_mass(&state.vof),
                clipped_mass: clipped,
            });
        }
        if is_snapshot {
            snapshots.push(Snapshot {
                time: target,
                state: state.clone(),
            });
        }
    }

    let l1 = l1_error(&state.vof, &exact)?;
    Ok(RunReport {
        case: case.name.clone(),
        n,
        initial,
        state,
        exact,
        l1,
        mass_history,
        snapshots,
        steps,
        max_overshoot: overshoot,
        departures_clamped: clamped,
        wall_time: start.elapsed(),
    })
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub l1: f64,
    /// Observed order against the previous (coarser) row.
    pub order: Option<f64>,
}

/// Observed orders `log(E_coarse / E_fine) / log(n_fine / n_coarse)`, which
/// is `log2(E_coarse / E_fine)` for grid doubling.
pub fn convergence_rows(results: &[(usize, f64)]) -> Vec<ConvergenceRow> {
    results
        .iter()
        .enumerate()
        .map(|(k, &(n, l1))| ConvergenceRow {
            n,
            l1,
            order: (k > 0).then(|| {
                let (nc, ec) = results[k - 1];
                (ec / l1).ln() / (n as f64 / nc as f64).ln()
            }),
        })
        .collect()
}

/// Runs every grid size of `case` and tabulates errors and orders.
pub fn convergence_table(
    case: &BenchmarkCase,
    params: &SchemeParams,
    opts: &RunOptions,
) -> Result<(Vec<ConvergenceRow>, Vec<RunReport>)> {
    if case.sizes.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two grid sizes".into()));
    }
    let reports = case
        .sizes
        .iter()
        .map(|&n| run_case(case, n, params, opts))
        .collect::<Result<Vec<_>>>()?;
    let rows = convergence_rows(&reports.iter().map(|r| (r.n, r.l1)).collect::<Vec<_>>());
    Ok((rows, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureRule;
    use approx::assert_abs_diff_eq;

    #[test]
    fn velocity_fields() {
        assert_eq!(zalesak_velocity(Point::new(0.5, 0.5), 0.0), (0.0, 0.0));
        assert_eq!(zalesak_velocity(Point::new(0.5, 0.75), 3.0), (0.25, 0.0));
        for &t in &[0.0, 1.3, 4.0, 7.9] {
            for k in 0..=10 {
                let s = k as f64 / 10.0;
                assert!(vortex_velocity(Point::new(0.0, s), t, 8.0).0.abs() < 1e-15);
                assert!(vortex_velocity(Point::new(1.0, s), t, 8.0).0.abs() < 1e-15);
                assert!(vortex_velocity(Point::new(s, 0.0), t, 8.0).1.abs() < 1e-15);
                assert!(vortex_velocity(Point::new(s, 1.0), t, 8.0).1.abs() < 1e-15);
            }
        }
        let p = Point::new(0.3, 0.6);
        let (u, v) = vortex_velocity(p, 4.0, 8.0);
        assert!(u.abs() < 1e-16 && v.abs() < 1e-16);
        let (u0, v0) = vortex_velocity(p, 0.0, 8.0);
        let (u8, v8) = vortex_velocity(p, 8.0, 8.0);
        assert_abs_diff_eq!(u8, -u0, epsilon = 1e-15);
        assert_abs_diff_eq!(v8, -v0, epsilon = 1e-15);
    }

    #[test]
    fn vortex_is_divergence_free() {
        let h = 1e-5;
        for &(x, y) in &[(0.2, 0.3), (0.7, 0.1), (0.5, 0.75)] {
            let f = |x, y| vortex_velocity(Point::new(x, y), 1.0, 8.0);
            let div = (f(x + h, y).0 - f(x - h, y).0 + f(x, y + h).1 - f(x, y - h).1) / (2.0 * h);
            assert!(div.abs() < 1e-8);
        }
    }

    #[test]
    fn speed_bounds() {
        let z = BenchmarkCase::zalesak().velocity_field();
        assert_abs_diff_eq!(z.max_speed(), 0.5f64.sqrt(), epsilon = 1e-15);
        let v = BenchmarkCase::rider_kothe().velocity_field();
        let mut seen = 0.0f64;
        for a in 0..=200 {
            for b in 0..=200 {
                let (u, w) = v.velocity(Point::new(a as f64 / 200.0, b as f64 / 200.0), 0.0);
                seen = seen.max(u.hypot(w));
            }
        }
        assert!(seen <= v.max_speed() + 1e-12);
    }

    #[test]
    fn slotted_disk_distance_pieces() {
        let g = BenchmarkCase::zalesak().geometry;
        // top of the disk
        assert_abs_diff_eq!(g.signed_distance(Point::new(0.5, 0.95)), -0.05, epsilon = 1e-15);
        // inside the slot, centered: nearest walls are 0.025 away
        assert_abs_diff_eq!(g.signed_distance(Point::new(0.5, 0.7)), -0.025, epsilon = 1e-15);
        // just above the roof
        assert_abs_diff_eq!(g.signed_distance(Point::new(0.5, 0.86)), 0.01, epsilon = 1e-15);
        // left half of the disk, nearest to the left wall
        assert_abs_diff_eq!(g.signed_distance(Point::new(0.45, 0.75)), 0.025, epsilon = 1e-15);
        // below the slot mouth, nearest to a foot of the arc
        let foot = Point::new(0.525, 0.75 - (0.15f64 * 0.15 - 0.025 * 0.025).sqrt());
        let p = Point::new(0.5, 0.55);
        assert_abs_diff_eq!(g.signed_distance(p), -p.distance(foot), epsilon = 1e-15);
        // far outside, nearest to the arc
        assert_abs_diff_eq!(g.signed_distance(Point::new(0.2, 0.75)), -0.15, epsilon = 1e-15);
    }

    #[test]
    fn signed_distance_is_one_lipschitz() {
        let g = BenchmarkCase::zalesak().geometry;
        let h = 1e-3;
        for a in 0..60 {
            for b in 0..60 {
                let p = Point::new(0.3 + a as f64 * 0.4 / 60.0, 0.5 + b as f64 * 0.45 / 60.0);
                let q = Point::new(p.x + h, p.y);
                assert!((g.signed_distance(p) - g.signed_distance(q)).abs() <= h * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn centered_cell_on_the_circle_matches_segment_area() {
        // cell [0.7, 0.8] x [0.5, 0.6] is cut through its center by the circle
        let r = 0.25;
        let case = BenchmarkCase {
            geometry: Geometry::Disk {
                center: Point::new(0.5, 0.55),
                radius: r,
            },
            ..BenchmarkCase::rider_kothe()
        };
        let grid = CartesianGrid2D::unit_square(10).unwrap();
        let (vof, phi) = init_fields(&case, &grid).unwrap();
        assert_abs_diff_eq!(phi.at(7, 5), 0.0, epsilon = 1e-15);
        // exact: integral over u in [-0.05, 0.05] of (0.5 + sqrt(r² - u²) - 0.7)
        let f = |u: f64| 0.5 * (u * (r * r - u * u).sqrt() + r * r * (u / r).asin());
        let exact = (2.0 * f(0.05) - 0.2 * 0.1) / 0.01;
        assert!((vof.at(7, 5) - exact).abs() < 2f64.powi(-10), "{} vs {exact}", vof.at(7, 5));
        assert!((vof.at(7, 5) - 0.5).abs() < 0.03);
    }

    #[test]
    fn disk_mass_matches_area() {
        let case = BenchmarkCase::rider_kothe();
        let grid = case.grid(64).unwrap();
        let (vof, phi) = init_fields(&case, &grid).unwrap();
        assert_abs_diff_eq!(total_mass(&vof), PI * 0.15 * 0.15, epsilon = 1e-4);
        let (i, j) = grid.locate_cell(Point::new(0.5, 0.75)).unwrap();
        assert_eq!(vof.at(i, j), 1.0);
        assert!(phi.at(i, j) > 0.0);
        assert_eq!(vof.at(2, 2), 0.0);
        assert!(phi.at(2, 2) < 0.0);
    }

    #[test]
    fn geometry_outside_domain_is_rejected() {
        let case = BenchmarkCase {
            geometry: Geometry::Disk {
                center: Point::new(0.5, 0.75),
                radius: 0.5,
            },
            ..BenchmarkCase::zalesak()
        };
        let grid = case.grid(16).unwrap();
        assert!(matches!(init_fields(&case, &grid), Err(Error::Config(_))));
    }

    #[test]
    fn l1_norm() {
        let g = CartesianGrid2D::unit_square(64).unwrap();
        let a = CellField::new(&g, 0.25);
        assert_eq!(l1_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        *b.at_mut(10, 20) += 0.5;
        assert_abs_diff_eq!(l1_error(&a, &b).unwrap(), 0.5 / 4096.0, epsilon = 1e-18);
        let other = CellField::new(&CartesianGrid2D::unit_square(32).unwrap(), 0.25);
        assert!(matches!(l1_error(&a, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn zero_time_run_is_exact() {
        let params = SchemeParams {
            quad: QuadratureRule::tensor(3),
            ..SchemeParams::default()
        };
        let opts = RunOptions {
            final_time: Some(0.0),
            ..RunOptions::default()
        };
        let report = run_case(&BenchmarkCase::zalesak(), 32, &params, &opts).unwrap();
        assert_eq!(report.steps, 0);
        assert_eq!(report.l1, 0.0);
        assert_eq!(report.mass_history.len(), 1);
    }

    #[test]
    fn short_run_lands_on_targets() {
        let params = SchemeParams {
            quad: QuadratureRule::tensor(3),
            ..SchemeParams::default()
        };
        let opts = RunOptions {
            snapshot_times: vec![0.05, 0.02],
            final_time: Some(0.1),
        };
        let report = run_case(&BenchmarkCase::rider_kothe(), 32, &params, &opts).unwrap();
        assert_eq!(report.state.time, 0.1);
        assert_eq!(report.mass_history.len(), report.steps + 1);
        let times: Vec<f64> = report.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.02, 0.05]);
        assert!(report.mass_history.windows(2).all(|w| w[1].time > w[0].time));
    }

    #[test]
    fn orders() {
        let rows = convergence_rows(&[(64, 1.28e-2), (128, 1.38e-3), (256, 3.89e-4)]);
        assert_eq!(rows[0].order, None);
        assert_abs_diff_eq!(rows[1].order.unwrap(), (1.28e-2f64 / 1.38e-3).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(rows[2].order.unwrap(), (1.38e-3f64 / 3.89e-4).log2(), epsilon = 1e-12);
        let flat = convergence_rows(&[(32, 1e-3), (64, 1e-3)]);
        assert_eq!(flat[1].order, Some(0.0));
    }
}
